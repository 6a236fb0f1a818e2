# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import print_function, unicode_literals

__author__     = 'The wisig developers'
__copyright__  = 'Copyright 2026, The wisig developers'
__credits__    = [
    'The wisig developers',
]
__license__    = 'MIT'
__maintainer__ = 'The wisig developers'
__status__     = 'Beta'
__docformat__  = 'plaintext'

__all__      = ['wisig']
__version__  = '0.5.0'

from .datamodel import (
    SignatureRecord, Dataset, StandardScaler, SynthConfig,
    fit_scaler, apply_scaler, synth_generate
)
from .dichotomy import (
    DissimilaritySample, DissimilaritySet, PairingPlan,
    dt, build_training_set, build_query_set, count_pairs, count_training_pairs
)
from .prototype import CondensationResult, condense
from .hardness import HardnessScore, kdn, classify_forgery_quality
from .dichotomizer import (
    KernelParams, DichotomizerModel, train, decision_value, grid_search,
    save_model, load_model
)
from .verification import VerificationOutcome, fuse, verify
from .evaluation import (
    WriterEvaluation, IhAccuracyTable, EvaluationReport, ExploitationPlan,
    user_threshold_eer, global_report, ih_accuracy_table, transfer_eval
)
from .neighborhood import NeighborhoodDump, dump_neighborhood
from .parser import FeatureParser, load_features, save_features
from .experiment import Experiment, ExperimentConfig
from .exceptions import (
    WisigError, FeatureFileError, DatasetError, DimensionError, EmptyInputError,
    ProtocolError, UnsupportedParameterError, SingleClassError, ConvergenceError,
    ConfigError, ModelFormatError
)
