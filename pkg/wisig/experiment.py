# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import print_function, unicode_literals
from six import text_type
from collections import OrderedDict
import codecs
import copy
import json
import os

from . import __version__
from . import utils
from .datamodel import SynthConfig, fit_scaler, synth_generate
from .dichotomizer import (
    C_GRID, GAMMA_GRID, DEFAULT_C, DEFAULT_GAMMA, DEFAULT_TOL, DEFAULT_MAX_PASSES,
    DEFAULT_CACHE_SIZE, KernelParams, grid_search_table, select_grid_params, train
)
from .dichotomy import PairingPlan, build_training_set, SELECT_LOWEST, SELECT_RANDOM
from .evaluation import ExploitationPlan, evaluate_exploitation, merge_reports, transfer_eval
from .hardness import DEFAULT_K
from .parser import load_features
from .protocols import (
    SEGMENT_FIRST, SEGMENT_FIVE_BY_TWO, SEGMENTATIONS, check_disjoint, pairing_preset,
    split_first, split_folds, split_validation
)
from .prototype import condense
from .verification import FUSION_KINDS, MAX, fusion_kind
from .exceptions import ConfigError, ProtocolError, UnsupportedParameterError

# Scaler policies.
SCALER_STANDARD = "standard"
SCALER_NONE     = "none"


class ExperimentConfig(object):
    """Every knob of an experiment.

    A configuration is a flat JSON object. Missing keys take the defaults in
    ``ExperimentConfig.DEFAULTS``; unknown keys are an error. A run manifest
    (which embeds the configuration under ``config``) is accepted as well, so
    a finished run can be repeated from its manifest.

    Data comes from, in order of preference: ``development_features`` plus
    ``exploitation_features``; or a single dataset, ``features`` or else the
    synthetic generator configured by ``synth``. A single dataset is split
    by ``segmentation``: ``first`` holds out the lowest
    ``exploitation_writers`` ids; ``5x2`` uses the ten splits of five seeded
    two-fold repetitions, replication ``i`` running on split
    ``(fold + i) % 10``.
    """

    DEFAULTS = OrderedDict([
        ("name",                   "wisig"),
        ("features",               None),
        ("development_features",   None),
        ("exploitation_features",  None),
        ("transfer_features",      None),
        ("synth",                  {}),
        ("exploitation_writers",   10),
        ("segmentation",           SEGMENT_FIRST),
        ("fold",                   0),
        ("validation_writers",     0),
        ("pairing",                None),
        ("genuines_per_writer",    14),
        ("random_forgery_writers", 7),
        ("selection",              SELECT_LOWEST),
        ("exploitation",           {"preset": "gpds"}),
        ("transfer_exploitation",  None),
        ("scaler",                 SCALER_STANDARD),
        ("condense",               True),
        ("cnn_k",                  1),
        ("gamma",                  DEFAULT_GAMMA),
        ("c",                      DEFAULT_C),
        ("grid_search",            False),
        ("c_grid",                 list(C_GRID)),
        ("gamma_grid",             list(GAMMA_GRID)),
        ("tol",                    DEFAULT_TOL),
        ("max_passes",             DEFAULT_MAX_PASSES),
        ("cache_size",             DEFAULT_CACHE_SIZE),
        ("kdn_k",                  DEFAULT_K),
        ("fusion",                 MAX),
        ("fusions",                list(FUSION_KINDS)),
        ("reference_counts",       [1, 5, 12]),
        ("reference_seed",         None),
        ("replications",           10),
        ("seed",                   0),
        ("out",                    "out"),
    ])

    def __init__(self, **kwargs):
        self._values = copy.deepcopy(self.DEFAULTS)
        self.update(kwargs)

    def __getattr__(self, name):
        values = self.__dict__.get("_values")
        if values is not None and name in values:
            return values[name]
        raise AttributeError(name)

    def __repr__(self):
        return "<ExperimentConfig {} hash={}>".format(self.name, self.hash()[:12])

    def update(self, values):
        """Override fields; ``None`` values leave a field untouched."""
        unknown = [key for key in values if key not in self.DEFAULTS]
        if unknown:
            raise ConfigError("unknown configuration key(s): {}".format(", ".join(sorted(unknown))))
        for key, value in values.items():
            if value is not None:
                self._values[key] = copy.deepcopy(value)
        return self

    @classmethod
    def from_file(cls, path):
        """Load a configuration (or a run manifest) from a JSON file."""
        if not os.path.isfile(path):
            raise IOError("no such file: {}".format(path))
        with codecs.open(path, "r", "utf-8") as fh:
            try:
                data = json.load(fh, object_pairs_hook=OrderedDict)
            except ValueError as e:
                raise ConfigError("{} is not valid JSON: {}".format(path, e))
        if not isinstance(data, dict):
            raise ConfigError("{} must hold a JSON object".format(path))
        if "config" in data and "config_hash" in data:
            data = data["config"]
        return cls(**data)

    def to_dict(self):
        return copy.deepcopy(self._values)

    def hash(self):
        return utils.config_hash(self._values)

    def pairing_plan(self, seed=None):
        seed = self.seed if seed is None else seed
        if self.pairing:
            return pairing_preset(self.pairing, seed=seed, selection=self.selection)
        return PairingPlan(self.genuines_per_writer, self.random_forgery_writers,
                           seed=seed, selection=self.selection)

    def exploitation_plan(self, transfer=False):
        data = self.transfer_exploitation if transfer and self.transfer_exploitation \
            else self.exploitation
        if isinstance(data, text_type):
            data = {"preset": data}
        return ExploitationPlan.from_dict(data)

    def kernel_params(self):
        return KernelParams(self.gamma, self.c)

    def synth_config(self):
        return SynthConfig.from_dict(self.synth)

    def validate(self):
        """Check the whole configuration before anything is computed."""
        try:
            for key in ("exploitation_writers", "validation_writers", "replications", "seed",
                        "max_passes", "cache_size", "kdn_k", "cnn_k", "fold"):
                int(self._values[key])
            float(self.tol)
        except (TypeError, ValueError) as e:
            raise ConfigError("invalid numeric setting: {}".format(e))
        if self.scaler not in (SCALER_STANDARD, SCALER_NONE):
            raise ConfigError("scaler must be '{}' or '{}'".format(SCALER_STANDARD, SCALER_NONE))
        if self.selection not in (SELECT_LOWEST, SELECT_RANDOM):
            raise ConfigError("selection must be '{}' or '{}'".format(SELECT_LOWEST, SELECT_RANDOM))
        if int(self.replications) < 1:
            raise ConfigError("replications must be at least 1")
        if int(self.kdn_k) < 1:
            raise ConfigError("kdn_k must be at least 1")
        if int(self.cnn_k) != 1:
            raise UnsupportedParameterError("condensed nearest neighbors supports k=1 only")
        if not float(self.tol) > 0:
            raise ConfigError("tol must be positive")
        if self.segmentation not in SEGMENTATIONS:
            raise ConfigError("segmentation must be one of {}".format(", ".join(SEGMENTATIONS)))
        if not 0 <= int(self.fold) < 10:
            raise ConfigError("fold must lie in 0..9")
        if self.segmentation == SEGMENT_FIVE_BY_TWO and self.development_features:
            raise ConfigError("segmentation '{}' splits a single dataset; it cannot be used "
                              "with development_features".format(SEGMENT_FIVE_BY_TWO))
        fusion_kind(self.fusion)
        for kind in self.fusions:
            fusion_kind(kind)
        pairing = self.pairing_plan()
        self.kernel_params()
        if self.grid_search:
            if not self.c_grid or not self.gamma_grid:
                raise ConfigError("grid search needs non-empty c_grid and gamma_grid")
            for value in list(self.c_grid) + list(self.gamma_grid):
                KernelParams(value, 1.0)
            # Validation samples are paired like training samples.
            if int(self.validation_writers) <= pairing.random_forgery_writers:
                raise ConfigError("grid search needs more validation writers than random "
                                  "forgery writers ({} <= {})".format(
                                      self.validation_writers, pairing.random_forgery_writers))
        plan = self.exploitation_plan()
        self.exploitation_plan(transfer=True)
        counts = [int(c) for c in self.reference_counts]
        if not counts or min(counts) < 1:
            raise ConfigError("reference_counts must be positive")
        if max(counts) > plan.references:
            raise ConfigError("reference count {} exceeds the {} references of the "
                              "exploitation plan".format(max(counts), plan.references))
        if not (self.development_features or self.features):
            self.synth_config()
        if bool(self.development_features) != bool(self.exploitation_features):
            raise ConfigError("development_features and exploitation_features go together")
        return self


class Experiment(object):
    """The full verification pipeline, replicated.

    Each replication draws its own seed from the master seed and runs:
    dichotomy transformation of the development set, standardization,
    condensation, training (or grid search then training) and the
    generalization phase on the exploitation set.

    Parameters:
        config (ExperimentConfig): The validated configuration.
        debug (bool): Set to ``True`` to enable verbose logging to standard
            out.
        log (str or fh): A path or a filehandle opened in write mode to
            direct debug output to instead of ``STDOUT``.
        keep_queries (bool): Keep the per-query evaluations in the
            per-replication reports (``reports``).
    """

    def __init__(self, config, debug=False, log=None, keep_queries=False):
        self.config = config.validate()
        self._debug = debug
        self._log   = log
        if log is not None:
            if type(log) in [text_type, str]:
                self._log = codecs.open(log, "a", "utf-8")

        self.development = None
        self.exploitation = None
        self._folds = None
        self.keep_queries = keep_queries
        self.models = []
        self.training_sets = []
        self.reports = []
        self.report = None
        self._say("Experiment {} initialized (config {}).".format(
            config.name, config.hash()[:12]))

    @classmethod
    def VERSION(self=None):
        return __version__

    def _say(self, message):
        if self._debug and not self._log:
            print("[wisig] {}".format(message))
        if self._log:
            self._log.write("[wisig] " + message + "\n")

    def _warn(self, message, fname='', lineno=0):
        header = "[wisig]"
        if self._debug:
            header = "[wisig::Warning]"
        if len(fname) and lineno > 0:
            print(header, message, "at", fname, "line", lineno)
        else:
            print(header, message)

    def close(self):
        if self._log is not None:
            self._log.flush()

    def seeds(self):
        """The seed of every replication."""
        return [utils.derive_seed(self.config.seed, index)
                for index in range(int(self.config.replications))]

    def _load(self, path, split):
        return load_features(
            path, split=split,
            on_debug=lambda message: self._say(message),
            on_warn=lambda message, filename='', lineno=0: self._warn(message, filename, lineno),
        )

    def load_data(self):
        """Load (or generate) the development and exploitation sets."""
        if self.development is not None:
            return self.development, self.exploitation
        config = self.config
        if config.development_features:
            self.development = self._load(config.development_features, "development")
            self.exploitation = self._load(config.exploitation_features, "exploitation")
            check_disjoint(self.development, self.exploitation)
        else:
            if config.features:
                dataset = self._load(config.features, "development")
            else:
                dataset = synth_generate(config.synth_config(), config.seed)
                self._say("Generated {}".format(dataset))
            if config.segmentation == SEGMENT_FIVE_BY_TWO:
                self._folds = split_folds(dataset, seed=config.seed)
                self.development, self.exploitation = self._folds[int(config.fold)]
            else:
                self.development, self.exploitation = split_first(
                    dataset, config.exploitation_writers)
        self._say("Development: {}; exploitation: {}".format(self.development, self.exploitation))
        return self.development, self.exploitation

    def segment(self, index):
        """The ``(development, exploitation)`` pair replication ``index`` runs on."""
        development, exploitation = self.load_data()
        if self._folds is None:
            return development, exploitation
        return self._folds[(int(self.config.fold) + index) % len(self._folds)]

    def fit(self, development, seed):
        """Train one dichotomizer on a development set.

        Returns:
            tuple: ``(model, training, info)`` where ``training`` is the
            standardized (condensed) training set and ``info`` holds the
            condensation stats, the kernel params and the grid table.
        """
        config = self.config
        plan = config.pairing_plan(seed)
        if config.grid_search:
            development, validation = split_validation(development, config.validation_writers,
                                                       seed=seed)

        raw = build_training_set(development, plan)
        positives, negatives = raw.class_counts()
        self._say("Training set: {} positive, {} negative samples".format(positives, negatives))
        scaler = fit_scaler(raw) if config.scaler == SCALER_STANDARD else None
        training = raw.standardized(scaler)

        stats = None
        if config.condense:
            result = condense(training, k=config.cnn_k, seed=seed, say=self._say)
            stats = result.stats(len(training))
            training = training.subset(result.retained_indices)
            self._say("Condensed to {} samples in {} passes".format(
                stats["retained_size"], stats["passes"]))
        if len(training) < int(config.kdn_k):
            raise ProtocolError(
                "the training set has {} samples after condensation, fewer than the kDN "
                "neighborhood size kdn_k={}; instance hardness cannot be measured (lower "
                "kdn_k, disable condensation or use data with more class overlap)".format(
                    len(training), config.kdn_k))

        grid = None
        params = config.kernel_params()
        if config.grid_search:
            validation = build_training_set(validation, plan).standardized(scaler)
            grid = grid_search_table(training, validation, config.c_grid, config.gamma_grid,
                                     tol=config.tol, max_passes=config.max_passes, seed=seed,
                                     scaler=scaler, cache_size=config.cache_size,
                                     say=self._say, warn=self._warn)
            params = select_grid_params(grid)
            self._say("Grid search picked gamma={} C={}".format(params.gamma, params.c))

        model = train(training, params, tol=config.tol, max_passes=config.max_passes,
                      seed=seed, scaler=scaler, cache_size=config.cache_size, say=self._say)
        info = OrderedDict([("condensation", stats),
                            ("kernel", OrderedDict([("gamma", params.gamma), ("c", params.c)])),
                            ("grid", grid)])
        return model, training, info

    def _evaluate(self, model, training, dataset, plan, seed, index, transfer=False):
        config = self.config
        kwargs = dict(
            training=training, reference_counts=config.reference_counts,
            fusion=config.fusion, fusions=config.fusions, kdn_k=config.kdn_k, seed=seed,
            reference_seed=config.reference_seed, replication=index, name=config.name,
            keep_queries=self.keep_queries, say=self._say,
        )
        if transfer:
            return transfer_eval(model, dataset, plan, **kwargs)
        return evaluate_exploitation(model, dataset, plan, **kwargs)

    def _replicate(self, plan, foreign=None):
        self.models = []
        self.training_sets = []
        self.reports = reports = []
        for index, seed in enumerate(self.seeds()):
            self._say("Replication {} (seed {})".format(index, seed))
            development, exploitation = self.segment(index)
            model, training, info = self.fit(development, seed)
            self.models.append(model)
            self.training_sets.append(training)
            if foreign is None:
                report = self._evaluate(model, training, exploitation, plan, seed, index)
            else:
                report = self._evaluate(model, training, foreign, plan, seed, index,
                                        transfer=True)
            report.condensation.append(info["condensation"])
            report.kernel.append(info["kernel"])
            if info["grid"] is not None:
                report.grid.append(info["grid"])
            self._say("Replication {}: EER {} = {:.4f}".format(
                index, report.headline, report.global_eer()))
            reports.append(report)
        self.report = merge_reports(reports, name=self.config.name)
        return self.report

    def run(self):
        """Run every replication and merge the reports.

        Returns:
            EvaluationReport
        """
        return self._replicate(self.config.exploitation_plan())

    def transfer(self, foreign=None):
        """Train on the development set and evaluate on a foreign dataset.

        Parameters:
            foreign (Dataset): The target dataset; defaults to the one named
                by ``transfer_features``.

        Returns:
            EvaluationReport
        """
        if foreign is None:
            if not self.config.transfer_features:
                raise ConfigError("transfer needs a foreign dataset (transfer_features)")
            foreign = self._load(self.config.transfer_features, "exploitation")
        return self._replicate(self.config.exploitation_plan(transfer=True), foreign=foreign)

    def manifest(self, command, argv=None, extra=None):
        """The run manifest: command, configuration, its hash, seeds and
        package versions."""
        data = OrderedDict([
            ("command", command),
            ("argv", list(argv or [])),
            ("config", self.config.to_dict()),
            ("config_hash", self.config.hash()),
            ("seed", self.config.seed),
            ("replication_seeds", self.seeds()),
            ("versions", utils.versions()),
        ])
        if extra:
            data.update(extra)
        return data
