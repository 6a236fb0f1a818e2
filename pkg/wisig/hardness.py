# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple

import numpy as np
from scipy.spatial.distance import cdist

from .dichotomy import UNKNOWN
from .exceptions import (
    DimensionError, EmptyInputError, UnsupportedParameterError, WisigError
)

"""Instance hardness: the k-Disagreeing Neighbors (kDN) measure.

The kDN of a sample is the fraction of its ``k`` nearest training neighbors
whose label differs from the sample's own label. It is computed against a
fixed training set (the standardized, condensed dissimilarity training set
of the dichotomizer); the sample itself does not need to belong to it.
"""

# Neighborhood size used throughout the hardness analysis.
DEFAULT_K = 7

# Forgery quality classes.
GOOD = "good"
BAD  = "bad"


class HardnessScore(namedtuple("HardnessScore", ["disagreeing", "k"])):
    """A kDN value, kept as the exact fraction ``disagreeing / k``."""
    __slots__ = ()

    @property
    def value(self):
        return self.disagreeing / self.k

    def __float__(self):
        return self.value

    def __str__(self):
        return "{:.2f}".format(self.value)


def squared_distances(vectors, query):
    """Squared Euclidean distances from ``query`` to every row of ``vectors``."""
    vectors = np.asarray(vectors, dtype=float)
    query = np.asarray(query, dtype=float).reshape(1, -1)
    if vectors.ndim != 2 or vectors.shape[1] != query.shape[1]:
        raise DimensionError("query of length {} against vectors of shape {}".format(
            query.shape[1], vectors.shape))
    return cdist(vectors, query, "sqeuclidean")[:, 0]


def k_nearest(vectors, query, k):
    """Find the ``k`` nearest rows of ``vectors`` to ``query``.

    Ties at equal distance go to the lower row index.

    Returns:
        tuple: ``(indices, distances)`` sorted by non-decreasing distance.
    """
    if k < 1:
        raise UnsupportedParameterError("k must be at least 1, got {}".format(k))
    if len(vectors) < k:
        raise WisigError("need at least k={} training samples, got {}".format(k, len(vectors)))
    sq = squared_distances(vectors, query)
    order = np.argsort(sq, kind="stable")[:k]
    return order, np.sqrt(sq[order])


def query_parts(query, label):
    u = getattr(query, "u", query)
    if label is None:
        label = getattr(query, "label", UNKNOWN)
    if label == UNKNOWN:
        raise WisigError("kDN needs the ground-truth label of the query")
    return u, label


def kdn(query, training, k=DEFAULT_K, label=None):
    """Instance hardness of one query against a training set.

    Parameters:
        query (DissimilaritySample or vector): The sample. A raw vector needs
            ``label``.
        training (DissimilaritySet): The labeled training collection.
        k (int): Neighborhood size.
        label (int): Overrides the query's own label.

    Returns:
        HardnessScore
    """
    u, label = query_parts(query, label)
    if len(training) == 0:
        raise EmptyInputError("kDN needs a non-empty training set")
    indices, _ = k_nearest(training.vectors, u, k)
    disagreeing = int(np.sum(training.labels[indices] != label))
    return HardnessScore(disagreeing, int(k))


def kdn_batch(vectors, labels, training, k=DEFAULT_K):
    """kDN for many queries; returns a list of ``HardnessScore``."""
    return [kdn(u, training, k, label=int(label)) for u, label in zip(vectors, labels)]


def classify_forgery_quality(score):
    """Characterize a skilled forgery by its hardness.

    A forgery whose neighborhood mostly disagrees with it (kDN above one
    half) sits among genuine samples and is a ``good`` quality forgery;
    otherwise it is ``bad``. A kDN of exactly 0.5 counts as ``bad``.
    """
    if 2 * score.disagreeing > score.k:
        return GOOD
    return BAD
