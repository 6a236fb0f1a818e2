# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple, OrderedDict
import hashlib
import math

import numpy as np

from .exceptions import (
    ConfigError, DatasetError, DimensionError, EmptyInputError
)

"""Core types: signature records, datasets, the standard scaler and the
synthetic feature-space generator."""

# Signature kinds stored in a dataset.
GENUINE = "genuine"
SKILLED = "skilled"
SIMPLE  = "simple"
SIGNATURE_KINDS = (GENUINE, SKILLED, SIMPLE)

# Questioned signatures can also be random forgeries (another writer's
# genuine signature presented as the claimed writer's).
RANDOM = "random"
QUERY_KINDS = (GENUINE, RANDOM, SKILLED, SIMPLE)

# Dataset splits.
DEVELOPMENT  = "development"
EXPLOITATION = "exploitation"
SPLITS = (DEVELOPMENT, EXPLOITATION)


def as_vector(values, length=None):
    """Copy ``values`` into a read-only 1-D float array.

    Parameters:
        values (sequence of float): The vector entries.
        length (int): If given, the required length.

    Returns:
        numpy.ndarray
    """
    vector = np.array(values, dtype=float)
    if vector.ndim != 1:
        raise DimensionError("expected a 1-D vector, got shape {}".format(vector.shape))
    if length is not None and vector.shape[0] != length:
        raise DimensionError("expected a vector of length {}, got {}".format(
            length, vector.shape[0]))
    vector.setflags(write=False)
    return vector


class SignatureRecord(namedtuple("SignatureRecord",
                                 ["writer_id", "signature_id", "kind", "features"])):
    """One signature in feature space.

    Parameters:
        writer_id (int): The writer the signature is attributed to (for
            forgeries: the writer being imitated).
        signature_id (int): Index of the signature within its writer and kind.
        kind (str): ``genuine``, ``skilled`` or ``simple``.
        features (sequence of float): The feature vector.
    """
    __slots__ = ()

    def __new__(cls, writer_id, signature_id, kind, features):
        writer_id = int(writer_id)
        signature_id = int(signature_id)
        if writer_id < 0 or signature_id < 0:
            raise DatasetError("writer and signature ids must be >= 0, got ({}, {})".format(
                writer_id, signature_id))
        if kind not in SIGNATURE_KINDS:
            raise DatasetError("unknown signature kind '{}'".format(kind))
        features = as_vector(features)
        if not np.all(np.isfinite(features)):
            raise DatasetError("non-finite feature value in signature ({}, {}, {})".format(
                writer_id, signature_id, kind))
        return super(SignatureRecord, cls).__new__(cls, writer_id, signature_id, kind, features)

    @property
    def key(self):
        """The ``(writer_id, signature_id, kind)`` identity of the record."""
        return (self.writer_id, self.signature_id, self.kind)

    @property
    def ref(self):
        """The ``(writer_id, signature_id)`` provenance pair."""
        return (self.writer_id, self.signature_id)

    def __eq__(self, other):
        if not isinstance(other, SignatureRecord):
            return NotImplemented
        return self.key == other.key and np.array_equal(self.features, other.features)

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(self.key)


class Dataset(object):
    """A named collection of signature records sharing one dimensionality.

    Parameters:
        name (str): Dataset name, used in reports and file names.
        dimensionality (int): The feature dimensionality ``n``.
        records (iterable of SignatureRecord): The records, in file order.
        split (str): ``development`` or ``exploitation``.
        centroids (dict): Optional writer centroids (synthetic data only).
        forgery_quality (dict): Optional ``good``/``bad`` ground truth for
            skilled forgeries, keyed by record key (synthetic data only).
    """

    def __init__(self, name, dimensionality, records, split=DEVELOPMENT,
                 centroids=None, forgery_quality=None):
        if split not in SPLITS:
            raise DatasetError("unknown split '{}'".format(split))
        dimensionality = int(dimensionality)
        if dimensionality <= 0:
            raise DatasetError("dimensionality must be positive, got {}".format(dimensionality))

        self.name = name
        self.dimensionality = dimensionality
        self.split = split
        self.centroids = dict(centroids or {})
        self.forgery_quality = dict(forgery_quality or {})

        self._records = tuple(records)
        self._index   = {}  # key -> position
        self._writers = OrderedDict()  # writer -> kind -> [records]
        for position, record in enumerate(self._records):
            if record.features.shape[0] != dimensionality:
                raise DatasetError("record {} has {} features, dataset declares {}".format(
                    record.key, record.features.shape[0], dimensionality))
            if record.key in self._index:
                raise DatasetError("duplicate record {}".format(record.key))
            self._index[record.key] = position
            kinds = self._writers.setdefault(record.writer_id, {})
            kinds.setdefault(record.kind, []).append(record)

        for kinds in self._writers.values():
            for kind in kinds:
                kinds[kind].sort(key=lambda r: r.signature_id)

        self._matrix = None

    @property
    def records(self):
        return self._records

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __repr__(self):
        return "<Dataset {} ({}, n={}, {} records, {} writers)>".format(
            self.name, self.split, self.dimensionality, len(self), len(self._writers))

    def writers(self):
        """Return the sorted list of writer ids."""
        return sorted(self._writers.keys())

    def records_for(self, writer_id, kind=GENUINE):
        """Return a writer's records of one kind, sorted by signature id."""
        return list(self._writers.get(writer_id, {}).get(kind, []))

    def get(self, writer_id, signature_id, kind=GENUINE):
        """Look up one record by its key, or return ``None``."""
        position = self._index.get((int(writer_id), int(signature_id), kind))
        if position is None:
            return None
        return self._records[position]

    def matrix(self):
        """All feature vectors stacked as a read-only ``(N, n)`` array."""
        if self._matrix is None:
            if len(self._records):
                matrix = np.vstack([r.features for r in self._records])
            else:
                matrix = np.zeros((0, self.dimensionality))
            matrix.setflags(write=False)
            self._matrix = matrix
        return self._matrix

    def subset(self, writers, split=None, name=None):
        """A new dataset holding only the records of ``writers``."""
        keep = set(writers)
        return Dataset(
            name=name or self.name,
            dimensionality=self.dimensionality,
            records=[r for r in self._records if r.writer_id in keep],
            split=split or self.split,
            centroids={w: c for w, c in self.centroids.items() if w in keep},
            forgery_quality={k: q for k, q in self.forgery_quality.items() if k[0] in keep},
        )

    def shifted(self, offset, name=None):
        """A new dataset with a constant acquisition offset added to every
        feature vector (a scalar or a length-``n`` vector)."""
        offset = np.broadcast_to(np.asarray(offset, dtype=float), (self.dimensionality,))
        return Dataset(
            name=name or self.name,
            dimensionality=self.dimensionality,
            records=[SignatureRecord(r.writer_id, r.signature_id, r.kind, r.features + offset)
                     for r in self._records],
            split=self.split,
            centroids={w: c + offset for w, c in self.centroids.items()},
            forgery_quality=self.forgery_quality,
        )


class StandardScaler(object):
    """Per-dimension standardization to zero mean and unit variance.

    A scaler is fitted once (see ``fit_scaler()``) on the training
    dissimilarity vectors and then applied unchanged to everything else,
    including other datasets in transfer experiments.

    Parameters:
        means (sequence of float): Per-dimension means.
        std_devs (sequence of float): Per-dimension standard deviations,
            all strictly positive.
    """

    def __init__(self, means, std_devs):
        self.means = as_vector(means)
        self.std_devs = as_vector(std_devs, self.means.shape[0])
        if not np.all(self.std_devs > 0):
            raise DimensionError("standard deviations must be positive")

    @property
    def dimensionality(self):
        return self.means.shape[0]

    def transform(self, values):
        """Standardize one vector or a 2-D batch of row vectors."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 0 or values.shape[-1] != self.dimensionality:
            raise DimensionError("scaler expects vectors of length {}, got shape {}".format(
                self.dimensionality, values.shape))
        return (values - self.means) / self.std_devs

    def to_dict(self):
        return {
            "means": [float(x) for x in self.means],
            "std_devs": [float(x) for x in self.std_devs],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["means"], data["std_devs"])

    def fingerprint(self):
        """A short hash identifying the fitted statistics."""
        digest = hashlib.sha256()
        digest.update(self.means.tobytes())
        digest.update(self.std_devs.tobytes())
        return digest.hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, StandardScaler):
            return NotImplemented
        return (np.array_equal(self.means, other.means)
                and np.array_equal(self.std_devs, other.std_devs))

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    __hash__ = None


def fit_scaler(samples):
    """Fit a ``StandardScaler`` on a collection of vectors.

    Standard deviations are population standard deviations; a dimension with
    zero variance gets a standard deviation of 1 so the transform is total.

    Parameters:
        samples: A 2-D array-like of vectors, or anything with a ``vectors``
            attribute (such as a ``DissimilaritySet``).

    Returns:
        StandardScaler
    """
    samples = getattr(samples, "vectors", samples)
    matrix = np.asarray(samples, dtype=float)
    if matrix.size == 0 or len(matrix) == 0:
        raise EmptyInputError("cannot fit a scaler on an empty collection")
    if matrix.ndim != 2:
        raise DimensionError("expected a collection of equal-length vectors")

    means = matrix.mean(axis=0)
    std_devs = matrix.std(axis=0)
    std_devs[std_devs == 0.0] = 1.0
    return StandardScaler(means, std_devs)


def apply_scaler(scaler, vector):
    """Standardize ``vector`` with a fitted scaler. The scaler is not changed."""
    vector = np.asarray(vector, dtype=float)
    if vector.ndim != 1:
        raise DimensionError("apply_scaler() takes a single vector")
    return scaler.transform(vector)


class SynthConfig(object):
    """Parameters of the synthetic feature-space generator.

    Every writer gets a centroid; genuine signatures scatter around it, good
    quality skilled forgeries sit closer to it than a typical genuine
    signature does, bad quality ones out where other writers live.

    All variation happens inside a random ``d``-dimensional subspace of the
    ``n``-dimensional feature space (``d`` is ``intrinsic_dimensionality``,
    capped at ``n``; ``None`` means ``d = n``). Spreads and offsets are
    radial: a spread of ``s`` means a root-mean-square distance of ``s``
    from the centre, i.e. a per-coordinate standard deviation of
    ``s / sqrt(d)`` inside the subspace.

    With the defaults, writer clusters overlap a little: pairs of nearby
    writers give random-forgery dissimilarities inside the positive region,
    so condensation keeps a real decision frontier.

    Parameters:
        writers (int): Number of writers ``M``.
        dimensionality (int): Feature dimensionality ``n``.
        intrinsic_dimensionality (int): Dimensionality ``d`` of the subspace
            the signatures vary in.
        genuine (int): Genuine signatures per writer.
        skilled (int): Skilled forgeries per writer.
        simple (int): Simple forgeries per writer.
        sigma_genuine (float): Spread of genuine signatures around the centroid.
        sigma_centroid (float): Spread of writer centroids around the origin.
        good_fraction (float): Fraction of skilled forgeries of good quality.
        delta_good (float): Distance of good forgeries from the centroid.
        delta_bad (float): Distance of bad forgeries from the centroid.
        delta_simple (float): Distance of simple forgeries from the centroid.
        resolution (float): If set, features are rounded to multiples of it.
        offset (float): Constant acquisition offset added to every feature.
        name (str): Dataset name.
    """

    FIELDS = OrderedDict([
        ("writers",        50),
        ("dimensionality", 32),
        ("intrinsic_dimensionality", 4),
        ("genuine",        24),
        ("skilled",        10),
        ("simple",         0),
        ("sigma_genuine",  1.0),
        ("sigma_centroid", 3.0),
        ("good_fraction",  0.5),
        ("delta_good",     0.5),
        ("delta_bad",      4.0),
        ("delta_simple",   4.0),
        ("resolution",     None),
        ("offset",         0.0),
        ("name",           "synthetic"),
    ])

    # Relative jitter of the forgery distance around its delta.
    radial_jitter = 0.05

    def __init__(self, **kwargs):
        for field, default in self.FIELDS.items():
            setattr(self, field, kwargs.pop(field, default))
        if kwargs:
            raise ConfigError("unknown synthesis parameter(s): {}".format(
                ", ".join(sorted(kwargs))))
        self.validate()

    def validate(self):
        for field in ("writers", "dimensionality", "genuine", "skilled"):
            if int(getattr(self, field)) <= 0:
                raise ConfigError("synthesis parameter '{}' must be positive".format(field))
        if int(self.simple) < 0:
            raise ConfigError("synthesis parameter 'simple' must be >= 0")
        if self.intrinsic_dimensionality is not None and int(self.intrinsic_dimensionality) <= 0:
            raise ConfigError("synthesis parameter 'intrinsic_dimensionality' must be positive")
        for field in ("sigma_genuine", "sigma_centroid", "delta_good", "delta_bad", "delta_simple"):
            if not float(getattr(self, field)) > 0:
                raise ConfigError("synthesis parameter '{}' must be positive".format(field))
        if not 0.0 <= float(self.good_fraction) <= 1.0:
            raise ConfigError("good_fraction must lie in [0, 1]")
        if not self.delta_good < self.delta_bad:
            raise ConfigError("delta_good must be smaller than delta_bad")
        if self.resolution is not None and not float(self.resolution) > 0:
            raise ConfigError("resolution must be positive")
        if not math.isfinite(float(self.offset)):
            raise ConfigError("offset must be finite")

    def subspace_dimensionality(self):
        """The ``d`` actually used: ``intrinsic_dimensionality`` capped at ``n``."""
        n = int(self.dimensionality)
        if self.intrinsic_dimensionality is None:
            return n
        return min(n, int(self.intrinsic_dimensionality))

    def to_dict(self):
        return OrderedDict((field, getattr(self, field)) for field in self.FIELDS)

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))


def _radial_point(rng, centre, basis, radius, jitter):
    """A point at distance ~``radius`` from ``centre`` in a random direction
    of the subspace spanned by ``basis``."""
    direction = rng.standard_normal(basis.shape[1])
    direction /= np.linalg.norm(direction)
    r = max(0.0, radius * (1.0 + jitter * rng.standard_normal()))
    return centre + r * basis.dot(direction)


def _subspace_basis(rng, n, d):
    """Orthonormal ``n x d`` basis of a random subspace (the identity if ``d == n``)."""
    if d == n:
        return np.eye(n)
    q, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return q


def synth_generate(config, seed):
    """Generate a synthetic dataset of writer clusters and forgeries.

    The output is a pure function of ``(config, seed)``. Records are ordered
    by writer, then genuine / skilled / simple, then signature id.

    Parameters:
        config (SynthConfig): Generator parameters.
        seed (int): Random seed.

    Returns:
        Dataset: With ``centroids`` and ``forgery_quality`` filled in.
    """
    config.validate()
    rng = np.random.default_rng(seed)
    n = int(config.dimensionality)
    d = config.subspace_dimensionality()
    basis = _subspace_basis(rng, n, d)
    root_d = math.sqrt(d)
    genuine_scale = config.sigma_genuine / root_d
    centroid_scale = config.sigma_centroid / root_d
    skilled = int(config.skilled)
    good_count = int(round(config.good_fraction * skilled))

    def finish(vector):
        if config.resolution is not None:
            vector = np.round(vector / config.resolution) * config.resolution
        return vector + config.offset

    records = []
    centroids = {}
    quality = {}
    for writer in range(int(config.writers)):
        centroid = basis.dot(rng.normal(0.0, centroid_scale, d))
        centroids[writer] = centroid + config.offset

        for sig in range(int(config.genuine)):
            point = centroid + basis.dot(rng.normal(0.0, genuine_scale, d))
            records.append(SignatureRecord(writer, sig, GENUINE, finish(point)))

        good = rng.permutation(np.arange(skilled) < good_count)
        for sig in range(skilled):
            delta = config.delta_good if good[sig] else config.delta_bad
            point = _radial_point(rng, centroid, basis, delta, config.radial_jitter)
            records.append(SignatureRecord(writer, sig, SKILLED, finish(point)))
            quality[(writer, sig, SKILLED)] = "good" if good[sig] else "bad"

        for sig in range(int(config.simple)):
            point = _radial_point(rng, centroid, basis, config.delta_simple,
                                  config.radial_jitter)
            records.append(SignatureRecord(writer, sig, SIMPLE, finish(point)))

    return Dataset(config.name, n, records, centroids=centroids, forgery_quality=quality)
