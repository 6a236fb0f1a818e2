# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple

import numpy as np
from scipy.special import comb

from .datamodel import GENUINE, RANDOM, QUERY_KINDS, as_vector
from .exceptions import (
    ConfigError, DimensionError, EmptyInputError, ProtocolError
)

"""The dichotomy transformation and the pairing protocols that turn feature
vectors into dissimilarity samples."""

# Class labels in the dissimilarity space. Positive is the within-writer
# class; samples built in operational mode carry no label.
POSITIVE = 1
NEGATIVE = -1
UNKNOWN  = 0

LABEL_NAMES = {POSITIVE: "positive", NEGATIVE: "negative", UNKNOWN: "unknown"}
LABEL_VALUES = dict((name, value) for value, name in LABEL_NAMES.items())

# Genuine selection policies for the pairing plan.
SELECT_LOWEST = "lowest"
SELECT_RANDOM = "random"


def dt(x_q, x_r):
    """The dichotomy transformation: ``|x_q - x_r|`` coordinatewise.

    Parameters:
        x_q (sequence of float): Questioned feature vector.
        x_r (sequence of float): Reference feature vector.

    Returns:
        numpy.ndarray: The dissimilarity vector ``u``.
    """
    x_q = np.asarray(x_q, dtype=float)
    x_r = np.asarray(x_r, dtype=float)
    if x_q.ndim != 1 or x_q.shape != x_r.shape:
        raise DimensionError("dichotomy transformation needs two vectors of equal length, "
                             "got shapes {} and {}".format(x_q.shape, x_r.shape))
    return np.abs(x_q - x_r)


class DissimilaritySample(namedtuple("DissimilaritySample",
                                     ["u", "label", "query_kind", "query_ref", "reference_ref"])):
    """One dissimilarity vector with its label and provenance.

    Attributes:
        u (numpy.ndarray): The dissimilarity vector (all entries >= 0 unless
            the sample was standardized).
        label (int): ``POSITIVE``, ``NEGATIVE`` or ``UNKNOWN``.
        query_kind (str): ``genuine``, ``random``, ``skilled``, ``simple``,
            or ``None`` when unknown.
        query_ref (tuple): ``(writer_id, signature_id)`` of the questioned
            side of the pair.
        reference_ref (tuple): ``(writer_id, signature_id)`` of the reference
            side of the pair.
    """
    __slots__ = ()


class DissimilaritySet(object):
    """An ordered, immutable collection of dissimilarity samples.

    The vectors and labels are kept as arrays so the numeric modules can use
    them directly; iterating or indexing yields ``DissimilaritySample``.

    Parameters:
        vectors (2-D array-like): ``(N, n)`` dissimilarity vectors.
        labels (sequence of int): ``N`` labels.
        query_kinds (sequence of str): ``N`` query kinds.
        query_refs (sequence of tuple): ``N`` questioned-side provenances.
        reference_refs (sequence of tuple): ``N`` reference-side provenances.
        dimensionality (int): Needed only when ``N`` is zero.
    """

    def __init__(self, vectors, labels, query_kinds, query_refs, reference_refs,
                 dimensionality=None):
        vectors = np.array(vectors, dtype=float)
        if vectors.size == 0:
            if dimensionality is None:
                dimensionality = vectors.shape[-1] if vectors.ndim == 2 else 0
            vectors = vectors.reshape(0, dimensionality)
        if vectors.ndim != 2:
            raise DimensionError("dissimilarity vectors must form a 2-D array")
        size = vectors.shape[0]

        labels = np.array(labels, dtype=np.int8).reshape(-1)
        query_kinds = tuple(query_kinds)
        query_refs = tuple(tuple(int(x) for x in ref) for ref in query_refs)
        reference_refs = tuple(tuple(int(x) for x in ref) for ref in reference_refs)
        for name, column in (("labels", labels), ("query kinds", query_kinds),
                             ("query refs", query_refs), ("reference refs", reference_refs)):
            if len(column) != size:
                raise DimensionError("{} has {} entries for {} vectors".format(
                    name, len(column), size))
        for kind in set(query_kinds):
            if kind is not None and kind not in QUERY_KINDS:
                raise ConfigError("unknown query kind '{}'".format(kind))

        vectors.setflags(write=False)
        labels.setflags(write=False)
        self.vectors = vectors
        self.labels = labels
        self.query_kinds = query_kinds
        self.query_refs = query_refs
        self.reference_refs = reference_refs

    @classmethod
    def from_samples(cls, samples, dimensionality=None):
        samples = list(samples)
        if samples:
            vectors = np.vstack([np.asarray(s.u, dtype=float) for s in samples])
        else:
            vectors = np.zeros((0, dimensionality or 0))
        return cls(
            vectors,
            [s.label for s in samples],
            [s.query_kind for s in samples],
            [s.query_ref for s in samples],
            [s.reference_ref for s in samples],
            dimensionality=dimensionality,
        )

    @property
    def dimensionality(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]

    def __getitem__(self, index):
        u = self.vectors[index]
        return DissimilaritySample(u, int(self.labels[index]), self.query_kinds[index],
                                   self.query_refs[index], self.reference_refs[index])

    def __iter__(self):
        for index in range(len(self)):
            yield self[index]

    def __repr__(self):
        positives, negatives = self.class_counts()
        return "<DissimilaritySet n={} positive={} negative={}>".format(
            self.dimensionality, positives, negatives)

    def class_counts(self):
        """Return ``(positives, negatives)``."""
        return int(np.sum(self.labels == POSITIVE)), int(np.sum(self.labels == NEGATIVE))

    def subset(self, indices):
        """A new set holding the samples at ``indices``, in that order."""
        indices = [int(i) for i in indices]
        return DissimilaritySet(
            self.vectors[indices] if indices else np.zeros((0, self.dimensionality)),
            self.labels[indices] if indices else [],
            [self.query_kinds[i] for i in indices],
            [self.query_refs[i] for i in indices],
            [self.reference_refs[i] for i in indices],
            dimensionality=self.dimensionality,
        )

    def standardized(self, scaler):
        """A new set whose vectors went through ``scaler``; labels and
        provenance are unchanged."""
        if scaler is None:
            return self
        return DissimilaritySet(
            scaler.transform(self.vectors), self.labels, self.query_kinds,
            self.query_refs, self.reference_refs, dimensionality=self.dimensionality,
        )

    @classmethod
    def concat(cls, sets):
        sets = list(sets)
        if not sets:
            raise EmptyInputError("nothing to concatenate")
        return cls(
            np.vstack([s.vectors for s in sets]),
            np.concatenate([s.labels for s in sets]),
            [k for s in sets for k in s.query_kinds],
            [r for s in sets for r in s.query_refs],
            [r for s in sets for r in s.reference_refs],
            dimensionality=sets[0].dimensionality,
        )


class PairingPlan(object):
    """How training dissimilarity samples are drawn from the development set.

    Parameters:
        genuines_per_writer (int): ``R``, the genuine signatures used per
            writer (all ``R*(R-1)/2`` pairs become positive samples).
        random_forgery_writers (int): ``F``, how many other writers lend one
            genuine signature each as a random forgery against the writer's
            ``R-1`` references.
        seed (int): Seed for partner (and optionally genuine) selection.
        selection (str): ``lowest`` takes the ``R`` lowest signature ids,
            ``random`` draws ``R`` genuine signatures with the seed.
    """

    def __init__(self, genuines_per_writer=14, random_forgery_writers=7, seed=0,
                 selection=SELECT_LOWEST):
        self.genuines_per_writer = int(genuines_per_writer)
        self.random_forgery_writers = int(random_forgery_writers)
        self.seed = int(seed)
        self.selection = selection
        if self.genuines_per_writer < 2:
            raise ConfigError("a pairing plan needs at least 2 genuine signatures per writer")
        if self.random_forgery_writers < 1:
            raise ConfigError("a pairing plan needs at least 1 random forgery writer")
        if self.selection not in (SELECT_LOWEST, SELECT_RANDOM):
            raise ConfigError("unknown genuine selection policy '{}'".format(selection))

    def __repr__(self):
        return "<PairingPlan R={} F={} seed={} selection={}>".format(
            self.genuines_per_writer, self.random_forgery_writers, self.seed, self.selection)

    def with_seed(self, seed):
        return PairingPlan(self.genuines_per_writer, self.random_forgery_writers,
                           seed, self.selection)

    def balanced(self):
        """Whether the plan yields as many negatives as positives."""
        R, F = self.genuines_per_writer, self.random_forgery_writers
        return (R - 1) * F == R * (R - 1) // 2


def writer_rng(seed, writer_id, stream=0):
    """A random generator private to one writer, so pair generation does not
    depend on the order writers are processed in."""
    return np.random.default_rng([int(seed), int(writer_id), int(stream)])


def _select_genuines(genuines, plan, rng):
    R = plan.genuines_per_writer
    if plan.selection == SELECT_RANDOM:
        chosen = sorted(rng.choice(len(genuines), size=R, replace=False))
        return [genuines[i] for i in chosen]
    return genuines[:R]


def build_training_set(dev, plan):
    """Build the training dissimilarity set from a development dataset.

    Per writer (in ascending writer id): the positive samples are the
    dissimilarities among all pairs of the ``R`` selected genuine signatures;
    the negative samples pair each of the writer's ``R-1`` lowest-id selected
    genuine signatures (the references) with one genuine signature from each
    of ``F`` other writers, drawn without replacement.

    Parameters:
        dev (Dataset): The development set.
        plan (PairingPlan): The pairing protocol.

    Returns:
        DissimilaritySet
    """
    writers = dev.writers()
    R, F = plan.genuines_per_writer, plan.random_forgery_writers
    if F >= len(writers):
        raise ProtocolError("the plan asks for {} random forgery writers but the development "
                            "set has only {} writers".format(F, len(writers)))

    genuines = dict((w, dev.records_for(w, GENUINE)) for w in writers)
    for w in writers:
        if len(genuines[w]) < R:
            raise ProtocolError("writer {} has {} genuine signatures, the plan needs {}".format(
                w, len(genuines[w]), R))

    upper_i, upper_j = np.triu_indices(R, 1)
    blocks, labels, kinds, query_refs, reference_refs = [], [], [], [], []
    for w in writers:
        rng = writer_rng(plan.seed, w)
        selected = _select_genuines(genuines[w], plan, rng)
        matrix = np.vstack([r.features for r in selected])

        # Positive class: all pairs among the selected genuine signatures.
        blocks.append(np.abs(matrix[upper_i] - matrix[upper_j]))
        labels.extend([POSITIVE] * len(upper_i))
        kinds.extend([GENUINE] * len(upper_i))
        query_refs.extend(selected[i].ref for i in upper_i)
        reference_refs.extend(selected[j].ref for j in upper_j)

        # Negative class: R-1 references against F random forgeries.
        references = selected[:-1]
        others = [x for x in writers if x != w]
        partners = sorted(int(p) for p in rng.choice(others, size=F, replace=False))
        forgeries = [genuines[p][int(rng.integers(len(genuines[p])))] for p in partners]
        ref_matrix = np.vstack([r.features for r in references])
        forgery_matrix = np.vstack([f.features for f in forgeries])
        negatives = np.abs(forgery_matrix[np.newaxis, :, :] - ref_matrix[:, np.newaxis, :])
        blocks.append(negatives.reshape(-1, dev.dimensionality))
        for reference in references:
            for forgery in forgeries:
                labels.append(NEGATIVE)
                kinds.append(RANDOM)
                query_refs.append(forgery.ref)
                reference_refs.append(reference.ref)

    if blocks:
        vectors = np.vstack(blocks)
    else:
        vectors = np.zeros((0, dev.dimensionality))
    return DissimilaritySet(vectors, labels, kinds, query_refs, reference_refs,
                            dimensionality=dev.dimensionality)


def count_pairs(M, R):
    """How many dissimilarity vectors ``M`` writers with ``R`` signatures
    each can produce.

    Returns:
        tuple: ``(total, positive, negative)`` where ``total = C(M*R, 2)``,
        ``positive = M*C(R, 2)`` and ``negative = C(M, 2)*R**2``.
    """
    M, R = int(M), int(R)
    if M < 1 or R < 1:
        raise ConfigError("count_pairs() needs M >= 1 and R >= 1")
    total = int(comb(M * R, 2, exact=True))
    positive = M * int(comb(R, 2, exact=True))
    negative = int(comb(M, 2, exact=True)) * R * R
    return total, positive, negative


def count_training_pairs(M, plan):
    """Expected ``(positive, negative)`` sizes of ``build_training_set()``
    for ``M`` development writers, without building anything."""
    R, F = plan.genuines_per_writer, plan.random_forgery_writers
    return M * int(comb(R, 2, exact=True)), M * (R - 1) * F


def build_query_set(questioned, references, evaluation=True):
    """Pair a questioned signature with each reference of the claimed writer.

    Parameters:
        questioned (SignatureRecord): The signature being verified.
        references (sequence of SignatureRecord): Genuine signatures of the
            claimed writer, in the order they should be scored.
        evaluation (bool): Assign labels from ground truth. When ``False``
            (operational mode) labels are ``UNKNOWN`` and kinds ``None``.

    Returns:
        DissimilaritySet: One sample per reference, in reference order.
    """
    references = list(references)
    if not references:
        raise EmptyInputError("a query needs at least one reference signature")
    claimed = references[0].writer_id
    for reference in references:
        if reference.writer_id != claimed:
            raise ProtocolError("references mix writers {} and {}".format(
                claimed, reference.writer_id))
        if reference.kind != GENUINE:
            raise ProtocolError("reference {} is not a genuine signature".format(reference.key))

    if not evaluation:
        label, kind = UNKNOWN, None
    elif questioned.writer_id != claimed:
        label, kind = NEGATIVE, RANDOM
    else:
        kind = questioned.kind
        label = POSITIVE if kind == GENUINE else NEGATIVE

    vectors = [dt(questioned.features, reference.features) for reference in references]
    size = len(references)
    return DissimilaritySet(
        vectors, [label] * size, [kind] * size,
        [questioned.ref] * size, [r.ref for r in references],
    )


def sample(u, label, query_kind, query_ref, reference_ref):
    """Build a single ``DissimilaritySample``; ``u`` is copied read-only."""
    return DissimilaritySample(as_vector(u), int(label), query_kind,
                               tuple(query_ref), tuple(reference_ref))
