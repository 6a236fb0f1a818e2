# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple

import numpy as np

from .datamodel import GENUINE
from .dichotomy import build_query_set
from .exceptions import ConfigError, EmptyInputError, ProtocolError

"""Multi-reference verification.

A questioned signature is compared with every reference of the claimed
writer; each comparison is a partial decision (the dichotomizer's signed
distance) and a fusion function turns them into the final score.
"""

# Fusion functions.
MAX    = "max"
MIN    = "min"
MEAN   = "mean"
MEDIAN = "median"
FUSION_KINDS = (MAX, MIN, MEAN, MEDIAN)

# Decisions.
ACCEPT = "accept"
REJECT = "reject"


def fusion_kind(name):
    """Validate and normalize a fusion function name."""
    kind = str(name).lower()
    if kind not in FUSION_KINDS:
        raise ConfigError("unknown fusion function '{}' (expected one of {})".format(
            name, ", ".join(FUSION_KINDS)))
    return kind


def fuse(scores, kind=MAX):
    """Fuse partial scores into one.

    Parameters:
        scores (sequence of float): One signed distance per reference.
        kind (str): ``max``, ``min``, ``mean`` or ``median``.

    Returns:
        tuple: ``(score, index)``. For ``max`` and ``min`` the index is the
        first position holding the extremal score; it is ``None`` for
        ``mean`` and ``median``.
    """
    kind = fusion_kind(kind)
    scores = np.asarray(scores, dtype=float).reshape(-1)
    if scores.size == 0:
        raise EmptyInputError("cannot fuse an empty score sequence")
    if kind == MAX:
        index = int(np.argmax(scores))
        return float(scores[index]), index
    if kind == MIN:
        index = int(np.argmin(scores))
        return float(scores[index]), index
    if kind == MEAN:
        value = float(np.mean(scores))
    else:
        value = float(np.median(scores))
    # Keep MAX >= MEAN/MEDIAN >= MIN against rounding.
    value = min(max(value, float(scores.min())), float(scores.max()))
    return value, None


class VerificationOutcome(namedtuple("VerificationOutcome", [
        "fused_score", "partial_scores", "selected_reference_index", "decision", "threshold"])):
    """The result of verifying one questioned signature.

    Attributes:
        fused_score (float): The fused signed distance.
        partial_scores (tuple of float): One score per reference, in
            reference order.
        selected_reference_index (int): Position of the reference that
            decided the outcome (``max`` and ``min`` only), else ``None``.
        decision (str): ``accept`` or ``reject``.
        threshold (float): The threshold the decision was taken at.
    """
    __slots__ = ()

    @property
    def accepted(self):
        return self.decision == ACCEPT


def decide(score, threshold):
    """Accept iff ``score >= threshold``."""
    return ACCEPT if score >= threshold else REJECT


def score_references(model, questioned, references):
    """Partial scores of a questioned signature against each reference.

    The dissimilarity vectors go through the model's own scaler (if it has
    one) before scoring.

    Returns:
        numpy.ndarray: One signed distance per reference.
    """
    queries = build_query_set(questioned, references, evaluation=False)
    vectors = queries.vectors
    if model.scaler is not None:
        vectors = model.scaler.transform(vectors)
    return model.decision_values(vectors)


def outcome(partial_scores, kind=MAX, threshold=0.0):
    """Build a ``VerificationOutcome`` from already computed partial scores."""
    score, index = fuse(partial_scores, kind)
    return VerificationOutcome(score, tuple(float(s) for s in partial_scores), index,
                               decide(score, threshold), float(threshold))


def verify(model, questioned, references, kind=MAX, threshold=0.0):
    """Verify a questioned signature against references of the claimed writer.

    Parameters:
        model (DichotomizerModel): The trained dichotomizer.
        questioned (SignatureRecord): The signature being verified.
        references (sequence of SignatureRecord): Genuine signatures of the
            claimed writer.
        kind (str): The fusion function.
        threshold (float): Accept when the fused score reaches it.

    Returns:
        VerificationOutcome
    """
    kind = fusion_kind(kind)
    return outcome(score_references(model, questioned, references), kind, threshold)


def select_references(references, count, seed=None):
    """Pick ``count`` references from a writer's genuine signatures.

    Without a seed the ``count`` lowest signature ids are taken; with one (an
    int or a sequence of ints, as ``numpy.random.default_rng`` takes), a
    seeded sample returned in signature id order.
    """
    references = sorted(references, key=lambda r: r.signature_id)
    count = int(count)
    if count < 1:
        raise ConfigError("reference count must be at least 1")
    if count > len(references):
        writer = references[0].writer_id if references else "?"
        raise ProtocolError("writer {} has {} reference signatures, {} requested".format(
            writer, len(references), count))
    if seed is None:
        return references[:count]
    chosen = sorted(np.random.default_rng(seed).choice(len(references), size=count,
                                                       replace=False))
    return [references[int(i)] for i in chosen]


class ManifestOutcome(namedtuple("ManifestOutcome", ["entry", "outcome"])):
    __slots__ = ()

    def row(self):
        e, o = self.entry, self.outcome
        return [e.questioned_writer, e.questioned_signature, e.questioned_kind,
                e.claimed_writer, o.fused_score,
                "" if o.selected_reference_index is None
                else e.reference_signatures[o.selected_reference_index],
                o.decision]


MANIFEST_COLUMNS = ["questioned_writer", "questioned_signature", "questioned_kind",
                    "claimed_writer", "fused_score", "selected_reference", "decision"]


def verify_manifest(model, dataset, entries, kind=MAX, threshold=0.0, thresholds=None):
    """Run a batch verification manifest.

    Parameters:
        model (DichotomizerModel): The trained dichotomizer.
        dataset (Dataset): Where the questioned and reference signatures
            are looked up.
        entries (list of ManifestEntry): The manifest rows.
        kind (str): Fusion function.
        threshold (float): Default decision threshold.
        thresholds (dict): Optional per-writer thresholds, keyed by the
            claimed writer id.

    Returns:
        list of ManifestOutcome, in manifest order.
    """
    kind = fusion_kind(kind)
    thresholds = thresholds or {}
    results = []
    for entry in entries:
        questioned = dataset.get(entry.questioned_writer, entry.questioned_signature,
                                 entry.questioned_kind)
        if questioned is None:
            raise ProtocolError("questioned signature ({}, {}, {}) is not in dataset {}".format(
                entry.questioned_writer, entry.questioned_signature, entry.questioned_kind,
                dataset.name))
        references = []
        for sig in entry.reference_signatures:
            reference = dataset.get(entry.claimed_writer, sig, GENUINE)
            if reference is None:
                raise ProtocolError("reference ({}, {}) of writer {} is not in dataset {}".format(
                    entry.claimed_writer, sig, entry.claimed_writer, dataset.name))
            references.append(reference)
        limit = thresholds.get(entry.claimed_writer, threshold)
        results.append(ManifestOutcome(entry, verify(model, questioned, references, kind, limit)))
    return results
