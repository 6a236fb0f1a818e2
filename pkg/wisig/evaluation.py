# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple, OrderedDict
import csv
import os

import numpy as np

from . import utils
from .datamodel import GENUINE, SKILLED, SIMPLE, RANDOM
from .dichotomy import POSITIVE, NEGATIVE, dt, writer_rng
from .exceptions import (
    ConfigError, DimensionError, EmptyInputError, ProtocolError, WisigError
)
from .hardness import DEFAULT_K, GOOD, BAD, kdn_batch, classify_forgery_quality
from .verification import MAX, FUSION_KINDS, fuse, fusion_kind, select_references

"""Evaluation: user-threshold EER, hardness-binned accuracy tables, the
exploitation (generalization) phase and its reports."""

# Query categories of the accuracy tables.
CAT_POSITIVE = "positive"
CAT_RANDOM   = "negative_random"
CAT_SKILLED  = "negative_skilled"
CAT_SIMPLE   = "negative_simple"
CATEGORIES = (CAT_POSITIVE, CAT_RANDOM, CAT_SKILLED, CAT_SIMPLE)

CATEGORY_OF_KIND = {
    GENUINE: CAT_POSITIVE,
    RANDOM:  CAT_RANDOM,
    SKILLED: CAT_SKILLED,
    SIMPLE:  CAT_SIMPLE,
}


def candidate_thresholds(genuine_scores, skilled_scores):
    """Every score, the midpoints between adjacent distinct scores and the
    two infinite sentinels, ascending."""
    values = np.unique(np.concatenate([np.asarray(genuine_scores, dtype=float).reshape(-1),
                                       np.asarray(skilled_scores, dtype=float).reshape(-1)]))
    midpoints = (values[:-1] + values[1:]) / 2.0
    return np.concatenate([[-np.inf], np.unique(np.concatenate([values, midpoints])), [np.inf]])


def error_counts(genuine_scores, skilled_scores, thresholds):
    """``(frr_counts, far_counts)`` at each threshold: genuine scores below
    it and skilled scores at or above it."""
    genuine = np.sort(np.asarray(genuine_scores, dtype=float).reshape(-1))
    skilled = np.sort(np.asarray(skilled_scores, dtype=float).reshape(-1))
    frr = np.searchsorted(genuine, thresholds, side="left").astype(np.int64)
    far = (len(skilled) - np.searchsorted(skilled, thresholds, side="left")).astype(np.int64)
    return frr, far


def user_threshold_eer(genuine_scores, skilled_scores):
    """The equal error rate of one writer and the threshold it occurs at.

    FRR is the fraction of genuine scores below the threshold, FAR the
    fraction of skilled forgery scores at or above it. The threshold is the
    candidate (see ``candidate_thresholds()``) with the smallest
    ``|FAR - FRR|``, the lowest such candidate on ties, and the EER is
    ``(FAR + FRR) / 2`` there.

    Returns:
        tuple: ``(threshold, eer)``.
    """
    genuine = np.asarray(genuine_scores, dtype=float).reshape(-1)
    skilled = np.asarray(skilled_scores, dtype=float).reshape(-1)
    if genuine.size == 0 or skilled.size == 0:
        raise EmptyInputError("the EER needs genuine and skilled forgery scores")

    thresholds = candidate_thresholds(genuine, skilled)
    frr, far = error_counts(genuine, skilled, thresholds)
    ng, ns = genuine.size, skilled.size
    # |FAR - FRR| scaled by ng * ns, exact in integers.
    gap = np.abs(far * ng - frr * ns)
    best = int(np.argmin(gap))
    eer = (far[best] / ns + frr[best] / ng) / 2.0
    return float(thresholds[best]), float(eer)


class WriterEvaluation(namedtuple("WriterEvaluation", [
        "writer_id", "genuine_scores", "skilled_scores", "random_scores", "simple_scores",
        "user_threshold", "eer", "far", "frr", "replication"])):
    """Scores and the user-threshold EER of one writer for one reference
    configuration. ``simple_scores`` is ``None`` when the protocol has no
    simple forgeries."""
    __slots__ = ()


def evaluate_writer(writer_id, genuine_scores, skilled_scores, random_scores=(),
                    simple_scores=None, replication=0):
    """Evaluate one writer. Only genuine and skilled scores set the threshold."""
    threshold, eer = user_threshold_eer(genuine_scores, skilled_scores)
    genuine = tuple(float(s) for s in genuine_scores)
    skilled = tuple(float(s) for s in skilled_scores)
    frr = sum(1 for s in genuine if s < threshold) / len(genuine)
    far = sum(1 for s in skilled if s >= threshold) / len(skilled)
    return WriterEvaluation(
        int(writer_id), genuine, skilled,
        tuple(float(s) for s in random_scores),
        None if simple_scores is None else tuple(float(s) for s in simple_scores),
        threshold, eer, far, frr, int(replication),
    )


class QueryEvaluation(namedtuple("QueryEvaluation", [
        "writer_id", "query_ref", "kind", "category", "hardness", "scores", "correct"])):
    """One evaluated questioned signature.

    Attributes:
        writer_id (int): The claimed writer.
        query_ref (tuple): ``(writer_id, signature_id)`` of the questioned
            signature.
        kind (str): Query kind (``genuine``, ``random``, ``skilled`` or
            ``simple``).
        category (str): Accuracy table category.
        hardness (HardnessScore): kDN of the query paired with the first
            reference, or ``None`` when no training set was given.
        scores (OrderedDict): Fused score per reference configuration.
        correct (OrderedDict): Whether the writer's user threshold decides
            the query correctly, per reference configuration.
    """
    __slots__ = ()


class IhAccuracyTable(object):
    """Accuracy of the verifier per instance hardness value.

    Rows are the ``k + 1`` possible kDN values ``0, 1/k, ..., 1``; each row
    holds the number of queries with that hardness and, per reference
    configuration, how many of them were decided correctly.

    Parameters:
        category (str): The query category the table describes.
        k (int): The kDN neighborhood size.
        configurations (list of str): Reference configuration labels.
    """

    def __init__(self, category, k, configurations):
        self.category = category
        self.k = int(k)
        self.configurations = list(configurations)
        self.counts = [0] * (self.k + 1)
        self.correct = OrderedDict((c, [0] * (self.k + 1)) for c in self.configurations)

    def add(self, query):
        if query.hardness.k != self.k:
            raise ConfigError("cannot mix kDN with k={} and k={}".format(
                self.k, query.hardness.k))
        row = query.hardness.disagreeing
        self.counts[row] += 1
        for label in self.configurations:
            if query.correct[label]:
                self.correct[label][row] += 1

    def merge(self, other):
        """A new table summing this one and ``other``."""
        if (other.category, other.k, other.configurations) != \
                (self.category, self.k, self.configurations):
            raise ConfigError("cannot merge IH tables with different layouts")
        table = IhAccuracyTable(self.category, self.k, self.configurations)
        table.counts = [a + b for a, b in zip(self.counts, other.counts)]
        for label in self.configurations:
            table.correct[label] = [a + b for a, b in
                                    zip(self.correct[label], other.correct[label])]
        return table

    @property
    def total(self):
        return sum(self.counts)

    def ih_values(self):
        return [row / self.k for row in range(self.k + 1)]

    def accuracy(self, label, row):
        """Accuracy in percent, or ``None`` for an empty row."""
        if self.counts[row] == 0:
            return None
        return 100.0 * self.correct[label][row] / self.counts[row]

    def rows(self):
        """``(ih, samples, [accuracy per configuration])`` per row."""
        return [(ih, self.counts[row], [self.accuracy(label, row) for label in self.configurations])
                for row, ih in enumerate(self.ih_values())]

    def render(self):
        lines = ["IH vs accuracy (%): {} (k={}, {} samples)".format(
            self.category, self.k, self.total)]
        header = ["IH", "Samples"] + self.configurations
        lines.append("  ".join("{:>9}".format(h) for h in header))
        for ih, count, accuracies in self.rows():
            cells = ["{:.2f}".format(ih), "{}".format(count)]
            cells += ["-" if a is None else "{:.2f}".format(a) for a in accuracies]
            lines.append("  ".join("{:>9}".format(c) for c in cells))
        return "\n".join(lines)

    def csv_rows(self):
        yield ["ih", "samples"] + self.configurations
        for ih, count, accuracies in self.rows():
            yield [utils.format_float(ih), count] + \
                ["" if a is None else utils.format_float(a) for a in accuracies]


def ih_accuracy_table(queries, category, configurations=None, k=None):
    """Build the hardness/accuracy table of one query category.

    Parameters:
        queries (iterable of QueryEvaluation): Evaluated queries; those of
            other categories are ignored.
        category (str): One of ``CATEGORIES``.
        configurations (list of str): Labels to tabulate; defaults to the
            labels of the first query.
        k (int): kDN neighborhood size; defaults to the queries' own.

    Returns:
        IhAccuracyTable
    """
    if category not in CATEGORIES:
        raise ConfigError("unknown query category '{}'".format(category))
    selected = [q for q in queries if q.category == category]
    for q in selected:
        if q.hardness is None:
            raise WisigError("query {} has no hardness score".format(q.query_ref))
    ks = set(q.hardness.k for q in selected)
    if k is not None:
        ks.add(int(k))
    if len(ks) > 1:
        raise ConfigError("cannot mix kDN values computed with different k: {}".format(
            sorted(ks)))
    k = ks.pop() if ks else DEFAULT_K
    if configurations is None:
        configurations = list(selected[0].scores) if selected else []
    table = IhAccuracyTable(category, k, configurations)
    for q in selected:
        table.add(q)
    return table


def format_mean_std(values, scale=100.0, digits=2):
    """``mean (std)`` of a series, in percent by default: ``3.47 (0.15)``.

    The standard deviation is the population one; a single value has a
    deviation of 0.
    """
    values = np.asarray(values, dtype=float) * scale
    if values.size == 0:
        return "-"
    return "{0:.{2}f} ({1:.{2}f})".format(float(np.mean(values)), float(np.std(values)), digits)


class EvaluationReport(object):
    """Results of one or more evaluation runs.

    A report built by ``global_report()`` or ``evaluate_exploitation()``
    covers one replication; ``merge_reports()`` combines replications.

    Parameters:
        name (str): Report title.
        writer_evaluations (OrderedDict): Per reference configuration, the
            list of ``WriterEvaluation``.
        headline (str): The configuration the run is summarized by.
        ih_tables (OrderedDict): ``IhAccuracyTable`` per category.
        forgery_quality (OrderedDict): Good/bad counts of the skilled
            forgeries, by kDN (plus ground truth for synthetic data).
        queries (list): The ``QueryEvaluation`` list, if kept.
    """

    def __init__(self, name, writer_evaluations, headline=None, ih_tables=None,
                 forgery_quality=None, queries=None):
        self.name = name
        self.writer_evaluations = OrderedDict(
            (label, list(evals)) for label, evals in writer_evaluations.items())
        if not self.writer_evaluations or not any(self.writer_evaluations.values()):
            raise EmptyInputError("a report needs at least one writer evaluation")
        self.headline = headline or next(iter(self.writer_evaluations))
        self.ih_tables = OrderedDict(ih_tables or {})
        self.forgery_quality = OrderedDict(forgery_quality or {})
        self.queries = list(queries or [])
        self.replications = [self._global_eers()]
        self.condensation = []
        self.kernel = []
        self.grid = []
        self.notes = []

    def _global_eers(self):
        return OrderedDict((label, float(np.mean([w.eer for w in evals])))
                           for label, evals in self.writer_evaluations.items())

    @property
    def configurations(self):
        return list(self.writer_evaluations)

    def global_eer(self, label=None):
        """Mean over replications of the global (mean per-writer) EER."""
        label = label or self.headline
        return float(np.mean([r[label] for r in self.replications]))

    def eer_by_configuration(self):
        return OrderedDict((label, self.global_eer(label)) for label in self.configurations)

    def replication_summary(self, label=None):
        """``(mean, std)`` of the global EER over replications."""
        values = [r[label or self.headline] for r in self.replications]
        return float(np.mean(values)), float(np.std(values))

    def ih_histogram(self):
        """Distribution of the queries over the kDN values, per category."""
        histogram = OrderedDict()
        for category, table in self.ih_tables.items():
            total = table.total
            histogram[category] = [(ih, count, count / total if total else 0.0)
                                   for ih, count, _ in table.rows()]
        return histogram

    def render(self):
        lines = ["wisig evaluation report: {}".format(self.name),
                 "replications: {}".format(len(self.replications)), ""]
        lines.append("Global EER (%), user thresholds, mean (std) over replications")
        for label in self.configurations:
            values = [r[label] for r in self.replications]
            marker = "  <- headline" if label == self.headline else ""
            lines.append("  {:<12} {}{}".format(label, format_mean_std(values), marker))
        lines.append("")

        if self.kernel:
            lines.append("Kernel")
            for index, params in enumerate(self.kernel):
                lines.append("  replication {}: gamma={} C={}".format(
                    index, utils.format_float(params["gamma"]), utils.format_float(params["c"])))
            lines.append("")

        if self.condensation:
            lines.append("Condensation (CNN, k=1)")
            for index, stats in enumerate(self.condensation):
                if stats is None:
                    lines.append("  replication {}: disabled".format(index))
                    continue
                lines.append("  replication {}: {} -> {} samples ({:.2f}%), {} passes".format(
                    index, stats["input_size"], stats["retained_size"],
                    100.0 * stats["retained_size"] / max(stats["input_size"], 1),
                    stats["passes"]))
            lines.append("")

        for index, table in enumerate(self.grid):
            lines.append("Grid search (validation EER %), replication {}".format(index))
            for entry in table:
                eer = "-" if entry["eer"] is None else "{:.2f}".format(100.0 * entry["eer"])
                lines.append("  C={:<8g} gamma={:<10g} {}".format(entry["c"], entry["gamma"], eer))
            lines.append("")

        if self.forgery_quality:
            lines.append("Skilled forgery quality")
            for key, value in self.forgery_quality.items():
                lines.append("  {}: {}".format(key, value))
            lines.append("")

        for table in self.ih_tables.values():
            lines.append(table.render())
            lines.append("")

        for note in self.notes:
            lines.append("note: {}".format(note))
        return "\n".join(lines).rstrip() + "\n"

    def write(self, out_dir):
        """Write the text report and its CSV companions into ``out_dir``.

        Returns:
            list of str: The files written.
        """
        if not os.path.isdir(out_dir):
            os.makedirs(out_dir)
        written = []

        def _csv(name, rows):
            path = os.path.join(out_dir, name)
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                for row in rows:
                    writer.writerow(row)
            written.append(path)

        path = os.path.join(out_dir, "report.txt")
        with open(path, "w") as fh:
            fh.write(self.render())
        written.append(path)

        eer_rows = [["configuration", "replication", "eer"]]
        for label in self.configurations:
            for index, eers in enumerate(self.replications):
                eer_rows.append([label, index, utils.format_float(eers[label])])
            mean, std = self.replication_summary(label)
            eer_rows.append([label, "mean", utils.format_float(mean)])
            eer_rows.append([label, "std", utils.format_float(std)])
        _csv("eer.csv", eer_rows)

        writer_rows = [["replication", "configuration", "writer", "threshold", "eer", "far", "frr",
                        "genuine", "skilled", "random", "simple"]]
        for label, evals in self.writer_evaluations.items():
            for w in evals:
                writer_rows.append([
                    w.replication, label, w.writer_id, utils.format_float(w.user_threshold),
                    utils.format_float(w.eer), utils.format_float(w.far),
                    utils.format_float(w.frr), len(w.genuine_scores), len(w.skilled_scores),
                    len(w.random_scores), 0 if w.simple_scores is None else len(w.simple_scores),
                ])
        _csv("writers.csv", writer_rows)

        for category, table in self.ih_tables.items():
            _csv("ih_{}.csv".format(category), table.csv_rows())

        if self.ih_tables:
            histogram = self.ih_histogram()
            categories = list(histogram)
            rows = [["ih"] + [c + suffix for c in categories for suffix in ("", "_fraction")]]
            for row, ih in enumerate(next(iter(self.ih_tables.values())).ih_values()):
                cells = [utils.format_float(ih)]
                for category in categories:
                    _, count, fraction = histogram[category][row]
                    cells += [count, utils.format_float(fraction)]
                rows.append(cells)
            _csv("ih_histogram.csv", rows)
        return written


def global_report(per_writer, name="evaluation", headline=None, **kwargs):
    """Summarize per-writer evaluations.

    Parameters:
        per_writer: A list of ``WriterEvaluation`` (one configuration), or a
            mapping from configuration label to such lists.
        name (str): Report title.
        headline (str): The headline configuration.

    Returns:
        EvaluationReport: Its global EER is the mean of the writers' EERs.
    """
    if not hasattr(per_writer, "items"):
        per_writer = OrderedDict([("eer", list(per_writer))])
    return EvaluationReport(name, per_writer, headline=headline, **kwargs)


def merge_reports(reports, name=None):
    """Combine the reports of several replications into one."""
    reports = list(reports)
    if not reports:
        raise EmptyInputError("no reports to merge")
    first = reports[0]
    evaluations = OrderedDict((label, []) for label in first.configurations)
    for report in reports:
        if report.configurations != first.configurations:
            raise ConfigError("cannot merge reports with different configurations")
        for label, evals in report.writer_evaluations.items():
            evaluations[label].extend(evals)

    tables = OrderedDict()
    for category, table in first.ih_tables.items():
        for report in reports[1:]:
            table = table.merge(report.ih_tables[category])
        tables[category] = table

    quality = OrderedDict()
    for report in reports:
        for key, value in report.forgery_quality.items():
            quality[key] = quality.get(key, 0) + value

    merged = EvaluationReport(name or first.name, evaluations, headline=first.headline,
                              ih_tables=tables, forgery_quality=quality)
    merged.replications = [eers for report in reports for eers in report.replications]
    for report in reports:
        merged.condensation.extend(report.condensation)
        merged.kernel.extend(report.kernel)
        merged.grid.extend(report.grid)
        for note in report.notes:
            if note not in merged.notes:
                merged.notes.append(note)
    return merged


class ExploitationPlan(object):
    """How questioned signatures and references are drawn per exploitation
    writer.

    Parameters:
        genuine (int): Questioned genuine signatures per writer.
        skilled (int): Skilled forgeries per writer.
        random (int): Random forgeries per writer (genuine signatures of
            other exploitation writers).
        simple (int): Simple forgeries per writer.
        references (int): Reference signatures per writer; the largest
            reference count that can be evaluated.
        name (str): Preset name.
    """

    def __init__(self, genuine=10, skilled=10, random=10, simple=0, references=12, name="custom"):
        self.genuine = int(genuine)
        self.skilled = int(skilled)
        self.random = int(random)
        self.simple = int(simple)
        self.references = int(references)
        self.name = name
        if self.genuine < 1 or self.skilled < 1:
            raise ConfigError("an exploitation plan needs genuine signatures and skilled "
                              "forgeries to set user thresholds")
        if self.random < 0 or self.simple < 0:
            raise ConfigError("forgery counts must be >= 0")
        if self.references < 1:
            raise ConfigError("an exploitation plan needs at least one reference")

    def __repr__(self):
        return "<ExploitationPlan {}: genuine={} skilled={} random={} simple={} references={}>".format(
            self.name, self.genuine, self.skilled, self.random, self.simple, self.references)

    @property
    def questioned_per_writer(self):
        return self.genuine + self.skilled + self.random + self.simple

    def to_dict(self):
        return OrderedDict([("genuine", self.genuine), ("skilled", self.skilled),
                            ("random", self.random), ("simple", self.simple),
                            ("references", self.references), ("name", self.name)])

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if "preset" in data:
            plan = EXPLOITATION_PRESETS.get(str(data.pop("preset")).lower())
            if plan is None:
                raise ConfigError("unknown exploitation preset")
            base = plan.to_dict()
            base.update(data)
            data = base
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError("invalid exploitation plan: {}".format(e))


EXPLOITATION_PRESETS = OrderedDict([
    ("gpds",      ExploitationPlan(10, 10, 10, 0, 12, name="gpds")),
    ("mcyt",      ExploitationPlan(5, 15, 10, 0, 10, name="mcyt")),
    ("cedar",     ExploitationPlan(10, 10, 10, 0, 10, name="cedar")),
    ("brazilian", ExploitationPlan(10, 10, 10, 10, 30, name="brazilian")),
])


class WriterQueries(namedtuple("WriterQueries", ["writer_id", "references", "questioned"])):
    __slots__ = ()


def build_exploitation(dataset, plan, seed=0):
    """Draw references and questioned signatures for every writer.

    The references are a writer's lowest-id genuine signatures, the
    questioned genuine signatures the next ones, so the two never overlap.
    Skilled and simple forgeries are the lowest-id ones. Random forgeries
    are genuine signatures of distinct other writers drawn with a
    per-writer generator.

    Returns:
        list of WriterQueries, by ascending writer id.
    """
    writers = dataset.writers()
    if not writers:
        raise EmptyInputError("the exploitation set has no writers")
    genuines = dict((w, dataset.records_for(w, GENUINE)) for w in writers)
    batches = []
    for w in writers:
        needed = plan.references + plan.genuine
        if len(genuines[w]) < needed:
            raise ProtocolError("writer {} has {} genuine signatures, the plan needs {}".format(
                w, len(genuines[w]), needed))
        references = genuines[w][:plan.references]
        questioned = list(genuines[w][plan.references:needed])
        for kind, count in ((SKILLED, plan.skilled), (SIMPLE, plan.simple)):
            forgeries = dataset.records_for(w, kind)
            if len(forgeries) < count:
                raise ProtocolError("writer {} has {} {} forgeries, the plan needs {}".format(
                    w, len(forgeries), kind, count))
            questioned.extend(forgeries[:count])

        if plan.random:
            others = [x for x in writers if x != w and genuines[x]]
            if not others:
                raise ProtocolError("random forgeries for writer {} need other writers".format(w))
            rng = writer_rng(seed, w, stream=1)
            partners = rng.choice(others, size=plan.random, replace=plan.random > len(others))
            for p in partners:
                pool = genuines[int(p)]
                questioned.append(pool[int(rng.integers(len(pool)))])
        batches.append(WriterQueries(w, references, questioned))
    return batches


def configuration_labels(reference_counts, fusion=MAX, fusions=FUSION_KINDS):
    """Labels of the reference configurations evaluated, in report order.

    Every count is evaluated with the primary ``fusion``; the largest count
    additionally with each of ``fusions``. One reference needs no fusion and
    is labeled ``R1``.

    Returns:
        list of tuple: ``(label, count, fusion)``.
    """
    counts = sorted(set(int(c) for c in reference_counts))
    if not counts or counts[0] < 1:
        raise ConfigError("reference counts must be positive")
    fusion = fusion_kind(fusion)

    def label(count, kind):
        return "R1" if count == 1 else "R{}_{}".format(count, kind)

    configurations = [(label(c, fusion), c, fusion) for c in counts]
    largest = counts[-1]
    if largest > 1:
        for kind in fusions:
            kind = fusion_kind(kind)
            if kind != fusion:
                configurations.append((label(largest, kind), largest, kind))
    return configurations


def _query_category(query, writer_id):
    if query.writer_id != writer_id:
        return CAT_RANDOM
    return CATEGORY_OF_KIND[query.kind]


def reference_subset(references, count, writer_id, reference_seed=None):
    """Positions in ``references`` of the ``count`` references a
    configuration fuses, chosen by ``select_references()``. A seeded choice
    is drawn per writer and count from ``reference_seed``."""
    seed = None
    if reference_seed is not None:
        seed = [int(reference_seed), int(writer_id), int(count)]
    position = dict((r.signature_id, i) for i, r in enumerate(references))
    return np.array([position[r.signature_id]
                     for r in select_references(references, count, seed=seed)], dtype=int)


def _scaled(model, vectors):
    if model.scaler is not None:
        return model.scaler.transform(vectors)
    return vectors


def evaluate_exploitation(model, dataset, plan, training=None, reference_counts=(1, 5, 12),
                          fusion=MAX, fusions=FUSION_KINDS, kdn_k=DEFAULT_K, seed=0,
                          reference_seed=None, replication=0, name=None, keep_queries=False,
                          say=None):
    """The generalization phase: verify every questioned signature of an
    exploitation set and evaluate with user thresholds.

    For each writer the questioned signatures are scored against all
    references once; every reference configuration then fuses a subset of
    those partial scores (the first ``count`` references, or a seeded
    subset when ``reference_seed`` is given). Each configuration gets its
    own user thresholds and EERs.

    Every query is also characterized by its instance hardness: the kDN of
    its dissimilarity to the first reference, standardized with the model's
    scaler, against ``training`` (the condensed standardized training set).

    Parameters:
        model (DichotomizerModel): The trained dichotomizer; never modified.
        dataset (Dataset): The exploitation set.
        plan (ExploitationPlan): Questioned and reference counts.
        training (DissimilaritySet): Training set for the hardness analysis;
            without it no IH tables are produced.
        reference_counts (sequence of int): Reference counts to evaluate.
        fusion (str): Primary fusion function.
        fusions (sequence of str): Fusions also evaluated at the largest
            reference count.
        kdn_k (int): kDN neighborhood size.
        seed (int): Seed of the random forgery draw.
        reference_seed (int): Seed of reference subset sampling, or ``None``
            for the lowest signature ids.
        replication (int): Replication index recorded in the evaluations.
        name (str): Report title.
        keep_queries (bool): Keep the per-query evaluations in the report.
        say (function): Optional debug logger.

    Returns:
        EvaluationReport
    """
    if say is None:
        say = lambda x: x
    if dataset.dimensionality != model.dimensionality:
        raise DimensionError("model expects {} features, dataset {} has {}".format(
            model.dimensionality, dataset.name, dataset.dimensionality))
    configurations = configuration_labels(reference_counts, fusion, fusions)
    largest = max(c for _, c, _ in configurations)
    if largest > plan.references:
        raise ConfigError("reference count {} exceeds the plan's {} references".format(
            largest, plan.references))
    labels = [label for label, _, _ in configurations]

    batches = build_exploitation(dataset, plan, seed=seed)
    evaluations = OrderedDict((label, []) for label in labels)
    queries = []
    for batch in batches:
        w = batch.writer_id
        R = len(batch.references)
        ref_matrix = np.vstack([r.features for r in batch.references])
        q_matrix = np.vstack([q.features for q in batch.questioned])
        pairs = np.abs(q_matrix[:, np.newaxis, :] - ref_matrix[np.newaxis, :, :])
        pairs = _scaled(model, pairs.reshape(-1, dataset.dimensionality))
        partial = model.decision_values(pairs).reshape(len(batch.questioned), R)

        subsets = dict((label, reference_subset(batch.references, count, w, reference_seed))
                       for label, count, _ in configurations)
        fused = OrderedDict()
        for label, count, kind in configurations:
            fused[label] = np.array([fuse(row[subsets[label]], kind)[0] for row in partial])

        categories = [_query_category(q, w) for q in batch.questioned]
        by_category = lambda cat, scores: [s for s, c in zip(scores, categories) if c == cat]
        thresholds = {}
        for label in labels:
            simple = by_category(CAT_SIMPLE, fused[label]) if plan.simple else None
            evaluation = evaluate_writer(
                w, by_category(CAT_POSITIVE, fused[label]), by_category(CAT_SKILLED, fused[label]),
                by_category(CAT_RANDOM, fused[label]), simple, replication=replication)
            evaluations[label].append(evaluation)
            thresholds[label] = evaluation.user_threshold

        hardness = [None] * len(batch.questioned)
        if training is not None:
            first = np.vstack([dt(q.features, batch.references[0].features)
                               for q in batch.questioned])
            truth = [POSITIVE if c == CAT_POSITIVE else NEGATIVE for c in categories]
            hardness = kdn_batch(_scaled(model, first), truth, training, kdn_k)

        for index, q in enumerate(batch.questioned):
            correct = OrderedDict()
            scores = OrderedDict()
            for label in labels:
                score = float(fused[label][index])
                accepted = score >= thresholds[label]
                scores[label] = score
                correct[label] = accepted if categories[index] == CAT_POSITIVE else not accepted
            queries.append(QueryEvaluation(w, q.ref, q.kind if q.writer_id == w else RANDOM,
                                           categories[index], hardness[index], scores, correct))
        say("writer {}: EER {} = {:.4f}".format(w, labels[-1], evaluations[labels[-1]][-1].eer))

    headline = [label for label, count, kind in configurations
                if count == largest and (kind == fusion_kind(fusion) or count == 1)][0]

    tables = OrderedDict()
    quality = OrderedDict()
    if training is not None:
        for category in CATEGORIES:
            tables[category] = ih_accuracy_table(queries, category, labels, k=kdn_k)
        skilled = [q for q in queries if q.category == CAT_SKILLED]
        classes = [classify_forgery_quality(q.hardness) for q in skilled]
        quality["kdn_good"] = classes.count(GOOD)
        quality["kdn_bad"] = classes.count(BAD)
        if dataset.forgery_quality:
            truth = [dataset.forgery_quality.get((q.query_ref[0], q.query_ref[1], SKILLED))
                     for q in skilled]
            quality["generated_good"] = truth.count(GOOD)
            quality["generated_bad"] = truth.count(BAD)
            quality["agreement"] = sum(1 for t, c in zip(truth, classes) if t == c)

    report = global_report(evaluations, name=name or dataset.name, headline=headline,
                           ih_tables=tables, forgery_quality=quality,
                           queries=queries if keep_queries else None)
    note = anti_ordered_note(evaluations)
    if note:
        report.notes.append(note)
    return report


def anti_ordered_note(evaluations):
    """A report note naming the writers whose EER is above 0.5, or ``None``.

    Such a writer's skilled forgeries score above its genuine signatures, so
    no threshold separates them better than chance.

    Parameters:
        evaluations (dict): Configuration label -> list of WriterEvaluation.
    """
    writers = set()
    labels = []
    for label, items in evaluations.items():
        hit = [e.writer_id for e in items if e.eer > 0.5]
        if hit:
            writers.update(hit)
            labels.append(label)
    if not writers:
        return None
    return "EER above 0.5 (skilled forgeries outscore genuine signatures) for writer(s) {} " \
           "in {}".format(", ".join(str(w) for w in sorted(writers)), ", ".join(labels))


def transfer_eval(model, foreign, plan, training=None, **kwargs):
    """Apply a trained model and its frozen scaler to another dataset.

    Nothing about the model is re-fitted; the foreign exploitation set goes
    through exactly the same generalization phase as the source one.

    Parameters:
        model (DichotomizerModel): Model trained on the source dataset.
        foreign (Dataset): The target dataset.
        plan (ExploitationPlan): The target's exploitation protocol.
        training (DissimilaritySet): The source training set, for the
            hardness analysis.

    Returns:
        EvaluationReport
    """
    if foreign.dimensionality != model.dimensionality:
        raise DimensionError("model was trained on {} features, {} has {}".format(
            model.dimensionality, foreign.name, foreign.dimensionality))
    if "reference_counts" in kwargs:
        # The foreign protocol may offer fewer references than the source one.
        kwargs["reference_counts"] = sorted(set(
            min(int(c), plan.references) for c in kwargs["reference_counts"]))
    report = evaluate_exploitation(model, foreign, plan, training=training, **kwargs)
    if model.scaler is not None:
        report.notes.append("transfer: scaler {} reused without refitting".format(
            model.scaler.fingerprint()))
    return report
