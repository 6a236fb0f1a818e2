#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import unicode_literals, absolute_import

from collections import OrderedDict
from fractions import Fraction
import math
import os

import numpy as np

from .config import WisigTestCase
from wisig import utils
from wisig.datamodel import GENUINE, SKILLED
from wisig.evaluation import (
    CAT_POSITIVE, CAT_RANDOM, CAT_SIMPLE, CAT_SKILLED, CATEGORIES, ExploitationPlan,
    IhAccuracyTable, QueryEvaluation, WriterEvaluation, anti_ordered_note, build_exploitation,
    configuration_labels, evaluate_exploitation, evaluate_writer, format_mean_std,
    global_report, ih_accuracy_table, merge_reports, reference_subset, transfer_eval,
    user_threshold_eer
)
from wisig.exceptions import (
    ConfigError, DimensionError, EmptyInputError, ProtocolError, WisigError
)
from wisig.experiment import Experiment, ExperimentConfig
from wisig.hardness import HardnessScore
from wisig.protocols import split_first
from wisig.verification import select_references, verify

def threshold_sweep(genuine, skilled):
    """Try every candidate threshold, in exact arithmetic."""
    values = sorted(set(genuine) | set(skilled))
    midpoints = set((a + b) / 2.0 for a, b in zip(values, values[1:]))
    candidates = [-math.inf] + sorted(set(values) | midpoints) + [math.inf]
    best = None
    for threshold in candidates:
        frr = Fraction(sum(1 for s in genuine if s < threshold), len(genuine))
        far = Fraction(sum(1 for s in skilled if s >= threshold), len(skilled))
        if best is None or abs(far - frr) < best[0]:
            best = (abs(far - frr), threshold, (far + frr) / 2)
    return best[1], float(best[2])


def writer(writer_id, eer, replication=0):
    return WriterEvaluation(writer_id, (1.0,), (0.0,), (), None, 0.5, eer, eer, eer, replication)


def query(category, disagreeing, correct, k=7, labels=("R1",)):
    return QueryEvaluation(0, (0, 0), GENUINE, category,
                           None if disagreeing is None else HardnessScore(disagreeing, k),
                           OrderedDict((l, 0.0) for l in labels),
                           OrderedDict((l, correct) for l in labels))


class EerTests(WisigTestCase):
    """User-threshold equal error rates."""

    def test_separable(self):
        self.assertEqual(user_threshold_eer([2, 3], [0, 1]), (1.5, 0.0))

    def test_indistinguishable(self):
        threshold, eer = user_threshold_eer([0, 1], [0, 1])
        self.assertEqual(eer, 0.5)
        self.assertEqual(threshold, 0.5)

    def test_sweep(self):
        genuine, skilled = [0.9, 0.7, 0.2], [0.8, 0.1, 0.05]
        threshold, eer = user_threshold_eer(genuine, skilled)
        expected = threshold_sweep(genuine, skilled)
        self.assertEqual(threshold, expected[0])
        self.assertAlmostEqual(eer, expected[1])

    def test_random_sweeps(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            # Half-integers make plenty of ties.
            genuine = list(rng.integers(0, 8, int(rng.integers(1, 9))) / 2.0)
            skilled = list(rng.integers(0, 8, int(rng.integers(1, 9))) / 2.0)
            threshold, eer = user_threshold_eer(genuine, skilled)
            expected = threshold_sweep(genuine, skilled)
            self.assertEqual(threshold, expected[0])
            self.assertAlmostEqual(eer, expected[1])
            self.assertTrue(0.0 <= eer <= 1.0)

    def test_empty(self):
        self.assertRaises(EmptyInputError, user_threshold_eer, [], [1.0])
        self.assertRaises(EmptyInputError, user_threshold_eer, [1.0], [])

    def test_anti_ordered(self):
        """Forgeries outscoring every genuine signature give an EER above 0.5."""
        self.assertEqual(user_threshold_eer([0.0], [1.0]), (0.5, 1.0))
        evaluations = OrderedDict([
            ("R1", [evaluate_writer(3, [0.0], [1.0]), evaluate_writer(4, [1.0], [0.0])]),
            ("R5_max", [evaluate_writer(3, [2.0], [1.0]), evaluate_writer(4, [1.0], [0.0])]),
        ])
        note = anti_ordered_note(evaluations)
        self.assertIn("writer(s) 3 in R1", note)
        self.assertIsNone(anti_ordered_note(OrderedDict([("R5_max", evaluations["R5_max"])])))

    def test_evaluate_writer(self):
        evaluation = evaluate_writer(4, [0.5, 1.0, 2.0], [-1.0, 0.7], random_scores=[-3.0])
        self.assertEqual(evaluation.writer_id, 4)
        self.assertEqual(evaluation.eer, (evaluation.far + evaluation.frr) / 2.0)
        self.assertEqual(evaluation.random_scores, (-3.0,))
        self.assertIsNone(evaluation.simple_scores)


class ReportTests(WisigTestCase):
    """Global reports and their formatting."""

    def test_single_writer(self):
        report = global_report([writer(0, 0.2)])
        self.assertEqual(report.global_eer(), 0.2)

    def test_mean(self):
        report = global_report([writer(0, 0.0), writer(1, 0.1)])
        self.assertAlmostEqual(report.global_eer(), 0.05)

    def test_empty(self):
        self.assertRaises(EmptyInputError, global_report, [])

    def test_format_mean_std(self):
        self.assertEqual(format_mean_std([0.0332, 0.0362]), "3.47 (0.15)")
        self.assertEqual(format_mean_std([0.05]), "5.00 (0.00)")
        self.assertEqual(format_mean_std([]), "-")

    def test_merge(self):
        reports = [global_report([writer(0, 0.1, r), writer(1, 0.3, r)]) for r in range(2)]
        reports.append(global_report([writer(0, 0.0, 2), writer(1, 0.0, 2)]))
        merged = merge_reports(reports, name="merged")
        self.assertEqual(len(merged.replications), 3)
        self.assertAlmostEqual(merged.global_eer(), (0.2 + 0.2 + 0.0) / 3)
        mean, std = merged.replication_summary()
        self.assertAlmostEqual(std, float(np.std([0.2, 0.2, 0.0])))
        self.assertEqual(len(merged.writer_evaluations["eer"]), 6)
        self.assertIn("merged", merged.render())


class IhTableTests(WisigTestCase):
    """Instance hardness versus accuracy tables."""

    def test_all_easy_and_correct(self):
        queries = [query(CAT_POSITIVE, 0, True) for _ in range(5)]
        table = ih_accuracy_table(queries, CAT_POSITIVE)
        rows = table.rows()
        self.assertEqual(len(rows), 8)
        self.assertEqual(rows[0], (0.0, 5, [100.0]))
        for ih, count, accuracies in rows[1:]:
            self.assertEqual((count, accuracies), (0, [None]))
        last = table.render().splitlines()[-1].split()
        self.assertEqual(last, ["1.00", "0", "-"])

    def test_counts(self):
        labels = ("R1", "R5_max")
        queries = [query(CAT_SKILLED, 7, True, labels=labels),
                   query(CAT_SKILLED, 7, False, labels=labels),
                   query(CAT_SKILLED, 2, True, labels=labels),
                   query(CAT_POSITIVE, 0, True, labels=labels)]
        table = ih_accuracy_table(queries, CAT_SKILLED)
        self.assertEqual(table.total, 3)
        self.assertEqual(table.configurations, list(labels))
        self.assertEqual(table.accuracy("R1", 7), 50.0)
        self.assertEqual(table.accuracy("R5_max", 2), 100.0)
        self.assertIsNone(table.accuracy("R1", 0))
        self.assertEqual(table.merge(table).counts[7], 4)
        csv_rows = list(table.csv_rows())
        self.assertEqual(csv_rows[0], ["ih", "samples", "R1", "R5_max"])
        self.assertEqual(len(csv_rows), 9)

    def test_errors(self):
        mixed = [query(CAT_POSITIVE, 0, True), query(CAT_POSITIVE, 1, True, k=5)]
        self.assertRaises(ConfigError, ih_accuracy_table, mixed, CAT_POSITIVE)
        self.assertRaises(WisigError, ih_accuracy_table, [query(CAT_POSITIVE, None, True)],
                          CAT_POSITIVE)
        self.assertRaises(ConfigError, ih_accuracy_table, [], "negative_traced")
        table = IhAccuracyTable(CAT_RANDOM, 7, ["R1"])
        self.assertRaises(ConfigError, table.add, query(CAT_RANDOM, 1, True, k=5))


class ExploitationTests(WisigTestCase):
    """The generalization phase and transfer."""

    def setUp(self):
        super(ExploitationTests, self).setUp()
        # A quantized grid keeps translated features exact.
        dataset = self.synth(seed=3, writers=12, genuine=10, skilled=4, simple=2,
                             resolution=2.0 ** -10)
        self.development, self.exploitation = split_first(dataset, 4)
        self.model, self.training = self.fitted(self.development)
        self.plan = ExploitationPlan(genuine=3, skilled=3, random=2, simple=2, references=5)
        self.kwargs = dict(training=self.training, reference_counts=(1, 3, 5), seed=4)

    def test_configuration_labels(self):
        labels = [label for label, _, _ in configuration_labels([12, 1, 5])]
        self.assertEqual(labels, ["R1", "R5_max", "R12_max", "R12_min", "R12_mean", "R12_median"])
        self.assertEqual([l for l, _, _ in configuration_labels([1])], ["R1"])
        self.assertRaises(ConfigError, configuration_labels, [0, 3])

    def test_build_exploitation(self):
        batches = build_exploitation(self.exploitation, self.plan, seed=1)
        self.assertEqual([b.writer_id for b in batches], self.exploitation.writers())
        for batch in batches:
            self.assertEqual(len(batch.references), 5)
            self.assertEqual(len(batch.questioned), self.plan.questioned_per_writer)
            refs = set(r.key for r in batch.references)
            self.assertFalse(refs & set(q.key for q in batch.questioned))
            foreign = [q for q in batch.questioned if q.writer_id != batch.writer_id]
            self.assertEqual(len(foreign), 2)
            self.assertTrue(all(q.kind == GENUINE for q in foreign))
        greedy = ExploitationPlan(genuine=6, skilled=3, random=0, references=5)
        self.assertRaises(ProtocolError, build_exploitation, self.exploitation, greedy)

    def test_reference_subset(self):
        """Reference configurations pick their subset with select_references()."""
        batch = build_exploitation(self.exploitation, self.plan, seed=1)[0]
        w = batch.writer_id
        self.assertEqual(list(reference_subset(batch.references, 3, w)), [0, 1, 2])
        seeded = reference_subset(batch.references, 3, w, reference_seed=9)
        self.assertEqual([batch.references[i] for i in seeded],
                         select_references(batch.references, 3, seed=[9, w, 3]))
        self.assertEqual(list(seeded), sorted(seeded))
        self.assertRaises(ProtocolError, reference_subset, batch.references, 6, w)

    def test_plan_presets(self):
        plan = ExploitationPlan.from_dict({"preset": "mcyt", "references": 5})
        self.assertEqual((plan.genuine, plan.skilled, plan.random, plan.references), (5, 15, 10, 5))
        self.assertRaises(ConfigError, ExploitationPlan.from_dict, {"preset": "nowhere"})
        self.assertRaises(ConfigError, ExploitationPlan.from_dict, {"colour": 1})
        self.assertRaises(ConfigError, ExploitationPlan, genuine=0)

    def test_report(self):
        report = evaluate_exploitation(self.model, self.exploitation, self.plan,
                                       keep_queries=True, **self.kwargs)
        self.assertEqual(report.configurations,
                         ["R1", "R3_max", "R5_max", "R5_min", "R5_mean", "R5_median"])
        self.assertEqual(report.headline, "R5_max")
        self.assertEqual(len(report.queries), 4 * self.plan.questioned_per_writer)
        for evaluations in report.writer_evaluations.values():
            self.assertEqual(len(evaluations), 4)
            for w in evaluations:
                self.assertEqual([len(w.genuine_scores), len(w.skilled_scores),
                                  len(w.random_scores), len(w.simple_scores)], [3, 3, 2, 2])

        self.assertEqual(list(report.ih_tables), list(CATEGORIES))
        totals = dict(positive=12, negative_skilled=12, negative_random=8, negative_simple=8)
        for category, table in report.ih_tables.items():
            self.assertEqual(table.total, totals[category])
            self.assertEqual(table.configurations, report.configurations)
        self.assertEqual(report.forgery_quality["kdn_good"] + report.forgery_quality["kdn_bad"], 12)
        self.assertEqual(report.forgery_quality["generated_good"]
                         + report.forgery_quality["generated_bad"], 12)

        # The single reference score is what verify() gives.
        batches = build_exploitation(self.exploitation, self.plan, seed=4)
        first = batches[0]
        for q, evaluated in zip(first.questioned, report.queries):
            self.assertEqual(evaluated.query_ref, q.ref)
            expected = verify(self.model, q, first.references[:1]).fused_score
            self.assertAlmostEqual(evaluated.scores["R1"], expected, places=9)

    def test_write(self):
        report = evaluate_exploitation(self.model, self.exploitation, self.plan, **self.kwargs)
        written = report.write(self.scratch("report"))
        names = sorted(os.path.basename(p) for p in written)
        self.assertEqual(names, sorted(["report.txt", "eer.csv", "writers.csv", "ih_histogram.csv"]
                                       + ["ih_{}.csv".format(c) for c in CATEGORIES]))
        with open(self.scratch("report/report.txt")) as fh:
            text = fh.read()
        self.assertIn("R5_max", text)
        self.assertIn(CAT_SIMPLE, text)

    def test_model_not_mutated(self):
        before = utils.canonical_json(self.model.to_dict())
        transfer_eval(self.model, self.exploitation, self.plan, **self.kwargs)
        self.assertEqual(utils.canonical_json(self.model.to_dict()), before)

    def test_self_transfer(self):
        direct = evaluate_exploitation(self.model, self.exploitation, self.plan, **self.kwargs)
        transfer = transfer_eval(self.model, self.exploitation, self.plan, **self.kwargs)
        self.assertEqual(direct.replications, transfer.replications)
        for category in CATEGORIES:
            self.assertEqual(direct.ih_tables[category].counts, transfer.ih_tables[category].counts)
        self.assertEqual(len(transfer.notes), 1)

    def test_offset_invariance(self):
        """A constant acquisition offset changes nothing."""
        shifted = self.exploitation.shifted(3.0, name="shifted")
        plain = transfer_eval(self.model, self.exploitation, self.plan, **self.kwargs)
        moved = transfer_eval(self.model, shifted, self.plan, **self.kwargs)
        self.assertEqual(plain.replications, moved.replications)
        for label in plain.configurations:
            self.assertEqual([w.user_threshold for w in plain.writer_evaluations[label]],
                             [w.user_threshold for w in moved.writer_evaluations[label]])

    def test_transfer_errors(self):
        foreign = self.synth(writers=4, dimensionality=3)
        self.assertRaises(DimensionError, transfer_eval, self.model, foreign, self.plan)
        self.assertRaises(ConfigError, evaluate_exploitation, self.model, self.exploitation,
                          self.plan, reference_counts=(1, 6))

    def test_transfer_clamps_reference_counts(self):
        plan = ExploitationPlan(genuine=3, skilled=3, random=2, references=3)
        report = transfer_eval(self.model, self.exploitation, plan, **self.kwargs)
        self.assertEqual(report.configurations[:2], ["R1", "R3_max"])
        self.assertEqual(report.headline, "R3_max")

    def test_hardness_shape(self):
        """Against the condensed training set, genuine queries are easy, good
        forgeries sit among the positives and bad ones among the negatives."""
        config = ExperimentConfig(
            synth=dict(writers=24, dimensionality=16, genuine=12, skilled=6),
            exploitation_writers=6, genuines_per_writer=6, random_forgery_writers=3,
            exploitation=dict(genuine=4, skilled=6, random=2, references=5),
            reference_counts=[1, 5], gamma=0.5, seed=8)
        experiment = Experiment(config)
        development, exploitation = experiment.load_data()
        model, training, info = experiment.fit(development, seed=8)
        stats = info["condensation"]
        self.assertLess(stats["retained_size"], stats["input_size"])
        self.assertGreaterEqual(stats["retained_size"], 2 * config.kdn_k)
        self.assertEqual(len(training), stats["retained_size"])

        report = evaluate_exploitation(model, exploitation, config.exploitation_plan(),
                                       training=training, reference_counts=(1, 5),
                                       keep_queries=True)
        def mean_hardness(queries):
            self.assertTrue(queries)
            return np.mean([q.hardness.value for q in queries])

        quality = lambda q: exploitation.forgery_quality[(q.query_ref[0], q.query_ref[1], SKILLED)]
        positive = [q for q in report.queries if q.category == CAT_POSITIVE]
        skilled = [q for q in report.queries if q.category == CAT_SKILLED]
        good = [q for q in skilled if quality(q) == "good"]
        bad = [q for q in skilled if quality(q) == "bad"]
        self.assertGreater(mean_hardness(good), mean_hardness(positive))
        self.assertGreater(mean_hardness(good), mean_hardness(bad))
        self.assertGreater(report.forgery_quality["kdn_good"], 0)
        self.assertGreater(report.forgery_quality["kdn_bad"], 0)
