#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import unicode_literals, absolute_import

import io
import json
import math

import numpy as np
from scipy.optimize import minimize

from .config import WisigTestCase
from wisig.cache import NullKernelCache
from wisig.dichotomizer import (
    C_GRID, GAMMA_GRID, DichotomizerModel, KernelParams, SMOTrainer, decision_value,
    dual_objective, grid_search, grid_search_table, kkt_violation, load_model, rbf_rows,
    save_model, select_grid_params, train
)
from wisig.dichotomy import NEGATIVE, POSITIVE
from wisig.exceptions import (
    ConfigError, ConvergenceError, DimensionError, EmptyInputError, ModelFormatError,
    SingleClassError
)

def qp_oracle(vectors, labels, params):
    """Maximize the SVM dual with a general purpose solver."""
    y = np.asarray(labels, dtype=float)
    Q = np.outer(y, y) * rbf_rows(vectors, vectors, params.gamma)
    result = minimize(
        lambda a: 0.5 * a.dot(Q).dot(a) - a.sum(),
        np.zeros(len(y)),
        jac=lambda a: Q.dot(a) - 1.0,
        bounds=[(0.0, params.c)] * len(y),
        constraints=[dict(type="eq", fun=lambda a: a.dot(y), jac=lambda a: y)],
        method="SLSQP",
        options=dict(ftol=1e-14, maxiter=1000),
    )
    return -result.fun


class TrainingTests(WisigTestCase):
    """Training the dichotomizer by SMO."""

    def test_two_points(self):
        """One point per class: both are support vectors with equal weight."""
        samples = self.labeled([[0.0, 0.0], [1.0, 0.0]], [POSITIVE, NEGATIVE])
        model = train(samples, KernelParams(1.0, 10.0))
        alpha = 1.0 / (1.0 - math.exp(-1.0))
        self.assertAllClose(model.dual_coefficients, [alpha, -alpha])
        self.assertAlmostEqual(model.bias, 0.0)
        self.assertAlmostEqual(model.decision_value([0.5, 0.0]), 0.0)
        self.assertAlmostEqual(model.decision_value([0.0, 0.0]), 1.0)
        self.assertAlmostEqual(model.decision_value([1.0, 0.0]), -1.0)

    def test_two_points_at_bound(self):
        samples = self.labeled([[0.0, 0.0], [1.0, 0.0]], [POSITIVE, NEGATIVE])
        model = train(samples, KernelParams(1.0, 1.0))
        self.assertAllClose(model.dual_coefficients, [1.0, -1.0])
        self.assertAlmostEqual(model.decision_value([0.5, 0.0]), 0.0)
        self.assertGreater(model.decision_value([0.0, 0.0]), 0)
        self.assertLess(model.decision_value([1.0, 0.0]), 0)

    def test_xor(self):
        vectors = [[0, 0], [1, 1], [0, 1], [1, 0]]
        labels = [POSITIVE, POSITIVE, NEGATIVE, NEGATIVE]
        model = train(self.labeled(vectors, labels), KernelParams(1.0, 100.0))
        self.assertEqual(len(model.support_vectors), 4)
        for vector, label in zip(vectors, labels):
            self.assertEqual(np.sign(model.decision_value(vector)), label)

    def test_qp_oracle(self):
        """The dual objective matches a general purpose QP solver."""
        rng = np.random.default_rng(21)
        for trial in range(50):
            size = int(rng.integers(2, 11))
            vectors = rng.normal(size=(size, 3))
            labels = [POSITIVE, NEGATIVE] + list(rng.choice([POSITIVE, NEGATIVE], size=size - 2))
            params = KernelParams(float(rng.choice([0.1, 0.5, 2.0])), float(rng.choice([0.5, 5.0])))
            model = train(self.labeled(vectors, labels), params, tol=1e-9, max_passes=5000,
                          seed=trial)
            expected = qp_oracle(vectors, labels, params)
            self.assertAlmostEqual(model.info["dual_objective"], expected, delta=1e-6)
            self.assertAlmostEqual(dual_objective(model), expected, delta=1e-6)

    def test_dual_feasibility_and_kkt(self):
        samples = self.blobs(size=60, dims=3, separation=2.0, seed=5)
        params = KernelParams(0.5, 1.0)
        tol = 1e-3
        model = train(samples, params, tol=tol)
        coef = model.dual_coefficients
        self.assertAlmostEqual(float(np.sum(coef)), 0.0, delta=1e-6)
        self.assertTrue(np.all(np.abs(coef) > 0))
        self.assertTrue(np.all(np.abs(coef) <= params.c))
        self.assertLessEqual(model.info["kkt_violation"], tol + 1e-9)

        # Every training sample, support vector or not, against its KKT condition.
        f = model.decision_values(samples.vectors)
        y = samples.labels.astype(float)
        alpha = np.zeros(len(samples))
        for row, c in zip(model.support_vectors, coef):
            matches = np.flatnonzero(np.all(samples.vectors == row, axis=1))
            alpha[matches[0]] = abs(c)
        self.assertLessEqual(kkt_violation(alpha, y, f, params.c), tol + 1e-6)

        free = (alpha > 0) & (alpha < params.c)
        self.assertTrue(np.any(free))
        self.assertAllClose(np.abs(f[free]), np.ones(int(free.sum())), atol=tol + 1e-6)

    def test_caches_agree(self):
        samples = self.blobs(size=30, seed=6)
        params = KernelParams(0.5, 1.0)
        a = SMOTrainer(params, seed=3).fit(samples)
        b = SMOTrainer(params, seed=3, cache=NullKernelCache()).fit(samples)
        c = SMOTrainer(params, seed=3, cache_size=2).fit(samples)
        for other in (b, c):
            np.testing.assert_array_equal(a.dual_coefficients, other.dual_coefficients)
            self.assertEqual(a.bias, other.bias)

    def test_single_class(self):
        samples = self.labeled([[0, 0], [1, 1]], [POSITIVE, POSITIVE])
        with self.assertRaises(SingleClassError) as cm:
            train(samples)
        self.assertIn("single-class input", cm.exception.error_message)
        self.assertRaises(EmptyInputError, train, samples.subset([]))

    def test_budget(self):
        samples = self.blobs(size=40, separation=0.0, seed=7)
        with self.assertRaises(ConvergenceError) as cm:
            train(samples, KernelParams(1.0, 100.0), tol=1e-10, max_passes=1)
        self.assertGreater(cm.exception.violation, 1e-10)
        self.assertEqual(cm.exception.iterations, 40)

    def test_invalid_params(self):
        self.assertRaises(ConfigError, KernelParams, 0.0, 1.0)
        self.assertRaises(ConfigError, KernelParams, 1.0, -1.0)
        self.assertRaises(ConfigError, SMOTrainer, KernelParams(), tol=0)


class ModelTests(WisigTestCase):
    """Scoring and storing trained models."""

    def setUp(self):
        super(ModelTests, self).setUp()
        self.samples = self.blobs(size=30, dims=3, seed=9)
        self.model = train(self.samples, KernelParams(0.5, 1.0))

    def test_batch_matches_single(self):
        batch = self.model.decision_values(self.samples.vectors)
        for u, value in zip(self.samples.vectors, batch):
            self.assertAlmostEqual(decision_value(self.model, u), value, places=10)

    def test_deterministic(self):
        first = self.model.decision_values(self.samples.vectors)
        second = self.model.decision_values(self.samples.vectors)
        np.testing.assert_array_equal(first, second)

    def test_dimension_mismatch(self):
        self.assertRaises(DimensionError, self.model.decision_value, [1.0, 2.0])
        self.assertRaises(DimensionError, self.model.decision_values, [[1.0, 2.0]])

    def test_save_load(self):
        fh = io.StringIO()
        save_model(self.model, fh)
        loaded = load_model(io.StringIO(fh.getvalue()))
        np.testing.assert_array_equal(loaded.decision_values(self.samples.vectors),
                                      self.model.decision_values(self.samples.vectors))
        self.assertEqual(loaded.params, self.model.params)
        self.assertEqual(loaded.info["training_size"], 30)

        path = self.scratch("model.json")
        save_model(self.model, path)
        self.assertEqual(load_model(path).bias, self.model.bias)

    def test_bad_containers(self):
        data = self.model.to_dict()
        for key, value in (("format", "svm"), ("version", 99)):
            broken = dict(data)
            broken[key] = value
            self.assertRaises(ModelFormatError, DichotomizerModel.from_dict, broken)
        broken = dict(data)
        del broken["bias"]
        self.assertRaises(ModelFormatError, DichotomizerModel.from_dict, broken)
        self.assertRaises(ModelFormatError, load_model, io.StringIO("{not json"))
        self.assertEqual(json.loads(json.dumps(data))["format"], "wisig-model")


class GridSearchTests(WisigTestCase):
    """Kernel parameter selection."""

    def setUp(self):
        super(GridSearchTests, self).setUp()
        self.training = self.blobs(size=16, seed=10)
        self.validation = self.blobs(size=16, seed=11)

    def test_single_pair(self):
        params = grid_search(self.training, self.validation, [0.5], [2.0])
        self.assertEqual(params, KernelParams(2.0, 0.5))

    def test_full_grid(self):
        table = grid_search_table(self.training, self.validation, max_passes=50)
        self.assertEqual(len(table), len(C_GRID) * len(GAMMA_GRID))
        self.assertEqual(len(table), 56)
        self.assertEqual([(e["c"], e["gamma"]) for e in table],
                         sorted((c, g) for c in C_GRID for g in GAMMA_GRID))

    def test_tie_rule(self):
        table = [dict(c=10.0, gamma=0.1, eer=0.2), dict(c=1.0, gamma=1.0, eer=0.2),
                 dict(c=1.0, gamma=0.01, eer=0.2), dict(c=0.1, gamma=5.0, eer=None)]
        self.assertEqual(select_grid_params(table), KernelParams(0.01, 1.0))
        table.append(dict(c=100.0, gamma=100.0, eer=0.1))
        self.assertEqual(select_grid_params(table), KernelParams(100.0, 100.0))

    def test_errors(self):
        self.assertRaises(EmptyInputError, grid_search, self.training, self.validation, [], [1.0])
        positives = self.validation.subset(np.flatnonzero(self.validation.labels == POSITIVE))
        self.assertRaises(SingleClassError, grid_search, self.training, positives, [1.0], [1.0])
        self.assertRaises(ConvergenceError, select_grid_params, [dict(c=1.0, gamma=1.0, eer=None)])
