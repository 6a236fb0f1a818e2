# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple, OrderedDict
import json
import math

import numpy as np
from scipy.spatial.distance import cdist

from . import utils
from .cache import MemoryKernelCache
from .datamodel import StandardScaler, as_vector
from .dichotomy import POSITIVE, NEGATIVE
from .exceptions import (
    ConfigError, ConvergenceError, DimensionError, EmptyInputError,
    ModelFormatError, SingleClassError
)

"""The dichotomizer: an RBF-kernel soft-margin SVM trained by sequential
minimal optimization, whose signed decision values are the verification
scores."""

# Defaults and search grids.
DEFAULT_GAMMA = 2.0 ** -11
DEFAULT_C = 1.0
C_GRID = (0.0001, 0.001, 0.01, 0.1, 1.0, 10.0, 100.0)
GAMMA_GRID = (2.0 ** -11, 0.0001, 0.001, 0.01, 0.1, 1.0, 10.0, 100.0)

DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 200
DEFAULT_CACHE_SIZE = 1024

# Rows scored per kernel block in batch prediction.
BATCH_ROWS = 2048

# Curvature floor for pairs with (near) identical vectors.
TAU = 1e-12

MODEL_FORMAT = "wisig-model"
MODEL_VERSION = 1


class KernelParams(namedtuple("KernelParams", ["gamma", "c"])):
    """RBF width ``gamma`` and box constraint ``c``, both positive."""
    __slots__ = ()

    def __new__(cls, gamma=DEFAULT_GAMMA, c=DEFAULT_C):
        gamma, c = float(gamma), float(c)
        if not gamma > 0 or not c > 0:
            raise ConfigError("kernel parameters must be positive (gamma={}, C={})".format(gamma, c))
        return super(KernelParams, cls).__new__(cls, gamma, c)


def rbf_rows(vectors, others, gamma):
    """``exp(-gamma * ||a - b||^2)`` for every row ``a`` of ``vectors`` and
    ``b`` of ``others``."""
    return np.exp(-gamma * cdist(vectors, others, "sqeuclidean"))


class DichotomizerModel(object):
    """A trained dichotomizer.

    The model is immutable: its arrays are read-only and nothing in the
    package modifies it after training.

    Parameters:
        support_vectors (2-D array-like): The support vectors.
        dual_coefficients (sequence of float): ``alpha_i * y_i`` per support
            vector.
        bias (float): The bias ``b``.
        params (KernelParams): Kernel parameters used in training.
        scaler (StandardScaler): The scaler fitted on the training set, or
            ``None`` when the training vectors were not standardized.
        info (dict): Training metadata (objective, iterations, sizes).
    """

    def __init__(self, support_vectors, dual_coefficients, bias, params, scaler=None, info=None):
        support_vectors = np.array(support_vectors, dtype=float)
        if support_vectors.ndim != 2:
            raise DimensionError("support vectors must form a 2-D array")
        support_vectors.setflags(write=False)
        self.support_vectors = support_vectors
        self.dual_coefficients = as_vector(dual_coefficients, support_vectors.shape[0])
        self.bias = float(bias)
        self.params = params
        self.scaler = scaler
        self.info = OrderedDict(info or {})

    @property
    def dimensionality(self):
        return self.support_vectors.shape[1]

    @property
    def scaler_id(self):
        if self.scaler is None:
            return None
        return self.scaler.fingerprint()

    def __repr__(self):
        return "<DichotomizerModel n={} support={} gamma={} C={}>".format(
            self.dimensionality, len(self.support_vectors), self.params.gamma, self.params.c)

    def decision_value(self, u):
        """Signed distance of one (already standardized) vector."""
        return decision_value(self, u)

    def decision_values(self, vectors):
        """Signed distances of a batch of (already standardized) vectors."""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != self.dimensionality:
            raise DimensionError("model expects vectors of length {}, got shape {}".format(
                self.dimensionality, vectors.shape))
        values = np.empty(vectors.shape[0])
        for start in range(0, vectors.shape[0], BATCH_ROWS):
            block = vectors[start:start + BATCH_ROWS]
            kernel = rbf_rows(block, self.support_vectors, self.params.gamma)
            values[start:start + BATCH_ROWS] = np.dot(kernel, self.dual_coefficients) + self.bias
        return values

    def to_dict(self):
        return OrderedDict([
            ("format", MODEL_FORMAT),
            ("version", MODEL_VERSION),
            ("params", OrderedDict([("gamma", self.params.gamma), ("c", self.params.c)])),
            ("bias", self.bias),
            ("dual_coefficients", [float(x) for x in self.dual_coefficients]),
            ("support_vectors", [[float(x) for x in row] for row in self.support_vectors]),
            ("scaler", self.scaler.to_dict() if self.scaler is not None else None),
            ("info", self.info),
        ])

    @classmethod
    def from_dict(cls, data):
        if data.get("format") != MODEL_FORMAT:
            raise ModelFormatError("not a wisig model container")
        if data.get("version") != MODEL_VERSION:
            raise ModelFormatError("unsupported model version {}".format(data.get("version")))
        try:
            params = KernelParams(data["params"]["gamma"], data["params"]["c"])
            scaler = data.get("scaler")
            if scaler is not None:
                scaler = StandardScaler.from_dict(scaler)
            support_vectors = data["support_vectors"]
            if not support_vectors:
                raise ModelFormatError("model has no support vectors")
            return cls(support_vectors, data["dual_coefficients"], data["bias"], params,
                       scaler=scaler, info=data.get("info"))
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError("malformed model container: {}".format(e))


def decision_value(model, u):
    """``f(u) = sum_i coef_i * k(sv_i, u) + b``; positive means the genuine
    (within-writer) side of the hyperplane."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.shape[0] != model.dimensionality:
        raise DimensionError("model expects vectors of length {}, got shape {}".format(
            model.dimensionality, u.shape))
    kernel = rbf_rows(model.support_vectors, u.reshape(1, -1), model.params.gamma)[:, 0]
    return float(np.dot(model.dual_coefficients, kernel) + model.bias)


def save_model(model, fh):
    """Write a model container as JSON to a path or an open file handle."""
    handle, close = utils.open_text(fh, "w")
    try:
        json.dump(model.to_dict(), handle, indent=1)
        handle.write("\n")
    finally:
        if close:
            handle.close()


def load_model(fh):
    """Read a model container written by ``save_model()``."""
    handle, close = utils.open_text(fh, "r")
    try:
        data = json.load(handle)
    except ValueError as e:
        raise ModelFormatError("model file is not valid JSON: {}".format(e))
    finally:
        if close:
            handle.close()
    return DichotomizerModel.from_dict(data)


class SMOTrainer(object):
    """Sequential minimal optimization for the soft-margin SVM dual.

    Each step optimizes two multipliers analytically. The working pair uses
    the error cache ``E_i = f(x_i) - y_i``: the first index is the sample
    that can still move up with the smallest error, the second the sample
    that can still move down with the largest one, which maximizes
    ``|E_1 - E_2|`` among admissible pairs. Training stops when that gap is
    at most ``tol``; every sample then satisfies the KKT conditions within
    ``tol``.

    Parameters:
        params (KernelParams): Kernel width and box constraint.
        tol (float): KKT tolerance.
        max_passes (int): Iteration budget, in multiples of the training size.
        cache (KernelCache): Kernel row cache. A fresh ``MemoryKernelCache``
            of ``cache_size`` rows is used when not given.
        cache_size (int): Rows kept by the default cache.
        seed (int): Seeds the order candidates are considered in, which only
            matters for ties.
        say (function): Optional debug logger.
    """

    def __init__(self, params, tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_PASSES, cache=None,
                 cache_size=DEFAULT_CACHE_SIZE, seed=0, say=None):
        if not tol > 0:
            raise ConfigError("tol must be positive")
        if int(max_passes) < 1:
            raise ConfigError("max_passes must be at least 1")
        self.params = params
        self.tol = float(tol)
        self.max_passes = int(max_passes)
        self.cache = cache if cache is not None else MemoryKernelCache(cache_size)
        self.seed = seed
        self.say = say if say is not None else (lambda x: x)

    def _row(self, X, i):
        row = self.cache.get(i)
        if row is None:
            row = rbf_rows(X, X[i:i + 1], self.params.gamma)[:, 0]
            self.cache.set(i, row)
        return row

    def fit(self, samples, scaler=None):
        """Train on labeled vectors.

        Parameters:
            samples (DissimilaritySet): Training samples, labels +1/-1.
            scaler (StandardScaler): Stored in the model for later use; the
                samples must already have been standardized with it.

        Returns:
            DichotomizerModel
        """
        vectors = np.asarray(samples.vectors, dtype=float)
        labels = np.asarray(samples.labels)
        if len(vectors) == 0:
            raise EmptyInputError("cannot train on an empty collection")
        if not (np.any(labels == POSITIVE) and np.any(labels == NEGATIVE)):
            raise SingleClassError()
        if np.any((labels != POSITIVE) & (labels != NEGATIVE)):
            raise SingleClassError("training samples must all be labeled positive or negative")

        C = self.params.c
        size = len(vectors)
        order = np.random.default_rng(self.seed).permutation(size)
        X = vectors[order]
        y = labels[order].astype(float)

        self.cache.reset()
        alpha = np.zeros(size)
        F = np.zeros(size)  # sum_j alpha_j y_j K_ij
        budget = self.max_passes * size
        iterations = 0
        snap = 1e-12 * C

        while True:
            G = F - y
            up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
            low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
            i = int(np.argmin(np.where(up, G, np.inf)))
            j = int(np.argmax(np.where(low, G, -np.inf)))
            gap = G[j] - G[i]
            if not (up[i] and low[j]) or gap <= self.tol:
                break
            if iterations >= budget:
                raise ConvergenceError(float(gap), iterations)

            Ki = self._row(X, i)
            Kj = self._row(X, j)
            eta = max(Ki[i] + Kj[j] - 2.0 * Ki[j], TAU)

            yi, yj = y[i], y[j]
            ai, aj = alpha[i], alpha[j]
            if yi != yj:
                L, H = max(0.0, aj - ai), min(C, C + aj - ai)
            else:
                L, H = max(0.0, ai + aj - C), min(C, ai + aj)

            aj_new = min(max(aj + yj * (G[i] - G[j]) / eta, L), H)
            ai_new = ai + yi * yj * (aj - aj_new)
            if ai_new < snap:
                ai_new = 0.0
            elif ai_new > C - snap:
                ai_new = C
            if aj_new < snap:
                aj_new = 0.0
            elif aj_new > C - snap:
                aj_new = C

            F += (ai_new - ai) * yi * Ki + (aj_new - aj) * yj * Kj
            alpha[i], alpha[j] = ai_new, aj_new
            iterations += 1

            if iterations % 1000 == 0:
                self.say("SMO iteration {}: gap {:.3g}".format(iterations, gap))

        G = F - y
        free = (alpha > 0) & (alpha < C)
        if np.any(free):
            bias = float(np.mean(-G[free]))
        else:
            up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
            low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
            lo = np.min(G[up]) if np.any(up) else np.max(G[low])
            hi = np.max(G[low]) if np.any(low) else lo
            bias = float(-(lo + hi) / 2.0)

        violation = kkt_violation(alpha, y, F + bias, C)
        objective = float(np.sum(alpha) - 0.5 * np.dot(alpha * y, F))

        support = np.flatnonzero(alpha > 0)
        original = order[support]
        keep = np.argsort(original, kind="stable")
        support = support[keep]

        self.say("SMO finished after {} iterations: {} support vectors, objective {:.6g}".format(
            iterations, len(support), objective))

        info = OrderedDict([
            ("training_size", int(size)),
            ("iterations", int(iterations)),
            ("dual_objective", objective),
            ("kkt_violation", float(violation)),
            ("tol", self.tol),
            ("seed", int(self.seed)),
        ])
        return DichotomizerModel(X[support], alpha[support] * y[support], bias, self.params,
                                 scaler=scaler, info=info)


def kkt_violation(alpha, y, f, C):
    """Largest KKT residual of a dual solution.

    ``alpha == 0`` needs ``y f >= 1``, ``alpha == C`` needs ``y f <= 1`` and
    a free multiplier needs ``y f == 1``.
    """
    margin = y * f - 1.0
    residual = np.where(alpha <= 0, np.maximum(0.0, -margin),
                        np.where(alpha >= C, np.maximum(0.0, margin), np.abs(margin)))
    return float(np.max(residual)) if len(residual) else 0.0


def train(samples, params=None, tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_PASSES, seed=0,
          scaler=None, cache=None, cache_size=DEFAULT_CACHE_SIZE, say=None):
    """Train a dichotomizer by SMO. See ``SMOTrainer`` for the parameters."""
    if params is None:
        params = KernelParams()
    trainer = SMOTrainer(params, tol=tol, max_passes=max_passes, cache=cache,
                         cache_size=cache_size, seed=seed, say=say)
    return trainer.fit(samples, scaler=scaler)


def dual_objective(model):
    """Dual objective ``sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij``
    of a trained model, recomputed from its support set."""
    coef = model.dual_coefficients
    K = rbf_rows(model.support_vectors, model.support_vectors, model.params.gamma)
    return float(np.sum(np.abs(coef)) - 0.5 * np.dot(coef, np.dot(K, coef)))


def grid_search_table(train_set, validation, c_grid=C_GRID, gamma_grid=GAMMA_GRID,
                      tol=DEFAULT_TOL, max_passes=DEFAULT_MAX_PASSES, seed=0, scaler=None,
                      cache_size=DEFAULT_CACHE_SIZE, say=None, warn=None):
    """Train one model per ``(C, gamma)`` pair and score it on validation.

    Returns:
        list of dict: One entry per pair, ordered by ``C`` then ``gamma``,
        with keys ``c``, ``gamma`` and ``eer`` (``None`` when training did
        not converge).
    """
    from .evaluation import user_threshold_eer

    if warn is None:
        warn = lambda x: x
    c_grid = sorted(float(c) for c in c_grid)
    gamma_grid = sorted(float(g) for g in gamma_grid)
    if not c_grid or not gamma_grid:
        raise EmptyInputError("grid search needs non-empty C and gamma grids")

    positives = validation.labels == POSITIVE
    negatives = validation.labels == NEGATIVE
    if not (np.any(positives) and np.any(negatives)):
        raise SingleClassError("single-class input: validation set needs both classes")

    table = []
    for c in c_grid:
        for gamma in gamma_grid:
            params = KernelParams(gamma, c)
            try:
                model = train(train_set, params, tol=tol, max_passes=max_passes, seed=seed,
                              scaler=scaler, cache_size=cache_size, say=say)
            except ConvergenceError as e:
                warn("grid search: C={} gamma={} skipped ({})".format(c, gamma, e.error_message))
                table.append(OrderedDict([("c", c), ("gamma", gamma), ("eer", None)]))
                continue
            scores = model.decision_values(validation.vectors)
            _, eer = user_threshold_eer(scores[positives], scores[negatives])
            table.append(OrderedDict([("c", c), ("gamma", gamma), ("eer", eer)]))
    return table


def select_grid_params(table):
    """Pick the pair with the lowest validation EER; ties go to the smaller
    ``C``, then the smaller ``gamma``."""
    best = None
    for entry in sorted(table, key=lambda e: (e["c"], e["gamma"])):
        if entry["eer"] is None:
            continue
        if best is None or entry["eer"] < best["eer"]:
            best = entry
    if best is None:
        raise ConvergenceError(math.inf, 0)
    return KernelParams(best["gamma"], best["c"])


def grid_search(train_set, validation, c_grid=C_GRID, gamma_grid=GAMMA_GRID, **kwargs):
    """Select kernel parameters by validation EER over a grid.

    Parameters:
        train_set (DissimilaritySet): Standardized training samples.
        validation (DissimilaritySet): Standardized validation samples from
            writers disjoint from the training ones.
        c_grid (sequence of float): Candidate box constraints.
        gamma_grid (sequence of float): Candidate RBF widths.

    Returns:
        KernelParams
    """
    return select_grid_params(grid_search_table(train_set, validation, c_grid, gamma_grid,
                                                **kwargs))
