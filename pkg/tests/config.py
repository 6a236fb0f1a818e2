#!/usr/bin/env python

"""Utility functions for the unit tests."""

import io
import os
import shutil
import tempfile
import textwrap
import unittest

import numpy as np

from wisig.datamodel import SynthConfig, fit_scaler, synth_generate
from wisig.dichotomizer import KernelParams, train
from wisig.dichotomy import DissimilaritySet, PairingPlan, build_training_set, POSITIVE, NEGATIVE

class WisigTestCase(unittest.TestCase):
    """Base class for all wisig test cases, with helper functions."""

    def setUp(self, **kwargs):
        self.tmp = None # Scratch directory, made on demand


    def tearDown(self):
        if self.tmp is not None:
            shutil.rmtree(self.tmp, ignore_errors=True)


    def scratch(self, name=None):
        """A scratch directory (or a path inside it) removed after the test."""
        if self.tmp is None:
            self.tmp = tempfile.mkdtemp(prefix="wisig-test-")
        if name is None:
            return self.tmp
        return os.path.join(self.tmp, name)


    def stream(self, text):
        """An in-memory text file holding dedented ``text``."""
        return io.StringIO(textwrap.dedent(text).lstrip("\n"))


    def write(self, name, text):
        """Write dedented ``text`` into the scratch directory; returns the path."""
        path = self.scratch(name)
        with open(path, "w") as fh:
            fh.write(textwrap.dedent(text).lstrip("\n"))
        return path


    def synth(self, seed=0, **kwargs):
        """A small synthetic dataset; keyword arguments override the
        generator parameters."""
        params = dict(writers=8, dimensionality=6, genuine=8, skilled=4)
        params.update(kwargs)
        return synth_generate(SynthConfig(**params), seed)


    def labeled(self, vectors, labels, kind="genuine"):
        """A dissimilarity set from raw vectors and +1/-1 labels."""
        vectors = np.asarray(vectors, dtype=float)
        size = len(vectors)
        return DissimilaritySet(
            vectors, labels, [kind if l == POSITIVE else "random" for l in labels],
            [(0, i) for i in range(size)], [(1, i) for i in range(size)],
            dimensionality=vectors.shape[1],
        )


    def blobs(self, size=40, dims=2, separation=4.0, seed=0):
        """Two labeled Gaussian blobs, positives around the origin."""
        rng = np.random.default_rng(seed)
        half = size // 2
        positives = rng.normal(0.0, 1.0, (half, dims))
        negatives = rng.normal(separation, 1.0, (size - half, dims))
        labels = [POSITIVE] * half + [NEGATIVE] * (size - half)
        return self.labeled(np.vstack([positives, negatives]), labels)


    def assertAllClose(self, actual, expected, atol=1e-9):
        np.testing.assert_allclose(np.asarray(actual, dtype=float),
                                   np.asarray(expected, dtype=float), rtol=0, atol=atol)


    def fitted(self, development, plan=None, params=None, seed=0):
        """Train a dichotomizer on a development set.

        Returns:
            tuple: ``(model, training)``, the training set standardized.
        """
        plan = plan or PairingPlan(4, 2, seed=seed)
        raw = build_training_set(development, plan)
        scaler = fit_scaler(raw)
        training = raw.standardized(scaler)
        model = train(training, params or KernelParams(0.5, 1.0), seed=seed, scaler=scaler)
        return model, training
