#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import unicode_literals, absolute_import

import numpy as np

from .config import WisigTestCase
from wisig.dichotomy import NEGATIVE, POSITIVE, UNKNOWN, sample
from wisig.exceptions import WisigError
from wisig.hardness import (
    BAD, GOOD, HardnessScore, classify_forgery_quality, k_nearest, kdn, kdn_batch
)

class KdnTests(WisigTestCase):
    """k-Disagreeing Neighbors."""

    def setUp(self):
        super(KdnTests, self).setUp()
        # Seven positives near the origin, negatives far away.
        vectors = [[0.1 * i] for i in range(1, 8)] + [[100.0 + i] for i in range(5)]
        self.training = self.labeled(vectors, [POSITIVE] * 7 + [NEGATIVE] * 5)

    def test_agreeing(self):
        self.assertEqual(kdn([0.0], self.training, 7, label=POSITIVE), HardnessScore(0, 7))
        self.assertEqual(kdn([0.0], self.training, 7, label=POSITIVE).value, 0.0)

    def test_disagreeing(self):
        """A negative among positives is as hard as it gets."""
        score = kdn(sample([0.0], NEGATIVE, "skilled", (0, 0), (0, 1)), self.training)
        self.assertEqual(score.value, 1.0)

    def test_partial(self):
        vectors = [[0.1], [0.2], [0.3], [0.4], [0.5], [0.6], [0.7], [50.0], [60.0]]
        labels = [POSITIVE] * 4 + [NEGATIVE] * 3 + [POSITIVE, POSITIVE]
        score = kdn([0.0], self.labeled(vectors, labels), 7, label=POSITIVE)
        self.assertEqual(score, HardnessScore(3, 7))
        self.assertAlmostEqual(float(score), 3 / 7.0)
        self.assertEqual(str(score), "0.43")

    def test_ties_go_to_lower_index(self):
        vectors = [[0.0], [1.0], [1.0], [5.0]]
        first = self.labeled(vectors, [POSITIVE, POSITIVE, NEGATIVE, NEGATIVE])
        second = self.labeled(vectors, [POSITIVE, NEGATIVE, POSITIVE, NEGATIVE])
        self.assertEqual(kdn([0.0], first, 2, label=POSITIVE).disagreeing, 0)
        self.assertEqual(kdn([0.0], second, 2, label=POSITIVE).disagreeing, 1)

    def test_brute_force(self):
        """Matches a full sort of the training set."""
        rng = np.random.default_rng(12)
        for size in (50, 200, 1000, 5000):
            vectors = rng.normal(size=(size, 5))
            # Repeated rows make ties.
            vectors[size // 2:size // 2 + 10] = vectors[:10]
            labels = rng.choice([POSITIVE, NEGATIVE], size=size)
            training = self.labeled(vectors, labels)
            queries = np.vstack([rng.normal(size=(240, 5)), vectors[:10]])
            for query in queries:
                label = int(rng.choice([POSITIVE, NEGATIVE]))
                distances = np.sum((vectors - query) ** 2, axis=1)
                order = [int(i) for i in np.lexsort((np.arange(size), distances))[:7]]
                expected = sum(1 for i in order if labels[i] != label)
                self.assertEqual(kdn(query, training, 7, label=label), HardnessScore(expected, 7))
                self.assertEqual(list(k_nearest(vectors, query, 7)[0]), order)

    def test_permutation(self):
        """Shuffling a tie-free training set doesn't change kDN."""
        rng = np.random.default_rng(2)
        vectors = rng.normal(size=(60, 3))
        labels = rng.choice([POSITIVE, NEGATIVE], size=60)
        order = rng.permutation(60)
        a = self.labeled(vectors, labels)
        b = self.labeled(vectors[order], labels[order])
        queries = rng.normal(size=(20, 3))
        query_labels = rng.choice([POSITIVE, NEGATIVE], size=20)
        self.assertEqual(kdn_batch(queries, query_labels, a), kdn_batch(queries, query_labels, b))

    def test_errors(self):
        small = self.labeled([[0.0], [1.0]], [POSITIVE, NEGATIVE])
        self.assertRaises(WisigError, kdn, [0.0], small, 7, POSITIVE)
        self.assertRaises(WisigError, kdn, [0.0], self.training, 7, UNKNOWN)
        self.assertRaises(WisigError, kdn, [0.0], self.training)


class QualityTests(WisigTestCase):
    """Good and bad quality skilled forgeries."""

    def test_classify(self):
        self.assertEqual(classify_forgery_quality(HardnessScore(0, 7)), BAD)
        self.assertEqual(classify_forgery_quality(HardnessScore(3, 7)), BAD)
        self.assertEqual(classify_forgery_quality(HardnessScore(4, 7)), GOOD)
        self.assertEqual(classify_forgery_quality(HardnessScore(7, 7)), GOOD)
        self.assertEqual(classify_forgery_quality(HardnessScore(2, 4)), BAD)
