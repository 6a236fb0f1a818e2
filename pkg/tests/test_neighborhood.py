#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import unicode_literals, absolute_import

import os

import numpy as np

from .config import WisigTestCase
from wisig.dichotomy import NEGATIVE, POSITIVE, sample
from wisig.hardness import kdn
from wisig.neighborhood import dump_neighborhood, write_dump

class NeighborhoodTests(WisigTestCase):
    """Neighborhood dumps behind kDN values."""

    def setUp(self):
        super(NeighborhoodTests, self).setUp()
        self.training = self.blobs(size=40, dims=3, separation=8.0, seed=2)

    def test_positive_inside_cluster(self):
        query = sample([0.0, 0.0, 0.0], POSITIVE, "genuine", (3, 12), (3, 0))
        dump = dump_neighborhood(query, self.training)
        self.assertEqual(len(dump.rows), 7)
        self.assertTrue(all(row.label == POSITIVE for row in dump.rows))
        self.assertEqual(dump.hardness.value, 0.0)

    def test_good_forgery(self):
        query = sample([0.0, 0.0, 0.0], NEGATIVE, "skilled", (3, 1), (3, 0))
        dump = dump_neighborhood(query, self.training)
        self.assertTrue(all(row.label == POSITIVE for row in dump.rows))
        self.assertEqual(dump.hardness.value, 1.0)

    def test_matches_kdn(self):
        rng = np.random.default_rng(6)
        for index in range(100):
            label = POSITIVE if index % 2 else NEGATIVE
            query = sample(rng.normal(4.0, 3.0, 3), label, None, (0, index), (1, 0))
            dump = dump_neighborhood(query, self.training)
            self.assertEqual(dump.hardness, kdn(query, self.training))
            self.assertEqual(dump.recomputed_hardness(), dump.hardness)
            distances = [row.distance for row in dump.rows]
            self.assertEqual(distances, sorted(distances))
            self.assertEqual([row.rank for row in dump.rows], list(range(1, 8)))

    def test_render_and_write(self):
        query = sample([1.0, 1.0, 1.0], NEGATIVE, "skilled", (3, 1), (3, 0))
        dump = dump_neighborhood(query, self.training, k=5)
        self.assertEqual(dump.render(), dump_neighborhood(query, self.training, k=5).render())
        self.assertEqual(dump.filename(), "neighborhood_q3-1_r3-0_skilled.txt")
        self.assertIn("kDN (k=5)", dump.render())
        path = write_dump(dump, self.scratch("dumps"))
        self.assertTrue(os.path.isfile(path))
        with open(path) as fh:
            self.assertEqual(fh.read(), dump.render())
