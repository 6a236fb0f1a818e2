#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import unicode_literals, absolute_import

import io
import json
import os

from .config import WisigTestCase
from wisig.cli import (
    EXIT_ERROR, EXIT_MISSING, EXIT_OK, EXIT_USAGE, FAILED_MARKER, MANIFEST_NAME, run_command
)
from wisig.dichotomy import POSITIVE
from wisig.parser import load_features, save_dissimilarity_set

EVAL_CONFIG = dict(
    synth=dict(writers=12, dimensionality=4, genuine=8, skilled=4),
    exploitation_writers=4,
    genuines_per_writer=4,
    random_forgery_writers=2,
    exploitation=dict(genuine=3, skilled=3, random=2, references=3),
    reference_counts=[1, 3],
    replications=2,
    condense=False,
    gamma=0.5,
)

def read(path):
    with io.open(path, "r", encoding="utf-8") as fh:
        return fh.read()


class CommandLineTests(WisigTestCase):
    """The wisig command line."""

    def test_synth(self):
        """Two runs with the same seed write identical feature files."""
        outputs = []
        for name in ("a", "b"):
            out = self.scratch(name)
            status = run_command(["synth", "--writers", "3", "--genuine", "2", "--skilled", "1",
                                  "--dimensionality", "5", "--seed", "7", "--out", out])
            self.assertEqual(status, EXIT_OK)
            outputs.append(read(os.path.join(out, "synthetic.features")))
            manifest = json.loads(read(os.path.join(out, MANIFEST_NAME)))
            self.assertEqual(manifest["command"], "synth")
            self.assertEqual(manifest["artifacts"], ["synthetic.features"])
        self.assertEqual(outputs[0], outputs[1])

        dataset = load_features(os.path.join(self.scratch("a"), "synthetic.features"))
        self.assertEqual(len(dataset), 9)
        self.assertEqual(dataset.dimensionality, 5)

    def test_single_class_training(self):
        samples = self.labeled([[0.0, 1.0], [1.0, 2.0]], [POSITIVE, POSITIVE])
        path = self.scratch("positive.dis")
        save_dissimilarity_set(samples, path)
        out = self.scratch("train")
        self.assertEqual(run_command(["train", "--samples", path, "--out", out]), EXIT_ERROR)
        self.assertIn("single-class input", read(os.path.join(out, FAILED_MARKER)))
        self.assertFalse(os.path.exists(os.path.join(out, MANIFEST_NAME)))

    def test_missing_file(self):
        out = self.scratch("missing")
        status = run_command(["train", "--samples", self.scratch("nowhere.dis"), "--out", out])
        self.assertEqual(status, EXIT_MISSING)
        self.assertTrue(os.path.isfile(os.path.join(out, FAILED_MARKER)))

    def test_usage_errors(self):
        self.assertEqual(run_command([]), EXIT_USAGE)
        out = self.scratch("usage")
        config = self.write("bad.json", '{"kernel": "linear"}')
        self.assertEqual(run_command(["eval", "--config", config, "--out", out]), EXIT_USAGE)
        self.assertIn("kernel", read(os.path.join(out, FAILED_MARKER)))

    def test_rerun_replays_inputs(self):
        """Commands whose inputs are files re-run from their manifest alone."""
        data = self.scratch("data")
        self.assertEqual(run_command(["synth", "--writers", "6", "--genuine", "6", "--skilled", "2",
                                      "--dimensionality", "4", "--seed", "3", "--out", data]),
                         EXIT_OK)
        features = os.path.join(data, "synthetic.features")
        ds = self.scratch("ds")
        self.assertEqual(run_command(["build-ds", "--features", features,
                                      "--genuines-per-writer", "4",
                                      "--random-forgery-writers", "2", "--out", ds]), EXIT_OK)

        first = self.scratch("train-1")
        self.assertEqual(run_command(["train", "--samples", os.path.join(ds, "training.dis"),
                                      "--gamma", "0.5", "--out", first]), EXIT_OK)
        second = self.scratch("train-2")
        self.assertEqual(run_command(["train", "--config", os.path.join(first, MANIFEST_NAME),
                                      "--out", second]), EXIT_OK)
        self.assertEqual(read(os.path.join(first, "model.json")),
                         read(os.path.join(second, "model.json")))

        queries = self.write("queries.csv", """
            0,5,genuine,0,0;1;2
            0,1,skilled,0,0;1;2
            1,5,genuine,0,0;1;2
        """)
        model = os.path.join(first, "model.json")
        runs = [self.scratch("verify-1"), self.scratch("verify-2")]
        self.assertEqual(run_command(["verify", "--model", model, "--features", features,
                                      "--manifest", queries, "--threshold", "0.25",
                                      "--out", runs[0]]), EXIT_OK)
        self.assertEqual(run_command(["verify", "--config", os.path.join(runs[0], MANIFEST_NAME),
                                      "--out", runs[1]]), EXIT_OK)
        results = [read(os.path.join(run, "verification.csv")) for run in runs]
        self.assertEqual(results[0], results[1])
        self.assertEqual(len(results[0].splitlines()), 4)

        manifest = json.loads(read(os.path.join(runs[1], MANIFEST_NAME)))
        self.assertIn("--threshold", manifest["argv"])
        self.assertNotIn(runs[0], manifest["argv"])

        # Flags given again override the recorded ones.
        third = self.scratch("verify-3")
        self.assertEqual(run_command(["verify", "--config", os.path.join(runs[0], MANIFEST_NAME),
                                      "--threshold", "1000", "--out", third]), EXIT_OK)
        decisions = [line.split(",")[-1] for line in
                     read(os.path.join(third, "verification.csv")).splitlines()[1:]]
        self.assertEqual(decisions, ["reject"] * 3)

    def test_eval_and_rerun(self):
        config = self.write("config.json", json.dumps(EVAL_CONFIG))
        first = self.scratch("first")
        self.assertEqual(run_command(["eval", "--config", config, "--seed", "5", "--out", first]),
                         EXIT_OK)
        files = os.listdir(first)
        for name in ("report.txt", "eer.csv", "writers.csv", "ih_histogram.csv", MANIFEST_NAME):
            self.assertIn(name, files)
        self.assertEqual(len([f for f in files if f.startswith("ih_negative_")]), 3)
        self.assertIn("ih_positive.csv", files)

        manifest = json.loads(read(os.path.join(first, MANIFEST_NAME)))
        self.assertEqual(manifest["seed"], 5)
        self.assertEqual(len(manifest["replication_seeds"]), 2)
        self.assertIn("report.txt", manifest["artifacts"])

        # Repeating the run from its manifest reproduces the report.
        second = self.scratch("second")
        status = run_command(["eval", "--config", os.path.join(first, MANIFEST_NAME),
                              "--out", second])
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(read(os.path.join(first, "report.txt")),
                         read(os.path.join(second, "report.txt")))
        self.assertEqual(read(os.path.join(first, "eer.csv")),
                         read(os.path.join(second, "eer.csv")))
