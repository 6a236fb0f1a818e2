# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import division, unicode_literals
from collections import OrderedDict

from .datamodel import SKILLED
from .evaluation import CAT_POSITIVE, CAT_SKILLED
from .experiment import Experiment, ExperimentConfig
from .hardness import GOOD
from .verification import MAX

"""The synthetic benchmark and the shape its results must have.

The benchmark runs the same experiment with and without condensation and
checks the qualitative findings the method is known for: genuine queries are
easy and good forgeries hard for the condensed training set, fusing more
references with MAX helps on the hardest skilled forgeries, MAX is the best
fusion function and condensation does not change the EER."""

CONFIG = OrderedDict([
    ("name", "synthetic-benchmark"),
    ("synth", dict(writers=50, dimensionality=32, genuine=24, skilled=10)),
    ("exploitation_writers", 20),
    ("exploitation", {"preset": "gpds"}),
    ("gamma", 0.01),
    ("reference_counts", [1, 5, 12]),
    ("replications", 10),
    ("seed", 2026),
])

# Thresholds of the expected shape.
EASY_IH            = 0.14   # Highest IH bin counted as easy.
EASY_POSITIVES     = 0.85   # Share of positives in the easy bins.
HARD_GOOD          = 0.60   # Share of good forgeries at IH 1.0.
TREND_REPLICATIONS = 8      # Replications where more MAX references must win.
CNN_EER_DELTA      = 0.005  # Allowed EER change from condensation.


class BenchmarkResult(object):
    """The measurements of one benchmark run and the checks they fail.

    Parameters:
        condensed (Experiment): The experiment run with condensation, built
            with ``keep_queries=True``.
        full (Experiment): The same experiment without condensation.
    """

    def __init__(self, condensed, full):
        self.condensed = condensed
        self.full = full
        self.measures = OrderedDict()
        self.failures = []
        self._measure()

    @property
    def passed(self):
        return not self.failures

    def _measure(self):
        reports = self.condensed.reports
        report = self.condensed.report

        self.measures["easy_positives"] = easy_share(report.ih_tables[CAT_POSITIVE])
        self.measures["hard_good_forgeries"] = hard_good_share(self.condensed)

        wins = 0
        for single in reports:
            if fusion_helps(single.ih_tables[CAT_SKILLED]):
                wins += 1
        self.measures["fusion_trend_replications"] = wins

        eers = report.eer_by_configuration()
        largest = max_label(report.configurations)
        self.measures["max_fusion_eer"] = eers[largest]
        rivals = [label for label in report.configurations
                  if label != largest and label.split("_")[0] == largest.split("_")[0]]
        self.measures["best_rival_eer"] = min(eers[label] for label in rivals) if rivals else None

        self.measures["cnn_eer_delta"] = abs(report.global_eer() - self.full.report.global_eer())

        m = self.measures
        if m["easy_positives"] < EASY_POSITIVES:
            self.failures.append("{:.1%} of positive queries have IH <= {}, expected {:.0%}".format(
                m["easy_positives"], EASY_IH, EASY_POSITIVES))
        if m["hard_good_forgeries"] < HARD_GOOD:
            self.failures.append("{:.1%} of good forgeries have IH 1.0, expected {:.0%}".format(
                m["hard_good_forgeries"], HARD_GOOD))
        if wins < TREND_REPLICATIONS:
            self.failures.append("MAX fusion beat R1 on IH 1.0 skilled forgeries in {} of {} "
                                 "replications, expected {}".format(
                                     wins, len(reports), TREND_REPLICATIONS))
        if m["best_rival_eer"] is not None and m["max_fusion_eer"] > m["best_rival_eer"]:
            self.failures.append("MAX fusion EER {:.4f} is above {:.4f}".format(
                m["max_fusion_eer"], m["best_rival_eer"]))
        if m["cnn_eer_delta"] > CNN_EER_DELTA:
            self.failures.append("condensation moved the EER by {:.4f}".format(m["cnn_eer_delta"]))

    def render(self):
        lines = []
        for key, value in self.measures.items():
            if isinstance(value, float):
                value = "{:.4f}".format(value)
            lines.append("{:<26} {}".format(key, value))
        lines.append("")
        lines.extend(["FAIL: " + f for f in self.failures] or ["all checks passed"])
        return "\n".join(lines)


def max_label(configurations):
    """The MAX configuration with the most references."""
    labels = [label for label in configurations if label.endswith("_" + MAX)]
    if not labels:
        return configurations[0]
    return max(labels, key=lambda label: int(label[1:].split("_")[0]))


def easy_share(table, limit=EASY_IH):
    """Share of a table's queries whose IH, rounded to two digits, is at
    most ``limit``."""
    if not table.total:
        return 0.0
    easy = sum(count for ih, count, _ in table.rows() if round(ih, 2) <= limit)
    return easy / table.total


def hard_good_share(experiment):
    """Share of the generated good skilled forgeries that every neighbor
    of the condensed training set disagrees with."""
    good = hard = 0
    for index, report in enumerate(experiment.reports):
        quality = experiment.segment(index)[1].forgery_quality
        for query in report.queries:
            if query.category != CAT_SKILLED:
                continue
            if quality.get((query.query_ref[0], query.query_ref[1], SKILLED)) != GOOD:
                continue
            good += 1
            if query.hardness.disagreeing == query.hardness.k:
                hard += 1
    return hard / good if good else 0.0


def fusion_helps(table):
    """Whether every MAX configuration of five or more references is
    strictly more accurate than ``R1`` on the queries with IH 1.0."""
    row = table.k
    single = table.accuracy("R1", row)
    if single is None:
        return False
    fused = [label for label in table.configurations if label.endswith("_" + MAX)
             and int(label[1:].split("_")[0]) >= 5]
    if not fused:
        return False
    return all(table.accuracy(label, row) > single for label in fused)


def run(config=None, debug=False, **overrides):
    """Run the benchmark with and without condensation.

    Parameters:
        config (dict): Experiment settings; defaults to ``CONFIG``.
        debug (bool): Verbose experiment logging.
        overrides: Settings replacing those of ``config``.

    Returns:
        BenchmarkResult
    """
    values = dict(config or CONFIG)
    values.update(overrides)
    experiments = []
    for condense in (True, False):
        experiment = Experiment(ExperimentConfig(**dict(values, condense=condense)),
                                debug=debug, keep_queries=condense)
        experiment.run()
        experiments.append(experiment)
    return BenchmarkResult(*experiments)
