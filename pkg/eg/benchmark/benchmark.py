#!/usr/bin/env python

"""The synthetic benchmark: 50 writers, n=32, 10 replications.

Runs the experiment with and without condensation, prints the global EER of
every fusion function and checks the expected shape of the results. Exits
with status 1 if a check fails. Takes a few minutes."""

from __future__ import print_function
import os
import sys

sys.path.append(os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", ".."))

from wisig import benchmark
from wisig.evaluation import format_mean_std

def main():
    debug = bool(os.environ.get("BENCHMARK_DEBUG"))
    result = benchmark.run(debug=debug)
    for name, experiment in (("on", result.condensed), ("off", result.full)):
        report = experiment.report
        print("condensation {}".format(name))
        for label in report.configurations:
            values = [r[label] for r in report.replications]
            print("  {:<12} {}".format(label, format_mean_std(values)))
        print()

    print(result.render())
    return 0 if result.passed else 1

if __name__ == "__main__":
    sys.exit(main())
