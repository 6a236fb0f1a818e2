#!/usr/bin/env python

"""Run the wisig pipeline one step at a time."""

from __future__ import print_function
import os
import sys

sys.path.append(os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", ".."))

from wisig import (
    SynthConfig, PairingPlan, KernelParams, build_training_set, build_query_set, condense,
    dump_neighborhood, fit_scaler, kdn, synth_generate, train, verify
)
from wisig.protocols import split_first

DEBUG = bool(os.environ.get("PIPELINE_DEBUG"))

def say(message):
    if DEBUG:
        print("[pipeline]", message)

def main():
    dataset = synth_generate(SynthConfig(writers=30, dimensionality=8, genuine=20, skilled=6),
                             seed=1)
    development, exploitation = split_first(dataset, 5)
    print("development:", development)
    print("exploitation:", exploitation)

    samples = build_training_set(development, PairingPlan(14, 7, seed=1))
    scaler = fit_scaler(samples)
    samples = samples.standardized(scaler)
    result = condense(samples, seed=1, say=say)
    training = samples.subset(result.retained_indices)
    print("condensed {} samples to {} in {} passes".format(
        len(samples), len(training), result.passes))

    model = train(training, KernelParams(0.1, 1.0), seed=1, scaler=scaler, say=say)
    print("trained on", model.info["training_size"], "samples,",
          len(model.support_vectors), "support vectors")

    writer = exploitation.writers()[0]
    references = exploitation.records_for(writer)[:5]
    questioned = exploitation.records_for(writer)[5:10] + exploitation.records_for(writer, "skilled")

    print()
    print("kind      score    kDN")
    hardest = None
    for record in questioned:
        outcome = verify(model, record, references)
        query = build_query_set(record, references[:1]).standardized(scaler)[0]
        hardness = kdn(query, training)
        print("{:<8} {:>7.3f}  {}".format(record.kind, outcome.fused_score, hardness))
        if record.kind == "skilled" and (hardest is None or hardness.value > hardest[1].value):
            hardest = (query, hardness)

    if hardest is not None:
        print()
        print(dump_neighborhood(hardest[0], training).render())

if __name__ == "__main__":
    main()
