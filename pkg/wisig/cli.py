# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import print_function, unicode_literals

import argparse
import csv
import json
import os
import sys
from collections import OrderedDict
from six import text_type

from . import utils
from .datamodel import SynthConfig, fit_scaler, StandardScaler, synth_generate
from .dichotomizer import (
    grid_search_table, select_grid_params, train, save_model, load_model
)
from .dichotomy import build_training_set
from .evaluation import evaluate_exploitation, transfer_eval
from .experiment import Experiment, ExperimentConfig, SCALER_STANDARD, SCALER_NONE
from .neighborhood import dump_neighborhood, write_dump
from .parser import (
    load_features, save_features, load_dissimilarity_set, save_dissimilarity_set, load_manifest
)
from .protocols import PAIRING_PRESETS, SEGMENTATIONS
from .evaluation import EXPLOITATION_PRESETS
from .prototype import condense
from .verification import FUSION_KINDS, MANIFEST_COLUMNS, verify_manifest
from .exceptions import ConfigError, WisigError

# Exit statuses.
EXIT_OK      = 0
EXIT_ERROR   = 1
EXIT_USAGE   = 2
EXIT_MISSING = 3

FAILED_MARKER = "FAILED"
MANIFEST_NAME = "manifest.json"


def _common(parser):
    parser.add_argument("--seed", type=int, help="Master random seed.")
    parser.add_argument("--out", type=text_type, help="Output directory (default 'out').")
    parser.add_argument("--config", type=text_type,
                        help="JSON configuration file, or the manifest.json of an earlier run.")
    parser.add_argument("--debug", "-d", action="store_true",
                        help="Enable debug logging.")
    parser.add_argument("--log", type=text_type,
                        help="The path to a log file to send debugging output to (when debug "
                             "mode is enabled) instead of standard output.")


def _kernel(parser):
    parser.add_argument("--gamma", type=float, help="RBF kernel width (default 2**-11).")
    parser.add_argument("--c", type=float, help="Box constraint (default 1.0).")
    parser.add_argument("--tol", type=float, help="SMO KKT tolerance (default 1e-3).")
    parser.add_argument("--max-passes", type=int, dest="max_passes",
                        help="SMO iteration budget, in multiples of the training size.")
    parser.add_argument("--cache-size", type=int, dest="cache_size",
                        help="Kernel rows kept in the LRU cache.")


def _pairing(parser):
    parser.add_argument("--pairing", choices=list(PAIRING_PRESETS),
                        help="Development pairing preset.")
    parser.add_argument("--genuines-per-writer", type=int, dest="genuines_per_writer",
                        help="Genuine signatures paired per writer (R).")
    parser.add_argument("--random-forgery-writers", type=int, dest="random_forgery_writers",
                        help="Writers lending a random forgery (F).")
    parser.add_argument("--selection", choices=["lowest", "random"],
                        help="Which genuine signatures are paired.")


def _segmentation(parser):
    parser.add_argument("--segmentation", choices=list(SEGMENTATIONS),
                        help="How a single dataset is split into development and exploitation.")
    parser.add_argument("--fold", type=int,
                        help="First 5x2 split to run (0..9); replication i runs on fold+i.")


def _evaluation(parser):
    parser.add_argument("--exploitation", choices=list(EXPLOITATION_PRESETS),
                        help="Exploitation protocol preset.")
    parser.add_argument("--fusion", choices=list(FUSION_KINDS), help="Primary fusion function.")
    parser.add_argument("--reference-counts", type=int, nargs="+", dest="reference_counts",
                        help="Reference counts to evaluate.")
    parser.add_argument("--kdn-k", type=int, dest="kdn_k", help="kDN neighborhood size.")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wisig",
        description="Writer-independent signature verification in the dissimilarity space.")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    p = commands.add_parser("synth", help="Generate a synthetic feature file.")
    _common(p)
    for flag, kind in (("writers", int), ("dimensionality", int),
                       ("intrinsic-dimensionality", int), ("genuine", int),
                       ("skilled", int), ("simple", int), ("sigma-genuine", float),
                       ("sigma-centroid", float), ("good-fraction", float),
                       ("delta-good", float), ("delta-bad", float), ("delta-simple", float),
                       ("resolution", float), ("offset", float)):
        p.add_argument("--" + flag, type=kind, dest=flag.replace("-", "_"))
    p.add_argument("--name", type=text_type, help="Dataset name (and file name).")

    p = commands.add_parser("build-ds", help="Build a training dissimilarity set.")
    _common(p)
    _pairing(p)
    p.add_argument("--features", type=text_type, help="Development feature file.")

    p = commands.add_parser("condense", help="Standardize and condense a dissimilarity set.")
    _common(p)
    p.add_argument("--samples", type=text_type, required=True, help="Dissimilarity file.")
    p.add_argument("--scaler", choices=[SCALER_STANDARD, SCALER_NONE])

    p = commands.add_parser("train", help="Train the dichotomizer.")
    _common(p)
    _kernel(p)
    p.add_argument("--samples", type=text_type, required=True, help="Dissimilarity file.")
    p.add_argument("--scaler-file", type=text_type, dest="scaler_file",
                   help="Scaler the samples were standardized with.")
    p.add_argument("--scaler", choices=[SCALER_STANDARD, SCALER_NONE],
                   help="Fit a scaler on the samples when no scaler file is given.")

    p = commands.add_parser("grid-search", help="Select kernel parameters on a validation set.")
    _common(p)
    _kernel(p)
    p.add_argument("--samples", type=text_type, required=True,
                   help="Standardized training dissimilarity file.")
    p.add_argument("--validation", type=text_type, required=True,
                   help="Raw validation dissimilarity file.")
    p.add_argument("--scaler-file", type=text_type, dest="scaler_file")
    p.add_argument("--c-grid", type=float, nargs="+", dest="c_grid")
    p.add_argument("--gamma-grid", type=float, nargs="+", dest="gamma_grid")

    p = commands.add_parser("verify", help="Verify the queries of a manifest.")
    _common(p)
    p.add_argument("--model", type=text_type, required=True)
    p.add_argument("--features", type=text_type, required=True)
    p.add_argument("--manifest", type=text_type, required=True)
    p.add_argument("--fusion", choices=list(FUSION_KINDS))
    p.add_argument("--threshold", type=float, default=0.0)

    p = commands.add_parser("eval", help="Run the full replicated experiment.")
    _common(p)
    _kernel(p)
    _pairing(p)
    _evaluation(p)
    p.add_argument("--features", type=text_type)
    p.add_argument("--development-features", type=text_type, dest="development_features")
    p.add_argument("--exploitation-features", type=text_type, dest="exploitation_features")
    p.add_argument("--replications", type=int)
    p.add_argument("--no-condense", action="store_const", const=False, dest="condense")
    p.add_argument("--grid-search", action="store_const", const=True, dest="grid_search")
    p.add_argument("--validation-writers", type=int, dest="validation_writers")
    _segmentation(p)

    p = commands.add_parser("ih-report", help="IH tables of a trained model.")
    _common(p)
    _evaluation(p)
    p.add_argument("--model", type=text_type, required=True)
    p.add_argument("--features", type=text_type, required=True, help="Exploitation features.")
    p.add_argument("--training", type=text_type, required=True,
                   help="The standardized, condensed training dissimilarity file.")

    p = commands.add_parser("transfer", help="Evaluate on a foreign dataset.")
    _common(p)
    _kernel(p)
    _pairing(p)
    _evaluation(p)
    p.add_argument("--features", type=text_type, required=True, help="Foreign feature file.")
    p.add_argument("--model", type=text_type,
                   help="Apply this model instead of training per replication.")
    p.add_argument("--training", type=text_type,
                   help="Training dissimilarity file of --model, for the IH tables.")
    p.add_argument("--replications", type=int)
    _segmentation(p)

    p = commands.add_parser("dump-neighborhood", help="Dump the training neighborhood of queries.")
    _common(p)
    p.add_argument("--training", type=text_type, required=True)
    p.add_argument("--queries", type=text_type, required=True,
                   help="Standardized dissimilarity file of the queries.")
    p.add_argument("--index", type=int, nargs="+", help="Query rows to dump (default all).")
    p.add_argument("--k", type=int, help="Neighborhood size (default 7).")
    return parser


CONFIG_FLAGS = ("seed", "out", "gamma", "c", "tol", "max_passes", "cache_size", "pairing",
                "genuines_per_writer", "random_forgery_writers", "selection", "fusion",
                "reference_counts", "kdn_k", "features", "development_features",
                "exploitation_features", "replications", "condense", "grid_search",
                "validation_writers", "c_grid", "gamma_grid", "scaler", "segmentation", "fold")

SYNTH_FLAGS = ("writers", "dimensionality", "intrinsic_dimensionality", "genuine", "skilled",
               "simple", "sigma_genuine", "sigma_centroid", "good_fraction", "delta_good",
               "delta_bad", "delta_simple", "resolution", "offset", "name")

# Flags of a recorded run that a replay takes from the new command line.
REPLAY_SKIP = ("--config", "--out")


def load_config(args):
    """The configuration of a run: ``--config`` (if any) and then the
    command line flags on top."""
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = dict((key, getattr(args, key)) for key in CONFIG_FLAGS
                     if getattr(args, key, None) is not None)
    if args.command == "transfer" and getattr(args, "features", None):
        overrides.pop("features", None)
        overrides["transfer_features"] = args.features
    if getattr(args, "exploitation", None):
        overrides["exploitation" if args.command != "transfer"
                  else "transfer_exploitation"] = {"preset": args.exploitation}
    synth = dict((key, getattr(args, key)) for key in SYNTH_FLAGS
                 if getattr(args, key, None) is not None)
    if synth:
        merged = dict(config.synth)
        merged.update(synth)
        overrides["synth"] = merged
    config.update(overrides)
    return config


def _option(argv, flag):
    """The value of ``flag`` in ``argv`` (``--flag value`` or ``--flag=value``)."""
    for index, arg in enumerate(argv):
        if arg == flag and index + 1 < len(argv):
            return argv[index + 1]
        if arg.startswith(flag + "="):
            return arg[len(flag) + 1:]
    return None


def _without(argv, flags):
    result = []
    skip = False
    for arg in argv:
        if skip:
            skip = False
            continue
        if arg in flags:
            skip = True
            continue
        if any(arg.startswith(flag + "=") for flag in flags):
            continue
        result.append(arg)
    return result


def replay_arguments(argv):
    """Expand the arguments of a re-run.

    When ``--config`` names the manifest of an earlier run of the same
    command, the recorded arguments of that run come first (minus its
    ``--config`` and ``--out``) and the given ones follow, so inputs such as
    ``--samples`` or ``--model`` are replayed and anything given again
    overrides them. Anything else is returned unchanged; errors in the file
    are left for ``load_config()`` to report.

    Parameters:
        argv (list of str): The arguments, without the program name.

    Returns:
        list of str
    """
    if not argv or argv[0].startswith("-"):
        return argv
    path = _option(argv, "--config")
    if not path or not os.path.isfile(path):
        return argv
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (IOError, OSError, ValueError):
        return argv
    if not isinstance(manifest, dict) or manifest.get("command") != argv[0]:
        return argv
    recorded = manifest.get("argv")
    if not isinstance(recorded, list) or not recorded or recorded[0] != argv[0]:
        return argv
    return [argv[0]] + _without(recorded[1:], REPLAY_SKIP) + argv[1:]


def _hooks(experiment):
    """Logging hooks for the file loaders."""
    return dict(on_debug=experiment._say, on_warn=experiment._warn)


def _path(out, name):
    return os.path.join(out, name)


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    return path


def _load_scaler(path):
    if not path:
        return None
    if not os.path.isfile(path):
        raise IOError("no such file: {}".format(path))
    with open(path) as fh:
        try:
            return StandardScaler.from_dict(json.load(fh))
        except (ValueError, KeyError) as e:
            raise ConfigError("{} is not a scaler file: {}".format(path, e))


def cmd_synth(args, experiment):
    config = experiment.config
    synth = SynthConfig.from_dict(config.synth)
    dataset = synth_generate(synth, config.seed)
    path = _path(config.out, utils.safe_name(synth.name) + ".features")
    save_features(dataset, path)
    experiment._say("Wrote {} to {}".format(dataset, path))
    return [path]


def cmd_build_ds(args, experiment):
    config = experiment.config
    if not config.features:
        raise ConfigError("build-ds needs --features (or 'features' in the configuration)")
    dataset = load_features(config.features, **_hooks(experiment))
    samples = build_training_set(dataset, config.pairing_plan())
    path = _path(config.out, "training.dis")
    save_dissimilarity_set(samples, path)
    positives, negatives = samples.class_counts()
    experiment._say("{} positive and {} negative samples".format(positives, negatives))
    return [path]


def cmd_condense(args, experiment):
    config = experiment.config
    samples = load_dissimilarity_set(args.samples, **_hooks(experiment))
    written = []
    scaler = None
    if config.scaler == SCALER_STANDARD:
        scaler = fit_scaler(samples)
        written.append(_write_json(_path(config.out, "scaler.json"), scaler.to_dict()))
    samples = samples.standardized(scaler)
    result = condense(samples, k=config.cnn_k, seed=config.seed, say=experiment._say)
    path = _path(config.out, "condensed.dis")
    save_dissimilarity_set(samples.subset(result.retained_indices), path)
    written.append(path)
    written.append(_write_json(_path(config.out, "condensation.json"),
                               result.stats(len(samples))))
    return written


def cmd_train(args, experiment):
    config = experiment.config
    samples = load_dissimilarity_set(args.samples, **_hooks(experiment))
    scaler = _load_scaler(args.scaler_file)
    if scaler is None and config.scaler == SCALER_STANDARD:
        scaler = fit_scaler(samples)
        samples = samples.standardized(scaler)
    model = train(samples, config.kernel_params(), tol=config.tol, max_passes=config.max_passes,
                  seed=config.seed, scaler=scaler, cache_size=config.cache_size,
                  say=experiment._say)
    path = _path(config.out, "model.json")
    save_model(model, path)
    return [path]


def cmd_grid_search(args, experiment):
    config = experiment.config
    samples = load_dissimilarity_set(args.samples, **_hooks(experiment))
    scaler = _load_scaler(args.scaler_file)
    validation = load_dissimilarity_set(args.validation, **_hooks(experiment))
    validation = validation.standardized(scaler)
    table = grid_search_table(samples, validation, config.c_grid, config.gamma_grid,
                              tol=config.tol, max_passes=config.max_passes, seed=config.seed,
                              scaler=scaler, cache_size=config.cache_size,
                              say=experiment._say, warn=experiment._warn)
    params = select_grid_params(table)
    grid_path = _path(config.out, "grid.csv")
    with open(grid_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["c", "gamma", "eer"])
        for entry in table:
            writer.writerow([utils.format_float(entry["c"]), utils.format_float(entry["gamma"]),
                             "" if entry["eer"] is None else utils.format_float(entry["eer"])])
    params_path = _write_json(_path(config.out, "params.json"),
                              OrderedDict([("gamma", params.gamma), ("c", params.c)]))
    print("gamma={} C={}".format(params.gamma, params.c))
    return [grid_path, params_path]


def cmd_verify(args, experiment):
    config = experiment.config
    model = load_model(args.model)
    dataset = load_features(args.features, **_hooks(experiment))
    entries = load_manifest(args.manifest, **_hooks(experiment))
    results = verify_manifest(model, dataset, entries, kind=config.fusion,
                              threshold=args.threshold)
    path = _path(config.out, "verification.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS)
        for result in results:
            row = result.row()
            row[4] = utils.format_float(row[4])
            writer.writerow(row)
    return [path]


def _report(experiment, report):
    written = report.write(experiment.config.out)
    print(report.render(), end="")
    return written


def cmd_eval(args, experiment):
    return _report(experiment, experiment.run())


def _evaluation_kwargs(config, training):
    return dict(training=training, reference_counts=config.reference_counts,
                fusion=config.fusion, fusions=config.fusions, kdn_k=config.kdn_k,
                seed=config.seed, reference_seed=config.reference_seed, name=config.name)


def cmd_ih_report(args, experiment):
    config = experiment.config
    model = load_model(args.model)
    dataset = load_features(args.features, split="exploitation", **_hooks(experiment))
    training = load_dissimilarity_set(args.training, **_hooks(experiment))
    report = evaluate_exploitation(model, dataset, config.exploitation_plan(),
                                   say=experiment._say, **_evaluation_kwargs(config, training))
    return _report(experiment, report)


def cmd_transfer(args, experiment):
    config = experiment.config
    if args.model:
        model = load_model(args.model)
        foreign = load_features(config.transfer_features, split="exploitation",
                                **_hooks(experiment))
        training = None
        if args.training:
            training = load_dissimilarity_set(args.training, **_hooks(experiment))
        report = transfer_eval(model, foreign, config.exploitation_plan(transfer=True),
                               say=experiment._say, **_evaluation_kwargs(config, training))
    else:
        report = experiment.transfer()
    return _report(experiment, report)


def cmd_dump_neighborhood(args, experiment):
    config = experiment.config
    training = load_dissimilarity_set(args.training, **_hooks(experiment))
    queries = load_dissimilarity_set(args.queries, **_hooks(experiment))
    indices = args.index if args.index else range(len(queries))
    k = args.k if args.k is not None else config.kdn_k
    written = []
    for index in indices:
        if not 0 <= index < len(queries):
            raise ConfigError("query index {} out of range (0..{})".format(index, len(queries) - 1))
        written.append(write_dump(dump_neighborhood(queries[index], training, k), config.out))
    return written


HANDLERS = {
    "synth":             cmd_synth,
    "build-ds":          cmd_build_ds,
    "condense":          cmd_condense,
    "train":             cmd_train,
    "grid-search":       cmd_grid_search,
    "verify":            cmd_verify,
    "eval":              cmd_eval,
    "ih-report":         cmd_ih_report,
    "transfer":          cmd_transfer,
    "dump-neighborhood": cmd_dump_neighborhood,
}


def _fail(out, message):
    print("wisig: error: {}".format(message), file=sys.stderr)
    if not out:
        return
    try:
        if not os.path.isdir(out):
            os.makedirs(out)
        with open(os.path.join(out, FAILED_MARKER), "w") as fh:
            fh.write(message + "\n")
    except (IOError, OSError):
        pass


def run_command(argv=None):
    """Run one command line invocation.

    Exit statuses: 0 on success, 1 for a pipeline error, 2 for a usage or
    configuration error and 3 for a missing input file. On failure the
    diagnostic goes to standard error and into a ``FAILED`` file in the
    output directory.

    Parameters:
        argv (list of str): The arguments, without the program name.

    Returns:
        int: The exit status.
    """
    if argv is None:
        argv = sys.argv[1:]
    argv = replay_arguments(list(argv))
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    out = args.out or "out"
    experiment = None
    try:
        config = load_config(args)
        out = config.out
        experiment = Experiment(config, debug=args.debug, log=args.log)
        if not os.path.isdir(out):
            os.makedirs(out)
        marker = os.path.join(out, FAILED_MARKER)
        if os.path.exists(marker):
            os.remove(marker)
        written = HANDLERS[args.command](args, experiment)
        manifest = experiment.manifest(args.command, argv, extra=OrderedDict([
            ("artifacts", sorted(os.path.basename(p) for p in written)),
        ]))
        _write_json(os.path.join(out, MANIFEST_NAME), manifest)
        return EXIT_OK
    except ConfigError as e:
        _fail(out, e.error_message)
        return EXIT_USAGE
    except WisigError as e:
        _fail(out, e.error_message)
        return EXIT_ERROR
    except (IOError, OSError) as e:
        _fail(out, text_type(e))
        return EXIT_MISSING
    finally:
        if experiment is not None:
            experiment.close()


def main():
    sys.exit(run_command())
