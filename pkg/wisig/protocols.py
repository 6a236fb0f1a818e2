# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

"""Development and exploitation protocols of the public signature corpora,
and the writer segmentations they use."""

from __future__ import unicode_literals
from collections import OrderedDict

import numpy as np

from .datamodel import DEVELOPMENT, EXPLOITATION
from .evaluation import EXPLOITATION_PRESETS
from .exceptions import ConfigError, ProtocolError
from .dichotomy import PairingPlan

# Development pairing: (genuine signatures per writer, random forgery writers).
PAIRING_PRESETS = OrderedDict([
    ("gpds",      (14, 7)),
    ("cedar",     (14, 7)),
    ("mcyt",      (10, 5)),
    ("brazilian", (30, 15)),
])

# Writer segmentations of a single dataset: the lowest ids held out, or the
# ten splits of five seeded two-fold repetitions.
SEGMENT_FIRST       = "first"
SEGMENT_FIVE_BY_TWO = "5x2"
SEGMENTATIONS = (SEGMENT_FIRST, SEGMENT_FIVE_BY_TWO)


def pairing_preset(name, seed=0, selection="lowest"):
    """A ``PairingPlan`` for one of the named corpora."""
    try:
        R, F = PAIRING_PRESETS[str(name).lower()]
    except KeyError:
        raise ConfigError("unknown pairing preset '{}' (expected one of {})".format(
            name, ", ".join(PAIRING_PRESETS)))
    return PairingPlan(R, F, seed=seed, selection=selection)


def exploitation_preset(name):
    try:
        return EXPLOITATION_PRESETS[str(name).lower()]
    except KeyError:
        raise ConfigError("unknown exploitation preset '{}' (expected one of {})".format(
            name, ", ".join(EXPLOITATION_PRESETS)))


def check_disjoint(development, exploitation):
    """Raise ``ProtocolError`` if two splits share a writer."""
    shared = sorted(set(development.writers()) & set(exploitation.writers()))
    if shared:
        raise ProtocolError("development and exploitation sets share writers {}".format(shared))


def split_first(dataset, exploitation_writers):
    """Split a dataset by writer id: the lowest ``exploitation_writers`` ids
    form the exploitation set, the rest the development set.

    Returns:
        tuple: ``(development, exploitation)``.
    """
    writers = dataset.writers()
    count = int(exploitation_writers)
    if not 0 < count < len(writers):
        raise ProtocolError("cannot hold out {} of {} writers".format(count, len(writers)))
    exploitation = dataset.subset(writers[:count], split=EXPLOITATION,
                                  name="{}-exploitation".format(dataset.name))
    development = dataset.subset(writers[count:], split=DEVELOPMENT,
                                 name="{}-development".format(dataset.name))
    return development, exploitation


def split_validation(development, validation_writers, seed=0):
    """Hold out a seeded subset of development writers for grid search.

    Returns:
        tuple: ``(training, validation)`` datasets with disjoint writers.
    """
    writers = development.writers()
    count = int(validation_writers)
    if not 0 < count < len(writers):
        raise ProtocolError("cannot hold out {} of {} writers for validation".format(
            count, len(writers)))
    held = set(int(w) for w in np.random.default_rng(seed).choice(writers, size=count,
                                                                  replace=False))
    training = development.subset([w for w in writers if w not in held],
                                  name="{}-training".format(development.name))
    validation = development.subset(sorted(held), name="{}-validation".format(development.name))
    return training, validation


def five_by_two_folds(writers, seed=0):
    """Five repetitions of a seeded two-fold writer split.

    Each repetition shuffles the writers and cuts them in half; every half
    serves once as the exploitation set.

    Returns:
        list of tuple: Ten ``(development_writers, exploitation_writers)``
        pairs of sorted writer lists.
    """
    writers = sorted(int(w) for w in writers)
    if len(writers) < 2:
        raise ProtocolError("a two-fold split needs at least two writers")
    folds = []
    for repetition in range(5):
        order = np.random.default_rng([int(seed), repetition]).permutation(writers)
        half = len(order) // 2
        first = sorted(int(w) for w in order[:half])
        second = sorted(int(w) for w in order[half:])
        folds.append((first, second))
        folds.append((second, first))
    return folds


def split_folds(dataset, seed=0):
    """The datasets of the ten ``five_by_two_folds()`` splits of ``dataset``.

    Returns:
        list of tuple: Ten ``(development, exploitation)`` dataset pairs.
    """
    pairs = []
    for index, (development, exploitation) in enumerate(
            five_by_two_folds(dataset.writers(), seed=seed)):
        pairs.append((
            dataset.subset(development, split=DEVELOPMENT,
                           name="{}-development-{}".format(dataset.name, index)),
            dataset.subset(exploitation, split=EXPLOITATION,
                           name="{}-exploitation-{}".format(dataset.name, index)),
        ))
    return pairs
