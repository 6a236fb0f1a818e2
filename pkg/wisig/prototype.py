# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple

import numpy as np

from .hardness import squared_distances
from .exceptions import EmptyInputError, UnsupportedParameterError


class CondensationResult(namedtuple("CondensationResult", ["retained_indices", "passes"])):
    """Outcome of ``condense()``.

    Attributes:
        retained_indices (tuple of int): Indices into the input collection,
            ascending.
        passes (int): Number of sweeps over the input, including the final
            sweep that added nothing.
    """
    __slots__ = ()

    def stats(self, input_size):
        return dict(
            input_size=int(input_size),
            retained_size=len(self.retained_indices),
            passes=int(self.passes),
        )


def nearest_in_store(vectors, store, query):
    """Index of the stored sample nearest to ``query``.

    Equal distances go to the lowest input index.
    """
    store = np.asarray(store)
    sq = squared_distances(vectors[store], query)
    return int(store[sq == sq.min()].min())


def condense(samples, k=1, seed=0, say=None):
    """Hart's Condensed Nearest Neighbors prototype selection.

    The store starts with the first sample of each class in scan order (a
    permutation of the input fixed by ``seed``). The remaining samples are
    swept in that same order; every sample the 1-NN rule over the current
    store gets wrong joins the store. Sweeps repeat until one adds nothing,
    after which the retained samples classify the whole input correctly.

    Parameters:
        samples (DissimilaritySet): Labeled samples (usually standardized).
        k (int): Neighborhood size; only 1 is supported.
        seed (int): Seed of the scan order.
        say (function): Optional debug logger.

    Returns:
        CondensationResult
    """
    if say is None:
        say = lambda x: x
    if k != 1:
        raise UnsupportedParameterError("condensed nearest neighbors supports k=1 only, "
                                        "got k={}".format(k))
    size = len(samples)
    if size == 0:
        raise EmptyInputError("cannot condense an empty collection")

    vectors = samples.vectors
    labels = samples.labels
    order = np.random.default_rng(seed).permutation(size)

    store = []
    in_store = np.zeros(size, dtype=bool)
    seen = set()
    for index in order:
        label = int(labels[index])
        if label not in seen:
            seen.add(label)
            store.append(int(index))
            in_store[index] = True

    passes = 0
    while True:
        passes += 1
        added = 0
        for index in order:
            if in_store[index]:
                continue
            nearest = nearest_in_store(vectors, store, vectors[index])
            if labels[nearest] != labels[index]:
                store.append(int(index))
                in_store[index] = True
                added += 1
        say("CNN sweep {}: added {} (store size {})".format(passes, added, len(store)))
        if added == 0:
            break

    return CondensationResult(tuple(sorted(store)), passes)
