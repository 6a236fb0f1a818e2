# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals, division
from collections import namedtuple
import os

from . import utils
from .dichotomy import LABEL_NAMES
from .hardness import DEFAULT_K, HardnessScore, query_parts, k_nearest
from .exceptions import EmptyInputError


class NeighborRow(namedtuple("NeighborRow", [
        "rank", "index", "distance", "label", "query_kind", "query_ref", "reference_ref"])):
    """One training neighbor of a dumped query."""
    __slots__ = ()


class NeighborhoodDump(object):
    """The training neighborhood behind a query's kDN value.

    Attributes:
        query_label (int): Ground-truth label of the query.
        query_kind (str): Query kind, if known.
        query_ref (tuple): Questioned-side provenance of the query.
        reference_ref (tuple): Reference-side provenance of the query.
        hardness (HardnessScore): kDN of the query.
        rows (list of NeighborRow): The ``k`` nearest training samples,
            by non-decreasing distance.
    """

    def __init__(self, query_label, query_kind, query_ref, reference_ref, hardness, rows):
        self.query_label = query_label
        self.query_kind = query_kind
        self.query_ref = query_ref
        self.reference_ref = reference_ref
        self.hardness = hardness
        self.rows = list(rows)

    def recomputed_hardness(self):
        """kDN recomputed from the rows alone."""
        disagreeing = sum(1 for row in self.rows if row.label != self.query_label)
        return HardnessScore(disagreeing, len(self.rows))

    def filename(self):
        def ref(r):
            return "none" if r is None else "{}-{}".format(r[0], r[1])
        return utils.safe_name("neighborhood_q{}_r{}_{}.txt".format(
            ref(self.query_ref), ref(self.reference_ref), self.query_kind or "unknown"))

    def render(self):
        lines = [
            "query: {} ({}) questioned={} reference={}".format(
                LABEL_NAMES.get(self.query_label, self.query_label), self.query_kind or "-",
                self.query_ref, self.reference_ref),
            "kDN (k={}): {} ({}/{} disagreeing)".format(
                self.hardness.k, self.hardness, self.hardness.disagreeing, self.hardness.k),
            "",
            "rank  index     distance  label     kind      questioned  reference",
        ]
        for row in self.rows:
            lines.append("{:>4}  {:>5}  {:>11}  {:<8}  {:<8}  {:<10}  {}".format(
                row.rank, row.index, "{:.6f}".format(row.distance),
                LABEL_NAMES.get(row.label, row.label), row.query_kind or "-",
                "{}-{}".format(*row.query_ref), "{}-{}".format(*row.reference_ref)))
        return "\n".join(lines) + "\n"


def dump_neighborhood(query, training, k=DEFAULT_K, label=None):
    """Dump the ``k`` training neighbors of a query.

    Neighbor selection is the one ``kdn()`` uses (distance, then training
    index), so the dump's hardness always equals the kDN of the query.

    Parameters:
        query (DissimilaritySample): The query (a raw vector needs ``label``).
        training (DissimilaritySet): The labeled training collection.
        k (int): Neighborhood size.

    Returns:
        NeighborhoodDump
    """
    u, label = query_parts(query, label)
    if len(training) == 0:
        raise EmptyInputError("a neighborhood dump needs a non-empty training set")
    indices, distances = k_nearest(training.vectors, u, k)
    rows = []
    for rank, (index, distance) in enumerate(zip(indices, distances), 1):
        index = int(index)
        rows.append(NeighborRow(rank, index, float(distance), int(training.labels[index]),
                                training.query_kinds[index], training.query_refs[index],
                                training.reference_refs[index]))
    disagreeing = sum(1 for row in rows if row.label != label)
    return NeighborhoodDump(int(label), getattr(query, "query_kind", None),
                            getattr(query, "query_ref", None),
                            getattr(query, "reference_ref", None),
                            HardnessScore(disagreeing, int(k)), rows)


def write_dump(dump, out_dir):
    """Write a dump into ``out_dir`` under its own file name; returns the path."""
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    path = os.path.join(out_dir, dump.filename())
    with open(path, "w") as fh:
        fh.write(dump.render())
    return path
