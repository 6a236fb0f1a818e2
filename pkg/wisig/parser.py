# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals
from collections import namedtuple
import math
import os

import six

from .regexp import RE
from .datamodel import (
    Dataset, SignatureRecord, SIGNATURE_KINDS, QUERY_KINDS, DEVELOPMENT, GENUINE
)
from .dichotomy import DissimilaritySet, LABEL_NAMES, LABEL_VALUES
from .exceptions import FeatureFileError
from . import utils

# Text used for a missing query kind in dissimilarity files.
NO_KIND = "none"


class ManifestEntry(namedtuple("ManifestEntry", [
        "questioned_writer", "questioned_signature", "questioned_kind",
        "claimed_writer", "reference_signatures"])):
    """One row of a batch verification manifest.

    The questioned signature is looked up by ``(writer, signature, kind)``;
    the references are genuine signatures of the claimed writer, by
    signature id, in the order they are listed.
    """
    __slots__ = ()


class FeatureParser(object):
    """Parser for the wisig text formats.

    Three line-oriented formats share the same conventions: the first
    meaningful line is a ``dims=<n>`` header (feature and dissimilarity
    files only), fields are comma separated, blank lines and lines starting
    with ``//`` or ``#`` are skipped.

    The formats:

    * feature files: ``writer_id,signature_id,kind,v1,...,vn``
    * dissimilarity files:
      ``label,query_kind,query_writer,query_signature,reference_writer,reference_signature,u1,...,un``
    * verification manifests:
      ``questioned_writer,questioned_signature,questioned_kind,claimed_writer,ref1;ref2;...``

    Like the parser of any other format, this class does no I/O; the
    ``load_*`` functions in this module read the file and hand the lines
    over.

    Parameters:
        on_debug (func): An optional function to send debug messages to.
            The prototype is ``def f(message)``.
        on_warn (func): An optional function to send warnings to. The
            prototype is ``def f(message, filename='', lineno='')``.
    """

    def __init__(self, on_debug=None, on_warn=None):
        self.on_debug = on_debug
        self.on_warn  = on_warn

    # Proxy functions
    def say(self, *args, **kwargs):
        if self.on_debug is not None:
            self.on_debug(*args, **kwargs)

    def warn(self, *args, **kwargs):
        if self.on_warn is not None:
            self.on_warn(*args, **kwargs)

    def _lines(self, code):
        """Yield ``(lineno, line)`` for every meaningful line."""
        for lineno, line in enumerate(code, 1):
            line = line.strip()
            if len(line) == 0 or RE.comment.match(line):
                continue
            yield lineno, line

    def _header(self, filename, lines):
        for lineno, line in lines:
            match = RE.header.match(line)
            if match:
                dims = int(match.group(1))
                if dims <= 0:
                    raise FeatureFileError("dimensionality must be positive", filename, lineno)
                self.say("Header: dims={}".format(dims))
                return dims
            if RE.header_any.match(line):
                raise FeatureFileError("malformed header '{}'".format(line), filename, lineno)
            raise FeatureFileError("expected a dims=<n> header, found '{}'".format(line),
                                   filename, lineno)
        raise FeatureFileError("missing dims=<n> header", filename, 1)

    def _integer(self, text, what, filename, lineno):
        if not RE.integer.match(text):
            raise FeatureFileError("{} must be a non-negative integer, found '{}'".format(
                what, text), filename, lineno)
        return int(text)

    def _values(self, fields, dims, filename, lineno):
        if len(fields) != dims:
            raise FeatureFileError("expected {} feature values, found {}".format(
                dims, len(fields)), filename, lineno)
        values = []
        for field in fields:
            if RE.non_finite.match(field):
                raise FeatureFileError("non-finite value '{}'".format(field), filename, lineno)
            if not RE.number.match(field):
                raise FeatureFileError("'{}' is not a number".format(field), filename, lineno)
            value = float(field)
            # Overflow, e.g. 1e999.
            if not math.isfinite(value):
                raise FeatureFileError("non-finite value '{}'".format(field), filename, lineno)
            values.append(value)
        return values

    def parse(self, filename, code, split=DEVELOPMENT, name=None):
        """Parse a feature file.

        Args:
            filename (str): The name of the file the lines came from, for
                error reporting.
            code (str[]): The lines of the file.
            split (str): Split of the returned dataset.
            name (str): Dataset name; defaults to the file's base name.

        Returns:
            Dataset: The records in file order.
        """
        lines = self._lines(code)
        dims = self._header(filename, lines)

        records = []
        seen = set()
        for lineno, line in lines:
            fields = RE.sep.split(line)
            if len(fields) < 3:
                raise FeatureFileError("expected writer_id,signature_id,kind,values...",
                                       filename, lineno)
            writer = self._integer(fields[0], "writer_id", filename, lineno)
            signature = self._integer(fields[1], "signature_id", filename, lineno)
            kind = fields[2]
            if kind not in SIGNATURE_KINDS:
                raise FeatureFileError("unknown signature kind '{}'".format(kind),
                                       filename, lineno)
            if (writer, signature, kind) in seen:
                raise FeatureFileError("duplicate record ({}, {}, {})".format(
                    writer, signature, kind), filename, lineno)
            seen.add((writer, signature, kind))
            values = self._values(fields[3:], dims, filename, lineno)
            records.append(SignatureRecord(writer, signature, kind, values))

        genuine_writers = set(r.writer_id for r in records if r.kind == GENUINE)
        for writer in sorted(set(r.writer_id for r in records) - genuine_writers):
            self.warn("Writer {} has forgeries but no genuine signatures".format(writer),
                      filename, 0)

        self.say("Parsed {} records from {}".format(len(records), filename))
        if name is None:
            name = os.path.splitext(os.path.basename(filename))[0] or "stream"
        return Dataset(name, dims, records, split=split)

    def parse_dissimilarity(self, filename, code):
        """Parse a dissimilarity file into a ``DissimilaritySet``."""
        lines = self._lines(code)
        dims = self._header(filename, lines)

        vectors, labels, kinds, query_refs, reference_refs = [], [], [], [], []
        for lineno, line in lines:
            fields = RE.sep.split(line)
            if len(fields) < 6:
                raise FeatureFileError("expected label,query_kind,query_writer,query_signature,"
                                       "reference_writer,reference_signature,values...",
                                       filename, lineno)
            if fields[0] not in LABEL_VALUES:
                raise FeatureFileError("unknown label '{}'".format(fields[0]), filename, lineno)
            kind = fields[1]
            if kind == NO_KIND:
                kind = None
            elif kind not in QUERY_KINDS:
                raise FeatureFileError("unknown query kind '{}'".format(kind), filename, lineno)
            ids = [self._integer(f, "id", filename, lineno) for f in fields[2:6]]
            vectors.append(self._values(fields[6:], dims, filename, lineno))
            labels.append(LABEL_VALUES[fields[0]])
            kinds.append(kind)
            query_refs.append((ids[0], ids[1]))
            reference_refs.append((ids[2], ids[3]))

        self.say("Parsed {} dissimilarity samples from {}".format(len(labels), filename))
        return DissimilaritySet(vectors, labels, kinds, query_refs, reference_refs,
                                dimensionality=dims)

    def parse_manifest(self, filename, code):
        """Parse a verification manifest into a list of ``ManifestEntry``."""
        entries = []
        seen = {}
        for lineno, line in self._lines(code):
            fields = RE.sep.split(line)
            if len(fields) != 5:
                raise FeatureFileError("expected questioned_writer,questioned_signature,"
                                       "questioned_kind,claimed_writer,references",
                                       filename, lineno)
            qw = self._integer(fields[0], "questioned_writer", filename, lineno)
            qs = self._integer(fields[1], "questioned_signature", filename, lineno)
            if fields[2] not in SIGNATURE_KINDS:
                raise FeatureFileError("unknown signature kind '{}'".format(fields[2]),
                                       filename, lineno)
            claimed = self._integer(fields[3], "claimed_writer", filename, lineno)
            refs = [r for r in RE.ref_sep.split(fields[4]) if r]
            if not refs:
                raise FeatureFileError("no reference signatures listed", filename, lineno)
            refs = tuple(self._integer(r, "reference signature", filename, lineno) for r in refs)
            if len(set(refs)) != len(refs):
                self.warn("Reference signature listed more than once", filename, lineno)
            entry = ManifestEntry(qw, qs, fields[2], claimed, refs)
            if entry in seen:
                self.warn("Duplicate entry (first seen at line {})".format(seen[entry]),
                          filename, lineno)
            else:
                seen[entry] = lineno
            entries.append(entry)
        return entries


def _read_lines(path):
    if isinstance(path, six.string_types):
        if not os.path.isfile(path):
            raise IOError("no such file: {}".format(path))
        filename = path
    else:
        filename = getattr(path, "name", "stream()")
    handle, close = utils.open_text(path, "r")
    try:
        return filename, handle.read().splitlines()
    finally:
        if close:
            handle.close()


def load_features(path, split=DEVELOPMENT, name=None, on_debug=None, on_warn=None):
    """Load a feature file from a path or an open file handle.

    Returns:
        Dataset
    """
    filename, code = _read_lines(path)
    parser = FeatureParser(on_debug=on_debug, on_warn=on_warn)
    return parser.parse(filename, code, split=split, name=name)


def save_features(dataset, fh):
    """Write a dataset in the feature file format.

    Floats are written with ``repr`` so ``load_features()`` gives back
    identical values.
    """
    handle, close = utils.open_text(fh, "w")
    try:
        handle.write("dims={}\n".format(dataset.dimensionality))
        for record in dataset:
            handle.write(",".join(
                [six.text_type(record.writer_id), six.text_type(record.signature_id), record.kind]
                + [utils.format_float(v) for v in record.features]
            ) + "\n")
    finally:
        if close:
            handle.close()


def load_dissimilarity_set(path, on_debug=None, on_warn=None):
    """Load a dissimilarity file written by ``save_dissimilarity_set()``."""
    filename, code = _read_lines(path)
    return FeatureParser(on_debug=on_debug, on_warn=on_warn).parse_dissimilarity(filename, code)


def save_dissimilarity_set(samples, fh):
    handle, close = utils.open_text(fh, "w")
    try:
        handle.write("dims={}\n".format(samples.dimensionality))
        for index in range(len(samples)):
            kind = samples.query_kinds[index]
            qw, qs = samples.query_refs[index]
            rw, rs = samples.reference_refs[index]
            handle.write(",".join(
                [LABEL_NAMES[int(samples.labels[index])], kind if kind is not None else NO_KIND]
                + [six.text_type(x) for x in (qw, qs, rw, rs)]
                + [utils.format_float(v) for v in samples.vectors[index]]
            ) + "\n")
    finally:
        if close:
            handle.close()


def load_manifest(path, on_debug=None, on_warn=None):
    """Load a batch verification manifest."""
    filename, code = _read_lines(path)
    return FeatureParser(on_debug=on_debug, on_warn=on_warn).parse_manifest(filename, code)


def save_manifest(entries, fh):
    handle, close = utils.open_text(fh, "w")
    try:
        for e in entries:
            handle.write("{},{},{},{},{}\n".format(
                e.questioned_writer, e.questioned_signature, e.questioned_kind,
                e.claimed_writer, ";".join(six.text_type(s) for s in e.reference_signatures)))
    finally:
        if close:
            handle.close()
