# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals
from .regexp import RE
import codecs
import hashlib
import json
import platform

import numpy as np
import scipy
import six

def open_text(fh, mode="r"):
    """Open a path as a UTF-8 text file, or pass an open handle through.

    :param fh: A file name or an already open file-like object.
    :param str mode: ``r``, ``w`` or ``a``.

    :return tuple: ``(handle, close)`` where ``close`` says whether the caller
        opened the file and must close it."""
    if isinstance(fh, six.string_types):
        return codecs.open(fh, mode, "utf-8"), True
    return fh, False

def format_float(value):
    """Shortest text that reads back as exactly the same float."""
    return repr(float(value))

def derive_seed(master, index):
    """Derive the seed of replication ``index`` from a master seed.

    The derivation is a pure function of both numbers, so any replication
    can be re-run on its own."""
    state = np.random.SeedSequence([int(master), int(index)]).generate_state(1)
    return int(state[0])

def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(",", ":"))

def config_hash(data):
    """SHA-256 of the canonical JSON rendering of ``data``."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()

def safe_name(text):
    """Reduce ``text`` to characters that are safe in a file name."""
    return RE.unsafe_name.sub("_", six.text_type(text)).strip("_") or "unnamed"

def versions():
    """Versions of the packages a run depends on, for run manifests."""
    from . import __version__
    return {
        "wisig": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "six": six.__version__,
        "python": platform.python_version(),
    }
