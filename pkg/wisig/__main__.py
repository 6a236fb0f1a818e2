# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import absolute_import, unicode_literals

"""wisig's __main__.py

This script is executed when you run `python -m wisig` (or `python wisig`
from the source tree). It does nothing more than hand the command line over
to ``wisig.cli``."""

__docformat__ = 'plaintext'

import sys

# Boilerplate to allow running as script directly.
# See: http://stackoverflow.com/questions/2943847/nightmare-with-relative-imports-how-does-pep-366-work
if __name__ == "__main__" and not __package__:
    import os
    parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    sys.path.insert(0, parent_dir)
    import wisig
    __package__ = str("wisig")

if __name__ == "__main__":
    from wisig.cli import run_command
    sys.exit(run_command())

# vim:expandtab
