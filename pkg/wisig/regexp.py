# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals
import re

"""Common regular expressions used by the wisig file formats."""

# Common regular expressions.
class RE(object):
    header      = re.compile(r'^dims\s*=\s*(\d+)$')
    header_any  = re.compile(r'^dims\s*=')
    comment     = re.compile(r'^\s*(//|#)')
    sep         = re.compile(r'\s*,\s*')
    ref_sep     = re.compile(r'\s*;\s*')
    integer     = re.compile(r'^\d+$')
    number      = re.compile(r'^[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$')
    non_finite  = re.compile(r'^[+-]?(inf|infinity|nan)$', re.IGNORECASE)
    unsafe_name = re.compile(r'[^A-Za-z0-9_.\-]+')
