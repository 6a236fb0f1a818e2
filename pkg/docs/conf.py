# -*- coding: utf-8 -*-
#
# Sphinx configuration for the wisig documentation.

import sys
import os

# The package is documented from the source tree.
sys.path.append(os.path.join(os.path.dirname(os.path.realpath(__file__)), os.pardir))
import wisig

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

source_suffix = '.rst'
master_doc = 'index'

project = 'wisig'
copyright = '2026, The wisig developers'
author = 'The wisig developers'

version = wisig.__version__
release = wisig.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'wisigdoc'
