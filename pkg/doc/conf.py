# Configuration file for the Sphinx documentation builder.
#
# http://www.sphinx-doc.org/en/master/config

import os
import sys

sys.path.insert(0, os.path.abspath('../src'))

# -- Project information -----------------------------------------------------

project = 'hyplan'
copyright = '2026, the hyplan developers'
author = 'the hyplan developers'

version = '1.0'
release = '1.0'

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
language = 'en'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = None

# Heavy imports are not needed to render signatures
autodoc_mock_imports = ['matplotlib']

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'hyplandoc'

# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'hyplan', 'hyplan Documentation', [author], 1)
]
