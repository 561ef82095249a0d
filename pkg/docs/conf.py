# Configuration file for the Sphinx documentation builder.
#
# Build with `sphinx-build docs docs/_build` from the repository root; the
# package is imported from python/ without installing it.

import os
import sys

sys.path.insert(0, os.path.abspath("../python"))

# -- Project information -----------------------------------------------------

project = "jetbrane"
copyright = "2026, jetbrane developers"
author = "jetbrane developers"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.viewcode",
]

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

language = "en"

# -- Options for autodoc -----------------------------------------------------
# jetbrane.rst, jetbrane.kernel.rst, jetbrane.dsl.rst and
# jetbrane.theories.rst hold one automodule directive per module.

autodoc_default_options = {
    "members": True,
    "undoc-members": True,
    "show-inheritance": True,
}
autodoc_member_order = "bysource"
autodoc_typehints = "description"

# -- Options for HTML output -------------------------------------------------

html_theme = "nature"
# linked from index.rst
html_extra_path = ["conventions.md", "report-schema.md"]
