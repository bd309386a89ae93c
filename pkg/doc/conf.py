import os
import sys
sys.path.insert(0, os.path.abspath(".."))

extensions = [
        "sphinx.ext.autodoc",
        "sphinx.ext.mathjax",
        "sphinx_copybutton",
        ]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "npmc"
copyright = "2026, The npmc contributors"
author = "The npmc contributors"

ver_dic = {}
with open("../npmc/__init__.py") as ver_file:
    ver_src = ver_file.read()
exec(compile(ver_src, "../npmc/__init__.py", "exec"), ver_dic)
version = ver_dic["VERSION"]
release = version

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

html_theme = "furo"

autoclass_content = "class"
autodoc_member_order = "bysource"
