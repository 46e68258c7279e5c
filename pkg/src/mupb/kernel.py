"""Backend selection for the grid matching loop.

The compiled extension is used when it imports; ``MUPB_KERNEL=python`` forces
the numpy fallback.
"""
import os

from . import _match_py

python_match = _match_py.match_products

try:
    from ._match_ext import match_products as compiled_match
except ImportError:  # extension not built
    compiled_match = None

if compiled_match is not None and os.environ.get("MUPB_KERNEL", "").lower() != "python":
    match_products = compiled_match
    BACKEND = "cython"
else:
    match_products = python_match
    BACKEND = "python"
