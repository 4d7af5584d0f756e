"""Selects the compiled rank solver when available, else the pure-Python one.

Set ``POTSYS_PURE=1`` to force the fallback.
"""

import os

from . import _rank_py

INFINITY = _rank_py.INFINITY

if os.environ.get("POTSYS_PURE"):
    solve_ranks = _rank_py.solve_ranks
    BACKEND = "python"
else:
    try:
        from ._rank_c import solve_ranks
        BACKEND = "cython"
    except ImportError:
        solve_ranks = _rank_py.solve_ranks
        BACKEND = "python"

solve_ranks_py = _rank_py.solve_ranks
