"""Permutation kernels used by the Schreier-Sims engine.

The compiled extension is used when it was built; otherwise the pure-Python
module is loaded.  Set ``NIKMON_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("NIKMON_PURE_PYTHON"):
    from . import _perm_py as impl
else:
    try:
        from . import _perm as impl
    except ImportError:
        from . import _perm_py as impl

BACKEND = "cython" if impl.__name__.endswith("._perm") else "python"

compose = impl.compose
invert = impl.invert
identity = impl.identity
sift = impl.sift
first_nonsifting = impl.first_nonsifting

__all__ = ["BACKEND", "compose", "first_nonsifting", "identity", "invert", "sift"]
