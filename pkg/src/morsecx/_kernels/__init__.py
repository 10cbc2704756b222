"""Hot kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when it imports; set ``MORSECX_PURE=1`` to
force the fallback.  ``BACKEND`` names the active one.
"""

import os

from . import _pure

_compiled = None
if not os.environ.get("MORSECX_PURE"):
    try:
        from . import _speedups as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure"


def perm_cycles(perm):
    if _compiled is not None:
        return _compiled.perm_cycles(perm)
    return _pure.perm_cycles(perm)


def smith_form(A, transforms=True):
    """Smith normal form ``(S, U, V)`` with ``U A V = S``.

    The compiled path works in bounded int64 and hands over to exact
    big-integer arithmetic when entries grow past its bound.
    """
    if _compiled is not None:
        try:
            return _compiled.smith_form(A, transforms)
        except OverflowError:
            pass
    return _pure.smith_form(A, transforms)
