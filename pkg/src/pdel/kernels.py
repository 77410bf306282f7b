"""Kernel selection.

The compiled module is used when it imports and ``PDEL_PURE_PYTHON`` is not
set; otherwise the pure-Python twin is used. ``BACKEND`` names the choice.
"""

import os

from . import _pykernels

pure = _pykernels

if os.environ.get("PDEL_PURE_PYTHON"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

order_closure = active.order_closure
antisymmetry_violation = active.antisymmetry_violation
lub_table = active.lub_table
distributivity_violation = active.distributivity_violation
residuation_violation = active.residuation_violation
eha_violations = active.eha_violations


def downsets(order, lower):
    if compiled is not None and len(lower) <= 64:
        return compiled.downsets(order, lower)
    return pure.downsets(order, lower)
