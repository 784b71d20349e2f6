"""Kernel backend selection.

Uses the compiled ``_ckernels`` extension when it imports, otherwise the
pure-Python ``_pykernels``. Set ``SPREADCODE_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _pykernels

python_backend = _pykernels
compiled_backend = None

if not os.environ.get("SPREADCODE_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = backend.BACKEND

count_deficient = backend.count_deficient
count_deficient_all = backend.count_deficient_all
count_deficient_samples = backend.count_deficient_samples
first_feasible_combo = backend.first_feasible_combo


def available_backends():
    """All importable backends, compiled first (used by tests and benchmarks)."""
    out = []
    if compiled_backend is not None:
        out.append(compiled_backend)
    else:
        try:
            from . import _ckernels
            out.append(_ckernels)
        except ImportError:
            pass
    out.append(python_backend)
    return out
