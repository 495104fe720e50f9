"""Numeric backend selection.

The hot kernels in :mod:`boundent.kernels` exist in two flavours: a
numba-compiled path and a pure-numpy fallback.  The active default is
chosen once at import time from the ``BOUNDENT_BACKEND`` environment
variable:

* ``BOUNDENT_BACKEND=numba``  -- require numba, fail loudly if missing
* ``BOUNDENT_BACKEND=numpy``  -- force the pure-numpy path
* unset                       -- numba when importable, numpy otherwise

Every kernel also accepts an explicit ``backend=`` argument so the two
paths can be compared side by side (see ``benchmarks/bench_backends.py``).
"""

from __future__ import annotations

import os

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    NUMBA_AVAILABLE = False

_ENV_VAR = "BOUNDENT_BACKEND"
_requested = os.environ.get(_ENV_VAR, "").strip().lower()

if _requested == "numpy":
    ACTIVE_BACKEND = "numpy"
elif _requested == "numba":
    if not NUMBA_AVAILABLE:
        raise ImportError(
            f"{_ENV_VAR}=numba requested but numba is not importable"
        )
    ACTIVE_BACKEND = "numba"
elif _requested == "":
    ACTIVE_BACKEND = "numba" if NUMBA_AVAILABLE else "numpy"
else:
    raise ValueError(
        f"unrecognised {_ENV_VAR}={_requested!r}; expected 'numba' or 'numpy'"
    )


def resolve(backend: str | None) -> str:
    """Map an optional backend override onto a concrete backend name."""
    if backend is None:
        return ACTIVE_BACKEND
    name = backend.strip().lower()
    if name == "numba" and not NUMBA_AVAILABLE:
        raise ValueError("numba backend requested but numba is not importable")
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return name
