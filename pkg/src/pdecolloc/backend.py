"""Kernel backend selection.

Two interchangeable kernel sets exist: numba-jitted loops (fast, default
when numba imports) and pure NumPy (fallback).  Selection happens once at
import time from the ``PDECOLLOC_BACKEND`` environment variable:

* unset or ``auto``: numba if importable, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the pure-NumPy path

Within a backend every kernel is deterministic (fixed accumulation order),
so identical inputs give bit-identical outputs run over run.  The two
backends agree only to floating-point tolerance, not bitwise; see
``benchmarks/bench_backends.py`` for a speed comparison.
"""

from __future__ import annotations

import os

_ENV_VAR = "PDECOLLOC_BACKEND"


def _load():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be auto|numba|numpy, got {choice!r}")
    if choice in ("auto", "numba"):
        try:
            from . import _kernels_numba

            return _kernels_numba, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import _kernels_numpy

    return _kernels_numpy, "numpy"


_kernels, _name = _load()


def kernels():
    """The active kernel module (forward/jet1/jet2/vjp0/vjp1/vjp2)."""
    return _kernels


def backend_name() -> str:
    return _name
