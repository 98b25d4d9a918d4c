"""Backend selection for the RK4 polynomial-field kernel.

The compiled extension is used when it imports; set ``QUADRADYN_PURE_PYTHON=1``
to force the pure-Python implementation. Both produce bit-identical output.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels
from .poly import VectorField2

PURE_ENV = "QUADRADYN_PURE_PYTHON"

_compiled = None
if os.environ.get(PURE_ENV, "").strip().lower() not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def field_arrays(field: VectorField2):
    """Exponent/coefficient arrays for both components, in term order."""

    def pack(poly):
        items = list(poly.terms.items())
        exps = np.array([e for e, _ in items], dtype=np.int_).reshape(-1, 2)
        coefs = np.array([c for _, c in items], dtype=np.float64)
        return np.ascontiguousarray(exps), np.ascontiguousarray(coefs)

    pe, pc = pack(field.p)
    qe, qc = pack(field.q)
    deg = int(max([0] + [int(e.max()) for e in (pe, qe) if e.size]))
    return pe, pc, qe, qc, deg


def rk4_poly(field: VectorField2, start, h: float, n_steps: int,
             blowup: float = 1e6, window=None, backend: str | None = None):
    """Run ``n_steps`` RK4 steps; returns ``(states[m, 2], status)``.

    ``status`` is 0 (completed), 1 (blow-up) or 2 (left ``window``).
    """
    pe, pc, qe, qc, deg = field_arrays(field)
    impl = _select(backend)
    win = None if window is None else tuple(float(v) for v in window)
    return impl.rk4_poly(
        pe, pc, qe, qc, deg, float(start[0]), float(start[1]), float(h), int(n_steps),
        float(blowup), win,
    )


def _select(backend: str | None):
    if backend is None:
        backend = BACKEND
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _compiled is not None else ("python",)
