"""Descent-loop backends: compiled kernel when available, numpy otherwise.

The compiled extension is optional; set ``AMFD_PURE_PYTHON=1`` to force the
numpy path even when it is present (used by the kernel benchmark and the
test suite to cover both lanes).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _descent as _compiled
except ImportError:
    _compiled = None


def have_compiled() -> bool:
    return _compiled is not None


def active_backend() -> str:
    """Name of the backend ``descend`` dispatches to for this process."""
    if _compiled is None or os.environ.get("AMFD_PURE_PYTHON", "") in ("1", "true"):
        return "python"
    return "cython"


def descend_python(
    q: np.ndarray,
    h: np.ndarray,
    x_curr: np.ndarray,
    x_prev: np.ndarray,
    temps: np.ndarray,
    eta: float,
    zeta: float,
) -> np.ndarray:
    """Reference numpy implementation of the descent loop.

    Per step: forward point ``x + zeta (x - x_prev)`` (not clamped), entropy
    force ``T (x - 0.5)`` at the current point, mean field at the forward
    point, then ``2x - x_prev - eta*force`` minus the mean field wherever
    the current value is interior, clamped into [0, 1].
    """
    x = np.array(x_curr, dtype=np.float64)
    xp = np.array(x_prev, dtype=np.float64)
    for temp in temps:
        fwd = x + zeta * (x - xp)
        phi = h + q @ fwd
        interior = (x > 0.0) & (x < 1.0)
        xn = 2.0 * x - xp - eta * temp * (x - 0.5) - eta * np.where(interior, phi, 0.0)
        np.clip(xn, 0.0, 1.0, out=xn)
        xp, x = x, xn
    return x


def descend_compiled(
    q: np.ndarray,
    h: np.ndarray,
    x_curr: np.ndarray,
    x_prev: np.ndarray,
    temps: np.ndarray,
    eta: float,
    zeta: float,
) -> np.ndarray:
    if _compiled is None:
        raise RuntimeError("compiled kernel is not available in this install")
    return _compiled.descend(
        np.ascontiguousarray(q, dtype=np.float64),
        np.ascontiguousarray(h, dtype=np.float64),
        x_curr,
        x_prev,
        np.ascontiguousarray(temps, dtype=np.float64),
        float(eta),
        float(zeta),
    )


def descend(q, h, x_curr, x_prev, temps, eta, zeta) -> np.ndarray:
    """Run the descent loop on the backend selected for this process."""
    if active_backend() == "cython":
        return descend_compiled(q, h, x_curr, x_prev, temps, eta, zeta)
    return descend_python(q, h, x_curr, x_prev, temps, eta, zeta)
