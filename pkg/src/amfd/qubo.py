"""QUBO model container and the basic operations shared by all solvers.

The model is ``H(s) = h.s + (1/2) s'Qs + C`` over binary vectors
``s in {0,1}^n`` with a symmetric, zero-diagonal interaction matrix ``Q``.
Mf-spin vectors ``x in [0,1]^n`` carry the per-spin expectation used by the
mean-field solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuboModel:
    """Dense QUBO: symmetric zero-diagonal ``q``, bias ``h``, constant ``c``.

    Immutable after construction; the backing arrays are copied and marked
    read-only, so a model can be shared freely across threads.
    """

    q: np.ndarray
    h: np.ndarray
    c: float = 0.0

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=np.float64, order="C")
        h = np.array(self.h, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"q must be square, got shape {q.shape}")
        if h.ndim != 1 or h.shape[0] != q.shape[0]:
            raise ValueError(
                f"h has length {h.shape}, expected ({q.shape[0]},) to match q"
            )
        if q.shape[0] < 1:
            raise ValueError("model must have at least one spin")
        if not np.array_equal(q, q.T):
            raise ValueError("q must be symmetric")
        if np.any(np.diagonal(q) != 0.0):
            raise ValueError("q must have a zero diagonal")
        q.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", float(self.c))

    @property
    def n_spin(self) -> int:
        return self.q.shape[0]

    @classmethod
    def from_upper(cls, upper: np.ndarray, h: np.ndarray, c: float = 0.0) -> "QuboModel":
        """Build from a strictly upper-triangular coupling matrix.

        The input is mirrored into the symmetric form. Entries on or below
        the diagonal must be zero; anything else is a malformed model and is
        rejected rather than silently folded.
        """
        upper = np.asarray(upper, dtype=np.float64)
        if upper.ndim != 2 or upper.shape[0] != upper.shape[1]:
            raise ValueError(f"upper must be square, got shape {upper.shape}")
        if np.any(np.tril(upper) != 0.0):
            raise ValueError("upper must be strictly upper-triangular (zero diagonal and below)")
        return cls(q=upper + upper.T, h=h, c=c)


def _check_vector(model: QuboModel, v: np.ndarray, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (model.n_spin,):
        raise ValueError(f"{name} has shape {v.shape}, expected ({model.n_spin},)")
    return v


def as_spin_vector(s: np.ndarray, n_spin: int | None = None) -> np.ndarray:
    """Validate a binary spin vector and return it as int8."""
    s = np.asarray(s)
    if s.ndim != 1:
        raise ValueError(f"spin vector must be 1-D, got {s.ndim}-D")
    if n_spin is not None and s.shape[0] != n_spin:
        raise ValueError(f"spin vector has length {s.shape[0]}, expected {n_spin}")
    out = s.astype(np.int8)
    if np.any((out != 0) & (out != 1)) or np.any(out != s):
        raise ValueError("spin vector entries must be exactly 0 or 1")
    return out


def as_mf_vector(x: np.ndarray, n_spin: int | None = None) -> np.ndarray:
    """Validate an mf-spin vector (entries in [0, 1]) and return it as float64."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"mf vector must be 1-D, got {x.ndim}-D")
    if n_spin is not None and x.shape[0] != n_spin:
        raise ValueError(f"mf vector has length {x.shape[0]}, expected {n_spin}")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("mf vector entries must lie in [0, 1]")
    return x


def energy(model: QuboModel, s: np.ndarray) -> float:
    """Evaluate ``h.s + (1/2) s'Qs + C`` for a binary assignment."""
    s = as_spin_vector(s, model.n_spin).astype(np.float64)
    return float(model.h @ s + 0.5 * (s @ (model.q @ s)) + model.c)


def energy_batch(model: QuboModel, states: np.ndarray) -> np.ndarray:
    """Evaluate the energy of each row of a (m, n_spin) binary matrix."""
    states = np.asarray(states, dtype=np.float64)
    if states.ndim != 2 or states.shape[1] != model.n_spin:
        raise ValueError(
            f"states has shape {states.shape}, expected (m, {model.n_spin})"
        )
    return states @ model.h + 0.5 * np.einsum("ij,ij->i", states @ model.q, states) + model.c


def normalize(model: QuboModel) -> QuboModel:
    """Rescale ``q`` and ``h`` by the root-mean-square row magnitude.

    The divisor is ``sqrt((1/n) * sum_i(h_i^2 + sum_j q_ij^2))``; after
    normalization that quantity is exactly 1. ``c`` is left unchanged and
    the input model is not modified. An all-zero model has no scale and is
    rejected.
    """
    n = model.n_spin
    denom = float(np.sqrt((model.h @ model.h + np.sum(model.q * model.q)) / n))
    if denom == 0.0:
        raise ValueError("degenerate model: q and h are all zero")
    return QuboModel(q=model.q / denom, h=model.h / denom, c=model.c)


def mean_field(model: QuboModel, x: np.ndarray) -> np.ndarray:
    """Mean field ``phi = h + Qx`` acting on each spin at mf-state ``x``."""
    x = _check_vector(model, x, "x")
    return model.h + model.q @ x


def round_to_binary(x: np.ndarray) -> np.ndarray:
    """Threshold an mf vector at 0.5 (ties go to 1) into a spin vector."""
    x = np.asarray(x, dtype=np.float64)
    return (x >= 0.5).astype(np.int8)
