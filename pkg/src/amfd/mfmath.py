"""Mean-field analysis of the Boltzmann distribution of a QUBO model.

Under the product (mean-field) approximation ``P_MF(s) = prod_i p_i(s_i)``
with ``x_i = p_i(1)``, the KL divergence from the canonical distribution at
temperature ``T`` decomposes into

    D_KL = mf_entropy(x) + ln Z + mf_energy(model, x) / T

where ``mf_entropy`` is the (negative) entropy of the product distribution
and ``mf_energy`` is its expected energy. Everything here is pure and
operates on immutable inputs; the brute-force functions enumerate all
``2^n`` states and are capped at n = 20.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .qubo import QuboModel, as_mf_vector, _check_vector

_BRUTE_FORCE_MAX_SPINS = 20
_CHUNK_BITS = 16
_EXP_CLAMP = 500.0
_T_FLOOR = 1e-300


@dataclass(frozen=True)
class KlBreakdown:
    """Terms of the mean-field KL divergence at one (x, T) point.

    ``log_partition`` is only available at brute-force scale; it is computed
    with the constant offset C removed, which leaves the divergence
    unchanged (a constant shift of H moves ln Z and the mean energy by
    opposite amounts). ``kl_enumerated`` is the directly enumerated
    divergence when an enumeration was performed.
    """

    mf_entropy: float
    mf_energy: float
    temperature: float
    log_partition: float | None = None
    kl_enumerated: float | None = None

    @property
    def kl_total(self) -> float | None:
        if self.log_partition is None:
            return None
        return self.mf_entropy + self.log_partition + self.mf_energy / self.temperature


def mf_entropy_exact(x: np.ndarray) -> float:
    """Negative entropy ``sum_i [(1-x_i) ln(1-x_i) + x_i ln(x_i)]``.

    Deterministic entries (0 or 1) contribute zero via the 0*ln(0) = 0
    convention. The result is always <= 0.
    """
    x = as_mf_vector(x)
    return float(np.sum(xlogy(1.0 - x, 1.0 - x) + xlogy(x, x)))


def mf_entropy_taylor(x: np.ndarray) -> float:
    """Second-order expansion of the negative entropy around x = 0.5.

    ``sum_i [2 (x_i - 0.5)^2 + ln 0.5]``; exact at 0.5 and finite at the
    boundaries, where the exact derivative diverges.
    """
    x = as_mf_vector(x)
    return float(np.sum(2.0 * (x - 0.5) ** 2) + x.shape[0] * np.log(0.5))


def mf_energy(model: QuboModel, x: np.ndarray) -> float:
    """Expected energy under the product distribution, without the constant.

    ``sum_i h_i x_i + sum_{j<i} q_ij x_i x_j``; equals energy(model, x) - C
    when x is binary.
    """
    x = as_mf_vector(x, model.n_spin)
    return float(model.h @ x + 0.5 * (x @ (model.q @ x)))


def kl_gradient(model: QuboModel, x: np.ndarray, temperature: float) -> np.ndarray:
    """Exact gradient of the KL divergence: ``ln(x/(1-x)) + phi/T``.

    Only defined strictly inside the box; the entropy term diverges at 0
    and 1 (the temperature-scaled variant handles boundaries).
    """
    x = as_mf_vector(x, model.n_spin)
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise ValueError("boundary gradient undefined: x must lie strictly in (0, 1)")
    phi = model.h + model.q @ x
    return np.log(x / (1.0 - x)) + phi / temperature


def scaled_kl_gradient(
    model: QuboModel,
    x_entropy_point: np.ndarray,
    phi: np.ndarray,
    temperature: float,
) -> np.ndarray:
    """Temperature-scaled gradient with the quadratic entropy surrogate.

    Component i is ``T (x_i - 0.5) + phi_i`` for interior x_i and just
    ``T (x_i - 0.5)`` on the boundary, where the entropy term dominates and
    the mean field is ignored. ``phi`` is supplied by the caller so it can
    be evaluated at a forward point.
    """
    x = as_mf_vector(x_entropy_point, model.n_spin)
    phi = _check_vector(model, phi, "phi")
    interior = (x > 0.0) & (x < 1.0)
    return temperature * (x - 0.5) + np.where(interior, phi, 0.0)


def self_consistent_value(phi: np.ndarray, temperature: float) -> np.ndarray:
    """Logistic response ``x_i = 1 / (1 + exp(phi_i / T))``.

    The exponent is clamped to +/-500, so large fields saturate to exact
    0/1 instead of overflowing; T = 0 is accepted as the hard-threshold
    limit (phi > 0 -> 0, phi < 0 -> 1, phi = 0 -> 0.5).
    """
    phi = np.asarray(phi, dtype=np.float64)
    if temperature < 0.0:
        raise ValueError(f"temperature must be nonnegative, got {temperature}")
    expo = np.clip(phi / max(temperature, _T_FLOOR), -_EXP_CLAMP, _EXP_CLAMP)
    return 1.0 / (1.0 + np.exp(expo))


def _all_states(n: int, offset: int, count: int) -> np.ndarray:
    """Rows are the binary expansions of offset..offset+count-1 (bit i = spin i)."""
    codes = np.arange(offset, offset + count, dtype=np.uint64)
    bits = (codes[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & 1
    return bits.astype(np.float64)


def enumerate_energies(model: QuboModel) -> np.ndarray:
    """Energies of all 2^n states, indexed by the binary code of the state."""
    n = model.n_spin
    if n > _BRUTE_FORCE_MAX_SPINS:
        raise ValueError(
            f"enumeration capped at {_BRUTE_FORCE_MAX_SPINS} spins, got {n}"
        )
    total = 1 << n
    out = np.empty(total, dtype=np.float64)
    step = 1 << min(n, _CHUNK_BITS)
    for start in range(0, total, step):
        states = _all_states(n, start, min(step, total - start))
        out[start : start + states.shape[0]] = (
            states @ model.h
            + 0.5 * np.einsum("ij,ij->i", states @ model.q, states)
            + model.c
        )
    return out


def brute_force_minimum(model: QuboModel) -> tuple[float, np.ndarray]:
    """Global minimum energy and its (first, by binary code) minimizer."""
    energies = enumerate_energies(model)
    best = int(np.argmin(energies))
    spins = ((best >> np.arange(model.n_spin)) & 1).astype(np.int8)
    return float(energies[best]), spins


def kl_exact_bruteforce(
    model: QuboModel, x: np.ndarray, temperature: float
) -> KlBreakdown:
    """Enumerate the exact KL divergence and cross-check the closed form.

    Computes ln Z by full enumeration, the divergence
    ``sum_s P_MF(s) ln(P_MF(s)/P_C(s))`` directly, and the closed-form
    decomposition; raises if the two disagree beyond 1e-9. States with
    P_MF = 0 contribute nothing.
    """
    x = as_mf_vector(x, model.n_spin)
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    n = model.n_spin
    energies = enumerate_energies(model) - model.c  # offset-free Hamiltonian
    log_z = float(logsumexp(-energies / temperature))

    kl = 0.0
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)
    # -1e100 stands in for log(0): it underflows exp() to exactly 0 while
    # keeping 0 * log(0) products finite inside the matmul.
    with np.errstate(divide="ignore"):
        log_x = np.where(x > 0.0, np.log(np.maximum(x, _T_FLOOR)), -1e100)
        log_1mx = np.where(x < 1.0, np.log(np.maximum(1.0 - x, _T_FLOOR)), -1e100)
    for start in range(0, total, step):
        states = _all_states(n, start, min(step, total - start))
        log_pmf = states @ log_x + (1.0 - states) @ log_1mx
        log_pc = -energies[start : start + states.shape[0]] / temperature - log_z
        pmf = np.exp(log_pmf)
        contrib = pmf * (log_pmf - log_pc)
        kl += float(np.sum(np.where(pmf > 0.0, contrib, 0.0)))

    breakdown = KlBreakdown(
        mf_entropy=mf_entropy_exact(x),
        mf_energy=mf_energy(model, x),
        temperature=float(temperature),
        log_partition=log_z,
        kl_enumerated=kl,
    )
    if abs(breakdown.kl_total - kl) > 1e-9:
        raise RuntimeError(
            f"closed-form KL {breakdown.kl_total} disagrees with enumeration {kl}"
        )
    return breakdown
