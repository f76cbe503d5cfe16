"""Equilibrium and nonequilibrium state functions of a qubit.

Energies are in units of hbar*omega, entropies and divergences in nats, and
``beta_hw`` is the dimensionless inverse temperature beta*hbar*omega.

Two independent routes to the thermal divergence are provided:

* :func:`divergence` evaluates ``Tr[rho (ln rho - ln sigma)]`` from the
  spectra of both states;
* :func:`thermal_divergence` uses ``beta (E - F_eq) - S``.

:func:`gibbs_divergence` is the relative entropy against a Gibbs reference
with ``ln sigma = -beta H - ln Z`` written down analytically, so it stays
finite at low temperature where the spectral log of ``sigma`` would underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularReferenceError
from .qmat import (
    IDENTITY,
    QubitMatrix,
    apply_fn_hermitian,
    clamp_probability,
    eigvals,
    expectation,
    is_density,
    pauli_decompose,
    xlogx,
)

FULL_RANK_TOL = 1e-14


@dataclass(frozen=True)
class ThermalContext:
    beta_hw: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.beta_hw) and self.beta_hw > 0):
            raise InvalidInputError(f"beta_hw must be positive and finite, got {self.beta_hw!r}")


@dataclass(frozen=True)
class StateFunctions:
    """Per-state bookkeeping: ``E``, ``S``, ``F_eq``, ``F`` and ``D(rho || sigma_eq)``."""

    energy: float
    entropy: float
    f_eq: float
    f_neq: float
    divergence: float


def _check_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or not is_density(rho):
        raise InvalidInputError("rho is not a valid 2x2 density matrix")
    return rho


def _entropy(rho: np.ndarray) -> float:
    # rho already validated
    lam_plus, lam_minus = eigvals(rho)
    s = -(xlogx(clamp_probability(lam_plus)) + xlogx(clamp_probability(lam_minus)))
    return max(s, 0.0)


def log_partition(h: QubitMatrix, ctx: ThermalContext) -> float:
    """``ln Z`` evaluated without overflow."""
    lam_plus, lam_minus = eigvals(h)
    b = ctx.beta_hw
    return -b * lam_minus + math.log1p(math.exp(-b * (lam_plus - lam_minus)))


def partition_and_free_energy(h: QubitMatrix, ctx: ThermalContext) -> tuple[float, float]:
    """Return ``(Z, F_eq)`` with ``F_eq = -ln(Z) / beta``."""
    log_z = log_partition(h, ctx)
    return math.exp(log_z), -log_z / ctx.beta_hw


def gibbs_state(h: QubitMatrix, ctx: ThermalContext) -> QubitMatrix:
    """``exp(-beta H) / Z``."""
    _, lam_minus = eigvals(h)
    b = ctx.beta_hw
    # shifted by the ground energy so the exponent never overflows
    unnormalized = apply_fn_hermitian(h, lambda x: math.exp(-b * (x - lam_minus)))
    return unnormalized / unnormalized.trace().real


def log_gibbs(h: QubitMatrix, ctx: ThermalContext) -> QubitMatrix:
    """``ln sigma_eq = -beta H - ln(Z) I``."""
    pauli_decompose(h)
    return -ctx.beta_hw * np.asarray(h, dtype=complex) - log_partition(h, ctx) * IDENTITY


def von_neumann_entropy(rho: QubitMatrix) -> float:
    """``-Tr(rho ln rho)`` in nats, from eigenvalues clamped to [0, 1]."""
    return _entropy(_check_density(rho))


def internal_energy(rho: QubitMatrix, h: QubitMatrix) -> float:
    return expectation(np.asarray(h), _check_density(rho))


def divergence(rho: QubitMatrix, sigma: QubitMatrix) -> float:
    """Quantum relative entropy ``Tr[rho (ln rho - ln sigma)]``.

    Raises :class:`SingularReferenceError` if ``sigma`` has an eigenvalue
    below ``1e-14``; the result would be infinite or meaningless.
    """
    rho = _check_density(rho)
    sigma = _check_density(sigma)
    if eigvals(sigma)[1] < FULL_RANK_TOL:
        raise SingularReferenceError("reference state is not full rank")
    return divergence_from_log(rho, apply_fn_hermitian(sigma, math.log))


def divergence_from_log(rho: QubitMatrix, log_sigma: QubitMatrix) -> float:
    """``-S(rho) - Tr(rho ln sigma)`` for a precomputed ``ln sigma``."""
    rho = _check_density(rho)
    return -_entropy(rho) - expectation(np.asarray(log_sigma), rho)


def gibbs_divergence(rho: QubitMatrix, h: QubitMatrix, ctx: ThermalContext) -> float:
    """Relative entropy of ``rho`` to the Gibbs state of ``h`` with analytic ``ln sigma``."""
    return divergence_from_log(rho, log_gibbs(h, ctx))


def thermal_divergence(rho: QubitMatrix, h: QubitMatrix, ctx: ThermalContext) -> float:
    """``beta (E - F_eq) - S``."""
    _, f_eq = partition_and_free_energy(h, ctx)
    return ctx.beta_hw * (internal_energy(rho, h) - f_eq) - von_neumann_entropy(rho)


def noneq_free_energy(rho: QubitMatrix, h: QubitMatrix, ctx: ThermalContext) -> float:
    """``F = E - S / beta``; never below ``F_eq``."""
    return internal_energy(rho, h) - von_neumann_entropy(rho) / ctx.beta_hw


def state_functions(rho: QubitMatrix, h: QubitMatrix, ctx: ThermalContext) -> StateFunctions:
    rho = _check_density(rho)
    energy = expectation(np.asarray(h), rho)
    entropy = _entropy(rho)
    _, f_eq = partition_and_free_energy(h, ctx)
    b = ctx.beta_hw
    return StateFunctions(
        energy=energy,
        entropy=entropy,
        f_eq=f_eq,
        f_neq=energy - entropy / b,
        divergence=b * (energy - f_eq) - entropy,
    )
