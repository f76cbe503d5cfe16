"""Projective measurement along a Bloch-sphere direction.

The basis is fixed by the colatitude ``alpha`` (from +z) and longitude
``phi`` (from +x):

    chi1 = e^{-i phi} sin(alpha/2) |up> - cos(alpha/2) |down>
    chi2 = cos(alpha/2) |up> + e^{i phi} sin(alpha/2) |down>

with ``|up> = (1, 0)`` and ``|down> = (0, 1)``. ``chi2`` points along
``(sin a cos p, sin a sin p, cos a)``; ``chi1`` is antipodal. The outcome is
never read, so the stroke acts as the dephasing channel
``rho -> P1 rho P1 + P2 rho P2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .qmat import QubitMatrix, is_density

TWO_PI = 2.0 * math.pi


def wrap_phi(phi: float) -> float:
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod + TWO_PI can round up to exactly 2 pi
    return 0.0 if wrapped >= TWO_PI else wrapped


@dataclass(frozen=True)
class MeasurementBasis:
    """Measurement direction; ``phi`` is stored modulo 2 pi, ``alpha`` must lie in [0, pi]."""

    alpha: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.phi)):
            raise InvalidInputError(f"basis angles must be finite, got ({self.alpha!r}, {self.phi!r})")
        if not 0.0 <= self.alpha <= math.pi:
            raise InvalidInputError(f"alpha must lie in [0, pi], got {self.alpha!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "phi", wrap_phi(float(self.phi)))

    @property
    def bloch_vector(self) -> tuple[float, float, float]:
        """Unit vector of ``chi2``."""
        sa = math.sin(self.alpha)
        return (sa * math.cos(self.phi), sa * math.sin(self.phi), math.cos(self.alpha))

    def antipode(self) -> "MeasurementBasis":
        """The same projector pair reached through ``(pi - alpha, phi + pi)``."""
        return MeasurementBasis(math.pi - self.alpha, self.phi + math.pi)


class ProjectorPair(NamedTuple):
    p1: QubitMatrix
    p2: QubitMatrix


def basis_states(basis: MeasurementBasis) -> tuple[np.ndarray, np.ndarray]:
    half = basis.alpha / 2.0
    s, c = math.sin(half), math.cos(half)
    phase = complex(math.cos(basis.phi), math.sin(basis.phi))
    chi1 = np.array([phase.conjugate() * s, -c], dtype=complex)
    chi2 = np.array([c, phase * s], dtype=complex)
    return chi1, chi2


def projectors(basis: MeasurementBasis) -> ProjectorPair:
    chi1, chi2 = basis_states(basis)
    return ProjectorPair(np.outer(chi1, chi1.conj()), np.outer(chi2, chi2.conj()))


def _require_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or not is_density(rho):
        raise InvalidInputError("rho is not a valid 2x2 density matrix")
    return rho


def dephase(rho: QubitMatrix, basis: MeasurementBasis) -> QubitMatrix:
    """Unread projective measurement, ``sum_k P_k rho P_k``."""
    rho = _require_density(rho)
    p1, p2 = projectors(basis)
    return p1 @ rho @ p1 + p2 @ rho @ p2


def outcome_probs(rho: QubitMatrix, basis: MeasurementBasis) -> tuple[float, float]:
    rho = _require_density(rho)
    p1, p2 = projectors(basis)
    q1 = float(np.sum(p1 * rho.T).real)
    q2 = float(np.sum(p2 * rho.T).real)
    return min(max(q1, 0.0), 1.0), min(max(q2, 0.0), 1.0)
