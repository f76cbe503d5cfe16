"""Adiabatic-stroke drive protocols and their propagators.

Units: hbar = omega = 1, so energies are in units of hbar*omega and a stroke
lasts ``tau = omega_tau``. The field rotates in the x-z plane,

    H(t) = (cos theta(t) sigma_z + sin theta(t) sigma_x) / 2,

with ``theta`` running 0 -> pi/2 on stroke I (t in [0, tau]) and
pi/2 -> 0 on stroke II (t in [tau, 2 tau]).

In the frame co-rotating about y the generator is constant, which yields the
closed-form propagators returned by :func:`propagator_exact`. The midpoint
time-sliced product in :func:`propagator_sliced` is kept as an independent
check on that derivation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError
from .qmat import QubitMatrix, pauli_matrix, unitary_axis_angle

#: omega*tau for hbar*omega = 0.5 peV and tau = 8.4 us
DEFAULT_OMEGA_TAU = 6.381e-3
DEFAULT_SLICES = 2**16


class Stroke(enum.Enum):
    I = "I"
    II = "II"


@dataclass(frozen=True)
class DriveProtocol:
    omega_tau: float
    branch: Stroke = Stroke.I

    def __post_init__(self):
        if not (math.isfinite(self.omega_tau) and self.omega_tau > 0):
            raise InvalidInputError(f"omega_tau must be positive and finite, got {self.omega_tau!r}")
        if not isinstance(self.branch, Stroke):
            raise InvalidInputError(f"unknown stroke {self.branch!r}")

    @property
    def tau(self) -> float:
        return self.omega_tau

    @property
    def window(self) -> tuple[float, float]:
        if self.branch is Stroke.I:
            return 0.0, self.tau
        return self.tau, 2.0 * self.tau

    @property
    def angular_rate(self) -> float:
        """d theta / dt."""
        rate = math.pi / (2.0 * self.tau)
        return rate if self.branch is Stroke.I else -rate

    def angle(self, t):
        """Field angle from the z axis; accepts scalars or arrays."""
        if self.branch is Stroke.I:
            return np.pi * t / (2.0 * self.tau)
        return np.pi * (2.0 * self.tau - t) / (2.0 * self.tau)


@dataclass(frozen=True)
class PropagatorMethod:
    """``kind`` is ``"exact"`` or ``"sliced"``; ``slices`` only for the latter."""

    kind: str = "exact"
    slices: int | None = None

    def __post_init__(self):
        if self.kind == "exact":
            if self.slices is not None:
                raise InvalidInputError("exact method takes no slice count")
        elif self.kind == "sliced":
            if not isinstance(self.slices, int) or isinstance(self.slices, bool) or self.slices < 1:
                raise InvalidInputError(f"slice count must be a positive integer, got {self.slices!r}")
        else:
            raise InvalidInputError(f"unknown propagator method {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PropagatorMethod":
        """Parse ``exact`` or ``sliced:N``."""
        if text == "exact":
            return cls()
        kind, sep, n = text.partition(":")
        if kind == "sliced" and sep:
            try:
                return cls("sliced", int(n))
            except ValueError:
                pass
        raise InvalidInputError(f"method must be 'exact' or 'sliced:N', got {text!r}")

    def __str__(self) -> str:
        return "exact" if self.kind == "exact" else f"sliced:{self.slices}"


EXACT = PropagatorMethod()


@dataclass(frozen=True)
class StrokeUnitary:
    matrix: QubitMatrix
    protocol: DriveProtocol
    method: PropagatorMethod


def hamiltonian_at(protocol: DriveProtocol, t: float) -> QubitMatrix:
    """Drive Hamiltonian at time ``t``, in units of hbar*omega."""
    lo, hi = protocol.window
    if not lo <= t <= hi:
        raise InvalidInputError(f"t = {t!r} outside stroke {protocol.branch.value} window [{lo}, {hi}]")
    theta = protocol.angle(t)
    return pauli_matrix(0.0, 0.5 * math.sin(theta), 0.0, 0.5 * math.cos(theta))


def _evolve_constant(h_z: float, h_y: float, duration: float) -> QubitMatrix:
    # exp(-i duration (h_z sz + h_y sy))
    norm = math.hypot(h_z, h_y)
    return unitary_axis_angle((0.0, h_y / norm, h_z / norm), duration * norm)


@lru_cache(maxsize=256)
def _exact_matrix(protocol: DriveProtocol) -> QubitMatrix:
    tau = protocol.tau
    quarter = unitary_axis_angle((0.0, 1.0, 0.0), math.pi / 4)
    # rotating-frame generator: sz/2 - (theta_dot/2) sy
    body = _evolve_constant(0.5, -0.5 * protocol.angular_rate, tau)
    if protocol.branch is Stroke.I:
        u = quarter @ body
    else:
        u = body @ quarter.conj().T
    u.setflags(write=False)
    return u


def propagator_exact(protocol: DriveProtocol) -> StrokeUnitary:
    """Closed-form time-ordered exponential of one stroke.

    Stroke I: ``exp(-i pi/4 sy) exp(-i tau (sz/2 - pi/(4 tau) sy))``.
    Stroke II: ``exp(-i tau (sz/2 + pi/(4 tau) sy)) exp(+i pi/4 sy)``.
    """
    return StrokeUnitary(_exact_matrix(protocol), protocol, EXACT)


def _ordered_product(factors: np.ndarray) -> np.ndarray:
    # factors[k] acts at step k; the result is factors[-1] @ ... @ factors[0]
    while len(factors) > 1:
        if len(factors) % 2:
            factors = np.concatenate([factors, np.eye(2, dtype=complex)[None]])
        factors = np.matmul(factors[1::2], factors[0::2])
    return factors[0]


def propagator_sliced(protocol: DriveProtocol, n: int) -> StrokeUnitary:
    """Midpoint time-sliced product with ``n`` equal steps."""
    method = PropagatorMethod("sliced", n)
    lo, _ = protocol.window
    dt = protocol.tau / n
    midpoints = lo + (np.arange(n) + 0.5) * dt
    theta = protocol.angle(midpoints)
    # each slice is exp(-i (dt/2) n.sigma) with n = (sin theta, 0, cos theta)
    c, s = math.cos(dt / 2), math.sin(dt / 2)
    nx, nz = np.sin(theta), np.cos(theta)
    factors = np.empty((n, 2, 2), dtype=complex)
    factors[:, 0, 0] = c - 1j * s * nz
    factors[:, 1, 1] = c + 1j * s * nz
    factors[:, 0, 1] = -1j * s * nx
    factors[:, 1, 0] = -1j * s * nx
    u = _ordered_product(factors)
    u.setflags(write=False)
    return StrokeUnitary(u, protocol, method)


def propagator(protocol: DriveProtocol, method: PropagatorMethod = EXACT) -> StrokeUnitary:
    if method.kind == "exact":
        return propagator_exact(protocol)
    return propagator_sliced(protocol, method.slices)
