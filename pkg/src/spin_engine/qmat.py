"""Closed-form algebra for 2x2 complex matrices.

Every matrix here is a plain ``numpy`` array of shape ``(2, 2)`` and dtype
``complex128``. Hermitian matrices are handled through their Pauli
coordinates ``M = a0 I + a . sigma``, which gives the spectrum in closed form
(``a0 +/- |a|``) and rank-one projectors ``(I +/- a_hat . sigma) / 2``.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, InvalidInputError

QubitMatrix = np.ndarray

HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-10
DEGENERACY_TOL = 1e-13


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


IDENTITY = _frozen(np.eye(2, dtype=complex))
SIGMA_X = _frozen(np.array([[0, 1], [1, 0]], dtype=complex))
SIGMA_Y = _frozen(np.array([[0, -1j], [1j, 0]], dtype=complex))
SIGMA_Z = _frozen(np.array([[1, 0], [0, -1]], dtype=complex))
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class PauliDecomposition(NamedTuple):
    """Real coordinates of a Hermitian matrix, ``M = a0 I + a . sigma``."""

    a0: float
    a: tuple[float, float, float]

    @property
    def norm(self) -> float:
        return math.sqrt(self.a[0] ** 2 + self.a[1] ** 2 + self.a[2] ** 2)

    def matrix(self) -> QubitMatrix:
        return pauli_matrix(self.a0, *self.a)


def pauli_matrix(a0: float, ax: float, ay: float, az: float) -> QubitMatrix:
    """Assemble ``a0 I + ax sx + ay sy + az sz``."""
    return np.array(
        [[a0 + az, complex(ax, -ay)], [complex(ax, ay), a0 - az]], dtype=complex
    )


def dagger(m: QubitMatrix) -> QubitMatrix:
    return m.conj().T


def anti_hermitian_part(m: QubitMatrix) -> float:
    """Largest entry of ``|M - M^dagger| / 2``."""
    (m00, m01), (m10, m11) = m.tolist()
    return max(abs(m00.imag), abs(m11.imag), 0.5 * abs(m01 - m10.conjugate()))


def is_hermitian(m: QubitMatrix, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    return m.shape == (2, 2) and anti_hermitian_part(m) <= tol


def is_unitary(m: QubitMatrix, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    if m.shape != (2, 2):
        return False
    return float(np.max(np.abs(m @ m.conj().T - IDENTITY))) <= tol


def is_density(m: QubitMatrix, tol: float = POSITIVITY_TOL) -> bool:
    """Hermitian, unit trace and both eigenvalues at least ``-tol``."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        return False
    defect, dec = _checked_coords(m)
    if defect > HERMITIAN_TOL:
        return False
    if abs(2.0 * dec.a0 - 1.0) > tol:
        return False
    return dec.a0 - dec.norm >= -tol


def _checked_coords(m: QubitMatrix) -> tuple[float, PauliDecomposition]:
    # anti-Hermitian defect and Hermitian-part coordinates from one pass
    (m00, m01), (m10, m11) = m.tolist()
    defect = max(abs(m00.imag), abs(m11.imag), 0.5 * abs(m01 - m10.conjugate()))
    dec = PauliDecomposition(
        0.5 * (m00.real + m11.real),
        (0.5 * (m01.real + m10.real), 0.5 * (m10.imag - m01.imag), 0.5 * (m00.real - m11.real)),
    )
    return defect, dec


def pauli_decompose(m: QubitMatrix) -> PauliDecomposition:
    """Return ``(a0, a)`` with ``a0 = Tr(M)/2`` and ``a_i = Tr(sigma_i M)/2``.

    Raises :class:`InvalidInputError` if ``M`` is not Hermitian within
    ``HERMITIAN_TOL``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidInputError(f"expected a 2x2 matrix, got shape {m.shape}")
    defect, dec = _checked_coords(m)
    if not defect <= HERMITIAN_TOL:
        raise InvalidInputError(f"matrix is not Hermitian (anti-Hermitian part {defect:.3e})")
    return dec


class Spectrum(NamedTuple):
    lam_plus: float
    lam_minus: float
    p_plus: QubitMatrix
    p_minus: QubitMatrix


_ZERO = _frozen(np.zeros((2, 2), dtype=complex))


def _spectrum(dec: PauliDecomposition) -> Spectrum:
    r = dec.norm
    if r < DEGENERACY_TOL:
        return Spectrum(dec.a0, dec.a0, IDENTITY, _ZERO)
    nx, ny, nz = (c / r for c in dec.a)
    p_plus = pauli_matrix(0.5, 0.5 * nx, 0.5 * ny, 0.5 * nz)
    return Spectrum(dec.a0 + r, dec.a0 - r, p_plus, IDENTITY - p_plus)


def hermitian_eig(m: QubitMatrix) -> Spectrum:
    """Closed-form spectral decomposition ``M = l+ P+ + l- P-``.

    At degeneracy (``|a| < 1e-13``) both eigenvalues equal ``a0`` and the
    projectors are reported as ``P+ = I``, ``P- = 0``.
    """
    return _spectrum(pauli_decompose(m))


def eigvals(m: QubitMatrix) -> tuple[float, float]:
    dec = pauli_decompose(m)
    r = dec.norm
    return dec.a0 + r, dec.a0 - r


def apply_fn_hermitian(m: QubitMatrix, f: Callable[[float], float]) -> QubitMatrix:
    """Evaluate a real scalar function on a Hermitian matrix via its spectrum."""
    spec = hermitian_eig(m)
    values = []
    for lam in (spec.lam_plus, spec.lam_minus):
        try:
            v = f(lam)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"function undefined at eigenvalue {lam!r}: {exc}") from exc
        if not math.isfinite(v):
            raise DomainError(f"function is not finite at eigenvalue {lam!r}")
        values.append(v)
    return values[0] * spec.p_plus + values[1] * spec.p_minus


def clamp_probability(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def xlogx(x: float) -> float:
    """``x ln x`` with the ``0 ln 0 = 0`` convention."""
    return 0.0 if x <= 0.0 else x * math.log(x)


def unitary_axis_angle(n, theta: float) -> QubitMatrix:
    """``exp(-i theta n.sigma) = cos(theta) I - i sin(theta) n.sigma``."""
    nx, ny, nz = (float(c) for c in n)
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if abs(norm - 1.0) > 1e-10:
        raise InvalidInputError(f"rotation axis must be a unit vector, |n| = {norm!r}")
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[complex(c, -s * nz), complex(-s * ny, -s * nx)],
         [complex(s * ny, -s * nx), complex(c, s * nz)]],
        dtype=complex,
    )


def expectation(observable: QubitMatrix, rho: QubitMatrix) -> float:
    """``Re Tr(O rho)`` without forming the product."""
    (o00, o01), (o10, o11) = observable.tolist()
    (r00, r01), (r10, r11) = rho.tolist()
    return (o00 * r00 + o01 * r10 + o10 * r01 + o11 * r11).real


def conjugate(u: QubitMatrix, m: QubitMatrix) -> QubitMatrix:
    """``U M U^dagger``."""
    return u @ m @ u.conj().T
