"""Invariant suite run by ``spin-engine verify``.

Each check draws its own reproducible random sample and reports a
pass/fail line with the worst observed defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import qmat
from .cycle import CycleParams, run_cycle
from .drive import DriveProtocol, Stroke, propagator_exact, propagator_sliced
from .explore import SweepGrid, sweep
from .probe import MeasurementBasis, dephase, outcome_probs
from .thermo import (
    ThermalContext,
    divergence,
    gibbs_state,
    noneq_free_energy,
    partition_and_free_energy,
    thermal_divergence,
    von_neumann_entropy,
)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator) -> np.ndarray:
    """Bloch vector uniform in the unit ball."""
    r = random_unit_vector(rng) * rng.uniform() ** (1 / 3)
    return qmat.pauli_matrix(0.5, *(0.5 * r))


def random_hermitian(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a0, ax, ay, az = rng.normal(scale=scale, size=4)
    return qmat.pauli_matrix(a0, ax, ay, az)


def random_hamiltonian(rng: np.random.Generator) -> np.ndarray:
    """Hermitian with level splitting at most 1 (the cycle Hamiltonians have exactly 1)."""
    a = random_unit_vector(rng) * rng.uniform(0.0, 0.5)
    return qmat.pauli_matrix(float(rng.normal()), *a)


def random_cycle_params(rng: np.random.Generator) -> CycleParams:
    """omega_tau log-uniform on [1e-3, 10], beta_hw log-uniform on [0.1, 10]."""
    return CycleParams(
        omega_tau=float(10 ** rng.uniform(-3, 1)),
        beta_hw=float(10 ** rng.uniform(-1, 1)),
        basis=MeasurementBasis(float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi))),
    )


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_spectral(rng, samples: int) -> Check:
    worst = 0.0
    for _ in range(samples):
        m = random_hermitian(rng)
        lp, lm, pp, pm = qmat.hermitian_eig(m)
        worst = max(
            worst,
            np.max(np.abs(lp * pp + lm * pm - m)),
            np.max(np.abs(pp @ pp - pp)),
            np.max(np.abs(pp @ pm)),
        )
    return Check("spectral decomposition", worst < 1e-12, f"max defect {worst:.2e} (< 1e-12)")


def check_axis_angle(rng, samples: int) -> Check:
    worst = 0.0
    for _ in range(samples):
        u = qmat.unitary_axis_angle(random_unit_vector(rng), rng.uniform(-10, 10))
        worst = max(worst, np.max(np.abs(u @ u.conj().T - qmat.IDENTITY)))
    return Check("axis-angle unitarity", worst < 1e-14, f"max |UU^+ - I| {worst:.2e} (< 1e-14)")


def check_divergence_routes(rng, samples: int) -> Check:
    routes = eq4 = 0.0
    klein = math.inf
    for _ in range(samples):
        rho, h = random_density(rng), random_hamiltonian(rng)
        ctx = ThermalContext(float(10 ** rng.uniform(-1, 1)))
        d_spec = divergence(rho, gibbs_state(h, ctx))
        d_eq = thermal_divergence(rho, h, ctx)
        f_eq = partition_and_free_energy(h, ctx)[1]
        routes = max(routes, abs(d_spec - d_eq))
        eq4 = max(eq4, abs(d_eq - ctx.beta_hw * (noneq_free_energy(rho, h, ctx) - f_eq)))
        klein = min(klein, d_spec, d_eq)
    ok = routes < 1e-11 and eq4 < 1e-12 and klein >= -1e-12
    return Check(
        "divergence routes",
        ok,
        f"route gap {routes:.2e} (< 1e-11), free-energy gap {eq4:.2e} (< 1e-12), min D {klein:.2e}",
    )


def check_dephasing(rng, samples: int) -> Check:
    worst = 0.0
    entropy_drop = 0.0
    for _ in range(samples):
        rho = random_density(rng)
        basis = MeasurementBasis(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        out = dephase(rho, basis)
        worst = max(
            worst,
            abs(out.trace().real - 1.0),
            np.max(np.abs(dephase(out, basis) - out)),
            max(abs(a - b) for a, b in zip(outcome_probs(out, basis), outcome_probs(rho, basis))),
        )
        entropy_drop = max(entropy_drop, von_neumann_entropy(rho) - von_neumann_entropy(out))
    ok = worst < 1e-12 and entropy_drop <= 1e-12
    return Check("dephasing channel", ok, f"max defect {worst:.2e}, max entropy drop {entropy_drop:.2e}")


def check_cycles(rng, samples: int) -> Check:
    failures = []
    worst_law = 0.0
    for _ in range(samples):
        rec = run_cycle(random_cycle_params(rng))
        worst_law = max(worst_law, rec.first_law_residual)
        bad = rec.violations()
        if bad:
            failures.append((rec.params, bad))
    detail = f"{samples} cycles, max first-law residual {worst_law:.2e}"
    if failures:
        params, bad = failures[0]
        detail += f"; {len(failures)} failing, first {params}: {bad[0]}"
    return Check("cycle bookkeeping", not failures, detail)


def convergence_order(omega_tau: float, exponents=range(4, 13), branch: Stroke = Stroke.I) -> float:
    """Least-squares slope of log(error) against log(1/N)."""
    proto = DriveProtocol(omega_tau, branch)
    exact = propagator_exact(proto).matrix
    ns = np.array([2**k for k in exponents], dtype=float)
    errs = [np.max(np.abs(propagator_sliced(proto, int(n)).matrix - exact)) for n in ns]
    return float(-np.polyfit(np.log(ns), np.log(errs), 1)[0])


def check_propagators(rng, samples: int) -> Check:
    orders, gaps = [], []
    for wt in (1e-2, 1.0, 10.0):
        for branch in Stroke:
            orders.append(convergence_order(wt, branch=branch))
            proto = DriveProtocol(wt, branch)
            gaps.append(np.max(np.abs(propagator_sliced(proto, 2**16).matrix - propagator_exact(proto).matrix)))
    ok = all(abs(o - 2.0) <= 0.1 for o in orders) and max(gaps) < 1e-9
    return Check(
        "propagator oracle",
        ok,
        f"orders {min(orders):.3f}..{max(orders):.3f} (2.0 +/- 0.1), N=2^16 gap {max(gaps):.2e} (< 1e-9)",
    )


def check_commuting_null(rng, samples: int) -> Check:
    worst = 0.0
    for _ in range(samples):
        params = CycleParams(
            omega_tau=float(10 ** rng.uniform(-3, 1)),
            beta_hw=float(10 ** rng.uniform(-1, 1)),
            basis=MeasurementBasis(math.pi / 2, 0.0),
        )
        worst = max(worst, abs(run_cycle(params).q_measure))
    return Check("commuting measurement", worst < 1e-12, f"max |Q_M| {worst:.2e} (< 1e-12)")


def check_symmetry(rng, samples: int) -> Check:
    defect = sweep(CycleParams(), SweepGrid(31, 60)).symmetry_residual
    ok = defect.work < 1e-10 and defect.efficiency < 1e-10
    return Check("landscape symmetry", ok, f"-W defect {defect.work:.2e}, eta defect {defect.efficiency:.2e}")


CHECKS: tuple[Callable[..., Check], ...] = (
    check_spectral,
    check_axis_angle,
    check_divergence_routes,
    check_dephasing,
    check_cycles,
    check_propagators,
    check_commuting_null,
    check_symmetry,
)


def run_all(samples: int = 1000, seed: int = 0) -> list[Check]:
    results = []
    for i, check in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        results.append(check(rng, samples))
    return results
