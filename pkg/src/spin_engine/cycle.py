"""The four-stroke measurement engine and its heat/work bookkeeping.

    rho1 --U--> rho2 --measure--> rho3 --V--> rho4 --bath--> rho1

``rho1`` is the Gibbs state of ``H1 = sz/2``; the drive strokes rotate the
Hamiltonian to ``H2 = H3 = sx/2`` and back to ``H4 = H1``; the bath stroke
replaces ``rho4`` by ``rho1`` outright.

Sign convention: work and heat are energy flowing INTO the spin. The device
runs as an engine when ``W < 0`` and the measurement supplies ``Q_M > 0``.

Every stroke quantity is computed twice: from energy traces, and from
thermal divergences / nonequilibrium free energies. Both values are kept on
the record so callers can audit the agreement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .drive import DEFAULT_OMEGA_TAU, EXACT, DriveProtocol, PropagatorMethod, Stroke, propagator
from .errors import InvalidInputError
from .probe import MeasurementBasis, dephase
from .qmat import SIGMA_X, SIGMA_Z, QubitMatrix, conjugate, expectation
from .thermo import (
    StateFunctions,
    ThermalContext,
    divergence_from_log,
    gibbs_state,
    log_gibbs,
    state_functions,
)

H1 = SIGMA_Z / 2
H2 = SIGMA_X / 2
HAMILTONIANS = (H1, H2, H2, H1)

ROUTE_TOL = 1e-11
EFFICIENCY_ROUTE_TOL = 1e-9
LAW_TOL = 1e-12
ENGINE_FUEL_TOL = 1e-12


class Regime(enum.Enum):
    ENGINE = "engine"
    NON_ENGINE = "non_engine"


@dataclass(frozen=True)
class CycleParams:
    omega_tau: float = DEFAULT_OMEGA_TAU
    beta_hw: float = 1.0
    basis: MeasurementBasis = field(default_factory=lambda: MeasurementBasis(0.0, 0.0))
    method: PropagatorMethod = EXACT

    def __post_init__(self):
        for name in ("omega_tau", "beta_hw"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive and finite, got {value!r}")
        if not isinstance(self.basis, MeasurementBasis):
            raise InvalidInputError("basis must be a MeasurementBasis")
        if not isinstance(self.method, PropagatorMethod):
            raise InvalidInputError("method must be a PropagatorMethod")

    def with_basis(self, alpha: float, phi: float) -> "CycleParams":
        return CycleParams(self.omega_tau, self.beta_hw, MeasurementBasis(alpha, phi), self.method)


@dataclass(frozen=True)
class CycleStates:
    """States, Hamiltonians and state functions of one cycle.

    ``klu[i]`` is the relative entropy of ``rho[i]`` to its Gibbs reference,
    evaluated as ``Tr[rho (ln rho - ln sigma)]``; ``sf[i].divergence`` is the
    same quantity from ``beta (E - F_eq) - S``.
    """

    ctx: ThermalContext
    rho: tuple[QubitMatrix, QubitMatrix, QubitMatrix, QubitMatrix]
    sf: tuple[StateFunctions, StateFunctions, StateFunctions, StateFunctions]
    klu: tuple[float, float, float, float]
    h: tuple[QubitMatrix, ...] = HAMILTONIANS


class Routes(NamedTuple):
    trace: float
    divergence: float


class NetWorkRoutes(NamedTuple):
    strokes: float
    divergence: float
    free_energy: float


class EfficiencyRoutes(NamedTuple):
    ratio: float
    divergence: float
    free_energy: float


def _spread(values) -> float:
    return max(values) - min(values)


@dataclass(frozen=True)
class _Frame:
    # the part of the cycle that does not depend on the measurement basis
    ctx: ThermalContext
    u: QubitMatrix
    v: QubitMatrix
    rho1: QubitMatrix
    rho2: QubitMatrix
    sf1: StateFunctions
    sf2: StateFunctions
    klu1: float
    klu2: float
    log_sigma: tuple[QubitMatrix, QubitMatrix]


@lru_cache(maxsize=512)
def _frame(omega_tau: float, beta_hw: float, method: PropagatorMethod) -> _Frame:
    ctx = ThermalContext(beta_hw)
    u = propagator(DriveProtocol(omega_tau, Stroke.I), method).matrix
    v = propagator(DriveProtocol(omega_tau, Stroke.II), method).matrix
    rho1 = gibbs_state(H1, ctx)
    rho2 = conjugate(u, rho1)
    log1, log2 = log_gibbs(H1, ctx), log_gibbs(H2, ctx)
    for m in (rho1, rho2, log1, log2):
        m.setflags(write=False)
    return _Frame(
        ctx, u, v, rho1, rho2,
        state_functions(rho1, H1, ctx), state_functions(rho2, H2, ctx),
        divergence_from_log(rho1, log1), divergence_from_log(rho2, log2),
        (log1, log2),
    )


def cycle_states(params: CycleParams) -> CycleStates:
    """Propagate ``rho1 -> rho4`` for the given parameters."""
    fr = _frame(float(params.omega_tau), float(params.beta_hw), params.method)
    rho3 = dephase(fr.rho2, params.basis)
    rho4 = conjugate(fr.v, rho3)
    ctx = fr.ctx
    return CycleStates(
        ctx=ctx,
        rho=(fr.rho1, fr.rho2, rho3, rho4),
        sf=(fr.sf1, fr.sf2, state_functions(rho3, H2, ctx), state_functions(rho4, H1, ctx)),
        klu=(
            fr.klu1,
            fr.klu2,
            divergence_from_log(rho3, fr.log_sigma[1]),
            divergence_from_log(rho4, fr.log_sigma[0]),
        ),
    )


def work_stroke_I(st: CycleStates) -> Routes:
    """Work done on the spin by the first drive stroke."""
    rho1, rho2 = st.rho[0], st.rho[1]
    trace = expectation(st.h[1], rho2) - expectation(st.h[0], rho1)
    div = st.klu[1] / st.ctx.beta_hw + st.sf[1].f_eq - st.sf[0].f_eq
    return Routes(trace, div)


def quantum_heat(st: CycleStates) -> Routes:
    """Energy the measurement deposits in the spin, ``Q_M``."""
    trace = expectation(st.h[1], st.rho[2] - st.rho[1])
    ds = st.sf[2].entropy - st.sf[1].entropy
    div = (st.klu[2] - st.klu[1] + ds) / st.ctx.beta_hw + st.sf[2].f_eq - st.sf[1].f_eq
    return Routes(trace, div)


def work_stroke_III(st: CycleStates) -> Routes:
    """Work done on the spin by the second drive stroke."""
    trace = expectation(st.h[3], st.rho[3]) - expectation(st.h[2], st.rho[2])
    div = (st.klu[3] - st.klu[2]) / st.ctx.beta_hw + st.sf[3].f_eq - st.sf[2].f_eq
    return Routes(trace, div)


def thermal_heat(st: CycleStates) -> Routes:
    """Heat flowing from the bath into the spin, ``Q_T``; negative when heat is dumped."""
    trace = expectation(st.h[0], st.rho[0] - st.rho[3])
    ds = st.sf[0].entropy - st.sf[3].entropy
    # relies on rho1 being the Gibbs state, so its own divergence vanishes
    div = (-st.klu[3] + ds) / st.ctx.beta_hw
    return Routes(trace, div)


def net_work(st: CycleStates) -> NetWorkRoutes:
    """Net work on the spin: stroke sum, divergence form and free-energy form."""
    strokes = work_stroke_I(st).trace + work_stroke_III(st).trace
    d = st.klu
    div = (d[3] + d[1] - d[2]) / st.ctx.beta_hw
    f = [s.f_neq for s in st.sf]
    free = f[1] - f[0] + f[3] - f[2]
    return NetWorkRoutes(strokes, div, free)


def efficiency(st: CycleStates) -> EfficiencyRoutes | None:
    """``-W / Q_M`` in three forms, or ``None`` outside the engine regime."""
    w = net_work(st).strokes
    q_m = quantum_heat(st).trace
    if not (w < 0.0 and q_m > ENGINE_FUEL_TOL):
        return None
    b = st.ctx.beta_hw
    d = st.klu
    f = [s.f_neq for s in st.sf]
    ds_m = st.sf[2].entropy - st.sf[1].entropy
    return EfficiencyRoutes(
        ratio=-w / q_m,
        divergence=(d[2] - d[3] - d[1]) / (d[2] - d[1] + ds_m),
        free_energy=1.0 + (f[0] - f[3] - ds_m / b) / (f[2] - f[1] + ds_m / b),
    )


@dataclass(frozen=True)
class CycleRecord:
    params: CycleParams
    rho: tuple[QubitMatrix, ...]
    sf: tuple[StateFunctions, ...]
    w_stroke_I: float
    q_measure: float
    w_stroke_III: float
    q_thermal: float
    w_net: float
    ds_measure: float
    ds_thermal: float
    efficiency: float | None
    regime: Regime
    #: every independent evaluation of each quantity, trace route first
    routes: dict[str, tuple[float, ...]] = field(repr=False, compare=False)

    @property
    def work_output(self) -> float:
        return -self.w_net

    @property
    def first_law_residual(self) -> float:
        return abs(self.w_net + self.q_measure + self.q_thermal)

    def route_gaps(self) -> dict[str, float]:
        return {name: _spread(values) for name, values in self.routes.items()}

    def violations(self) -> list[str]:
        """Names of the bookkeeping invariants this record breaks (empty if none)."""
        bad = []
        s = [x.entropy for x in self.sf]
        d = [x.divergence for x in self.sf]
        if self.first_law_residual >= LAW_TOL:
            bad.append(f"first law residual {self.first_law_residual:.3e}")
        if abs(s[0] - s[1]) >= LAW_TOL or abs(s[2] - s[3]) >= LAW_TOL:
            bad.append("entropy changed during a drive stroke")
        if abs(self.ds_thermal + self.ds_measure) >= LAW_TOL:
            bad.append("dS_T != -dS_M")
        if abs(d[0]) >= LAW_TOL:
            bad.append(f"initial divergence {d[0]:.3e} != 0")
        if self.ds_measure < -LAW_TOL:
            bad.append(f"measurement lowered entropy by {-self.ds_measure:.3e}")
        if min(d) < -LAW_TOL:
            bad.append("negative thermal divergence")
        for name, gap in self.route_gaps().items():
            tol = EFFICIENCY_ROUTE_TOL if name == "efficiency" else ROUTE_TOL
            if gap >= tol:
                bad.append(f"{name} routes disagree by {gap:.3e}")
        engine = self.w_net < 0 and self.q_measure > ENGINE_FUEL_TOL
        if engine != (self.regime is Regime.ENGINE):
            bad.append("regime flag inconsistent")
        if self.efficiency is not None and self.q_thermal < 0 and not 0 < self.efficiency <= 1:
            bad.append(f"efficiency {self.efficiency!r} outside (0, 1]")
        return bad


def run_cycle(params: CycleParams) -> CycleRecord:
    """Run one full cycle and book every heat and work exchange."""
    st = cycle_states(params)
    w1, qm, w3, qt = work_stroke_I(st), quantum_heat(st), work_stroke_III(st), thermal_heat(st)
    w = net_work(st)
    eta = efficiency(st)
    s = [x.entropy for x in st.sf]
    routes = {
        "w_stroke_I": tuple(w1),
        "q_measure": tuple(qm),
        "w_stroke_III": tuple(w3),
        "q_thermal": tuple(qt),
        "w_net": tuple(w),
    }
    for i, (sf, klu) in enumerate(zip(st.sf, st.klu), start=1):
        routes[f"D{i}"] = (sf.divergence, klu)
    if eta is not None:
        routes["efficiency"] = tuple(eta)
    return CycleRecord(
        params=params,
        rho=st.rho,
        sf=st.sf,
        w_stroke_I=w1.trace,
        q_measure=qm.trace,
        w_stroke_III=w3.trace,
        q_thermal=qt.trace,
        w_net=w.strokes,
        ds_measure=s[2] - s[1],
        ds_thermal=s[0] - s[3],
        efficiency=None if eta is None else eta.ratio,
        regime=Regime.ENGINE if eta is not None else Regime.NON_ENGINE,
        routes=routes,
    )
