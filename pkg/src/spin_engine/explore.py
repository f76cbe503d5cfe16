"""Sweeps over the measurement direction and optimum search.

The grid is ``alpha_j = j pi / (alpha_steps - 1)`` (endpoints included) by
``phi_k = 2 pi k / phi_steps`` (endpoint excluded). Rows are kept in
row-major order, alpha outer and phi inner, whatever the number of workers.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .cycle import CycleParams, CycleRecord, Regime, run_cycle
from .errors import EngineError, GridNotClosedError, InvalidInputError, NoEngineRegimeError
from .probe import TWO_PI, wrap_phi

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

#: angles at which the reported efficiency maximum sits; slice defaults
ALPHA_ETA = 1.15
PHI_ETA = 2.04


class Objective(str, enum.Enum):
    WORK_OUTPUT = "work_output"
    EFFICIENCY = "efficiency"


@dataclass(frozen=True)
class SweepGrid:
    alpha_steps: int = 181
    phi_steps: int = 360

    def __post_init__(self):
        for name in ("alpha_steps", "phi_steps"):
            n = getattr(self, name)
            if not isinstance(n, int) or isinstance(n, bool) or n < 2:
                raise InvalidInputError(f"{name} must be an integer >= 2, got {n!r}")

    def alphas(self) -> list[float]:
        return [math.pi * (j / (self.alpha_steps - 1)) for j in range(self.alpha_steps)]

    def phis(self) -> list[float]:
        return [TWO_PI * (k / self.phi_steps) for k in range(self.phi_steps)]

    def __len__(self) -> int:
        return self.alpha_steps * self.phi_steps


class SweepRow(NamedTuple):
    alpha: float
    phi: float
    neg_W: float
    Q_M: float
    Q_T: float
    eta: float | None
    D2: float
    D3: float
    D4: float
    F3: float
    F4: float
    dS_M: float
    regime: str

    @classmethod
    def from_record(cls, rec: CycleRecord) -> "SweepRow":
        sf = rec.sf
        return cls(
            alpha=rec.params.basis.alpha,
            phi=rec.params.basis.phi,
            neg_W=-rec.w_net,
            Q_M=rec.q_measure,
            Q_T=rec.q_thermal,
            eta=rec.efficiency,
            D2=sf[1].divergence,
            D3=sf[2].divergence,
            D4=sf[3].divergence,
            F3=sf[2].f_neq,
            F4=sf[3].f_neq,
            dS_M=rec.ds_measure,
            regime=rec.regime.value,
        )

    def objective(self, objective: Objective) -> float | None:
        if objective is Objective.WORK_OUTPUT:
            return self.neg_W
        return self.eta


class Optimum(NamedTuple):
    alpha: float
    phi: float
    value: float


class SymmetryDefect(NamedTuple):
    work: float
    efficiency: float


@dataclass(frozen=True)
class SweepResult:
    params: CycleParams
    grid: SweepGrid
    rows: tuple[SweepRow, ...]
    optima: dict[str, Optimum | None]
    symmetry_residual: SymmetryDefect | None

    def row(self, j: int, k: int) -> SweepRow:
        return self.rows[j * self.grid.phi_steps + k]


class SweepPointError(EngineError):
    """A grid point failed; the message names the point."""


def _evaluate(args) -> SweepRow:
    params, j, k, alpha, phi = args
    try:
        return SweepRow.from_record(run_cycle(params.with_basis(alpha, phi)))
    except EngineError as exc:
        raise SweepPointError(f"grid point ({j}, {k}) alpha={alpha!r} phi={phi!r}: {exc}") from exc


def evaluate_points(tasks: list, workers: int = 1) -> list[SweepRow]:
    """Evaluate ``(params, j, k, alpha, phi)`` tasks, preserving order."""
    if workers <= 1:
        return [_evaluate(t) for t in tasks]
    chunk = max(1, len(tasks) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, tasks, chunksize=chunk))


def sweep(params: CycleParams, grid: SweepGrid, workers: int = 1) -> SweepResult:
    """Run the cycle at every grid point; the basis in ``params`` is ignored."""
    alphas, phis = grid.alphas(), grid.phis()
    tasks = [(params, j, k, a, p) for j, a in enumerate(alphas) for k, p in enumerate(phis)]
    rows = tuple(evaluate_points(tasks, workers))
    optima = {Objective.WORK_OUTPUT.value: _argmax(rows, Objective.WORK_OUTPUT)}
    optima[Objective.EFFICIENCY.value] = _argmax(rows, Objective.EFFICIENCY)
    result = SweepResult(params, grid, rows, optima, None)
    if grid.phi_steps % 2 == 0:
        result = SweepResult(params, grid, rows, optima, symmetry_check(result))
    return result


def _argmax(rows, objective: Objective) -> Optimum | None:
    best = None
    for row in rows:
        value = row.objective(objective)
        if objective is Objective.EFFICIENCY and row.regime != Regime.ENGINE.value:
            continue
        # strict comparison: ties go to the earliest row
        if value is not None and (best is None or value > best.value):
            best = Optimum(row.alpha, row.phi, value)
    return best


def find_optimum(result: SweepResult, objective: Objective | str) -> Optimum:
    """Grid argmax of ``-W`` (all rows) or ``eta`` (engine rows only)."""
    objective = Objective(objective)
    best = _argmax(result.rows, objective)
    if best is None:
        raise NoEngineRegimeError("no grid point runs as an engine; efficiency is undefined")
    return best


def symmetry_check(result: SweepResult) -> SymmetryDefect:
    """Largest defect of ``f(alpha, phi) = f(pi - alpha, phi + pi)`` for ``-W`` and ``eta``."""
    grid = result.grid
    if grid.phi_steps % 2:
        raise GridNotClosedError(f"phi_steps={grid.phi_steps} is odd; phi + pi is not a grid point")
    na, nphi = grid.alpha_steps, grid.phi_steps
    half = nphi // 2
    work = eff = 0.0
    for j in range(na):
        for k in range(nphi):
            a = result.row(j, k)
            b = result.row(na - 1 - j, (k + half) % nphi)
            work = max(work, abs(a.neg_W - b.neg_W))
            if a.eta is not None and b.eta is not None:
                eff = max(eff, abs(a.eta - b.eta))
    return SymmetryDefect(work, eff)


def objective_function(params: CycleParams, objective: Objective | str) -> Callable[[float, float], float]:
    """``(alpha, phi) -> -W`` or ``eta``; ``-inf`` where ``eta`` is undefined."""
    objective = Objective(objective)

    def f(alpha: float, phi: float) -> float:
        rec = run_cycle(params.with_basis(alpha, phi))
        if objective is Objective.WORK_OUTPUT:
            return -rec.w_net
        return -math.inf if rec.efficiency is None else rec.efficiency

    return f


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def refine(
    params: CycleParams,
    objective: Objective | str,
    seed: tuple[float, float],
    span: float = math.pi / 180,
    tol: float = 1e-6,
    max_rounds: int = 100,
) -> Optimum:
    """Alternating golden-section ascent in alpha then phi.

    The search stays inside ``seed +/- span`` in each angle (alpha also
    clipped to [0, pi]) and only accepts moves that do not lower the
    objective, so the result is never worse than the seed.
    """
    objective = Objective(objective)
    f = objective_function(params, objective)
    alpha, phi = float(seed[0]), float(seed[1])
    if not 0.0 <= alpha <= math.pi:
        raise InvalidInputError(f"seed alpha {alpha!r} outside [0, pi]")
    best = f(alpha, phi)
    if objective is Objective.EFFICIENCY and best == -math.inf:
        raise NoEngineRegimeError(f"seed ({alpha}, {phi}) is not in the engine regime")
    a_lo, a_hi = max(0.0, alpha - span), min(math.pi, alpha + span)
    p_lo, p_hi = phi - span, phi + span
    for _ in range(max_rounds):
        a_new, v = golden_section_max(lambda a: f(a, phi), a_lo, a_hi, tol)
        moved_a = 0.0
        if v >= best:
            moved_a, alpha, best = abs(a_new - alpha), a_new, v
        p_new, v = golden_section_max(lambda p: f(alpha, p), p_lo, p_hi, tol)
        moved_p = 0.0
        if v >= best:
            moved_p, phi, best = abs(p_new - phi), p_new, v
        if moved_a < tol and moved_p < tol:
            break
    return Optimum(alpha, wrap_phi(phi), best)


@dataclass(frozen=True)
class SliceResult:
    params: CycleParams
    vary: str
    fixed: float
    steps: int
    rows: tuple[SweepRow, ...]
    maxima: dict[str, Optimum | None]


def slice_curve(params: CycleParams, vary: str, fixed: float | None = None, steps: int | None = None,
                workers: int = 1) -> SliceResult:
    """One-dimensional cut through the landscape.

    ``vary="alpha"`` holds phi fixed (default 2.04) and samples alpha on
    [0, pi]; ``vary="phi"`` holds alpha fixed (default 1.15) and samples phi
    on [0, 2 pi). The maxima are local to the cut.
    """
    if vary == "alpha":
        fixed = PHI_ETA if fixed is None else fixed
        steps = 181 if steps is None else steps
        grid = SweepGrid(steps, 2)
        points = [(a, fixed) for a in grid.alphas()]
    elif vary == "phi":
        fixed = ALPHA_ETA if fixed is None else fixed
        steps = 360 if steps is None else steps
        grid = SweepGrid(2, steps)
        points = [(fixed, p) for p in grid.phis()]
    else:
        raise InvalidInputError(f"vary must be 'alpha' or 'phi', got {vary!r}")
    tasks = [(params, i, 0, a, p) if vary == "alpha" else (params, 0, i, a, p)
             for i, (a, p) in enumerate(points)]
    rows = tuple(evaluate_points(tasks, workers))
    maxima = {o.value: _argmax(rows, o) for o in Objective}
    return SliceResult(params, vary, float(fixed), steps, rows, maxima)
