"""Locate the landscape optima and compare them with target angles.

``python -m spin_engine.report --out REPRODUCTION.md`` runs the default
181x360 sweep with refinement, then a diagnostic grid over
``beta_hw in {0.5, 1, 2}`` and ``omega_tau in {6.381e-3, 0.1, 1}``, and
writes a markdown summary naming the best-matching cell.

Optima are folded into the half-domain ``0 <= phi <= pi`` using the exact
symmetry ``f(alpha, phi) = f(pi - alpha, phi + pi)``; offsets from the
targets are taken over both images, with phi compared modulo 2 pi.
"""

from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass

import numpy as np

from .cycle import CycleParams
from .drive import DEFAULT_OMEGA_TAU
from .errors import NoEngineRegimeError
from .explore import Objective, Optimum, SweepGrid, refine, sweep
from .probe import wrap_phi

TARGETS = {
    Objective.WORK_OUTPUT: (1.10, 1.77),
    Objective.EFFICIENCY: (1.15, 2.04),
}
ANGLE_TOL = 0.05
DIAGNOSTIC_BETAS = (0.5, 1.0, 2.0)
DIAGNOSTIC_OMEGA_TAUS = (DEFAULT_OMEGA_TAU, 0.1, 1.0)


def fold(opt: Optimum) -> Optimum:
    """Representative of ``opt`` with ``phi`` in [0, pi]."""
    if opt.phi <= math.pi:
        return opt
    return image(opt)


def image(opt: Optimum) -> Optimum:
    """The symmetric partner ``(pi - alpha, phi + pi)``, phi wrapped to [0, 2 pi)."""
    return Optimum(math.pi - opt.alpha, wrap_phi(opt.phi + math.pi), opt.value)


def _offset(opt: Optimum, ta: float, tp: float) -> float:
    dphi = abs(wrap_phi(opt.phi - tp + math.pi) - math.pi)
    return max(abs(opt.alpha - ta), dphi)


def miss(opt: Optimum | None, objective: Objective) -> float:
    """Largest angular offset from the target over both symmetric images, ``inf`` if there is no optimum."""
    if opt is None:
        return math.inf
    ta, tp = TARGETS[objective]
    return min(_offset(opt, ta, tp), _offset(image(opt), ta, tp))


@dataclass(frozen=True)
class CellReport:
    omega_tau: float
    beta_hw: float
    grid: SweepGrid
    optima: dict[Objective, Optimum | None]
    refined: dict[Objective, Optimum | None]

    def misses(self) -> dict[Objective, float]:
        return {o: miss(self.refined[o], o) for o in Objective}

    @property
    def score(self) -> float:
        return max(self.misses().values())

    @property
    def reproduced(self) -> bool:
        return self.score <= ANGLE_TOL


def locate(omega_tau: float, beta_hw: float, grid: SweepGrid = SweepGrid(), workers: int = 1) -> CellReport:
    """Sweep, take the grid argmax of each objective, refine it, and fold to ``phi <= pi``."""
    params = CycleParams(omega_tau=omega_tau, beta_hw=beta_hw)
    result = sweep(params, grid, workers=workers)
    span = max(math.pi / (grid.alpha_steps - 1), 2 * math.pi / grid.phi_steps)
    optima, refined = {}, {}
    for obj in Objective:
        grid_opt = result.optima[obj.value]
        optima[obj] = None if grid_opt is None else fold(grid_opt)
        if grid_opt is None:
            refined[obj] = None
            continue
        try:
            refined[obj] = fold(refine(params, obj, (grid_opt.alpha, grid_opt.phi), span=span))
        except NoEngineRegimeError:
            refined[obj] = None
    return CellReport(omega_tau, beta_hw, grid, optima, refined)


def diagnostic(grid: SweepGrid = SweepGrid(91, 180), workers: int = 1) -> list[CellReport]:
    return [locate(wt, b, grid, workers) for b in DIAGNOSTIC_BETAS for wt in DIAGNOSTIC_OMEGA_TAUS]


def wide_scan(omega_taus, betas, grid: SweepGrid = SweepGrid(46, 90)) -> list[CellReport]:
    """Coarse scan beyond the diagnostic cells; grid optima only, no refinement."""
    cells = []
    for b in betas:
        for wt in omega_taus:
            result = sweep(CycleParams(omega_tau=float(wt), beta_hw=float(b)), grid)
            opt = {o: None if result.optima[o.value] is None else fold(result.optima[o.value]) for o in Objective}
            cells.append(CellReport(float(wt), float(b), grid, opt, opt))
    return cells


def _fmt(opt: Optimum | None) -> str:
    if opt is None:
        return "none (no engine regime)"
    return f"({opt.alpha:.3f}, {opt.phi:.3f}) value {opt.value:.6g}"


def render(default: CellReport, cells: list[CellReport], wide: list[CellReport] | None = None) -> str:
    lines = ["# Landscape optima: reproduction report", ""]
    lines.append(
        "Targets (alpha, phi) in the half-domain 0 <= phi <= pi: "
        f"work output {TARGETS[Objective.WORK_OUTPUT]}, efficiency {TARGETS[Objective.EFFICIENCY]}; "
        f"tolerance +/-{ANGLE_TOL} rad per angle."
    )
    lines += ["", "## Stated assumptions", ""]
    lines.append(
        f"omega_tau = {default.omega_tau}, beta_hw = {default.beta_hw}, "
        f"grid {default.grid.alpha_steps}x{default.grid.phi_steps} + golden-section refinement."
    )
    lines.append("")
    for obj in Objective:
        lines.append(
            f"- {obj.value}: grid {_fmt(default.optima[obj])}; refined {_fmt(default.refined[obj])}; "
            f"offset {default.misses()[obj]:.3f} rad"
        )
    lines.append("")
    lines.append(f"Reproduced: {'yes' if default.reproduced else 'no'}")
    lines += ["", "## Diagnostic cells", ""]
    lines.append("| beta_hw | omega_tau | work-output optimum | efficiency optimum | worst offset |")
    lines.append("|---|---|---|---|---|")
    for c in cells:
        lines.append(
            f"| {c.beta_hw} | {c.omega_tau} | {_fmt(c.refined[Objective.WORK_OUTPUT])} | "
            f"{_fmt(c.refined[Objective.EFFICIENCY])} | {c.score:.3f} |"
        )
    best = min(cells, key=lambda c: c.score)
    lines += [
        "",
        f"Best-matching cell: beta_hw = {best.beta_hw}, omega_tau = {best.omega_tau} "
        f"(worst offset {best.score:.3f} rad; {'within' if best.reproduced else 'outside'} tolerance).",
    ]
    if wide:
        best_wide = min(wide, key=lambda c: c.score)
        lines += [
            "",
            "## Wide scan",
            "",
            f"{len(wide)} cells, omega_tau {min(c.omega_tau for c in wide):.3g}..{max(c.omega_tau for c in wide):.3g}, "
            f"beta_hw {min(c.beta_hw for c in wide):.3g}..{max(c.beta_hw for c in wide):.3g}, "
            f"grid {wide[0].grid.alpha_steps}x{wide[0].grid.phi_steps} (grid optima only).",
            f"Closest: beta_hw = {best_wide.beta_hw:.4g}, omega_tau = {best_wide.omega_tau:.4g}; "
            f"work output {_fmt(best_wide.optima[Objective.WORK_OUTPUT])}, "
            f"efficiency {_fmt(best_wide.optima[Objective.EFFICIENCY])}; worst offset {best_wide.score:.3f} rad.",
        ]
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m spin_engine.report", description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="REPRODUCTION.md")
    parser.add_argument("--wide", action="store_true", help="add a coarse scan over omega_tau and beta_hw")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    default = locate(DEFAULT_OMEGA_TAU, 1.0, workers=args.workers)
    cells = diagnostic(workers=args.workers)
    wide = None
    if args.wide:
        wide = wide_scan(np.geomspace(1e-3, 30, 30), (0.25, 0.5, 1.0, 2.0, 4.0, 8.0))
    text = render(default, cells, wide)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text)
    print(f"({time.perf_counter() - t0:.1f} s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
