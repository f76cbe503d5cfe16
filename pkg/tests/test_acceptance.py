"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the terminal summary
(section "acceptance criteria"), whether or not ``-s`` is given.
"""

import math
import re
import time
from pathlib import Path

import numpy as np
import pytest

from spin_engine import report
from spin_engine.cycle import CycleParams, Regime, run_cycle
from spin_engine.drive import DriveProtocol, Stroke, propagator_exact, propagator_sliced
from spin_engine.explore import Objective, SweepGrid, refine, sweep
from spin_engine.output import emit, read_csv
from spin_engine.thermo import (
    ThermalContext,
    divergence,
    gibbs_state,
    noneq_free_energy,
    partition_and_free_energy,
    thermal_divergence,
)
from spin_engine.verify import convergence_order, random_cycle_params, random_density, random_hamiltonian

from .conftest import ACCEPTANCE_LINES

REPO = Path(__file__).resolve().parents[1]


def record(n, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def cycle_sample():
    rng = np.random.default_rng(1)
    params = [random_cycle_params(rng) for _ in range(10_000)]
    t0 = time.perf_counter()
    records = [run_cycle(p) for p in params]
    return records, time.perf_counter() - t0


def test_criterion_1_first_law(cycle_sample):
    records, elapsed = cycle_sample
    worst = max(r.first_law_residual for r in records)
    record(1, "first law", worst < 1e-12 and elapsed < 5.0,
           f"{len(records)} cycles, max |W+Q_M+Q_T| {worst:.2e} (< 1e-12), {elapsed:.2f} s (< 5 s)")


def test_criterion_2_two_routes(cycle_sample):
    records, _ = cycle_sample
    worst = {k: 0.0 for k in ("w_stroke_I", "q_measure", "w_stroke_III", "q_thermal", "w_net", "efficiency")}
    engines = 0
    for r in records:
        for name, gap in r.route_gaps().items():
            if name in worst:
                worst[name] = max(worst[name], gap)
        engines += r.regime is Regime.ENGINE
    eta = worst.pop("efficiency")
    scalar = max(worst.values())
    record(2, "two-route equality", scalar < 1e-11 and eta < 1e-9 and engines > 0,
           f"max scalar gap {scalar:.2e} (< 1e-11), eta gap {eta:.2e} (< 1e-9) over {engines} engine cycles")


def test_criterion_3_divergence_identities():
    rng = np.random.default_rng(3)
    route = gap = 0.0
    klein = math.inf
    for _ in range(1000):
        rho, h = random_density(rng), random_hamiltonian(rng)
        ctx = ThermalContext(float(10 ** rng.uniform(-1, 1)))
        d1 = divergence(rho, gibbs_state(h, ctx))
        d2 = thermal_divergence(rho, h, ctx)
        f_eq = partition_and_free_energy(h, ctx)[1]
        route = max(route, abs(d1 - d2))
        gap = max(gap, abs(d2 - ctx.beta_hw * (noneq_free_energy(rho, h, ctx) - f_eq)))
        klein = min(klein, d1, d2)
    record(3, "divergence identities", route < 1e-11 and gap < 1e-12 and klein >= -1e-12,
           f"route gap {route:.2e} (< 1e-11), free-energy gap {gap:.2e} (< 1e-12), min D {klein:.2e} (>= -1e-12)")


def test_criterion_4_isentropy_and_ordering(cycle_sample):
    records, _ = cycle_sample
    iso = max(max(abs(r.sf[1].entropy - r.sf[0].entropy), abs(r.sf[3].entropy - r.sf[2].entropy)) for r in records)
    ds_min = min(r.ds_measure for r in records)
    d1 = max(abs(r.sf[0].divergence) for r in records)
    record(4, "isentropy and entropy ordering", iso < 1e-12 and ds_min >= -1e-12 and d1 < 1e-12,
           f"max |dS| on drive strokes {iso:.2e}, min dS_M {ds_min:.2e}, max |D1| {d1:.2e}")


def test_criterion_5_propagator_oracle():
    t0 = time.perf_counter()
    orders, gaps = [], []
    for wt in (1e-2, 1.0, 10.0):
        for branch in Stroke:
            orders.append(convergence_order(wt, range(4, 13), branch))
            proto = DriveProtocol(wt, branch)
            gaps.append(float(np.max(np.abs(propagator_sliced(proto, 2**16).matrix - propagator_exact(proto).matrix))))
    elapsed = time.perf_counter() - t0
    ok = all(abs(o - 2.0) <= 0.1 for o in orders) and max(gaps) < 1e-9 and elapsed < 10.0
    record(5, "propagator oracle", ok,
           f"orders {min(orders):.3f}..{max(orders):.3f} (2.0 +/- 0.1), N=2^16 gap {max(gaps):.2e} (< 1e-9), "
           f"{elapsed:.2f} s (< 10 s)")


def test_criterion_6_commuting_null():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        p = CycleParams(float(10 ** rng.uniform(-3, 1)), float(10 ** rng.uniform(-1, 1)))
        worst = max(worst, abs(run_cycle(p.with_basis(math.pi / 2, 0.0)).q_measure))
    record(6, "commuting-measurement null", worst < 1e-12, f"max |Q_M| {worst:.2e} (< 1e-12)")


def test_criterion_7_landscape_symmetry():
    defect = sweep(CycleParams(), SweepGrid(91, 180)).symmetry_residual
    record(7, "landscape symmetry", defect.work < 1e-10 and defect.efficiency < 1e-10,
           f"-W defect {defect.work:.2e}, eta defect {defect.efficiency:.2e} (< 1e-10)")


@pytest.fixture(scope="module")
def default_optima():
    t0 = time.perf_counter()
    cell = report.locate(6.381e-3, 1.0)
    return cell, time.perf_counter() - t0


@pytest.mark.xfail(strict=True, reason="landscape optima at the stated assumptions differ from the reported angles; "
                                       "see REPRODUCTION.md")
def test_criterion_8_optima_reproduced(default_optima):
    cell, elapsed = default_optima
    misses = cell.misses()
    w, e = cell.refined[Objective.WORK_OUTPUT], cell.refined[Objective.EFFICIENCY]
    record("8a", "optima at stated assumptions", cell.reproduced and elapsed < 30.0,
           f"-W max ({w.alpha:.3f}, {w.phi:.3f}) offset {misses[Objective.WORK_OUTPUT]:.3f}, "
           f"eta max ({e.alpha:.3f}, {e.phi:.3f}) offset {misses[Objective.EFFICIENCY]:.3f} "
           f"(tolerance {report.ANGLE_TOL}), {elapsed:.1f} s (< 30 s)")


def test_criterion_8_sweep_runtime(default_optima):
    cell, elapsed = default_optima
    record("8b", "181x360 sweep + refine runtime", elapsed < 30.0, f"{elapsed:.1f} s (< 30 s)")


def test_criterion_8_diagnostic_recorded():
    cells = report.diagnostic()
    best = min(cells, key=lambda c: c.score)
    text = (REPO / "REPRODUCTION.md").read_text()
    m = re.search(r"Best-matching cell: beta_hw = (\S+), omega_tau = (\S+) ", text)
    ok = (
        len(cells) == 9
        and m is not None
        and (float(m.group(1)), float(m.group(2))) == (best.beta_hw, best.omega_tau)
    )
    record("8c", "diagnostic sweep recorded in REPRODUCTION.md", ok,
           f"best cell beta_hw={best.beta_hw}, omega_tau={best.omega_tau}, worst offset {best.score:.3f} rad")


def test_criterion_9_output_round_trip(tmp_path):
    params = CycleParams()
    grid = SweepGrid(19, 36)
    paths = [tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"]
    emit(sweep(params, grid, workers=1), "csv", paths[0])
    emit(sweep(params, grid, workers=1), "csv", paths[1])
    emit(sweep(params, grid, workers=3), "csv", paths[2])
    blobs = [p.read_bytes() for p in paths]
    jsons = []
    for workers in (1, 3):
        emit(sweep(params, grid, workers=workers), "json", tmp_path / f"w{workers}.json")
        jsons.append((tmp_path / f"w{workers}.json").read_bytes())
    _, rows = read_csv(paths[0])
    worst = max(abs(float(r["Q_M"]) + float(r["Q_T"]) - float(r["neg_W"])) for r in rows)
    identical = blobs[0] == blobs[1] == blobs[2] and jsons[0] == jsons[1]
    record(9, "output round-trip and determinism", worst < 1e-11 and identical and len(rows) == len(grid),
           f"{len(rows)} rows, max re-derived first-law residual {worst:.2e} (< 1e-11), "
           f"byte-identical across runs and 1 vs 3 workers: {identical}")
