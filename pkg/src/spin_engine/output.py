"""CSV and JSON serialization of cycle records, sweeps and slices.

Floats are written with ``repr`` so they round-trip exactly. No timestamps
or host details go into the metadata, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import IO

from . import __version__
from .cycle import CycleParams, CycleRecord
from .explore import SliceResult, SweepResult, SweepRow

CSV_COLUMNS = ("alpha", "phi", "neg_W", "Q_M", "Q_T", "eta", "D2", "D3", "D4", "F3", "F4", "dS_M", "regime")
UNITS = "energies in units of hbar*omega; entropies and divergences in nats"


class OutputError(OSError):
    """Writing a result failed; the message names the destination."""


def _metadata(params: CycleParams, **extra) -> dict:
    meta = {
        "tool": "spin-engine",
        "version": __version__,
        "omega_tau": params.omega_tau,
        "beta_hw": params.beta_hw,
        "method": str(params.method),
    }
    meta.update(extra)
    meta["units"] = UNITS
    return meta


def _optimum_dict(opt) -> dict | None:
    return None if opt is None else opt._asdict()


def _matrix(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m.tolist()]


def record_to_dict(rec: CycleRecord) -> dict:
    p = rec.params
    return {
        "metadata": _metadata(p, alpha=p.basis.alpha, phi=p.basis.phi),
        "rho": [_matrix(m) for m in rec.rho],
        "sf": [s.__dict__.copy() for s in rec.sf],
        "w_stroke_I": rec.w_stroke_I,
        "q_measure": rec.q_measure,
        "w_stroke_III": rec.w_stroke_III,
        "q_thermal": rec.q_thermal,
        "w_net": rec.w_net,
        "ds_measure": rec.ds_measure,
        "ds_thermal": rec.ds_thermal,
        "efficiency": rec.efficiency,
        "regime": rec.regime.value,
        "routes": {k: list(v) for k, v in rec.routes.items()},
    }


def sweep_to_dict(result: SweepResult) -> dict:
    sym = result.symmetry_residual
    return {
        "metadata": _metadata(
            result.params, alpha_steps=result.grid.alpha_steps, phi_steps=result.grid.phi_steps
        ),
        "grid": {"alpha_steps": result.grid.alpha_steps, "phi_steps": result.grid.phi_steps},
        "rows": [row._asdict() for row in result.rows],
        "optima": {k: _optimum_dict(v) for k, v in result.optima.items()},
        "symmetry_residual": None if sym is None else sym._asdict(),
    }


def slice_to_dict(result: SliceResult) -> dict:
    fixed_name = "phi" if result.vary == "alpha" else "alpha"
    return {
        "metadata": _metadata(result.params, vary=result.vary, steps=result.steps, **{fixed_name: result.fixed}),
        "rows": [row._asdict() for row in result.rows],
        "maxima": {k: _optimum_dict(v) for k, v in result.maxima.items()},
    }


def to_dict(obj) -> dict:
    if isinstance(obj, CycleRecord):
        return record_to_dict(obj)
    if isinstance(obj, SweepResult):
        return sweep_to_dict(obj)
    if isinstance(obj, SliceResult):
        return slice_to_dict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rows_of(obj) -> tuple[SweepRow, ...]:
    if isinstance(obj, CycleRecord):
        return (SweepRow.from_record(obj),)
    return obj.rows


def render_csv(obj) -> str:
    meta = to_dict(obj)["metadata"]
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in _rows_of(obj):
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(to_dict(obj), indent=2) + "\n"


def emit(obj, fmt: str = "csv", destination: str | Path | IO[str] | None = None) -> None:
    """Write ``obj`` as ``csv`` or ``json`` to a path, an open file, or stdout."""
    if fmt == "csv":
        text = render_csv(obj)
    elif fmt == "json":
        text = render_json(obj)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if destination is None:
        sys.stdout.write(text)
        return
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = Path(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_csv(path: str | Path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Parse an emitted CSV into ``(metadata, rows)``; values stay strings."""
    meta, body = {}, []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                meta[key] = value
            else:
                body.append(line)
    return meta, list(csv.DictReader(body))
