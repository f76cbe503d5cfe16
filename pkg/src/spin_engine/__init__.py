"""Single-spin quantum measurement engine with thermal-divergence bookkeeping."""

__version__ = "0.1.0"

from .cycle import CycleParams, CycleRecord, Regime, run_cycle
from .drive import DEFAULT_OMEGA_TAU, EXACT, DriveProtocol, PropagatorMethod, Stroke
from .explore import Objective, SweepGrid, find_optimum, refine, slice_curve, sweep, symmetry_check
from .probe import MeasurementBasis
from .thermo import ThermalContext

__all__ = [
    "CycleParams",
    "CycleRecord",
    "DEFAULT_OMEGA_TAU",
    "DriveProtocol",
    "EXACT",
    "MeasurementBasis",
    "Objective",
    "PropagatorMethod",
    "Regime",
    "Stroke",
    "SweepGrid",
    "ThermalContext",
    "find_optimum",
    "refine",
    "run_cycle",
    "slice_curve",
    "sweep",
    "symmetry_check",
]
