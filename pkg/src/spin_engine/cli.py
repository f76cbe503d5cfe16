"""Command-line entry point: ``spin-engine {run,sweep,slice,verify}``.

Exit codes: 0 success, 1 invariant failure in verify mode, 2 invalid
configuration or flags, 3 output error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import MODES, RunConfig, config_from_dict, load_config
from .drive import PropagatorMethod
from .errors import ConfigError, EngineError
from .explore import Objective, SweepGrid, refine, slice_curve, sweep
from .output import OutputError, emit

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

COMMAND_MODES = {"run": "single", "sweep": "sweep", "verify": "verify"}


def _grid(text: str) -> tuple[int, int]:
    a, sep, p = text.lower().partition("x")
    try:
        return int(a), int(p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 181x360, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spin-engine",
        description="Four-stroke single-spin measurement engine: cycles, sweeps and invariant checks.",
    )
    parser.add_argument("command", nargs="?", choices=["run", "sweep", "slice", "verify"],
                        help="what to do; defaults to the mode named in --config")
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--omega-tau", type=float)
    parser.add_argument("--beta-hw", type=float)
    parser.add_argument("--alpha", type=float, help="colatitude (run) or fixed alpha (slice --vary phi)")
    parser.add_argument("--phi", type=float, help="longitude (run) or fixed phi (slice --vary alpha)")
    parser.add_argument("--grid", type=_grid, metavar="AxP", help="alpha_steps x phi_steps")
    parser.add_argument("--method", help="exact or sliced:N")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--vary", choices=["alpha", "phi"], help="free angle for slice")
    parser.add_argument("--refine", action="store_true", help="sweep: polish both grid optima")
    parser.add_argument("--workers", type=int, default=1, help="processes for sweeps")
    parser.add_argument("--samples", type=int, default=1000, help="verify: random draws per check")
    parser.add_argument("--seed", type=int, default=0, help="verify: RNG seed")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    raw: dict = {}
    for flag, key in (("omega_tau", "omega_tau"), ("beta_hw", "beta_hw"), ("alpha", "alpha"), ("phi", "phi")):
        value = getattr(args, flag)
        if value is not None:
            raw[key] = value
    if args.grid is not None:
        raw["grid"] = {"alpha_steps": args.grid[0], "phi_steps": args.grid[1]}
    cfg = config_from_dict(raw, cfg)
    updates: dict = {}
    if args.method is not None:
        try:
            updates["method"] = PropagatorMethod.parse(args.method)
        except EngineError as exc:
            raise ConfigError(str(exc)) from exc
    if args.out is not None:
        updates["output_path"] = args.out
    if args.format is not None:
        updates["output_format"] = args.format
    if args.command == "slice":
        if args.vary:
            updates["mode"] = f"slice_{args.vary}"
        elif not cfg.mode.startswith("slice_"):
            updates["mode"] = "slice_alpha"
    elif args.command is not None:
        updates["mode"] = COMMAND_MODES[args.command]
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    return replace(cfg, **updates).validate()


def _run_verify(samples: int, seed: int) -> int:
    from .verify import run_all

    results = run_all(samples=samples, seed=seed)
    for check in results:
        print(check.line())
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_INVARIANT if failed else EXIT_OK


def execute(cfg: RunConfig, workers: int = 1, refine_optima: bool = False) -> int:
    from .cycle import run_cycle

    params = cfg.cycle_params()
    if cfg.mode == "single":
        result = run_cycle(params)
    elif cfg.mode == "sweep":
        result = sweep(params, cfg.grid, workers=workers)
        for name, opt in result.optima.items():
            line = f"grid optimum {name}: {opt}"
            if refine_optima and opt is not None:
                line += f"; refined {refine(params, Objective(name), (opt.alpha, opt.phi))}"
            print(line, file=sys.stderr)
        print(f"symmetry residual: {result.symmetry_residual}", file=sys.stderr)
    else:
        vary = cfg.mode.removeprefix("slice_")
        fixed = cfg.phi if vary == "alpha" else cfg.alpha
        steps = cfg.grid.alpha_steps if vary == "alpha" else cfg.grid.phi_steps
        result = slice_curve(params, vary, fixed=fixed, steps=steps, workers=workers)
        for name, opt in result.maxima.items():
            print(f"slice maximum {name}: {opt}", file=sys.stderr)
    emit(result, cfg.resolved_format, cfg.output_path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.mode == "verify":
            return _run_verify(args.samples, args.seed)
        return execute(cfg, workers=args.workers, refine_optima=args.refine)
    except (ConfigError, EngineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
