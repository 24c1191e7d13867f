"""Command-line entry point: ``qflow run`` and ``qflow sweep``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .exceptions import QflowError
from .experiment import RunConfig, parse_config_text, run_experiment, sweep

# flag name -> RunConfig field
_FLAGS = {
    "grid_points": "grid_points",
    "precision": "precision",
    "radix_pos": "radix_position",
    "steps": "n_steps",
    "reads": "num_reads",
    "sampler": "sampler",
    "strategy": "strategy",
    "seed": "seed",
    "alpha": "alpha",
    "density": "density",
    "viscosity": "viscosity",
    "dpdx": "pressure_gradient",
    "height": "height",
    "feed": "feed",
    "sweeps": "sweeps",
    "t0": "t0",
    "t1": "t1",
    "dump_limit": "dump_limit",
}


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value file; flags override its values")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--precision", type=int, help="bits per unknown (default 4)")
    p.add_argument("--radix-pos", type=int, help="radix position j0 (default 1)")
    p.add_argument("--steps", type=int, help="time steps (default 10)")
    p.add_argument("--reads", type=int, help="annealing reads per step (default 10000)")
    p.add_argument("--sampler", choices=["exhaustive", "annealing"], help="default annealing")
    p.add_argument("--strategy", help="lowest, mean, wmean, a comma list, or all (default)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--alpha", type=float, help="diffusion number nu*dt/dy^2 (default 0.4)")
    p.add_argument("--density", type=float, help="default 0.5")
    p.add_argument("--viscosity", type=float, help="dynamic viscosity (default 0.6)")
    p.add_argument("--dpdx", type=float, help="pressure gradient (default -2)")
    p.add_argument("--height", type=float, help="channel height (default 1)")
    p.add_argument("--feed", choices=["quantum", "classical"], help="profile feeding the next step")
    p.add_argument("--sweeps", type=int, help="annealing sweeps per read (default 1000)")
    p.add_argument("--t0", type=float, help="initial annealing temperature")
    p.add_argument("--t1", type=float, help="final annealing temperature")
    p.add_argument("--dump-limit", type=int, help="rows kept per sample dump (default 10000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflow",
        description="Channel flow time stepping with each implicit step solved as a QUBO.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="one (grid, precision) experiment")
    run.add_argument("--grid-points", type=int, help="grid points including walls (default 5)")
    _add_common(run)
    sw = sub.add_parser("sweep", help="experiments over grid and precision lists")
    sw.add_argument("--grid-list", type=_int_list, default=[5, 7, 9], help="comma list (default 5,7,9)")
    sw.add_argument("--precision-list", type=_int_list, default=[2, 4, 8], help="comma list (default 2,4,8)")
    sw.add_argument("--budget", type=int, default=54, help="largest embeddable size (default 54)")
    _add_common(sw)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        values = parse_config_text(args.config.read_text())
        cfg = RunConfig.from_mapping(values, cfg)
    changes = {}
    for flag, name in _FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    return cfg.replace(**changes) if changes else cfg


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    # bare flags mean "run"
    if argv and argv[0].startswith("-") and argv[0] not in ("-h", "--help"):
        argv = ["run"] + argv
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            base = config_from_args(args)
            out = args.out or Path("qflow-sweep")
            entries = sweep(base, args.grid_list, args.precision_list, out, budget=args.budget)
            for e in entries:
                tail = f" ({e.reason})" if e.reason else ""
                print(f"Ngp={e.grid_points} n={e.precision} size={e.size}: {e.status}{tail}")
            print(f"wrote {out}")
        else:
            cfg = config_from_args(args)
            out = args.out or Path("qflow-run")
            result = run_experiment(cfg, out)
            for series in result.errors:
                if len(series):
                    print(f"{series.strategy.value:>6}: final l2={series.l2[-1]:.6g} linf={series.linf[-1]:.6g}")
            for note in result.notes:
                print(f"note: {note}")
            print(f"wrote {out}")
    except (QflowError, ValueError) as exc:
        print(f"qflow: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
