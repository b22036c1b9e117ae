"""Command-line experiment runner.

    nesstat presets
    nesstat run --preset fig1a --scale desk --out-dir out/fig1a
    nesstat run --config my_experiment.json --out-dir out/custom

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 degenerate zero eigenvalue (symmetry not fully broken).
"""

import argparse
import json
import sys

from pathlib import Path

from .exceptions import ConfigError, ConvergenceError, DegeneracyError, NesstatError
from .experiments import ExperimentConfig, list_presets, preset_configs, run_experiment


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nesstat",
        description="Level-spacing statistics of steady states and decay modes "
                    "of boundary-driven spin chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("presets", help="list figure presets and their parameters")

    run = sub.add_parser("run", help="run one experiment (preset or config file)")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="preset name, e.g. fig1a")
    src.add_argument("--config", help="path to an experiment JSON file")
    run.add_argument("--scale", choices=("paper", "desk"), default="desk",
                     help="preset size variant (default: desk)")
    run.add_argument("--out-dir", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--tol", type=float, default=None)
    run.add_argument("--max-iter", type=int, default=None)
    return parser


def _cmd_presets():
    for name, entry in list_presets().items():
        params = ", ".join(f"{k}={v}" for k, v in entry["params"].items())
        print(f"{name}: {entry['comment']}")
        print(f"    params: {params}")
        print(f"    paper scale: {entry['paper']}   desk scale: {entry['desk']}")
        if "sweep_deltas" in entry:
            print(f"    delta sweep: {entry['sweep_deltas']}")
    return 0


def _cmd_run(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.max_iter is not None:
        overrides["max_iter"] = args.max_iter

    if args.preset:
        configs = preset_configs(args.preset, scale=args.scale, **overrides)
    else:
        with open(args.config) as fh:
            data = json.load(fh)
        data.update(overrides)
        configs = [ExperimentConfig.from_dict(data)]

    out_root = Path(args.out_dir)
    multi = len(configs) > 1
    sweep_rows = []
    for config in configs:
        out_dir = out_root / config.name if multi else out_root
        bundle = run_experiment(config, out_dir=out_dir)
        for op in bundle.operators:
            ks = ", ".join(f"{e}={v:.4f}" for e, v in op.ks.items())
            print(f"{op.operator_id}: {op.classification}  (KS: {ks}; "
                  f"{len(op.sample.spacings)} spacings)")
            sweep_rows.append(dict(operator_id=op.operator_id, delta=config.delta,
                                   ks=op.ks, classification=op.classification))
    if multi:
        with open(out_root / "sweep_summary.json", "w") as fh:
            json.dump(sweep_rows, fh, indent=2)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            return _cmd_presets()
        return _cmd_run(args)
    except (ConfigError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ConvergenceError as err:
        print(f"solver did not converge: {err}", file=sys.stderr)
        return 3
    except DegeneracyError as err:
        print(f"degeneracy detected: {err}", file=sys.stderr)
        return 4
    except NesstatError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
