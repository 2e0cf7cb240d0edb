"""Command-line entry point: ``fuzzyblend <command> ...``.

Exit codes: 0 success, 2 configuration error, 3 simulation divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import ConfigError, ScenarioConfig, load_config
from .estimator import WindObserver
from .sim import ScenarioDiverged, build_aero, build_controllers, run_scenario
from .timeseries import LogParseError, MetricsError, compute_metrics, read_csv, write_csv, write_long_csv
from .turbine import TurbineParams

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3

PLOT_SCRIPT = '''\
"""Plot a long-format fuzzyblend log: python plot_run.py run.long.csv"""
import sys

import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv(sys.argv[1])
panels = [["v", "v_hat"], ["omega_r", "omega_ref_f"], ["beta", "beta_ref_tilde"],
          ["T_g_tilde"], ["P_g"], ["x_T"], ["f1", "f2"]]
fig, axes = plt.subplots(len(panels), 1, sharex=True, figsize=(8, 2 * len(panels)))
for ax, names in zip(axes, panels):
    for name in names:
        sel = df[df.variable == name]
        ax.plot(sel.t, sel.value, label=name)
    ax.legend(loc="upper right")
axes[-1].set_xlabel("t [s]")
fig.tight_layout()
plt.show()
'''


def _output_stem(cfg: ScenarioConfig, config_path: Path) -> str:
    return Path(cfg.output).stem if cfg.output else config_path.stem


def simulate_one(config_path: Path, out_dir: Path, long_format: bool = False) -> dict:
    cfg = load_config(config_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = _output_stem(cfg, config_path)
    log = run_scenario(cfg)
    write_csv(log, out_dir / f"{stem}.csv")
    if long_format:
        write_long_csv(log, out_dir / f"{stem}.long.csv")
    metrics = compute_metrics(log, cfg.turbine).to_dict()
    (out_dir / f"{stem}.metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    return metrics


def _batch_worker(args) -> tuple[str, int, str]:
    path, out_dir, long_format = args
    try:
        simulate_one(Path(path), Path(out_dir), long_format)
        return path, EXIT_OK, "ok"
    except ConfigError as exc:
        return path, EXIT_CONFIG, str(exc)
    except ScenarioDiverged as exc:
        return path, EXIT_DIVERGED, str(exc)


def cmd_simulate(args) -> int:
    metrics = simulate_one(Path(args.config), Path(args.out), args.long)
    print(json.dumps(metrics, indent=2))
    return EXIT_OK


def cmd_batch(args) -> int:
    configs = sorted(str(p) for p in Path(args.dir).glob("*.y*ml"))
    if not configs:
        raise ConfigError(f"no .yaml/.yml configs in {args.dir}")
    out_dir = args.out or str(Path(args.dir) / "results")
    jobs = [(c, out_dir, args.long) for c in configs]
    if args.jobs == 1:
        results = [_batch_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_worker, jobs))
    for path, code, message in results:
        print(f"{path}: {message}")
    return max(code for _, code, _ in results)


def _params_for(args) -> TurbineParams:
    return load_config(args.config).turbine if args.config else TurbineParams()


def cmd_metrics(args) -> int:
    log = read_csv(args.log)
    print(json.dumps(compute_metrics(log, _params_for(args)).to_dict(), indent=2))
    return EXIT_OK


def cmd_dump_controller(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        from .wind import Constant
        cfg = ScenarioConfig(wind=Constant(8.0), duration=1.0)
    build_controllers(cfg, build_aero(cfg)).dump(args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    try:
        aero = build_aero(cfg)
        WindObserver(cfg.turbine, aero, cfg.observer.pole, cfg.observer.tau_v, dt=cfg.dt)
        if cfg.controller != "baseline_kappa":
            build_controllers(cfg, aero)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from None
    print(f"{args.config}: ok ({cfg.controller}, {cfg.n_steps} steps)")
    return EXIT_OK


def cmd_plot_script(args) -> int:
    sys.stdout.write(PLOT_SCRIPT)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzyblend", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--long", action="store_true", help="also write long-format CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("batch", help="run every config in a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", help="output directory (default: <dir>/results)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--long", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("metrics", help="summary metrics of a logged run")
    p.add_argument("--log", required=True)
    p.add_argument("--config", help="scenario config supplying turbine parameters")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("dump-controller", help="write synthesized gains to a YAML file")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_dump_controller)

    p = sub.add_parser("validate", help="check a config without simulating")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plot-script", help="print a matplotlib script for long-format logs")
    p.set_defaults(func=cmd_plot_script)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, LogParseError, MetricsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
