"""Command-line experiment runner.

Examples
--------
Default run on the synthetic wind preset::

    trinion-lms --synthetic --out results/

Recorded anemometer data with perturbation trials::

    trinion-lms --input wind.csv --columns time,east,north,up --noise-var 0.01 --out results/

Exact rerun::

    trinion-lms --manifest results/manifest.json --out rerun/
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench import format_table, reports_to_csv, time_filters
from .data import ColumnMap, SyntheticSpec
from .errors import ConfigError, DataError, DivergenceError, TrinionError
from .experiment import (
    ALL_ALGOS, WIND_PRESET, ExperimentConfig, emit_outputs, load_manifest, run_experiment,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4


def _algos(values):
    out = []
    for v in values or []:
        out.extend(a.strip() for a in v.split(",") if a.strip())
    return out


def _synthetic(text: str) -> SyntheticSpec:
    if text in ("wind", "default"):
        return WIND_PRESET
    p = Path(text)
    raw = p.read_text(encoding="utf-8") if p.is_file() else text
    try:
        d = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--synthetic expects 'wind', a JSON object or a JSON file: {exc}") from None
    return SyntheticSpec.from_dict({**WIND_PRESET.to_dict(), **d})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trinion-lms",
        description="Trinion/quaternion LMS wind prediction experiments.",
    )
    ap.add_argument("--algo", action="append", metavar="NAME",
                    help=f"algorithm(s), repeatable or comma separated (default: all of {','.join(ALL_ALGOS)})")
    ap.add_argument("--len", dest="L", type=int, default=8, help="filter length L (default 8)")
    ap.add_argument("--pstep", dest="P", type=int, default=1, help="prediction step P (default 1)")
    ap.add_argument("--mu", type=float, default=6e-5, help="step size (default 6e-5)")
    ap.add_argument("--trials", type=int, default=200, help="number of trials (default 200)")
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="CSV", help="recorded series as CSV")
    src.add_argument("--synthetic", nargs="?", const="wind", metavar="SPEC",
                     help="synthetic source: 'wind' preset (default), JSON object or JSON file")
    ap.add_argument("--columns", default="t,u,v,w",
                    help="CSV header names for time,u,v,w (default t,u,v,w)")
    ap.add_argument("--noise-var", type=float, default=0.0,
                    help="measurement-noise variance per trial for recorded input (default 0)")
    ap.add_argument("--samples", type=int, help="override synthetic series length")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--smooth", type=int, default=20, help="moving-average window for curves (default 20)")
    ap.add_argument("--bench-iters", type=int, default=100, help="updates per op-count audit")
    ap.add_argument("--manifest", help="rerun the configuration stored in a manifest.json")
    ap.add_argument("--timing", action="store_true",
                    help="also time the filters and write timing.csv (not reproducible)")
    ap.add_argument("--repeats", type=int, default=5, help="timing repeats (default 5)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def config_from_args(args) -> ExperimentConfig:
    if args.manifest:
        cfg = load_manifest(args.manifest)
        if args.out:
            cfg.out = args.out
        return cfg
    if args.input is None and args.synthetic is None:
        raise ConfigError("a data source is required: --input CSV or --synthetic")
    names = [c.strip() for c in args.columns.split(",")]
    if len(names) != 4:
        raise ConfigError("--columns needs four comma-separated names")
    synth = _synthetic(args.synthetic) if args.synthetic is not None else None
    if synth is not None and args.samples is not None:
        synth = SyntheticSpec.from_dict({**synth.to_dict(), "length": args.samples})
    return ExperimentConfig(
        algos=tuple(_algos(args.algo)) if args.algo else ALL_ALGOS,
        L=args.L, P=args.P, mu=args.mu, trials=args.trials,
        input=args.input, columns=ColumnMap(*names), synthetic=synth,
        noise_var=args.noise_var, seed=args.seed, smooth=args.smooth,
        out=args.out, bench_iters=args.bench_iters,
    )


def _summary(result) -> str:
    lines = [f"{'algo':<6} {'trials':>6} {'diverged':>8} {'initial dB':>10} {'final dB':>9}"]
    for name, c in result.curves.items():
        tail = max(1, len(c) // 10)
        init = 10 * np.log10(c.mse[0]) if c.mse[0] > 0 else float("-inf")
        final = 10 * np.log10(np.mean(c.mse[-tail:]))
        lines.append(f"{name:<6} {c.trials_used:>6} {c.diverged:>8} {init:>10.2f} {final:>9.2f}")
    return "\n".join(lines)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if not cfg.out:
            raise ConfigError("--out is required")
        result = run_experiment(cfg)
        emit_outputs(result, cfg.out)
        print(_summary(result))
        print()
        print(format_table(result.bench))
        if args.timing:
            reports = time_filters(cfg.algos, cfg.L, repeats=args.repeats)
            (Path(cfg.out) / "timing.csv").write_text(reports_to_csv(reports), encoding="utf-8")
            print()
            print(format_table(reports))
    except ConfigError as exc:
        print(f"trinion-lms: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"trinion-lms: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        print(f"trinion-lms: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except TrinionError as exc:
        print(f"trinion-lms: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
