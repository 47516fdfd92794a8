"""
Prediction experiments
======================

:func:`run_experiment` runs each requested predictor over many trials,
averages the squared-error learning curves pointwise, keeps the first
trial's prediction trace and audits operation counts. :func:`emit_outputs`
writes everything as CSV next to a ``manifest.json`` that reproduces the run.

Trials are independent synthetic realisations when the source is synthetic.
For a recorded series every trial sees the same data plus independent
Gaussian measurement noise of variance ``noise_var``; with the default
``noise_var = 0`` all trials would be identical, so a single trial is run
and a warning is issued.
"""

from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .bench import BenchReport, audit_op_counts, reports_to_csv
from .data import ColumnMap, SyntheticSpec, generate, load_csv
from .errors import ConfigError, DivergenceError
from .filters import Algo, FilterConfig, PredictionTrace, run_prediction

__all__ = [
    "ExperimentConfig", "LearningCurve", "ExperimentResult",
    "run_experiment", "emit_outputs", "load_manifest", "moving_average",
    "WIND_PRESET",
]

log = logging.getLogger(__name__)

#: Wind-like default: strongly persistent AR(1) per axis with correlated
#: innovations, about 19 dB of total power.
WIND_PRESET = SyntheticSpec(coefficients=0.98, noise_var=1.0, noise_corr=0.6, length=3000)

ALL_ALGOS = tuple(a.value for a in Algo)


@dataclass
class ExperimentConfig:
    algos: tuple = ALL_ALGOS
    L: int = 8
    P: int = 1
    mu: float = 6e-5
    trials: int = 200
    input: str | None = None
    columns: ColumnMap = field(default_factory=ColumnMap)
    synthetic: SyntheticSpec | None = None
    noise_var: float = 0.0
    seed: int = 0
    smooth: int = 20
    out: str | None = None
    bench_iters: int = 100

    def validate(self) -> None:
        if not self.algos:
            raise ConfigError("at least one algorithm is required")
        self.algos = tuple(Algo.parse(a).value for a in self.algos)
        if len(set(self.algos)) != len(self.algos):
            raise ConfigError("duplicate algorithm in algo set")
        FilterConfig(self.L, self.P, self.mu)
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be an integer >= 1, got {self.trials}")
        if (self.input is None) == (self.synthetic is None):
            raise ConfigError("exactly one data source (input CSV or synthetic spec) is required")
        if self.noise_var < 0:
            raise ConfigError("noise_var must be >= 0")
        if self.smooth < 1:
            raise ConfigError("smoothing window must be >= 1")
        if self.bench_iters < 1:
            raise ConfigError("bench_iters must be >= 1")

    @property
    def filter_config(self) -> FilterConfig:
        return FilterConfig(self.L, self.P, self.mu)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algos"] = list(self.algos)
        d["synthetic"] = self.synthetic.to_dict() if self.synthetic is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["algos"] = tuple(d.get("algos", ALL_ALGOS))
        if d.get("synthetic") is not None:
            d["synthetic"] = SyntheticSpec.from_dict(d["synthetic"])
        if isinstance(d.get("columns"), dict):
            d["columns"] = ColumnMap(**d["columns"])
        return cls(**d)


def moving_average(x: np.ndarray, window: int) -> np.ndarray:
    """Trailing moving average; the first ``window - 1`` points average what is available."""
    x = np.asarray(x, dtype=float)
    if window <= 1:
        return x.copy()
    c = np.cumsum(np.concatenate([[0.0], x]))
    k = np.arange(1, len(x) + 1)
    lo = np.maximum(k - window, 0)
    return (c[k] - c[lo]) / (k - lo)


def _db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


@dataclass
class LearningCurve:
    """Pointwise trial-averaged squared error for one algorithm."""

    algo: str
    n: np.ndarray
    mse: np.ndarray
    trials_used: int
    diverged: int
    smooth: int = 1

    @property
    def mse_db(self) -> np.ndarray:
        return _db(self.mse)

    @property
    def mse_smooth(self) -> np.ndarray:
        return moving_average(self.mse, self.smooth)

    def __len__(self) -> int:
        return len(self.mse)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    curves: dict
    traces: dict
    bench: list
    series_length: int
    warnings: list = field(default_factory=list)


def _load_trials(cfg: ExperimentConfig, notes: list) -> np.ndarray:
    if cfg.synthetic is not None:
        spec = SyntheticSpec.from_dict({**cfg.synthetic.to_dict(), "seed": cfg.seed})
        return generate(spec, batch=cfg.trials)
    base = load_csv(cfg.input, cfg.columns).uvw
    if cfg.noise_var == 0:
        if cfg.trials > 1:
            msg = (f"recorded input with noise_var=0: all {cfg.trials} trials would be "
                   "identical, running a single trial")
            warnings.warn(msg)
            notes.append(msg)
        return base[None]
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    sd = np.sqrt(cfg.noise_var)
    return np.stack([base + sd * np.random.default_rng(c).standard_normal(base.shape)
                     for c in children])


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every configured algorithm over all trials.

    Raises
    ------
    ConfigError
        Invalid configuration.
    DataError
        The input could not be loaded or is too short.
    DivergenceError
        Every trial of some algorithm diverged.
    """
    cfg.validate()
    notes: list[str] = []
    X = _load_trials(cfg, notes)
    fc = cfg.filter_config
    curves, traces, bench = {}, {}, []
    for name in cfg.algos:
        tr: PredictionTrace = run_prediction(X, name, fc, on_divergence="mask")
        alive = ~tr.diverged
        n_dead = int(np.sum(tr.diverged))
        if n_dead:
            msg = f"{name}: {n_dead} of {len(alive)} trials diverged and were excluded"
            warnings.warn(msg)
            notes.append(msg)
        if not np.any(alive):
            raise DivergenceError(int(np.min(tr.diverged_at)), f"{name}: all trials diverged")
        # fixed summation order over trial index keeps the mean reproducible
        mse = np.sum(tr.sq_err[alive], axis=0) / np.count_nonzero(alive)
        curves[name] = LearningCurve(name, tr.n, mse, int(np.count_nonzero(alive)), n_dead, cfg.smooth)
        traces[name] = PredictionTrace(
            algo=tr.algo, n=tr.n, y=tr.y[0], d=tr.d[0], e=tr.e[0], sq_err=tr.sq_err[0],
            diverged=tr.diverged[0], diverged_at=tr.diverged_at[0],
        )
        bench.append(audit_op_counts(name, cfg.L, cfg.bench_iters, strict=False))
        log.info("%s: final mse %.4g over %d trials", name, mse[-1], curves[name].trials_used)
    return ExperimentResult(cfg, curves, traces, bench, X.shape[-2], notes)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_rows(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)


def emit_outputs(result: ExperimentResult, out_dir) -> list[Path]:
    """Write ``curve_<algo>.csv``, ``trace_<algo>.csv``, ``bench.csv`` and ``manifest.json``.

    Returns the written paths. Floats use 17 significant digits so a rerun
    from the manifest reproduces every file byte for byte.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    written = []
    for name, c in result.curves.items():
        p = out / f"curve_{name}.csv"
        sm = c.mse_smooth
        rows = ([k, int(n), _fmt(m), _fmt(db), _fmt(s), _fmt(sdb)]
                for k, (n, m, db, s, sdb) in enumerate(zip(c.n, c.mse, c.mse_db, sm, _db(sm))))
        _write_rows(p, ["iteration", "n", "mse", "mse_db", "mse_smooth", "mse_smooth_db"], rows)
        written.append(p)
    for name, t in result.traces.items():
        p = out / f"trace_{name}.csv"
        rows = ([int(n), *map(_fmt, d), *map(_fmt, y), _fmt(s)]
                for n, d, y, s in zip(t.n, t.d, t.y, t.sq_err))
        _write_rows(p, ["n", "d_a", "d_b", "d_c", "y_a", "y_b", "y_c", "sq_err"], rows)
        written.append(p)
    p = out / "bench.csv"
    with p.open("w", newline="", encoding="utf-8") as fh:
        reports_to_csv(_deterministic(result.bench), fh)
    written.append(p)
    p = out / "manifest.json"
    manifest = {
        "package_version": __version__,
        # the output location is not part of the run, so reruns elsewhere match byte for byte
        "config": {k: v for k, v in result.config.to_dict().items() if k != "out"},
        "series_length": result.series_length,
        "files": sorted(q.name for q in written),
        "warnings": result.warnings,
    }
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(p)
    return written


def _deterministic(reports: list[BenchReport]) -> list[BenchReport]:
    # op counts only; wall-clock fields would break byte-identical reruns
    return [BenchReport(**{**asdict(r), "wall_time": float("nan"), "time_per_update": float("nan")})
            for r in reports]


def load_manifest(path) -> ExperimentConfig:
    """Rebuild the configuration recorded in a ``manifest.json``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentConfig.from_dict(data["config"])
