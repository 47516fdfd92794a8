"""
Wind series: CSV ingestion and synthetic generation
===================================================

A series is ``N`` samples of ``(t, u, v, w)`` where ``t`` is a timestamp in
seconds and ``u, v, w`` are the three perpendicular wind components in m/s.
The components map to trinion parts ``(a, b, c)`` in that order.

Indices, not timestamps, drive the predictors, so irregular sampling is
accepted as is.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, asdict
from datetime import datetime
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "WindSample", "WindSeries", "ColumnMap", "SyntheticSpec",
    "load_csv", "write_csv", "generate",
]


class WindSample(NamedTuple):
    t: float
    u: float
    v: float
    w: float


@dataclass
class WindSeries:
    """Timestamps ``t`` of shape ``(N,)`` and components ``uvw`` of shape ``(N, 3)``."""

    t: np.ndarray
    uvw: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.uvw = np.asarray(self.uvw, dtype=float)
        if self.uvw.ndim != 2 or self.uvw.shape[1] != 3:
            raise DataError(f"components must have shape (N, 3), got {self.uvw.shape}")
        if self.t.shape != (self.uvw.shape[0],):
            raise DataError("timestamps and components differ in length")

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[WindSample]:
        for t, (u, v, w) in zip(self.t, self.uvw):
            yield WindSample(float(t), float(u), float(v), float(w))

    def __getitem__(self, k) -> WindSample:
        u, v, w = self.uvw[k]
        return WindSample(float(self.t[k]), float(u), float(v), float(w))

    def as_trinions(self) -> np.ndarray:
        return self.uvw.copy()


@dataclass(frozen=True)
class ColumnMap:
    """Header names of the time and component columns."""

    t: str = "t"
    u: str = "u"
    v: str = "v"
    w: str = "w"


def _parse_time(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    return datetime.fromisoformat(text.strip()).timestamp()


def load_csv(path, columns: ColumnMap | None = None, drop_nonfinite: bool = False) -> WindSeries:
    """Load a recorded anemometer series from CSV.

    Parameters
    ----------
    path : str or Path
        UTF-8 CSV file with a header row.
    columns : ColumnMap, optional
        Which header names hold ``t, u, v, w``. Defaults to those literal names.
    drop_nonfinite : bool
        Drop rows with NaN/Inf components (with a warning) instead of failing.

    Returns
    -------
    WindSeries

    Raises
    ------
    DataError
        Missing columns, unparsable cells, non-finite values, decreasing
        timestamps, or no data rows. Messages carry the file line numbers.
    """
    columns = columns or ColumnMap()
    path = Path(path)
    names = (columns.t, columns.u, columns.v, columns.w)
    ts, rows, bad = [], [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file, header row required")
        missing = [c for c in names if c not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        for rec in reader:
            line = reader.line_num
            try:
                t = _parse_time(rec[columns.t])
                vals = [float(rec[c]) for c in names[1:]]
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}:{line}: cannot parse row ({exc})") from None
            if not (math.isfinite(t) and all(math.isfinite(x) for x in vals)):
                bad.append(line)
                continue
            ts.append(t)
            rows.append(vals)
    if bad:
        if not drop_nonfinite:
            err = DataError(f"{path}: non-finite values on lines {bad}")
            err.rows = bad
            raise err
        warnings.warn(f"{path}: dropped {len(bad)} non-finite rows (lines {bad})")
    if not rows:
        raise DataError(f"{path}: no data rows")
    t = np.array(ts)
    back = np.flatnonzero(np.diff(t) < 0)
    if back.size:
        raise DataError(f"{path}: timestamps decrease at data row {int(back[0]) + 2}")
    return WindSeries(t, np.array(rows))


def write_csv(series: WindSeries, path, columns: ColumnMap | None = None) -> None:
    """Write a series with 17 significant digits so :func:`load_csv` restores it exactly."""
    columns = columns or ColumnMap()
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow([columns.t, columns.u, columns.v, columns.w])
        for t, (u, v, w) in zip(series.t, series.uvw):
            wr.writerow([format(x, ".17g") for x in (t, u, v, w)])


# ---------------------------------------------------------------------------
# Synthetic generator
# ---------------------------------------------------------------------------


def _default_coupling():
    return np.diag([0.95, 0.95, 0.95]).tolist()


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic 3-D wind-like series.

    ``model="ar1"`` draws ``z(n) = A z(n-1) + ε(n)`` with a 3×3 coupling
    matrix ``A`` (scalars and length-3 lists give a diagonal ``A``) and
    Gaussian innovations of variance ``noise_var`` and correlation
    ``noise_corr``. ``model="sinusoid"`` draws per-axis sinusoids of the
    given ``amplitudes``, ``frequencies`` (cycles per sample) and ``phases``
    plus the same innovations without memory. ``mean`` is added last.
    """

    model: str = "ar1"
    coefficients: object = field(default_factory=_default_coupling)
    noise_var: float = 1.0
    noise_corr: object = None
    mean: tuple = (0.0, 0.0, 0.0)
    amplitudes: tuple = (1.0, 1.0, 1.0)
    frequencies: tuple = (0.01, 0.013, 0.007)
    phases: tuple = (0.0, 0.0, 0.0)
    seed: int = 0
    length: int = 1000
    dt: float = 1.0
    burn_in: int = 200

    def coupling(self) -> np.ndarray:
        A = np.asarray(self.coefficients, dtype=float)
        if A.ndim == 0:
            A = np.eye(3) * A
        elif A.shape == (3,):
            A = np.diag(A)
        if A.shape != (3, 3):
            raise ConfigError(f"AR coefficients must be scalar, (3,) or (3, 3), got {A.shape}")
        return A

    def innovation_cov(self) -> np.ndarray:
        R = np.eye(3) if self.noise_corr is None else np.asarray(self.noise_corr, dtype=float)
        if R.ndim == 0:
            R = np.full((3, 3), float(R))
            np.fill_diagonal(R, 1.0)
        if R.shape != (3, 3):
            raise ConfigError("noise_corr must be a scalar or a 3x3 matrix")
        return self.noise_var * R

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coefficients"] = np.asarray(self.coefficients, dtype=float).tolist()
        if self.noise_corr is not None:
            d["noise_corr"] = np.asarray(self.noise_corr, dtype=float).tolist()
        for k in ("mean", "amplitudes", "frequencies", "phases"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        d = dict(d)
        for k in ("mean", "amplitudes", "frequencies", "phases"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(**d)


def _validate(spec: SyntheticSpec):
    if spec.model not in ("ar1", "sinusoid"):
        raise ConfigError(f"unknown synthetic model {spec.model!r}")
    if spec.length < 1 or spec.burn_in < 0:
        raise ConfigError("length must be >= 1 and burn_in >= 0")
    if spec.noise_var < 0:
        raise ConfigError("noise_var must be >= 0")
    cov = spec.innovation_cov()
    if spec.noise_var > 0 and np.min(np.linalg.eigvalsh((cov + cov.T) / 2)) < -1e-12:
        raise ConfigError("innovation covariance is not positive semidefinite")
    if spec.model == "ar1":
        rho = max(abs(np.linalg.eigvals(spec.coupling())))
        if rho >= 1:
            raise ConfigError(f"AR coupling is not stable (spectral radius {rho:.4g} >= 1)")


def _innovations(spec: SyntheticSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    if spec.noise_var == 0:
        return np.zeros((n, 3))
    cov = spec.innovation_cov()
    # eigen factor tolerates singular (fully correlated) covariances
    vals, vecs = np.linalg.eigh((cov + cov.T) / 2)
    factor = vecs * np.sqrt(np.clip(vals, 0, None))
    return rng.standard_normal((n, 3)) @ factor.T


def generate(spec: SyntheticSpec, batch: int | None = None) -> WindSeries | np.ndarray:
    """Draw a synthetic series; deterministic for a fixed ``spec.seed``.

    Parameters
    ----------
    spec : SyntheticSpec
    batch : int, optional
        If given, return an array of shape ``(batch, length, 3)`` holding
        ``batch`` independent realisations drawn from child streams spawned
        off ``seed``. Realisation ``k`` does not depend on ``batch``.

    Returns
    -------
    WindSeries or ndarray
    """
    _validate(spec)
    if batch is not None:
        children = np.random.SeedSequence(spec.seed).spawn(batch)
        return np.stack([_draw(spec, np.random.default_rng(c)) for c in children])
    uvw = _draw(spec, np.random.default_rng(spec.seed))
    t = np.arange(spec.length) * spec.dt
    return WindSeries(t, uvw)


def _draw(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.length
    mean = np.asarray(spec.mean, dtype=float)
    if spec.model == "sinusoid":
        k = np.arange(n)[:, None]
        amp = np.asarray(spec.amplitudes, dtype=float)
        freq = np.asarray(spec.frequencies, dtype=float)
        ph = np.asarray(spec.phases, dtype=float)
        return mean + amp * np.sin(2 * np.pi * freq * k + ph) + _innovations(spec, rng, n)
    A = spec.coupling()
    eps = _innovations(spec, rng, n + spec.burn_in)
    z = np.zeros(3)
    out = np.empty((n + spec.burn_in, 3))
    for k in range(n + spec.burn_in):
        z = A @ z + eps[k]
        out[k] = z
    return mean + out[spec.burn_in:]
