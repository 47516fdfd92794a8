"""
Adaptive LMS predictors
=======================

Four streaming predictors share one structure: the regressor ``x(n)`` from a
:class:`DelayLine` is optionally augmented with mapped copies of itself, the
output is the plain-transpose inner product ``y = wᵀx``, and the weights move
along ``μ e conj(x)``.

========  =========  ==========================  ================
algo      algebra    regressor blocks            update mults
========  =========  ==========================  ================
TLMS      trinion    x                           9L + 3
ATLMS     trinion    x, xⁱ, xʲ                   27L + 3
QLMS      quaternion x                           16L + 4
AQLMS     quaternion x, x^i, x^j, x^k            64L + 4
========  =========  ==========================  ================

All filters are batched: weights have shape ``(*batch, blocks * L, dim)`` so a
stack of independent trials advances in one call. Each filter keeps two
:class:`~trinion.counting.OpCounter` instances, ``update_ops`` for the weight
update path and ``output_ops`` for ``wᵀx`` and the error.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np

from . import hypercomplex as hc
from .counting import OpCounter
from .errors import ConfigError, DataError, DivergenceError

__all__ = [
    "Algo", "FilterConfig", "DelayLine", "PredictionRecord", "PredictionTrace",
    "AdaptiveFilter", "TLMS", "ATLMS", "QLMS", "AQLMS",
    "make_filter", "run_prediction", "to_pure_quaternion",
    "tlms_step", "atlms_step", "qlms_step", "aqlms_step",
    "DIVERGENCE_BOUND", "squared_error_cost", "cost_component_gradients",
    "cost_conj_gradient",
]

DIVERGENCE_BOUND = 1e12


class Algo(str, Enum):
    TLMS = "TLMS"
    ATLMS = "ATLMS"
    QLMS = "QLMS"
    AQLMS = "AQLMS"

    @classmethod
    def parse(cls, value) -> "Algo":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ConfigError(f"unknown algorithm {value!r}") from None

    @property
    def is_quaternion(self) -> bool:
        return self in (Algo.QLMS, Algo.AQLMS)


@dataclass(frozen=True)
class FilterConfig:
    """Filter length ``L``, prediction step ``P`` and step size ``mu``."""

    L: int = 8
    P: int = 1
    mu: float = 6e-5

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ConfigError(f"filter length must be an integer >= 1, got {self.L}")
        if int(self.P) != self.P or self.P < 1:
            raise ConfigError(f"prediction step must be an integer >= 1, got {self.P}")
        if not np.isfinite(self.mu) or self.mu <= 0:
            raise ConfigError(f"step size must be > 0, got {self.mu}")


# ---------------------------------------------------------------------------
# Delay line
# ---------------------------------------------------------------------------


class DelayLine:
    """Ring buffer producing ``[x(n-P), x(n-P-1), ..., x(n-L-P+1)]``.

    Parameters
    ----------
    L : int
        Number of taps.
    P : int
        Prediction step; the newest regressor sample lags the newest input
        by ``P``.
    dim : int
        Components per sample.
    batch : tuple of int
        Leading batch shape of each pushed sample.
    """

    def __init__(self, L: int, P: int, dim: int = 3, batch: tuple = ()):
        if L < 1 or P < 0:
            raise ConfigError("delay line needs L >= 1 and P >= 0")
        self.L, self.P, self.dim = int(L), int(P), int(dim)
        self.capacity = self.L + self.P
        self._buf = np.zeros(tuple(batch) + (self.capacity, self.dim))
        self._stamp = np.full(self.capacity, -1, dtype=np.int64)
        self._lags = self.P + np.arange(self.L)
        self.count = 0

    @property
    def ready(self) -> bool:
        return self.count >= self.capacity

    @property
    def newest_index(self) -> int:
        return self.count - 1

    def push(self, sample) -> np.ndarray | None:
        """Ingest ``x(n)`` and return the regressor for ``n``, or ``None`` during warm-up."""
        pos = self.count % self.capacity
        self._buf[..., pos, :] = sample
        self._stamp[pos] = self.count
        self.count += 1
        if not self.ready:
            return None
        return self._buf[..., self._slots(), :]

    def _slots(self) -> np.ndarray:
        return (self.count - 1 - self._lags) % self.capacity

    def regressor_indices(self) -> np.ndarray:
        """Sample indices currently feeding the regressor, newest first."""
        if not self.ready:
            raise RuntimeError("delay line still warming up")
        return self._stamp[self._slots()].copy()


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass
class PredictionRecord:
    """One prediction: ``e = d - y`` and ``sq_err = |e|²``."""

    n: int
    y: np.ndarray
    d: np.ndarray
    e: np.ndarray
    sq_err: np.ndarray


@dataclass
class PredictionTrace:
    """Stacked prediction records from :func:`run_prediction`.

    Arrays are indexed ``[..., k, :]`` where ``k`` runs over emitted records
    and ``n[k]`` is the sample index. ``diverged`` flags batch members whose
    weights blew up; their records after divergence are NaN.
    """

    algo: Algo
    n: np.ndarray
    y: np.ndarray
    d: np.ndarray
    e: np.ndarray
    sq_err: np.ndarray
    diverged: np.ndarray = field(default_factory=lambda: np.zeros((), dtype=bool))
    diverged_at: np.ndarray = field(default_factory=lambda: np.full((), -1))

    def __len__(self) -> int:
        return len(self.n)

    def __iter__(self) -> Iterator[PredictionRecord]:
        for k, n in enumerate(self.n):
            yield PredictionRecord(
                int(n), self.y[..., k, :], self.d[..., k, :], self.e[..., k, :],
                self.sq_err[..., k],
            )


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------


class AdaptiveFilter:
    """Shared machinery for the four hypercomplex LMS predictors.

    Subclasses set the algebra (``dim``, ``_mul``, ``_conj``) and the list
    of regressor ``mappings``.

    Parameters
    ----------
    L : int
        Filter length per regressor block.
    mu : float
        Step size. ``mu = 0`` freezes the filter.
    batch : tuple of int
        Batch shape for running independent instances together.
    on_divergence : {"raise", "mask"}
        ``"raise"`` throws :class:`DivergenceError`; ``"mask"`` zeroes the
        offending instance, flags it in :attr:`diverged` and carries on.
    """

    algo: Algo
    dim: int
    mappings: tuple = (None,)

    def __init__(self, L: int, mu: float, batch: tuple = (), on_divergence: str = "raise"):
        if L < 1:
            raise ConfigError(f"filter length must be >= 1, got {L}")
        if not np.isfinite(mu) or mu < 0:
            raise ConfigError(f"step size must be finite and >= 0, got {mu}")
        if on_divergence not in ("raise", "mask"):
            raise ConfigError("on_divergence must be 'raise' or 'mask'")
        self.L = int(L)
        self.mu = float(mu)
        self.batch = tuple(batch)
        self.on_divergence = on_divergence
        self.w = np.zeros(self.batch + (self.blocks * self.L, self.dim))
        self.update_ops = OpCounter()
        self.output_ops = OpCounter()
        self.diverged = np.zeros(self.batch, dtype=bool)
        self.diverged_at = np.full(self.batch, -1, dtype=np.int64)
        self.n_updates = 0

    @property
    def blocks(self) -> int:
        return len(self.mappings)

    @property
    def weight_blocks(self) -> list[np.ndarray]:
        return [self.w[..., k * self.L:(k + 1) * self.L, :] for k in range(self.blocks)]

    # algebra hooks, bound per subclass to the counted kernels
    _mul = staticmethod(hc.tri_mul)
    _add = staticmethod(hc.tri_add)
    _sub = staticmethod(hc.tri_sub)
    _scale = staticmethod(hc.tri_scale)
    _conj = staticmethod(hc.tri_conj)
    _dot = staticmethod(hc.tri_dot)

    def augment(self, x: np.ndarray) -> np.ndarray:
        """Stack the regressor with its mapped copies along the tap axis."""
        if self.blocks == 1:
            return x
        return np.concatenate([x if m is None else m(x) for m in self.mappings], axis=-2)

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Filter output ``y = w_augᵀ x_aug`` (no conjugation). Does not adapt."""
        return self._dot(self.w, self.augment(np.asanyarray(x, dtype=float)), self.output_ops)

    def step(self, x, d, n: int = 0) -> PredictionRecord:
        """Predict ``d`` from regressor ``x`` then adapt.

        Parameters
        ----------
        x : ndarray, shape (*batch, L, dim)
        d : ndarray, shape (*batch, dim)
        n : int
            Sample index, carried into the record and any divergence error.
        """
        x = np.asanyarray(x, dtype=float)
        d = np.asanyarray(d, dtype=float)
        if x.shape[-2:] != (self.L, self.dim):
            raise ValueError(f"regressor must end in shape ({self.L}, {self.dim}), got {x.shape}")
        with np.errstate(over="ignore", invalid="ignore") if self.on_divergence == "mask" \
                else contextlib.nullcontext():
            return self._step(x, d, n)

    def _step(self, x, d, n):
        xa = self.augment(x)
        out = self.output_ops
        y = self._dot(self.w, xa, out)
        e = self._sub(d, y, out)
        # |e|^2 for the record: dim mults, dim - 1 adds
        sq = (e * e).sum(axis=-1)
        out.add(self.dim * _batch_size(e.shape), (self.dim - 1) * _batch_size(e.shape))
        self._update(xa, e)
        self._check(n)
        return PredictionRecord(n, y, d, e, sq)

    def _update(self, xa, e):
        # w <- w + (mu e) conj(x); mu e is formed once and shared by every tap
        c = self.update_ops
        mue = self._scale(self.mu, e, c)
        g = self._mul(mue[..., None, :], self._conj(xa), c)
        self.w = self._add(self.w, g, c)
        self.n_updates += 1

    def _check(self, n):
        # NaN fails the comparison, so non-finite weights are caught too
        with np.errstate(invalid="ignore"):
            bad = ~(np.abs(self.w).max(axis=(-2, -1)) <= DIVERGENCE_BOUND)
        fresh = bad & ~self.diverged
        if np.any(fresh):
            if self.on_divergence == "raise":
                raise DivergenceError(n, f"{self.algo.value} diverged at sample {n}")
            self.diverged |= fresh
            self.diverged_at = np.where(fresh, n, self.diverged_at)
        if np.any(self.diverged):
            # dead instances stay frozen at zero
            self.w[self.diverged] = 0.0

    def reset(self):
        self.w[...] = 0.0
        self.update_ops.reset()
        self.output_ops.reset()
        self.diverged[...] = False
        self.diverged_at[...] = -1
        self.n_updates = 0


def _batch_size(shape) -> int:
    return int(np.prod(shape[:-1], dtype=np.int64))


class _TrinionFilter(AdaptiveFilter):
    dim = 3


class _QuaternionFilter(AdaptiveFilter):
    dim = 4
    _mul = staticmethod(hc.quat_mul)
    _add = staticmethod(hc.quat_add)
    _sub = staticmethod(hc.quat_sub)
    _scale = staticmethod(hc.quat_scale)
    _conj = staticmethod(hc.quat_conj)
    _dot = staticmethod(hc.quat_dot)


class TLMS(_TrinionFilter):
    """Trinion LMS: ``w <- w + μ e conj(x)``."""

    algo = Algo.TLMS
    mappings = (None,)


class ATLMS(_TrinionFilter):
    """Augmented trinion LMS over ``[x; xⁱ; xʲ]`` with weights ``[w1; w2; w3]``."""

    algo = Algo.ATLMS
    mappings = (None, hc.tri_map_i, hc.tri_map_j)


class QLMS(_QuaternionFilter):
    """Quaternion LMS with ``y = Σ w_k x_k`` and ``w <- w + μ e conj(x)``."""

    algo = Algo.QLMS
    mappings = (None,)


def _inv(axis):
    def f(q):
        return hc.quat_involution(q, axis)
    f.__name__ = f"involution_{axis}"
    return f


class AQLMS(_QuaternionFilter):
    """Augmented quaternion LMS over ``x`` and its involutions ``x^i, x^j, x^k``."""

    algo = Algo.AQLMS
    mappings = (None, _inv("i"), _inv("j"), _inv("k"))


_FILTERS = {Algo.TLMS: TLMS, Algo.ATLMS: ATLMS, Algo.QLMS: QLMS, Algo.AQLMS: AQLMS}


def make_filter(algo, L: int, mu: float, **kwargs) -> AdaptiveFilter:
    return _FILTERS[Algo.parse(algo)](L, mu, **kwargs)


def tlms_step(state: TLMS, x, d, n: int = 0) -> PredictionRecord:
    return state.step(x, d, n)


def atlms_step(state: ATLMS, x, d, n: int = 0) -> PredictionRecord:
    return state.step(x, d, n)


def qlms_step(state: QLMS, x, d, n: int = 0) -> PredictionRecord:
    return state.step(x, d, n)


def aqlms_step(state: AQLMS, x, d, n: int = 0) -> PredictionRecord:
    return state.step(x, d, n)


# ---------------------------------------------------------------------------
# Streaming driver
# ---------------------------------------------------------------------------


def to_pure_quaternion(v: np.ndarray) -> np.ndarray:
    """Embed 3-D samples as pure quaternions ``(0, u, v, w)``."""
    v = np.asarray(v, dtype=float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)


def run_prediction(series, algo, config: FilterConfig, on_divergence: str = "raise",
                   filt: AdaptiveFilter | None = None) -> PredictionTrace:
    """Stream a 3-D series through a delay line and an adaptive predictor.

    The reference ``d(n)`` is the current sample; the regressor holds
    samples ``n-P`` back to ``n-L-P+1``. The first ``L + P - 1`` samples only
    fill the delay line.

    Quaternion filters see the samples as pure quaternions. Their reported
    prediction is the vector part of the quaternion output, and ``e`` and
    ``sq_err`` are measured on that 3-D prediction.

    Parameters
    ----------
    series : array_like, shape (N, 3) or (*batch, N, 3)
        Samples ``(u, v, w)`` mapped to trinion parts ``(a, b, c)``. Leading
        batch axes run independent trials side by side.
    algo : Algo or str
    config : FilterConfig
    on_divergence : {"raise", "mask"}
    filt : AdaptiveFilter, optional
        Pre-built filter to drive (weights are used as found).

    Returns
    -------
    PredictionTrace
    """
    algo = Algo.parse(algo)
    s = np.asarray(series, dtype=float)
    if s.ndim < 2 or s.shape[-1] != 3:
        raise DataError(f"series must have shape (..., N, 3), got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise DataError("series contains non-finite values")
    N = s.shape[-2]
    L, P = config.L, config.P
    if N <= L + P - 1:
        raise DataError(f"series of length {N} too short for L={L}, P={P} (need > {L + P - 1})")
    batch = s.shape[:-2]
    quat = algo.is_quaternion
    src = to_pure_quaternion(s) if quat else s
    dim = src.shape[-1]
    if filt is None:
        filt = make_filter(algo, L, config.mu, batch=batch, on_divergence=on_divergence)

    line = DelayLine(L, P, dim=dim, batch=batch)
    M = N - (L + P - 1)
    ys = np.empty(batch + (M, 3))
    es = np.empty(batch + (M, 3))
    sqs = np.empty(batch + (M,))
    quiet = np.errstate(over="ignore", invalid="ignore") if on_divergence == "mask" \
        else contextlib.nullcontext()
    with quiet:
        _stream(line, filt, src, s, quat, ys, es, sqs)

    dead = filt.diverged
    if np.any(dead):
        idx = np.arange(L + P - 1, N)
        after = idx >= filt.diverged_at[..., None]
        mask = dead[..., None] & after
        ys[mask] = np.nan
        es[mask] = np.nan
        sqs[mask] = np.nan
    return PredictionTrace(
        algo=algo, n=np.arange(L + P - 1, N), y=ys, d=s[..., L + P - 1:, :].copy(),
        e=es, sq_err=sqs, diverged=filt.diverged.copy(), diverged_at=filt.diverged_at.copy(),
    )


def _stream(line, filt, src, s, quat, ys, es, sqs):
    k = 0
    for n in range(src.shape[-2]):
        x = line.push(src[..., n, :])
        if x is None:
            continue
        rec = filt.step(x, src[..., n, :], n)
        y = rec.y[..., 1:] if quat else rec.y
        e = s[..., n, :] - y
        ys[..., k, :] = y
        es[..., k, :] = e
        sqs[..., k] = np.sum(e * e, axis=-1)
        k += 1


# ---------------------------------------------------------------------------
# Cost and its analytic gradients (TLMS)
# ---------------------------------------------------------------------------


def squared_error_cost(w, x, d) -> float:
    """``J = |d - wᵀx|²`` for trinion vectors ``w, x`` of shape ``(L, 3)``."""
    e = np.asarray(d, dtype=float) - hc.tri_dot(w, x)
    return float(np.sum(e * e))


def cost_component_gradients(w, x, d) -> np.ndarray:
    """Real gradients of ``J`` w.r.t. ``w_a``, ``w_b``, ``w_c`` in expanded matrix form.

    Returns an array of shape ``(3, L)``.
    """
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    wa, wb, wc = w[:, 0], w[:, 1], w[:, 2]
    xa, xb, xc = x[:, 0], x[:, 1], x[:, 2]
    da, db, dc = np.asarray(d, dtype=float)
    o = np.outer
    energy = o(xa, xa) + o(xb, xb) + o(xc, xc)
    ga = 2 * ((energy @ wa) + (o(xb, xa) + o(xc, xb) - o(xa, xc)) @ wb
              + (o(xc, xa) - o(xa, xb) - o(xb, xc)) @ wc - (da * xa + db * xb + dc * xc))
    gb = 2 * ((o(xa, xb) + o(xb, xc) - o(xc, xa)) @ wa + energy @ wb
              + (o(xc, xb) - o(xa, xc) + o(xb, xa)) @ wc + (da * xc - db * xa - dc * xb))
    gc = 2 * ((o(xa, xc) - o(xb, xa) - o(xc, xb)) @ wa + (o(xb, xc) - o(xc, xa) + o(xa, xb)) @ wb
              + energy @ wc + (da * xb + db * xc - dc * xa))
    return np.stack([ga, gb, gc])


def cost_conj_gradient(w, x, d) -> np.ndarray:
    """Closed-form conjugate gradient ``∇_{w*} J = -(2/3) e conj(x)``, shape ``(L, 3)``.

    The LMS update steps against this direction, which with the ``2/3``
    folded into the step size is ``w <- w + μ e conj(x)``.
    """
    x = np.asarray(x, dtype=float)
    e = np.asarray(d, dtype=float) - hc.tri_dot(w, x)
    return hc.tri_scale(-2.0 / 3.0, hc.tri_mul(e[None, :], hc.tri_conj(x)))
