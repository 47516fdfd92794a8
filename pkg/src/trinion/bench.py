"""
Operation counts and timing
===========================

:func:`audit_op_counts` drives a filter over synthetic data and compares the
weight-update counters against the closed-form per-update budgets

========  ==============  ==========
algo      multiplications additions
========  ==============  ==========
QLMS      16L + 4         16L
AQLMS     64L + 4         64L
TLMS      9L + 3          9L
ATLMS     27L + 3         27L
========  ==============  ==========

The budgets cover the update ``w <- w + (μ e) conj(x)`` only: ``dim`` mults
for ``μ e`` and one hypercomplex product plus one addition per tap. The
output path (``wᵀx``, ``d - y``, ``|e|²``) is tallied separately.

:class:`UfuncTally` is an independent check on the counters themselves: it
is an ``ndarray`` subclass that counts every elementwise multiply and add
numpy performs on it, whichever code path issued them.
"""

from __future__ import annotations

import csv
import io
import statistics
import sys
import time
from dataclasses import dataclass, asdict, fields

import numpy as np

from .counting import OpCounter
from .data import SyntheticSpec, generate
from .errors import BudgetMismatchError
from .filters import Algo, DelayLine, make_filter, to_pure_quaternion

__all__ = [
    "OpCounter", "BenchReport", "UfuncTally", "update_budget", "output_budget",
    "audit_op_counts", "time_filters", "reports_to_csv", "format_table",
]


def update_budget(algo, L: int) -> tuple[int, int]:
    """Closed-form (mults, adds) per weight update."""
    algo = Algo.parse(algo)
    per_tap, head = {
        Algo.TLMS: (9, 3), Algo.ATLMS: (27, 3), Algo.QLMS: (16, 4), Algo.AQLMS: (64, 4),
    }[algo]
    return per_tap * L + head, per_tap * L


def output_budget(algo, L: int) -> tuple[int, int]:
    """(mults, adds) per output evaluation ``y = wᵀx``, ``e = d - y`` and ``|e|²``."""
    algo = Algo.parse(algo)
    dim = 4 if algo.is_quaternion else 3
    blocks = {Algo.TLMS: 1, Algo.ATLMS: 3, Algo.QLMS: 1, Algo.AQLMS: 4}[algo]
    mul_m, mul_a = (16, 12) if dim == 4 else (9, 6)
    taps = blocks * L
    mults = mul_m * taps + dim
    adds = mul_a * taps + dim * (taps - 1) + dim + (dim - 1)
    return mults, adds


@dataclass
class BenchReport:
    algo: str
    L: int
    iterations: int
    counted_mults: int
    counted_adds: int
    predicted_mults: int
    predicted_adds: int
    output_mults: int = 0
    output_adds: int = 0
    wall_time: float = float("nan")
    time_per_update: float = float("nan")
    repeats: int = 0
    low_confidence: bool = False

    @property
    def budget_ok(self) -> bool:
        return (self.counted_mults, self.counted_adds) == (self.predicted_mults, self.predicted_adds)

    def as_row(self) -> dict:
        row = asdict(self)
        row["budget_ok"] = self.budget_ok
        return row


class UfuncTally(np.ndarray):
    """``ndarray`` view that counts elementwise arithmetic.

    Every ``multiply`` adds one multiplication per output element and every
    ``add``/``subtract`` one addition; ``add.reduce`` adds ``n - 1`` per
    reduced lane. Results stay ``UfuncTally`` so the count follows the data.
    The tally is class-wide; call :meth:`reset` before measuring.
    """

    mults = 0
    adds = 0

    def __array_ufunc__(self, ufunc, method, *inputs, out=None, **kwargs):
        args = [np.asarray(x) if isinstance(x, UfuncTally) else x for x in inputs]
        if out is not None:
            kwargs["out"] = tuple(np.asarray(o) if isinstance(o, UfuncTally) else o for o in out)
        result = getattr(ufunc, method)(*args, **kwargs)
        if method == "__call__":
            size = np.size(result)
            if ufunc is np.multiply:
                UfuncTally.mults += size
            elif ufunc in (np.add, np.subtract):
                UfuncTally.adds += size
        elif method == "reduce" and ufunc is np.add:
            UfuncTally.adds += np.size(args[0]) - np.size(result)
        elif ufunc in (np.multiply, np.add, np.subtract):
            raise NotImplementedError(f"untallied ufunc method {ufunc.__name__}.{method}")
        if out is not None:
            return out[0] if len(out) == 1 else out
        if isinstance(result, np.ndarray):
            return result.view(UfuncTally)
        return result

    @classmethod
    def reset(cls):
        cls.mults = 0
        cls.adds = 0

    @classmethod
    def wrap(cls, arr) -> "UfuncTally":
        return np.asarray(arr, dtype=float).view(cls)


def _regressors(algo: Algo, L: int, n_iters: int, seed: int):
    """Pre-built (regressor, reference) pairs from a synthetic stream."""
    spec = SyntheticSpec(coefficients=0.9, noise_var=0.1, length=n_iters + L, seed=seed, burn_in=50)
    s = generate(spec).uvw
    src = to_pure_quaternion(s) if algo.is_quaternion else s
    line = DelayLine(L, 1, dim=src.shape[-1])
    xs, ds = [], []
    for n in range(len(src)):
        x = line.push(src[n])
        if x is not None:
            xs.append(x.copy())
            ds.append(src[n])
    return np.array(xs[:n_iters]), np.array(ds[:n_iters])


def audit_op_counts(algo, L: int, n_iters: int, mu: float = 1e-3, seed: int = 0,
                    strict: bool = True) -> BenchReport:
    """Run ``n_iters`` updates with counting and compare against the budget.

    Raises
    ------
    BudgetMismatchError
        If ``strict`` and the counted update-path operations differ from
        ``n_iters`` times :func:`update_budget`.
    """
    algo = Algo.parse(algo)
    if L < 1 or n_iters < 1:
        raise ValueError("L and n_iters must be >= 1")
    xs, ds = _regressors(algo, L, n_iters, seed)
    f = make_filter(algo, L, mu)
    for n in range(n_iters):
        f.step(xs[n], ds[n], n)
    pm, pa = update_budget(algo, L)
    report = BenchReport(
        algo=algo.value, L=L, iterations=n_iters,
        counted_mults=f.update_ops.real_mults, counted_adds=f.update_ops.real_adds,
        predicted_mults=n_iters * pm, predicted_adds=n_iters * pa,
        output_mults=f.output_ops.real_mults, output_adds=f.output_ops.real_adds,
    )
    if strict and not report.budget_ok:
        raise BudgetMismatchError(algo.value, L, (report.predicted_mults, report.predicted_adds),
                                  (report.counted_mults, report.counted_adds))
    return report


def time_filters(algos, L: int = 8, n_iters: int = 2000, repeats: int = 5,
                 mu: float = 1e-3, seed: int = 0) -> list[BenchReport]:
    """Median wall-clock time of ``n_iters`` updates per algorithm.

    Every algorithm sees the same synthetic stream. ``repeats < 5`` is
    allowed but flags the report as low confidence.

    Per-update cost at small ``L`` is dominated by numpy call overhead, so
    orderings between close budgets need quiet machines and enough repeats.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    algos = [Algo.parse(a) for a in algos]
    streams = {a: _regressors(a, L, n_iters, seed) for a in algos}
    times = {a: [] for a in algos}
    last = {}
    # repeats are interleaved across algorithms so load drift hits all of them alike
    for _ in range(repeats):
        for algo in algos:
            xs, ds = streams[algo]
            f = make_filter(algo, L, mu)
            step = f.step
            t0 = time.perf_counter()
            for n in range(n_iters):
                step(xs[n], ds[n], n)
            times[algo].append(time.perf_counter() - t0)
            last[algo] = f
    reports = []
    for algo in algos:
        f = last[algo]
        pm, pa = update_budget(algo, L)
        med = statistics.median(times[algo])
        reports.append(BenchReport(
            algo=algo.value, L=L, iterations=n_iters,
            counted_mults=f.update_ops.real_mults, counted_adds=f.update_ops.real_adds,
            predicted_mults=n_iters * pm, predicted_adds=n_iters * pa,
            output_mults=f.output_ops.real_mults, output_adds=f.output_ops.real_adds,
            wall_time=med, time_per_update=med / n_iters, repeats=repeats,
            low_confidence=repeats < 5,
        ))
    return reports


_COLUMNS = [f.name for f in fields(BenchReport)] + ["budget_ok"]


def reports_to_csv(reports, fh=None) -> str | None:
    """Write reports as CSV to ``fh``, or return the CSV text if ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    wr = csv.DictWriter(buf, fieldnames=_COLUMNS, lineterminator="\n")
    wr.writeheader()
    for r in reports:
        row = r.as_row()
        for k in ("wall_time", "time_per_update"):
            row[k] = format(row[k], ".6g")
        wr.writerow(row)
    return buf.getvalue() if fh is None else None


def format_table(reports) -> str:
    head = f"{'algo':<6} {'L':>4} {'iters':>6} {'mults/upd':>10} {'adds/upd':>9} {'budget':>7} {'us/upd':>8}"
    lines = [head, "-" * len(head)]
    for r in reports:
        n = max(r.iterations, 1)
        us = f"{r.time_per_update * 1e6:>8.2f}" if np.isfinite(r.time_per_update) else f"{'-':>8}"
        lines.append(
            f"{r.algo:<6} {r.L:>4} {r.iterations:>6} {r.counted_mults // n:>10} "
            f"{r.counted_adds // n:>9} {'ok' if r.budget_ok else 'FAIL':>7} "
            f"{us}" + (" (low confidence)" if r.low_confidence else "")
        )
    return "\n".join(lines)


def print_reports(reports, file=None):
    print(format_table(reports), file=file or sys.stdout)
