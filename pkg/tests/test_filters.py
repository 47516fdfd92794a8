import numpy as np
import pytest

from trinion.errors import ConfigError, DataError, DivergenceError
from trinion.filters import (
    AQLMS, ATLMS, DIVERGENCE_BOUND, QLMS, TLMS, Algo, DelayLine, FilterConfig, aqlms_step,
    atlms_step, make_filter, qlms_step, run_prediction, tlms_step, to_pure_quaternion,
)
from trinion.hypercomplex import quat_conj, quat_involution, tri_conj, tri_map_i, tri_map_j

import oracles

BUDGET = {"TLMS": (9, 3), "ATLMS": (27, 3), "QLMS": (16, 4), "AQLMS": (64, 4)}


def _regressor(algo, L, seed=0):
    rng = np.random.default_rng(seed)
    dim = 4 if Algo.parse(algo).is_quaternion else 3
    return rng.standard_normal((L, dim)), rng.standard_normal(dim)


class TestStepExamples:
    def test_tlms_zero_weight_first_step(self):
        f = TLMS(3, 0.1)
        x, _ = _regressor("TLMS", 3)
        rec = tlms_step(f, x, np.array([1.0, 0, 0]))
        np.testing.assert_array_equal(rec.e, [1, 0, 0])
        np.testing.assert_allclose(f.w, 0.1 * tri_conj(x), rtol=1e-15)

    def test_tlms_exact_prediction_leaves_weights(self):
        f = TLMS(1, 0.5)
        f.w[...] = [[1.0, 0, 0]]
        rec = tlms_step(f, np.array([[1.0, 2, 3]]), np.array([1.0, 2, 3]))
        np.testing.assert_array_equal(rec.y, [1, 2, 3])
        np.testing.assert_array_equal(rec.e, [0, 0, 0])
        np.testing.assert_array_equal(f.w, [[1, 0, 0]])
        assert rec.sq_err == 0

    @pytest.mark.parametrize("algo", list(BUDGET))
    def test_frozen_at_zero_step(self, algo):
        f = make_filter(algo, 4, 0.0)
        rng = np.random.default_rng(1)
        f.w[...] = rng.standard_normal(f.w.shape)
        w0 = f.w.copy()
        for _ in range(10):
            x, d = _regressor(algo, 4, rng.integers(1 << 30))
            f.step(x, d)
        np.testing.assert_array_equal(f.w, w0)

    def test_atlms_zero_weight_step(self):
        f = ATLMS(2, 0.1)
        x, _ = _regressor("ATLMS", 2)
        atlms_step(f, x, np.array([1.0, 0, 0]))
        w1, w2, w3 = f.weight_blocks
        np.testing.assert_allclose(w1, 0.1 * tri_conj(x))
        np.testing.assert_allclose(w2, 0.1 * tri_conj(tri_map_i(x)))
        np.testing.assert_allclose(w3, 0.1 * tri_conj(tri_map_j(x)))

    def test_atlms_real_input_against_expansion(self):
        rng = np.random.default_rng(2)
        L = 3
        f = ATLMS(L, 0.1)
        f.w[...] = rng.integers(-3, 4, f.w.shape)
        x = np.zeros((L, 3))
        x[:, 0] = rng.integers(-3, 4, L)
        w1, w2, w3 = (b.astype(int).tolist() for b in f.weight_blocks)
        xi = [(0, -a, 0) for a in x[:, 0]]       # map_i of a real trinion
        xj = [(0, 0, -a) for a in x[:, 0]]       # map_j of a real trinion
        y = [0, 0, 0]
        for wb, xb in ((w1, [(a, 0, 0) for a in x[:, 0]]), (w2, xi), (w3, xj)):
            for wk, xk in zip(wb, xb):
                y = [s + t for s, t in zip(y, oracles.tri_expand(wk, xk))]
        rec = f.step(x, np.zeros(3))
        np.testing.assert_array_equal(rec.y, y)

    def test_qlms_zero_weight_step(self):
        f = QLMS(2, 0.1)
        x, _ = _regressor("QLMS", 2)
        qlms_step(f, x, np.array([1.0, 0, 0, 0]))
        np.testing.assert_allclose(f.w, 0.1 * quat_conj(x))

    def test_qlms_single_tap_against_expansion(self):
        f = QLMS(1, 0.5)
        f.w[...] = [[1.0, -2, 0.5, 3]]
        x = np.array([[0.0, 1.0, -1.0, 2.0]])
        d = np.array([0.5, 0.0, 1.0, -1.0])
        y = oracles.quat_expand((1, -2, 0.5, 3), (0, 1, -1, 2))
        e = tuple(di - yi for di, yi in zip(d, y))
        g = oracles.quat_expand(tuple(0.5 * v for v in e), (0, -1, 1, -2))
        w_new = np.array([1, -2, 0.5, 3]) + np.array(g)
        rec = f.step(x, d)
        np.testing.assert_array_equal(rec.y, y)
        np.testing.assert_array_equal(f.w[0], w_new)

    def test_aqlms_zero_weight_step(self):
        f = AQLMS(2, 0.1)
        x, _ = _regressor("AQLMS", 2)
        aqlms_step(f, x, np.array([1.0, 0, 0, 0]))
        blocks = f.weight_blocks
        np.testing.assert_allclose(blocks[0], 0.1 * quat_conj(x))
        for blk, ax in zip(blocks[1:], "ijk"):
            np.testing.assert_allclose(blk, 0.1 * quat_conj(quat_involution(x, ax)))

    def test_aqlms_single_tap_against_expansion(self):
        rng = np.random.default_rng(8)
        f = AQLMS(1, 0.0)
        f.w[...] = rng.integers(-3, 4, f.w.shape)
        x = rng.integers(-3, 4, (1, 4)).astype(float)
        q = tuple(x[0])
        images = [q, (q[0], q[1], -q[2], -q[3]), (q[0], -q[1], q[2], -q[3]), (q[0], -q[1], -q[2], q[3])]
        y = [0, 0, 0, 0]
        for k, img in enumerate(images):
            y = [s + t for s, t in zip(y, oracles.quat_expand(tuple(f.w[k]), img))]
        np.testing.assert_array_equal(f.step(x, np.zeros(4)).y, y)

    def test_sq_err_nonnegative_and_consistent(self):
        f = TLMS(4, 0.01)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x, d = _regressor("TLMS", 4, rng.integers(1 << 30))
            rec = f.step(x, d)
            assert rec.sq_err >= 0
            assert rec.sq_err == pytest.approx(np.sum((rec.d - rec.y) ** 2))

    def test_wrong_regressor_shape(self):
        with pytest.raises(ValueError):
            TLMS(4, 0.1).step(np.zeros((3, 3)), np.zeros(3))


class TestOpCounts:
    @pytest.mark.parametrize("algo", list(BUDGET))
    @pytest.mark.parametrize("L", [1, 2, 8])
    def test_exact_after_n_steps(self, algo, L):
        per_tap, head = BUDGET[algo]
        f = make_filter(algo, L, 1e-3)
        rng = np.random.default_rng(L)
        N = 7
        for n in range(N):
            x, d = _regressor(algo, L, rng.integers(1 << 30))
            f.step(x, d, n)
        assert f.update_ops.snapshot() == (N * (per_tap * L + head), N * per_tap * L)


class TestDelayLine:
    @pytest.mark.parametrize("L, P", [(1, 1), (3, 1), (4, 3), (8, 1)])
    def test_warm_up_and_ordering(self, L, P):
        line = DelayLine(L, P, dim=1)
        emitted = []
        for n in range(30):
            x = line.push([float(n)])
            if x is None:
                assert n < L + P - 1
                continue
            emitted.append(n)
            expected = [n - P - k for k in range(L)]
            np.testing.assert_array_equal(x[:, 0], expected)
            np.testing.assert_array_equal(line.regressor_indices(), expected)
        assert emitted[0] == L + P - 1

    def test_indices_before_ready(self):
        with pytest.raises(RuntimeError):
            DelayLine(2, 1).regressor_indices()


class _Recorder(TLMS):
    """TLMS that records the sample values it sees, for look-ahead checks."""

    def __init__(self, L, mu):
        super().__init__(L, mu)
        self.seen = []

    def step(self, x, d, n=0):
        self.seen.append((n, x[:, 0].copy(), d[0]))
        return super().step(x, d, n)


class TestRunPrediction:
    @pytest.mark.parametrize("L, P", [(1, 1), (4, 2), (8, 1), (3, 5)])
    def test_warm_up_count(self, L, P):
        s = np.random.default_rng(0).standard_normal((40, 3))
        tr = run_prediction(s, "TLMS", FilterConfig(L, P, 1e-3))
        assert len(tr) == 40 - (L + P - 1)
        assert tr.n[0] == L + P - 1

    @pytest.mark.parametrize("L, P", [(2, 1), (4, 3)])
    def test_no_look_ahead(self, L, P):
        N = 30
        s = np.zeros((N, 3))
        s[:, 0] = np.arange(N)  # value encodes the sample index
        rec = _Recorder(L, 0.0)
        run_prediction(s, "TLMS", FilterConfig(L, P, 1e-3), filt=rec)
        assert len(rec.seen) == N - (L + P - 1)
        for n, xa, da in rec.seen:
            assert da == n
            assert xa.max() <= n - P
            np.testing.assert_array_equal(xa, n - P - np.arange(L))

    @pytest.mark.parametrize("N", [0, 5, 8])
    def test_too_short(self, N):
        with pytest.raises(DataError):
            run_prediction(np.zeros((N, 3)), "TLMS", FilterConfig(8, 1, 1e-3))

    def test_bad_shape_and_nonfinite(self):
        with pytest.raises(DataError):
            run_prediction(np.zeros((20, 2)), "TLMS", FilterConfig(2, 1, 1e-3))
        s = np.zeros((20, 3))
        s[4, 1] = np.nan
        with pytest.raises(DataError):
            run_prediction(s, "TLMS", FilterConfig(2, 1, 1e-3))

    @pytest.mark.parametrize("kwargs", [dict(L=0), dict(P=0), dict(mu=0.0), dict(mu=-1.0), dict(L=2.5)])
    def test_config_validation(self, kwargs):
        with pytest.raises(ConfigError):
            FilterConfig(**kwargs)

    @pytest.mark.parametrize("algo", list(BUDGET))
    def test_constant_series_converges(self, algo):
        s = np.tile([0.6, -0.4, 0.3], (4000, 1))
        tr = run_prediction(s, algo, FilterConfig(8, 1, 0.02))
        assert tr.sq_err[-1] < 1e-6

    @pytest.mark.parametrize("algo", list(BUDGET))
    def test_constant_series_windows_non_increasing(self, algo):
        s = np.tile([0.6, -0.4, 0.3], (3000, 1))
        tr = run_prediction(s, algo, FilterConfig(8, 1, 0.005))
        windows = tr.sq_err[: len(tr) // 100 * 100].reshape(-1, 100).mean(axis=1)
        tail = windows[5:]
        assert np.all(np.diff(tail) <= 1e-15)

    def test_divergence_raises_with_index(self):
        rng = np.random.default_rng(0)
        s = 100 * rng.standard_normal((500, 3))
        with pytest.raises(DivergenceError) as info:
            run_prediction(s, "TLMS", FilterConfig(8, 1, 1.0))
        assert 8 <= info.value.index < 500

    def test_divergence_mask_mode(self):
        rng = np.random.default_rng(0)
        s = rng.standard_normal((2, 400, 3))
        s[1] *= 1000
        tr = run_prediction(s, "TLMS", FilterConfig(4, 1, 0.05), on_divergence="mask")
        assert tr.diverged.tolist() == [False, True]
        assert np.all(np.isfinite(tr.sq_err[0]))
        k = tr.diverged_at[1] - tr.n[0]
        assert np.all(np.isnan(tr.sq_err[1, k:]))
        assert np.all(np.isfinite(tr.sq_err[1, :k]))

    def test_divergence_bound(self):
        f = TLMS(1, 1.0)
        f.w[...] = DIVERGENCE_BOUND / 2
        with pytest.raises(DivergenceError):
            f.step(np.array([[DIVERGENCE_BOUND, 0, 0]]), np.zeros(3), n=17)

    @pytest.mark.parametrize("algo", list(BUDGET))
    def test_batch_equals_loop(self, algo):
        rng = np.random.default_rng(4)
        s = rng.standard_normal((3, 60, 3))
        cfg = FilterConfig(4, 2, 0.01)
        batch = run_prediction(s, algo, cfg)
        for k in range(3):
            single = run_prediction(s[k], algo, cfg)
            np.testing.assert_array_equal(batch.sq_err[k], single.sq_err)
            np.testing.assert_array_equal(batch.y[k], single.y)

    def test_quaternion_records_are_three_dimensional(self):
        s = np.random.default_rng(5).standard_normal((30, 3))
        tr = run_prediction(s, "QLMS", FilterConfig(2, 1, 0.01))
        assert tr.y.shape == (28, 3)
        np.testing.assert_allclose(tr.sq_err, np.sum((tr.d - tr.y) ** 2, axis=-1))

    def test_trace_iteration(self):
        s = np.random.default_rng(6).standard_normal((12, 3))
        tr = run_prediction(s, "TLMS", FilterConfig(2, 1, 0.01))
        recs = list(tr)
        assert [r.n for r in recs] == list(range(2, 12))
        np.testing.assert_array_equal(recs[0].d, s[2])

    def test_pure_quaternion_embedding(self):
        np.testing.assert_array_equal(to_pure_quaternion(np.array([1.0, 2, 3])), [0, 1, 2, 3])

    def test_unknown_algo(self):
        with pytest.raises(ConfigError):
            make_filter("RLS", 4, 0.1)
