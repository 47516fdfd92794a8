"""
Augmented second-order statistics of trinion vectors
====================================================

A zero-mean trinion vector ``v = v_a + ı v_b + ȷ v_c`` of length ``L`` is
fully described, to second order, by six real ``L × L`` covariances
``C_aa, C_bb, C_cc, C_ab, C_bc, C_ca`` (``C_pq = E{v_p v_qᵀ}``). The three
trinion covariances

    C_vv  = E{v vᴴ},    C_vvi = E{v (vⁱ)ᴴ},    C_vvj = E{v (vʲ)ᴴ}

carry the same information. Here ``ᴴ`` is the trinion conjugate applied
entrywise followed by a transpose, and it acts on the already mapped vector.

Rather than hard-coding closed-form identities, :func:`derive_recovery_map`
rebuilds the linear relation between the two descriptions from the algebra
itself: every entry of a trinion covariance is a combination of the nine
ordered real moments ``E{v_p[k] v_q[l]}``, with trinion coefficient
``e_p · conj(m(e_q))`` for basis units ``e_p`` and mapping ``m``. Evaluating
those nine coefficients per mapping gives a ``9 × 9`` real system which is
inverted once.

All estimators use ``1/N`` normalisation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hypercomplex as hc
from .errors import DataError, RecoveryRankError

__all__ = [
    "RealCovarianceSet", "TrinionCovarianceSet", "RecoveryMap",
    "estimate_real_covs", "estimate_trinion_covs", "derive_recovery_map",
    "recover_real_covs", "trinion_to_real", "real_to_trinion",
    "ORDERED_PAIRS", "MAPPINGS",
]

COMPONENTS = "abc"
ORDERED_PAIRS = tuple(p + q for p in COMPONENTS for q in COMPONENTS)
MAPPINGS = ("identity", "map_i", "map_j")
_MAP_FUNCS = {"identity": lambda v: v, "map_i": hc.tri_map_i, "map_j": hc.tri_map_j}
_REAL_NAMES = ("aa", "bb", "cc", "ab", "bc", "ca")


@dataclass
class RealCovarianceSet:
    """The six real covariance matrices, each ``(L, L)``."""

    aa: np.ndarray
    bb: np.ndarray
    cc: np.ndarray
    ab: np.ndarray
    bc: np.ndarray
    ca: np.ndarray

    def ordered(self) -> dict[str, np.ndarray]:
        """All nine ordered moments, filling ``ba, cb, ac`` by transposition."""
        return {
            "aa": self.aa, "ab": self.ab, "ac": self.ca.T,
            "ba": self.ab.T, "bb": self.bb, "bc": self.bc,
            "ca": self.ca, "cb": self.bc.T, "cc": self.cc,
        }

    def stack(self) -> np.ndarray:
        """Shape ``(6, L, L)`` in the order ``aa, bb, cc, ab, bc, ca``."""
        return np.stack([getattr(self, n) for n in _REAL_NAMES])

    def max_abs_diff(self, other: "RealCovarianceSet") -> float:
        return float(np.max(np.abs(self.stack() - other.stack())))


@dataclass
class TrinionCovarianceSet:
    """``C_vv``, ``C_vvi``, ``C_vvj``, each an ``(L, L, 3)`` trinion matrix."""

    vv: np.ndarray
    vvi: np.ndarray
    vvj: np.ndarray

    def stack(self) -> np.ndarray:
        return np.stack([self.vv, self.vvi, self.vvj])


def trinion_to_real(samples) -> np.ndarray:
    """``(N, L, 3)`` trinion vectors to ``(N, 3L)`` real vectors ``[v_a; v_b; v_c]``."""
    s = np.asarray(samples, dtype=float)
    if s.ndim != 3 or s.shape[-1] != 3:
        raise DataError(f"expected trinion samples of shape (N, L, 3), got {s.shape}")
    return np.concatenate([s[..., 0], s[..., 1], s[..., 2]], axis=-1)


def real_to_trinion(samples) -> np.ndarray:
    """Inverse of :func:`trinion_to_real`."""
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2 or s.shape[-1] % 3:
        raise DataError(f"expected real samples of shape (N, 3L), got {s.shape}")
    L = s.shape[-1] // 3
    return np.stack([s[:, :L], s[:, L:2 * L], s[:, 2 * L:]], axis=-1)


def _prepare(s, center):
    need = 2 if center else 1
    if s.shape[0] < need:
        raise DataError(f"need at least {need} samples, got {s.shape[0]}")
    if center:
        s = s - s.mean(axis=0)
    return s


def estimate_real_covs(samples, center: bool = True) -> RealCovarianceSet:
    """Sample estimates of the six real covariances.

    Parameters
    ----------
    samples : array_like, shape (N, 3L)
        Real vectors stacked as ``[v_a; v_b; v_c]``.
    center : bool
        Subtract the sample mean first (requires ``N >= 2``).
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2 or s.shape[1] % 3:
        raise DataError(f"expected shape (N, 3L), got {s.shape}")
    s = _prepare(s, center)
    N, L = s.shape[0], s.shape[1] // 3
    va, vb, vc = s[:, :L], s[:, L:2 * L], s[:, 2 * L:]

    def cov(x, y):
        return x.T @ y / N

    return RealCovarianceSet(cov(va, va), cov(vb, vb), cov(vc, vc),
                             cov(va, vb), cov(vb, vc), cov(vc, va))


def estimate_trinion_covs(samples, center: bool = True) -> TrinionCovarianceSet:
    """Sample estimates of ``E{v vᴴ}``, ``E{v (vⁱ)ᴴ}`` and ``E{v (vʲ)ᴴ}``.

    Parameters
    ----------
    samples : array_like, shape (N, L, 3)
        Trinion vectors.
    center : bool
        Subtract the sample mean first (requires ``N >= 2``).
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 3 or s.shape[-1] != 3:
        raise DataError(f"expected shape (N, L, 3), got {s.shape}")
    s = _prepare(s, center)
    N = s.shape[0]
    out = []
    for name in MAPPINGS:
        rhs = hc.tri_conj(_MAP_FUNCS[name](s))
        prods = hc.tri_mul(s[:, :, None, :], rhs[:, None, :, :])
        out.append(prods.sum(axis=0) / N)
    return TrinionCovarianceSet(*out)


@dataclass
class RecoveryMap:
    """Linear relation between ordered real moments and trinion covariances.

    ``forward[3m + r, 3p + q]`` is component ``r`` of the trinion coefficient
    of ``E{v_p v_qᵀ}`` in covariance ``m`` (identity, ı-, ȷ-mapped).
    ``inverse`` maps the nine trinion components back to the nine moments.
    """

    forward: np.ndarray
    inverse: np.ndarray
    residual: float

    def to_trinion(self, covs: RealCovarianceSet) -> TrinionCovarianceSet:
        ordered = covs.ordered()
        moments = np.stack([ordered[k] for k in ORDERED_PAIRS])        # (9, L, L)
        comps = np.einsum("ij,jkl->ikl", self.forward, moments)       # (9, L, L)
        comps = comps.reshape(3, 3, *comps.shape[1:]).transpose(0, 2, 3, 1)
        return TrinionCovarianceSet(*comps)

    def to_real(self, covs: TrinionCovarianceSet) -> RealCovarianceSet:
        comps = covs.stack().transpose(0, 3, 1, 2).reshape(9, *covs.vv.shape[:2])
        moments = np.einsum("ij,jkl->ikl", self.inverse, comps)
        m = dict(zip(ORDERED_PAIRS, moments))
        return RealCovarianceSet(m["aa"], m["bb"], m["cc"], m["ab"], m["bc"], m["ca"])

    def identity_for(self, pair: str) -> dict[tuple[str, str], float]:
        """Nonzero coefficients expressing one real moment, keyed by (mapping, component)."""
        row = self.inverse[ORDERED_PAIRS.index(pair)]
        labels = [(m, c) for m in MAPPINGS for c in ("real", "i", "j")]
        return {lab: float(v) for lab, v in zip(labels, row) if abs(v) > 1e-12}


def derive_recovery_map(tol: float = 1e-10) -> RecoveryMap:
    """Build and invert the moment-to-trinion-covariance system.

    Raises
    ------
    RecoveryRankError
        If some real covariance is outside the row space of the system.
    """
    units = np.eye(3)
    forward = np.zeros((9, 9))
    for m, name in enumerate(MAPPINGS):
        f = _MAP_FUNCS[name]
        for p in range(3):
            for q in range(3):
                # E{v_p v_q} contributes e_p * conj(m(e_q)) to entry (k, l)
                forward[3 * m:3 * m + 3, 3 * p + q] = hc.tri_mul(units[p], hc.tri_conj(f(units[q])))
    return _invert(forward, tol)


def _invert(forward, tol):
    inverse, *_ = np.linalg.lstsq(forward, np.eye(forward.shape[0]), rcond=None)
    # moment j is recoverable iff e_j lies in the row space of forward
    recon = inverse @ forward
    bad = [ORDERED_PAIRS[j] for j in range(forward.shape[1])
           if np.max(np.abs(recon[:, j] - np.eye(forward.shape[1])[:, j])) > tol]
    lost = [n for n in _REAL_NAMES if n in bad and n[::-1] in bad]
    if lost:
        raise RecoveryRankError([f"C_{n}" for n in lost])
    residual = float(np.max(np.abs(recon - np.eye(forward.shape[1]))))
    return RecoveryMap(forward, inverse, residual)


def recover_real_covs(covs: TrinionCovarianceSet, recovery: RecoveryMap | None = None) -> RealCovarianceSet:
    """Reconstruct the six real covariances from the three trinion ones."""
    recovery = recovery or derive_recovery_map()
    return recovery.to_real(covs)
