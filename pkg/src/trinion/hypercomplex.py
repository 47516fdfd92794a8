"""
Trinion and quaternion algebra
==============================

Array kernels operate on ``numpy`` arrays whose last axis holds the
components: ``(a, b, c)`` for a trinion ``a + ıb + ȷc`` and ``(w, x, y, z)``
for a Hamilton quaternion. Leading axes broadcast, so a trinion vector of
length ``L`` is simply an ``(L, 3)`` array.

Trinion base elements obey ``ı² = ȷ``, ``ıȷ = ȷı = -1`` and ``ȷ² = -ı``,
which makes the product commutative (the ring is ``R[x]/(x³ + 1)``). The ring
has zero divisors, so the modulus is not multiplicative.

Every kernel accepts an optional :class:`~trinion.counting.OpCounter` and
charges it with the real multiplications and additions it performs. Sign
flips and component permutations (conjugates, mappings, involutions) are free.

The :class:`Trinion` and :class:`Quaternion` value types wrap the same
kernels for scalar use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .counting import OpCounter
from .errors import DegenerateProbeError

__all__ = [
    "Trinion", "Quaternion",
    "tri_add", "tri_sub", "tri_mul", "tri_scale", "tri_conj", "tri_modulus",
    "tri_map_i", "tri_map_j", "tri_dot",
    "quat_add", "quat_sub", "quat_mul", "quat_scale", "quat_conj",
    "quat_modulus", "quat_involution", "quat_dot",
    "tri_grad", "tri_grad_conj",
    "ONE", "I", "J",
]


def _n_elements(shape) -> int:
    return int(np.prod(shape[:-1], dtype=np.int64))


def _charge(counter, shape, mults_each, adds_each):
    if counter is not None:
        n = _n_elements(shape)
        counter.add(mults_each * n, adds_each * n)


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trinion:
    """Immutable trinion scalar ``a + ıb + ȷc``."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Trinion":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"expected shape (3,), got {arr.shape}")
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.a, self.b, self.c], dtype=dtype or float)

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __add__(self, other):
        return tri_add(self, _coerce_tri(other))

    __radd__ = __add__

    def __sub__(self, other):
        return tri_sub(self, _coerce_tri(other))

    def __rsub__(self, other):
        return tri_sub(_coerce_tri(other), self)

    def __neg__(self):
        return Trinion(-self.a, -self.b, -self.c)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return tri_scale(float(other), self)
        return tri_mul(self, _coerce_tri(other))

    __rmul__ = __mul__

    def __abs__(self):
        return tri_modulus(self)

    def conj(self) -> "Trinion":
        return tri_conj(self)

    def map_i(self) -> "Trinion":
        return tri_map_i(self)

    def map_j(self) -> "Trinion":
        return tri_map_j(self)

    @property
    def real(self) -> float:
        return self.a


@dataclass(frozen=True)
class Quaternion:
    """Immutable Hamilton quaternion ``w + xi + yj + zk``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (4,):
            raise ValueError(f"expected shape (4,), got {arr.shape}")
        return cls(*(float(v) for v in arr))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.w, self.x, self.y, self.z], dtype=dtype or float)

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    def __add__(self, other):
        return quat_add(self, other)

    def __sub__(self, other):
        return quat_sub(self, other)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return quat_scale(float(other), self)
        return quat_mul(self, other)

    def __rmul__(self, other):
        # only scalars reach here; quaternion products are handled by __mul__
        return quat_scale(float(other), self)

    def __abs__(self):
        return quat_modulus(self)

    def conj(self) -> "Quaternion":
        return quat_conj(self)


def _coerce_tri(v):
    if isinstance(v, (int, float, np.floating, np.integer)):
        return Trinion(float(v))
    return v


def _unwrap(*args):
    """Return float arrays for the operands plus the value type to rewrap with."""
    kind = None
    arrs = []
    for v in args:
        if isinstance(v, (Trinion, Quaternion)):
            kind = type(v)
        arrs.append(np.asanyarray(v, dtype=float))
    return arrs, kind


def _rewrap(arr, kind):
    if kind is None:
        return arr
    return kind.from_array(arr)


ONE = Trinion(1.0, 0.0, 0.0)
I = Trinion(0.0, 1.0, 0.0)
J = Trinion(0.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Trinion kernels
# ---------------------------------------------------------------------------


def tri_add(u, v, counter: OpCounter | None = None):
    """Component-wise sum; 3 real additions per element."""
    (u, v), kind = _unwrap(u, v)
    out = u + v
    _charge(counter, out.shape, 0, 3)
    return _rewrap(out, kind)


def tri_sub(u, v, counter: OpCounter | None = None):
    """Component-wise difference; 3 real additions per element."""
    (u, v), kind = _unwrap(u, v)
    out = u - v
    _charge(counter, out.shape, 0, 3)
    return _rewrap(out, kind)


def tri_mul(u, v, counter: OpCounter | None = None):
    """Trinion ring product.

    ``(a, b, c)(d, e, f) = (ad - (bf + ce), (ae + bd) - cf, (af + cd) + be)``

    Uses exactly 9 real multiplications and 6 real additions per element.
    The grouping of the additions is symmetric under swapping the operands,
    so ``tri_mul(u, v)`` and ``tri_mul(v, u)`` agree bit for bit.
    """
    (u, v), kind = _unwrap(u, v)
    a, b, c = u[..., 0], u[..., 1], u[..., 2]
    d, e, f = v[..., 0], v[..., 1], v[..., 2]
    real = a * d - (b * f + c * e)
    out = np.empty_like(real, shape=real.shape + (3,))
    out[..., 0] = real
    out[..., 1] = (a * e + b * d) - c * f
    out[..., 2] = (a * f + c * d) + b * e
    _charge(counter, out.shape, 9, 6)
    return _rewrap(out, kind)


def tri_scale(s, v, counter: OpCounter | None = None):
    """Multiply by a real scalar; 3 real multiplications per element."""
    (v,), kind = _unwrap(v)
    s = np.asarray(s, dtype=float)
    out = s[..., None] * v
    _charge(counter, out.shape, 3, 0)
    return _rewrap(out, kind)


def tri_conj(v):
    """Trinion conjugate ``(a, b, c) -> (a, -c, -b)``.

    Note the cross swap: the ı-part of the conjugate is minus the ȷ-part of
    the input. This is the conjugate for which ``|v|² = Re(v v*)``.
    """
    (v,), kind = _unwrap(v)
    out = np.stack([v[..., 0], -v[..., 2], -v[..., 1]], axis=-1)
    return _rewrap(out, kind)


def tri_map_i(v):
    """ı-mapping ``(a, b, c) -> (b, -a, -c)``. Not an involution."""
    (v,), kind = _unwrap(v)
    out = np.stack([v[..., 1], -v[..., 0], -v[..., 2]], axis=-1)
    return _rewrap(out, kind)


def tri_map_j(v):
    """ȷ-mapping ``(a, b, c) -> (c, -b, -a)``. Not an involution."""
    (v,), kind = _unwrap(v)
    out = np.stack([v[..., 2], -v[..., 1], -v[..., 0]], axis=-1)
    return _rewrap(out, kind)


def tri_modulus(v):
    """Euclidean norm of the three components (overflow/underflow safe)."""
    (v,), kind = _unwrap(v)
    out = np.hypot(np.hypot(v[..., 0], v[..., 1]), v[..., 2])
    return float(out) if kind is not None else out


def tri_dot(w, x, counter: OpCounter | None = None):
    """Plain (non-conjugating) transpose product ``wᵀx`` over axis ``-2``.

    Charges ``9L`` multiplications and ``6L + 3(L - 1)`` additions.
    """
    prods = tri_mul(w, x, counter)
    L = prods.shape[-2]
    if counter is not None and L > 1:
        counter.add(adds=3 * (L - 1) * _n_elements(prods.shape[:-1]))
    return prods.sum(axis=-2)


# ---------------------------------------------------------------------------
# Quaternion kernels (Hamilton convention, ij = k)
# ---------------------------------------------------------------------------


def quat_add(p, q, counter: OpCounter | None = None):
    (p, q), kind = _unwrap(p, q)
    out = p + q
    _charge(counter, out.shape, 0, 4)
    return _rewrap(out, kind)


def quat_sub(p, q, counter: OpCounter | None = None):
    (p, q), kind = _unwrap(p, q)
    out = p - q
    _charge(counter, out.shape, 0, 4)
    return _rewrap(out, kind)


def quat_mul(p, q, counter: OpCounter | None = None):
    """Hamilton product; 16 real multiplications and 12 real additions."""
    (p, q), kind = _unwrap(p, q)
    w1, x1, y1, z1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    w2, x2, y2, z2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    real = w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2
    out = np.empty_like(real, shape=real.shape + (4,))
    out[..., 0] = real
    out[..., 1] = w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2
    out[..., 2] = w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2
    out[..., 3] = w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2
    _charge(counter, out.shape, 16, 12)
    return _rewrap(out, kind)


def quat_scale(s, q, counter: OpCounter | None = None):
    (q,), kind = _unwrap(q)
    s = np.asarray(s, dtype=float)
    out = s[..., None] * q
    _charge(counter, out.shape, 4, 0)
    return _rewrap(out, kind)


def quat_conj(q):
    (q,), kind = _unwrap(q)
    out = np.stack([q[..., 0], -q[..., 1], -q[..., 2], -q[..., 3]], axis=-1)
    return _rewrap(out, kind)


# components negated by each involution
_INVOLUTION_FLIPS = {"i": (2, 3), "j": (1, 3), "k": (1, 2)}


def quat_involution(q, axis: str):
    """Involution ``q^η = -η q η`` about ``η`` in ``{"i", "j", "k"}``."""
    (q,), kind = _unwrap(q)
    try:
        flips = _INVOLUTION_FLIPS[axis]
    except KeyError:
        raise ValueError(f"unknown involution axis {axis!r}") from None
    parts = [-q[..., k] if k in flips else q[..., k] for k in range(4)]
    return _rewrap(np.stack(parts, axis=-1), kind)


def quat_modulus(q):
    (q,), kind = _unwrap(q)
    out = np.hypot(np.hypot(q[..., 0], q[..., 1]), np.hypot(q[..., 2], q[..., 3]))
    return float(out) if kind is not None else out


def quat_dot(w, x, counter: OpCounter | None = None):
    """``Σ_k w_k x_k`` with the weight on the left of each product."""
    prods = quat_mul(w, x, counter)
    L = prods.shape[-2]
    if counter is not None and L > 1:
        counter.add(adds=4 * (L - 1) * _n_elements(prods.shape[:-1]))
    return prods.sum(axis=-2)


# ---------------------------------------------------------------------------
# Gradient calculus (numerical; used to verify analytic gradients)
# ---------------------------------------------------------------------------


def _component_gradients(f: Callable, x: np.ndarray, h: float | None):
    """Central differences of ``f`` w.r.t. every real component of ``x``.

    Returns an array of shape ``x.shape + (3,)``; the trailing axis holds the
    derivative as a trinion (a real-valued ``f`` lands in the real slot).
    """
    x = np.array(x, dtype=float)
    grads = np.zeros(x.shape + (3,))
    for idx in np.ndindex(*x.shape):
        step = h if h is not None else 1e-6 * max(1.0, abs(x[idx]))
        orig = x[idx]
        x[idx] = orig + step
        # f gets its own copy so a returned view of the probe is not mutated
        fp = np.array(f(x.copy()), dtype=float)
        x[idx] = orig - step
        fm = np.array(f(x.copy()), dtype=float)
        x[idx] = orig
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise DegenerateProbeError(f"non-finite function value probing component {idx}")
        diff = (fp - fm) / (2.0 * step)
        if diff.shape == ():
            grads[idx + (0,)] = diff
        elif diff.shape == (3,):
            grads[idx] = diff
        else:
            raise ValueError("f must return a real scalar or a single trinion")
    return grads


def _combine(grads, sign_b, unit_b, sign_c, unit_c, side):
    ga, gb, gc = grads[..., 0, :], grads[..., 1, :], grads[..., 2, :]
    if side == "left":
        tb, tc = tri_mul(np.asarray(unit_b), gb), tri_mul(np.asarray(unit_c), gc)
    elif side == "right":
        tb, tc = tri_mul(gb, np.asarray(unit_b)), tri_mul(gc, np.asarray(unit_c))
    else:
        raise ValueError("side must be 'left' or 'right'")
    return (ga + sign_b * tb + sign_c * tc) / 3.0


def tri_grad(f: Callable, x, h: float | None = None, side: str = "left") -> np.ndarray:
    """Numerical gradient with respect to a trinion variable.

    ``∇_x f = (∇_{x_a} f - ȷ ∇_{x_b} f - ı ∇_{x_c} f) / 3``

    Parameters
    ----------
    f : callable
        Maps an array shaped like ``x`` to a real scalar or a trinion.
    x : array_like, shape (..., 3)
        Probe point.
    h : float, optional
        Central-difference step. Defaults to ``1e-6 * max(1, |component|)``.
    side : {"left", "right"}
        Which side of the sub-gradients the units multiply from. The result
        is the same either way since the ring is commutative.

    Returns
    -------
    ndarray, shape (..., 3)
    """
    grads = _component_gradients(f, x, h)
    return _combine(grads, -1.0, J, -1.0, I, side)


def tri_grad_conj(f: Callable, x, h: float | None = None, side: str = "left") -> np.ndarray:
    """Numerical gradient with respect to the conjugate variable.

    ``∇_{x*} f = (∇_{x_a} f + ı ∇_{x_b} f + ȷ ∇_{x_c} f) / 3``

    See :func:`tri_grad` for the parameters.
    """
    grads = _component_gradients(f, x, h)
    return _combine(grads, 1.0, I, 1.0, J, side)
