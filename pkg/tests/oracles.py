"""Independent reference computations used by the tests.

Nothing here calls the package's product kernels; products are expanded
term by term from the base-element multiplication tables.
"""

from fractions import Fraction
from itertools import product

import numpy as np

# unit index: 0 -> 1, 1 -> ı, 2 -> ȷ ; entry = (sign, unit)
TRINION_TABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2),
    (1, 0): (1, 1), (1, 1): (1, 2), (1, 2): (-1, 0),
    (2, 0): (1, 2), (2, 1): (-1, 0), (2, 2): (-1, 1),
}

# unit index: 0 -> 1, 1 -> i, 2 -> j, 3 -> k (Hamilton)
QUATERNION_TABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def expand(u, v, table):
    """Distribute ``(Σ u_p e_p)(Σ v_q e_q)`` over a unit table, exactly for ints/Fractions."""
    n = len(u)
    out = [0] * n
    for p, q in product(range(n), range(n)):
        sign, unit = table[(p, q)]
        out[unit] += sign * u[p] * v[q]
    return tuple(out)


def tri_expand(u, v):
    return expand(u, v, TRINION_TABLE)


def quat_expand(p, q):
    return expand(p, q, QUATERNION_TABLE)


def exact(v):
    return tuple(Fraction(float(x)) for x in v)


def abs_product(u, v):
    """Per-component sum of |terms| of the trinion product (the rounding-error scale)."""
    a, b, c = np.abs(u)[..., 0], np.abs(u)[..., 1], np.abs(u)[..., 2]
    d, e, f = np.abs(v)[..., 0], np.abs(v)[..., 1], np.abs(v)[..., 2]
    return np.stack([a * d + b * f + c * e, a * e + b * d + c * f, a * f + c * d + b * e], axis=-1)


def ulps(err, scale):
    """Error expressed in units in the last place of ``scale``."""
    return np.abs(err) / np.spacing(np.abs(scale))


def central_difference(f, x, h=1e-6):
    """Plain real gradient of scalar ``f`` by central differences, same shape as ``x``."""
    x = np.array(x, dtype=float)
    g = np.zeros_like(x)
    for idx in np.ndindex(*x.shape):
        step = h * max(1.0, abs(x[idx]))
        orig = x[idx]
        x[idx] = orig + step
        fp = f(x)
        x[idx] = orig - step
        fm = f(x)
        x[idx] = orig
        g[idx] = (fp - fm) / (2 * step)
    return g


def expanded_real_cost(w, x, d):
    """The trinion squared error written out in real components only."""
    wa, wb, wc = w[:, 0], w[:, 1], w[:, 2]
    xa, xb, xc = x[:, 0], x[:, 1], x[:, 2]
    da, db, dc = d
    return ((da - wa @ xa + wb @ xc + wc @ xb) ** 2
            + (db - wa @ xb - wb @ xa + wc @ xc) ** 2
            + (dc - wa @ xc - wb @ xb - wc @ xa) ** 2)
