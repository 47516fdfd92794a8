"""
Trinion arithmetic
==================

Trinions are triples ``a + ıb + ȷc`` with ``ı² = ȷ`` and ``ıȷ = -1``. The
product is commutative but the ring has zero divisors, which is the main
practical difference from quaternions.
"""

import numpy as np

from trinion import Quaternion, Trinion
from trinion.hypercomplex import I, J, tri_conj, tri_modulus, tri_mul

# %%
# Unit rules and a worked product
print("ı·ı =", I * I)
print("ı·ȷ =", I * J)
u, v = Trinion(1, 2, 3), Trinion(4, 5, 6)
print("u·v =", u * v, " v·u =", v * u)

# %%
# Conjugate and modulus: |v|² is the real part of v·conj(v)
print("conj(u) =", u.conj())
print("|u|² =", abs(u) ** 2, " Re(u·conj(u)) =", (u * u.conj()).a)

# %%
# A zero divisor: two nonzero trinions with product zero
print("(1,1,0)(1,-1,1) =", Trinion(1, 1, 0) * Trinion(1, -1, 1))

# %%
# The kernels broadcast over leading axes. A length-L trinion vector is an
# (L, 3) array, and a batch of them is (B, L, 3).
rng = np.random.default_rng(0)
x = rng.standard_normal((4, 3))
w = rng.standard_normal((4, 3))
print("elementwise products:\n", tri_mul(w, x))
print("moduli:", tri_modulus(x))
print("conj applied twice is exact:", np.array_equal(tri_conj(tri_conj(x)), x))

# %%
# Quaternions, for comparison, do not commute
p, q = Quaternion(1, 2, 3, 4), Quaternion(5, 6, 7, 8)
print("pq =", p * q)
print("qp =", q * p)
