"""
Checking the conjugate gradient
===============================

The TLMS update follows the conjugate gradient of ``J = |d - wᵀx|²``. Here
the closed form ``-(2/3) e conj(x)`` is compared with a finite-difference
gradient assembled from the three real component derivatives.
"""

import numpy as np

from trinion.filters import cost_conj_gradient, squared_error_cost
from trinion.hypercomplex import tri_grad, tri_grad_conj, tri_conj

rng = np.random.default_rng(3)
L = 4
w, x, d = rng.standard_normal((L, 3)), rng.standard_normal((L, 3)), rng.standard_normal(3)

numeric = tri_grad_conj(lambda ww: squared_error_cost(ww, x, d), w)
closed = cost_conj_gradient(w, x, d)
print("numeric:\n", numeric)
print("closed form:\n", closed)
print("max relative error:", np.max(np.abs(numeric - closed)) / np.max(np.abs(closed)))

# %%
# A quick sanity check on the calculus itself: the derivative of x with
# respect to x is 1, and with respect to conj(x) it is not zero.
x0 = np.array([0.4, -1.0, 2.0])
print("d x / d x      =", tri_grad(lambda v: v, x0))
print("d x / d conj x =", tri_grad_conj(lambda v: v, x0))
print("d conj x / d conj x =", tri_grad_conj(tri_conj, x0))

# %%
# Stepping along +(2/3) e conj(x) lowers the cost, so the update
# w <- w + mu e conj(x) is steepest descent.
step = -closed
for mu in (0.0, 1e-3, 1e-2):
    print(f"mu={mu:<6} J={squared_error_cost(w + mu * step, x, d):.6f}")
