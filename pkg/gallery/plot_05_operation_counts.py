"""
Counting real operations per update
===================================

Every algebra kernel charges an operation counter, so the cost of one
weight update can be read off after a run and compared with closed-form
budgets. Wall-clock timing gives a rough second opinion.
"""

from trinion.bench import UfuncTally, audit_op_counts, format_table, time_filters, update_budget
from trinion.filters import make_filter

import numpy as np

# %%
# Closed-form budgets per update
for L in (1, 8, 32):
    print(L, {a: update_budget(a, L) for a in ("TLMS", "ATLMS", "QLMS", "AQLMS")})

# %%
# Audited counts over 100 updates at L = 8
reports = [audit_op_counts(a, 8, 100) for a in ("TLMS", "ATLMS", "QLMS", "AQLMS")]
print(format_table(reports))

# %%
# Independent check: an ndarray subclass that tallies every numpy multiply
# and add. Its totals match update plus output counters exactly.
f = make_filter("ATLMS", 4, 1e-2)
f.w = UfuncTally.wrap(f.w)
UfuncTally.reset()
rng = np.random.default_rng(0)
for n in range(10):
    f.step(UfuncTally.wrap(rng.standard_normal((4, 3))), UfuncTally.wrap(rng.standard_normal(3)), n)
print("ufunc tally:", UfuncTally.mults, UfuncTally.adds)
print("counters:   ", f.update_ops.real_mults + f.output_ops.real_mults,
      f.update_ops.real_adds + f.output_ops.real_adds)

# %%
# Wall clock, median of 5 repeats
print(format_table(time_filters(("TLMS", "ATLMS", "QLMS", "AQLMS"), L=8, n_iters=1000)))
