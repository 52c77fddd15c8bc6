"""
Closed king walks on Z^d
========================

A king step changes every coordinate by -1, 0 or 1 (not all zero).  The
number of closed walks of length n is

    x_n = sum_k T_k^d C(n,k) (-1)^(n-k),

with T_k the central trinomial numbers, so it falls in the scope of
``findrec`` with a holonomic (not C-finite) inner sequence.

Dimension 4 needs about a minute and a half; add it to DIMS to run it.
"""
import time

from celinesum import apps
from celinesum.operators import to_text
from celinesum.oracle import king_walk_count

DIMS = (1, 2, 3)

# %%
# The counts themselves, from dynamic programming on the lattice.
for d in DIMS:
    print(f"d={d}:", [king_walk_count(d, n) for n in range(8)])

# %%
# Recurrences, each checked against the lattice counts and against
# brute-force sums before it is reported.
for d in DIMS:
    t0 = time.perf_counter()
    rep = apps.kingwalks(d)
    op = rep.result.operator
    print(f"\nd={d}: order {op.order}, degree {op.degree()}, found at I={rep.result.I_used}, "
          f"J={rep.result.J_used} in {time.perf_counter() - t0:.1f} s")
    if op.order <= 3:
        print("   ", to_text(op))
    print(f"    closed-walk check n <= {rep.walk_check.n_check}: {rep.walk_check.holds}")
