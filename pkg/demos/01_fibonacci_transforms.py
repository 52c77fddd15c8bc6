"""
Recurrences for binomial transforms of Fibonacci powers
=======================================================

The sum ``x_n = sum_k F_k^d C(n,k)`` satisfies a linear recurrence with
constant coefficients for every power ``d``.  ``findrec`` finds it by making
an ansatz in shifts of ``n`` and ``k``, reducing shifted ``F_k`` with the
Fibonacci recurrence and solving for the coefficients.
"""
import time

from celinesum import CelineProblem, findrec, parse_term
from celinesum.operators import to_text
from celinesum.oracle import brute_sum
from celinesum.sequences import fibonacci, m_fibonacci

H = parse_term("binomial(n,k)")

# %%
# d = 1 gives the bisection of the Fibonacci numbers, x_n = F_{2n}.
for d in (1, 2, 3):
    t0 = time.perf_counter()
    res = findrec(CelineProblem(H, fibonacci(), d))
    print(f"d={d}: {to_text(res.operator)}   (I={res.I_used}, J={res.J_used}, "
          f"{time.perf_counter() - t0:.2f} s, valid for n >= {res.valid_from})")

# %%
# The exact check behind every answer: the operator applied to brute-force
# sums vanishes.
x = brute_sum(fibonacci(), H, 1, 12)
print("sums:", [int(v) for v in x])

# %%
# A symbolic parameter.  a_{k+2} = m a_{k+1} + a_k; the coefficients of the
# result are polynomials in m, valid for generic m.
res = findrec(CelineProblem(H, m_fibonacci("m"), 1))
print("m-Fibonacci:", to_text(res.operator))
print("at m = 1:   ", to_text(res.operator.subs(m=1)))
pell = brute_sum(m_fibonacci().subs(m=2), H, 1, 6)
print("m = 2 sums: ", [int(v) for v in pell], "-> x_{n+2} = 4 x_{n+1} - 2 x_n")
