"""
Nested sums, one stage at a time
================================

For ``sum_i C(n,i) sum_k f(i,k)`` the inner sum is a sequence in ``i``.
Its recurrence becomes the a-recurrence of the next stage, and its first
values (enough to start that recurrence) come from brute-force summation.
"""
from math import comb

from celinesum import apps
from celinesum.operators import to_text

# %%
# sum_i C(n,i) sum_k C(i,k) = 3^n
for s in apps.multisum(["binomial(i,k)", "binomial(n,i)"]):
    print(f"sum over {s.sum_var} of {s.text}: {to_text(s.result.operator)}")

# %%
# The inner sum of C(i-k,k)^2 has an order-4 recurrence with polynomial
# coefficients; the outer binomial transform again has order 4.
stages = apps.multisum(["binomial(i-k,k)^2", "binomial(n,i)"])
for s in stages:
    print(f"\nsum over {s.sum_var} of {s.text}")
    print("   ", to_text(s.result.operator))
    print("    starts", ", ".join(str(v) for v in s.initial_values))

inner = [sum(comb(i - k, k) ** 2 for k in range(i + 1)) for i in range(10)]
outer = [sum(comb(n, i) * inner[i] for i in range(n + 1)) for n in range(10)]
print("\ndouble sum:", outer)
