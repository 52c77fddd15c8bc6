"""
Growth constants from a recurrence
==================================

Unroll the recurrence to a few thousand terms, extrapolate r and theta from
the ratios x_{n+1}/x_n, then fit c and the 1/n corrections in
``x_n ~ c r^n n^theta (1 + b_1/n + b_2/n^2 + ...)``.
"""
import math

from celinesum import apps, estimate_growth, parse_operator

# %%
# A warm-up with a known answer: C(2n,n) ~ 4^n / sqrt(pi n) (1 - 1/(8n) + ...)
fit = estimate_growth(parse_operator("(n+1)*N - (4*n+2)"), [1], 2000)
print(fit.report())
print("1/sqrt(pi) =", 1 / math.sqrt(math.pi))

# %%
# King walks.  A local central limit argument gives the constant in closed
# form: one coordinate of a uniform king step has variance
# s2 = 2*3^(d-1)/(3^d-1), and the walk is aperiodic, so c_d = (2 pi s2)^(-d/2).
for d in (2, 3):
    rep = apps.kingwalks(d, asymptotics=True, n_max=3000)
    s2 = 2 * 3 ** (d - 1) / (3 ** d - 1)
    print(f"\nd={d}")
    print(rep.fit.report())
    print(f"local limit value   {(2 * math.pi * s2) ** (-d / 2):.15f}")
