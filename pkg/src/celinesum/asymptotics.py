"""Numerical asymptotics ``x_n ~ c r^n n^theta (1 + b_1/n + b_2/n^2 + ...)``.

Terms are generated exactly from a recurrence and only then converted to
high-precision floats (mpmath).  ``r`` and ``theta`` come from Richardson
extrapolation of term ratios; ``c`` and the ``b_i`` from a least-squares
fit of ``log x_n - n log r - theta log n`` in powers of ``1/n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from .errors import DomainError, SingularRecurrenceError
from .operators import RecOperator
from .sequences import unroll


@dataclass
class AsymptoticFit:
    r: float | None
    theta: float | None
    c: float | None
    corrections: list = field(default_factory=list)
    n_used: tuple = (0, 0)
    residual: float | None = None
    theta_used: Fraction | float | None = None
    r_used: Fraction | float | None = None
    conclusive: bool = True
    note: str = ""

    def to_record(self) -> dict:
        def num(v):
            return None if v is None else float(v)
        return {
            "r": num(self.r), "theta": num(self.theta), "c": num(self.c),
            "corrections": [float(b) for b in self.corrections],
            "n_used": list(self.n_used), "residual": num(self.residual),
            "theta_used": str(self.theta_used) if self.theta_used is not None else None,
            "r_used": str(self.r_used) if self.r_used is not None else None,
            "conclusive": self.conclusive, "note": self.note,
        }

    def report(self) -> str:
        if not self.conclusive:
            return f"inconclusive: {self.note}"
        lines = [f"r     = {mpmath.nstr(self.r, 15)}",
                 f"theta = {mpmath.nstr(self.theta, 12)}  (fit uses {self.theta_used})",
                 f"c     = {mpmath.nstr(self.c, 15)}"]
        for i, b in enumerate(self.corrections, 1):
            lines.append(f"b{i}    = {mpmath.nstr(b, 10)}")
        lines.append(f"n     = {self.n_used[0]}..{self.n_used[1]}, residual {mpmath.nstr(self.residual, 3)}")
        return "\n".join(lines)


def richardson(values: list, ns: list, depth: int):
    """Limit of ``s_n = s + a_1/n + ... `` from the last ``depth+1`` consecutive terms."""
    if depth < 0 or len(values) < depth + 1:
        raise DomainError("not enough terms for Richardson extrapolation")
    vs, xs = values[-(depth + 1):], ns[-(depth + 1):]
    n = xs[0]
    if any(x != n + j for j, x in enumerate(xs)):
        raise DomainError("Richardson extrapolation needs consecutive indices")
    total = mpmath.mpf(0)
    for j, v in enumerate(vs):
        sign = -1 if (j + depth) % 2 else 1
        total += sign * v * mpmath.mpf(n + j) ** depth * comb(depth, j)
    return total / mpmath.factorial(depth)


def _snap(x, tol: float, max_den: int = 12):
    q = Fraction(float(x)).limit_denominator(max_den)
    return q if abs(float(x) - float(q)) < tol else None


def _lstsq(rows: list[list], rhs: list) -> tuple[list, float]:
    A = mpmath.matrix(rows)
    b = mpmath.matrix(rhs)
    Q, R = mpmath.qr(A)
    qtb = Q.T * b
    k = A.cols
    coef = mpmath.lu_solve(R[:k, :k], qtb[:k])
    res = A * coef - b
    return [coef[i] for i in range(k)], max(abs(res[i]) for i in range(A.rows))


def _exp_series(e: list, order: int) -> list:
    """Coefficients of ``exp(sum_{i>=1} e_i t^i)`` up to ``t^order``."""
    b = [mpmath.mpf(1)] + [mpmath.mpf(0)] * order
    for m in range(1, order + 1):
        b[m] = sum(i * e[i] * b[m - i] for i in range(1, m + 1)) / m
    return b


def generate_terms(op: RecOperator, init: list, n_max: int) -> list:
    return unroll(op.with_var("k") if op.var != "k" else op, list(init), n_max)


def estimate_growth(op: RecOperator, init: list, n_max: int, n_min: int | None = None,
                    depth: int = 4, n_corrections: int = 3, basis_size: int | None = None,
                    dps: int = 60) -> AsymptoticFit:
    """Fit ``c r^n n^theta (1 + b_1/n + ...)`` to terms ``n_min..n_max`` of the recurrence.

    ``r`` and ``theta`` are snapped to nearby small-denominator rationals
    (when within the extrapolation error) before fitting ``c`` and the
    ``b_i``; the raw estimates are reported too.
    """
    if n_min is None:
        n_min = n_max // 2
    if not 0 < n_min < n_max - depth - 2:
        raise DomainError("need 0 < n_min < n_max - depth - 2")
    try:
        x = generate_terms(op, init, n_max)
    except SingularRecurrenceError as e:
        return AsymptoticFit(None, None, None, n_used=(n_min, n_max), conclusive=False,
                             note=f"recurrence is singular at n={e.index}; supply more initial values")
    tail = x[n_min:]
    if any(v == 0 for v in tail):
        return AsymptoticFit(None, None, None, n_used=(n_min, n_max), conclusive=False,
                             note="zero terms in the fit range (periodic support?)")
    signs = {v > 0 for v in tail}
    if len(signs) > 1:
        return AsymptoticFit(None, None, None, n_used=(n_min, n_max), conclusive=False,
                             note="terms change sign; ratio estimation is not meaningful")
    with mpmath.workdps(dps):
        mag = [abs(v) for v in x]

        def mp(q):
            q = Fraction(q)
            return mpmath.mpf(q.numerator) / q.denominator

        m = 2 * depth + 4
        ns = list(range(n_max - m, n_max))
        ratios = [mp(Fraction(mag[n + 1]) / mag[n]) for n in ns]
        r_raw = richardson(ratios, ns, depth)
        r_err = abs(r_raw - richardson(ratios[:-1], ns[:-1], depth - 1)) if depth > 0 else 0
        r_q = _snap(r_raw, max(1e-9, 10 * float(r_err)))
        r = mp(r_q) if r_q is not None else r_raw
        t = [n * (q / r - 1) for n, q in zip(ns, ratios)]
        theta_raw = richardson(t, ns, depth)
        th_err = abs(theta_raw - richardson(t[:-1], ns[:-1], depth - 1)) if depth > 0 else 0
        th_q = _snap(theta_raw, max(1e-6, 10 * float(th_err)))
        theta = mp(th_q) if th_q is not None else theta_raw

        K = basis_size if basis_size is not None else n_corrections + 4
        pts = _sample(n_min, n_max, 240)
        logr = mpmath.log(r)
        rows, rhs = [], []
        for n in pts:
            y = mpmath.log(mp(mag[n])) - n * logr - theta * mpmath.log(n)
            rows.append([mpmath.mpf(1) / mpmath.mpf(n) ** i for i in range(K)])
            rhs.append(y)
        coef, resid = _lstsq(rows, rhs)
        b = _exp_series(coef, n_corrections)
        c = mpmath.exp(coef[0])
        sign = 1 if x[n_max] > 0 else -1
        return AsymptoticFit(r_raw, theta_raw, sign * c, [b[i] for i in range(1, n_corrections + 1)],
                             (n_min, n_max), resid, th_q if th_q is not None else theta_raw,
                             r_q if r_q is not None else r_raw)


def _sample(lo: int, hi: int, count: int) -> list[int]:
    if hi - lo + 1 <= count:
        return list(range(lo, hi + 1))
    step = (hi - lo) / (count - 1)
    return sorted({lo + round(i * step) for i in range(count)})
