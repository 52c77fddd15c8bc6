"""Sequences defined by a linear recurrence in ``k`` plus initial values.

Also home of :func:`shift_reduce`, which writes ``a_{k+j}`` as a combination
of ``a_k, ..., a_{k+D-1}`` with rational-function coefficients.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable, Sequence

from . import arith
from .arith import RatFunc
from .errors import DomainError, SingularRecurrenceError
from .operators import RecOperator, parse_operator


def _evaluator(c: RatFunc, var: str) -> Callable[[int], object]:
    """Fast integer evaluation for univariate coefficients, RatFunc fallback otherwise."""
    if c.variables() <= {var}:
        i = c.ctx.variable_to_index(var)

        def dense(p):
            cs = [0] * (p.degrees()[i] + 1)
            for exps, v in p.to_dict().items():
                cs[exps[i]] = int(v)
            return cs[::-1]

        num, den = dense(c.num), dense(c.den)

        def horner(cs, t):
            acc = 0
            for a in cs:
                acc = acc * t + a
            return acc

        def f(t):
            d = horner(den, t)
            if d == 0:
                raise ZeroDivisionError(t)
            return Fraction(horner(num, t), d)

        return f
    return lambda t: c.subs(**{var: t})


def _is_zero(v) -> bool:
    return v == 0


def unroll(rec: RecOperator, initial: list, upto: int, start: int = 0) -> list:
    """Extend ``initial`` (values at ``start, start+1, ...``) forward to index ``upto``.

    Raises :class:`SingularRecurrenceError` when the leading coefficient
    vanishes at a required step.
    """
    D = rec.order
    if len(initial) < D:
        raise DomainError(f"need at least {D} initial values, got {len(initial)}")
    evals = [_evaluator(c, rec.var) if not c.is_zero() else None for c in rec.coeffs]
    vals = list(initial)
    while start + len(vals) <= upto:
        idx = start + len(vals)
        t = idx - D
        try:
            lead = evals[D](t)
        except ZeroDivisionError:
            raise SingularRecurrenceError(idx) from None
        if _is_zero(lead):
            raise SingularRecurrenceError(idx)
        acc = 0
        for m in range(D):
            if evals[m] is None:
                continue
            try:
                acc = acc + evals[m](t) * vals[t - start + m]
            except ZeroDivisionError:
                raise SingularRecurrenceError(idx) from None
        v = -acc / lead
        if isinstance(v, RatFunc) and v.is_constant():
            v = v.value()
        vals.append(v)
    return vals[: upto - start + 1]


class HoloSeq:
    """Sequence ``a_0, a_1, ...`` given by a recurrence in ``k`` and initial values.

    Initial values are used verbatim for the first ``len(initial_values)``
    indices, so a singular leading coefficient at small ``k`` can be stepped
    over by supplying more values.  Values are Fractions, or RatFuncs when
    the recurrence or initial values involve symbolic parameters.
    """

    def __init__(self, rec: RecOperator, initial_values: Sequence, name: str = "a"):
        if rec.var != "k":
            rec = rec.with_var("k")
        if rec.order < 1:
            raise DomainError("sequence recurrence must have order >= 1")
        if len(initial_values) < rec.order:
            raise DomainError(f"need {rec.order} initial values, got {len(initial_values)}")
        self.rec = rec
        self.initial_values = tuple(self._coerce(v) for v in initial_values)
        self.name = name
        self._values = list(self.initial_values)
        self._lock = threading.Lock()

    def _coerce(self, v):
        if isinstance(v, RatFunc):
            v = v.to_ring(arith.join_rings(v.ctx, self.rec.ctx))
            return v.value() if v.is_constant() else v
        return Fraction(v)

    @property
    def order(self) -> int:
        return self.rec.order

    @property
    def ctx(self):
        return self.rec.ctx

    def values(self, upto: int) -> list:
        """Exact ``a_0 .. a_upto`` (memoized, prefix-consistent)."""
        if upto < 0:
            raise DomainError("upto must be >= 0")
        with self._lock:
            if len(self._values) <= upto:
                self._values = unroll(self.rec, self._values, upto)
            return self._values[: upto + 1]

    def __getitem__(self, i: int):
        return self.values(i)[i]

    def subs(self, **values: int) -> "HoloSeq":
        def sub(v):
            return v.subs(**values) if isinstance(v, RatFunc) else v
        return HoloSeq(self.rec.subs(**values), [sub(v) for v in self.initial_values], self.name)

    def __repr__(self):
        return f"HoloSeq({self.name}: {self.rec}, init={list(self.initial_values)})"


def seq_eval(s: HoloSeq, upto: int) -> list:
    return s.values(upto)


def shift_reduce(rec: RecOperator, J: int) -> list[list[RatFunc]]:
    """Table ``c[j][m]`` with ``a_{k+j} = sum_m c[j][m](k) a_{k+m}`` for ``0 <= j <= J``.

    Rows ``j < D`` are unit vectors; later rows come from substituting the
    recurrence taken at base ``k + j - D``.
    """
    if rec.var != "k":
        rec = rec.with_var("k")
    D = rec.order
    if D < 1:
        raise DomainError("shift reduction needs a recurrence of order >= 1")
    ctx = rec.ctx
    one, zero = RatFunc.const(ctx, 1), RatFunc.const(ctx, 0)
    table = [[one if m == j else zero for m in range(D)] for j in range(min(J + 1, D))]
    lead = rec.leading
    for j in range(D, J + 1):
        s = j - D
        lead_s = lead.shift(k=s)
        row = [zero] * D
        for m in range(D):
            q = rec.coeffs[m]
            if q.is_zero():
                continue
            f = -q.shift(k=s) / lead_s
            prev = table[s + m]
            row = [r + f * p if not p.is_zero() else r for r, p in zip(row, prev)]
        table.append(row)
    return table


# --------------------------------------------------------------------------------
# sequences used throughout the package
# --------------------------------------------------------------------------------

def constant_one() -> HoloSeq:
    return HoloSeq(parse_operator("N-1", var="k"), [1], name="one")


def fibonacci() -> HoloSeq:
    return HoloSeq(parse_operator("N^2-N-1", var="k"), [0, 1], name="F")


def m_fibonacci(param: str = "m") -> HoloSeq:
    """``a_0=0, a_1=1, a_{k+2} = m*a_{k+1} + a_k`` with ``m`` symbolic."""
    rec = parse_operator(f"N^2-{param}*N-1", var="k", params=(param,))
    return HoloSeq(rec, [0, 1], name=f"{param}-Fibonacci")


# (k+2) a_{k+2} = (2k+3) a_{k+1} + 3(k+1) a_k, the standard recurrence of the
# middle coefficients of (1+z+z^2)^k written at base index k.
TRINOMIAL_RECURRENCE = "(k+2)*N^2 - (2*k+3)*N - 3*(k+1)"


def central_trinomial() -> HoloSeq:
    return HoloSeq(parse_operator(TRINOMIAL_RECURRENCE, var="k"), [1, 1], name="T")
