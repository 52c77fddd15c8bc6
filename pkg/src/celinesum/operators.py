"""Linear recurrence operators written in shift-operator notation.

A :class:`RecOperator` ``c_0 + c_1*N + ... + c_r*N^r`` acts on a sequence by
``(L x)_n = sum_i c_i(n) x_{n+i}``.  Coefficients are :class:`RatFunc`
values in the shift variable (``n`` for summation results, ``k`` for the
summand sequence) and possibly symbolic parameters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from . import arith
from .arith import RatFunc, poly_gcd_all, poly_lcm
from .errors import DomainError, TermSyntaxError
from .parsing import evaluate, parse_tree

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecOperator:
    coeffs: tuple[RatFunc, ...]
    var: str = "n"
    # number of trailing factors N removed by normalization (informational)
    shift_removed: int = field(default=0, compare=False)

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        if not coeffs:
            raise DomainError("the zero operator has no order")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def ctx(self):
        return self.coeffs[0].ctx

    @property
    def leading(self) -> RatFunc:
        return self.coeffs[-1]

    def degree(self) -> int:
        """Maximal degree in the shift variable over all coefficients."""
        return max(c.degree(self.var) for c in self.coeffs)

    def params(self) -> tuple[str, ...]:
        return arith.params_of(self.ctx)

    def subs(self, **values: int) -> "RecOperator":
        return RecOperator(tuple(c.subs(**values) for c in self.coeffs), self.var)

    def to_ring(self, ctx) -> "RecOperator":
        return RecOperator(tuple(c.to_ring(ctx) for c in self.coeffs), self.var, self.shift_removed)

    def with_var(self, var: str) -> "RecOperator":
        """Rename the shift variable (``k`` <-> ``n``) keeping coefficients."""
        if var == self.var:
            return self
        ctx = self.ctx
        gens = list(ctx.gens())
        i, j = ctx.variable_to_index(self.var), ctx.variable_to_index(var)
        gens[i], gens[j] = gens[j], gens[i]
        swapped = tuple(RatFunc(c.num.compose(*gens), c.den.compose(*gens)) for c in self.coeffs)
        return RecOperator(swapped, var)

    def residual(self, x: Sequence, n0: int):
        """``sum_i c_i(n0) x[n0+i]``; raises ZeroDivisionError at coefficient poles."""
        total = 0
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            total = total + c(**{self.var: n0}) * x[n0 + i]
        return total

    def __str__(self):
        return to_text(self)


def normalize(op: RecOperator) -> RecOperator:
    """Canonical form: integer-polynomial coefficients, unit content, positive lead.

    A zero constant coefficient means the operator is ``L' * N``; it is
    replaced by ``L'`` with ``var -> var - 1`` so that it annihilates the
    same sequence (from one index later).  The count is kept in
    ``shift_removed``.
    """
    coeffs = list(op.coeffs)
    if all(c.is_zero() for c in coeffs):
        raise DomainError("cannot normalize the zero operator")
    shift = 0
    while coeffs[0].is_zero():
        coeffs.pop(0)
        shift += 1
    if shift:
        log.info("dropped right factor N^%d; operator is shifted by %s -> %s-%d", shift, op.var, op.var, shift)
        coeffs = [c.shift(**{op.var: -shift}) for c in coeffs]
    den = None
    for c in coeffs:
        if not c.is_zero():
            den = c.den if den is None else poly_lcm(den, c.den)
    polys = [c.num * (den / c.den) for c in coeffs]
    g = poly_gcd_all(polys)
    polys = [p / g for p in polys]
    if polys[-1].leading_coefficient() < 0:
        polys = [-p for p in polys]
    return RecOperator(tuple(RatFunc(p) for p in polys), op.var, op.shift_removed + shift)


def equal_up_to_unit(a: RecOperator, b: RecOperator) -> bool:
    if a.var != b.var:
        return False
    na, nb = normalize(a), normalize(b)
    if na.ctx is not nb.ctx:
        ctx = arith.join_rings(na.ctx, nb.ctx)
        na, nb = na.to_ring(ctx), nb.to_ring(ctx)
    return na == nb


def is_normalized(op: RecOperator) -> bool:
    return normalize(op) == op


# --------------------------------------------------------------------------------
# text and structured rendering
# --------------------------------------------------------------------------------

def to_text(op: RecOperator) -> str:
    """Descending powers, e.g. ``(-n)*N^2 + (2*n-1)*N + (3*n-3)``."""
    parts = []
    for i in range(op.order, -1, -1):
        c = op.coeffs[i]
        if c.is_zero():
            continue
        power = "" if i == 0 else ("N" if i == 1 else f"N^{i}")
        if i > 0 and c == 1:
            parts.append(power)
        elif i == 0:
            parts.append(f"({c})")
        else:
            parts.append(f"({c})*{power}")
    return " + ".join(parts)


def to_record(op: RecOperator) -> dict:
    """JSON-friendly record; ``coeffs[i]`` lists ``[monomial, integer]`` pairs of N^i."""
    names = op.ctx.names()
    coeffs = []
    for c in op.coeffs:
        if not c.is_poly():
            raise DomainError("structured rendering needs a normalized operator")
        terms = []
        for exps, v in c.num.terms():
            mono = "*".join(f"{x}^{e}" if e > 1 else x for x, e in zip(names, exps) if e) or "1"
            terms.append([mono, int(v)])
        coeffs.append(terms)
    return {"var": op.var, "order": op.order, "coeffs": coeffs, "text": to_text(op)}


def parse_operator(text: str, var: str = "n", params: Sequence[str] = ()) -> RecOperator:
    """Parse shift-operator text; coefficients may be rational in ``var`` and ``params``."""
    if "N" in params or var == "N":
        raise DomainError("'N' is reserved for the shift operator")
    big = arith.ring(tuple(params) + ("N",))
    allowed = {var, "N", *params}
    f = evaluate(parse_tree(text), big, text, allowed)
    iN = big.variable_to_index("N")
    if f.den.degrees()[iN] > 0:
        raise TermSyntaxError("N may not appear in a denominator", text, 0)
    target = arith.ring(params)
    groups: dict[int, dict] = {}
    names = big.names()
    tnames = target.names()
    for exps, c in f.num.to_dict().items():
        e = [0] * target.nvars()
        for name, x in zip(names, exps):
            if name == "N" or not x:
                continue
            e[tnames.index(name)] = x
        groups.setdefault(exps[iN], {})[tuple(e)] = c
    if not groups:
        raise DomainError("the zero operator has no order")
    den = arith.convert(f.den, target)
    order = max(groups)
    coeffs = tuple(RatFunc(target.from_dict(groups.get(i, {})), den) for i in range(order + 1))
    return RecOperator(coeffs, var)


# --------------------------------------------------------------------------------
# annihilation checking
# --------------------------------------------------------------------------------

@dataclass
class AnnihilationReport:
    holds: bool
    failures: list = field(default_factory=list)  # (n, residual)
    skipped: list = field(default_factory=list)  # n where the check is undefined or singular
    checked: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


def operator_annihilates(op: RecOperator, x: Sequence, n_range) -> AnnihilationReport:
    """Exact check of ``sum_i c_i(n) x_{n+i} == 0`` for ``n`` in ``n_range``.

    Points where a coefficient has a pole are skipped; so are points where the
    leading coefficient vanishes and the residual is nonzero (the recurrence
    says nothing about ``x_{n+r}`` there).
    """
    n_range = list(n_range)
    if n_range and max(n_range) + op.order >= len(x):
        raise DomainError(
            f"need {max(n_range) + op.order + 1} values, got {len(x)}")
    report = AnnihilationReport(True)
    for n0 in n_range:
        try:
            r = op.residual(x, n0)
        except ZeroDivisionError:
            report.skipped.append(n0)
            continue
        if r == 0:
            report.checked.append(n0)
            continue
        if op.leading(**{op.var: n0}) == 0:
            report.skipped.append(n0)
            continue
        report.failures.append((n0, r))
    report.holds = not report.failures
    return report


def integer_roots(p: RatFunc, var: str) -> list[int]:
    """Integer roots of a univariate polynomial coefficient (empty if it has parameters)."""
    if p.variables() - {var}:
        return []
    import flint
    ctx = p.ctx
    i = ctx.variable_to_index(var)
    cs = [0] * (p.num.degrees()[i] + 1)
    for exps, c in p.num.to_dict().items():
        cs[exps[i]] = int(c)
    if len(cs) == 1:
        return []
    roots = flint.fmpz_poly(cs).roots()
    return sorted(int(r) for r, _ in roots)
