"""Doubly hypergeometric terms H(n, k) built from a small factor grammar.

A term is a product of factors, each optionally raised to an integer power
or placed in a denominator::

    term    := factor (("*" | "/") factor)*
    factor  := primary ("^" INT)?
    primary := "binomial(" L "," L ")" | "factorial(" L ")"
             | "power(" base "," L ")" | "(" base ")^(" L ")"
             | "poly(" P ")" | P | "(" term ")"

``L`` is an integer-affine expression in ``n`` and ``k``, ``P`` a polynomial
in ``n``, ``k`` and parameters, ``base`` a constant or parameter expression
free of ``n`` and ``k``.  The shift quotients ``Rn`` and ``Rk`` are computed
factor by factor; the factor list is kept for exact evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from . import arith
from .arith import RatFunc
from .errors import DomainError, TermSyntaxError, UnsupportedTermError
from .parsing import affine_coefficients, evaluate, parse_tree

VARS = ("n", "k")
FUNCTIONS = ("binomial", "factorial", "power", "poly")


@dataclass(frozen=True)
class Affine:
    """``a*n + b*k + c`` with integer coefficients."""
    a: int
    b: int
    c: int

    def at(self, n: int, k: int) -> int:
        return self.a * n + self.b * k + self.c

    def shifted(self, di: int, dj: int) -> "Affine":
        return Affine(self.a, self.b, self.c + self.a * di + self.b * dj)

    def step(self, di: int, dj: int) -> int:
        return self.a * di + self.b * dj

    def ratfunc(self, ctx) -> RatFunc:
        n, k = RatFunc.var(ctx, "n"), RatFunc.var(ctx, "k")
        return n * self.a + k * self.b + self.c

    def __str__(self):
        parts = []
        for coef, name in ((self.a, "n"), (self.b, "k")):
            if coef == 0:
                continue
            mag = "" if abs(coef) == 1 else f"{abs(coef)}*"
            sign = "-" if coef < 0 else ("+" if parts else "")
            parts.append(f"{sign}{mag}{name}")
        if self.c or not parts:
            sign = "-" if self.c < 0 else ("+" if parts else "")
            parts.append(f"{sign}{abs(self.c)}")
        return "".join(parts)


@dataclass(frozen=True)
class Factor:
    """One factor of a term raised to ``exp``.

    kind is ``binomial`` (args: two Affine), ``factorial`` (one Affine),
    ``power`` (base RatFunc, Affine exponent), ``poly`` (a polynomial RatFunc)
    or ``const`` (a RatFunc free of n and k).
    """
    kind: str
    args: tuple
    exp: int = 1

    def text(self) -> str:
        if self.kind == "binomial":
            body = f"binomial({self.args[0]},{self.args[1]})"
        elif self.kind == "factorial":
            body = f"factorial({self.args[0]})"
        elif self.kind == "power":
            base, e = self.args
            body = f"({base})^({e})"
        elif self.kind == "poly":
            body = f"poly({self.args[0]})"
        else:
            body = f"({self.args[0]})"
        if abs(self.exp) == 1:
            return body
        if self.kind == "power":
            body = f"({body})"
        return f"{body}^{abs(self.exp)}"


def _rising(x: RatFunc, m: int) -> RatFunc:
    """(x+1)(x+2)...(x+m) for m >= 0, and 1/(x(x-1)...(x+m+1)) for m < 0; equals (x+m)!/x!."""
    out = RatFunc.const(x.ctx, 1)
    if m >= 0:
        for t in range(1, m + 1):
            out = out * (x + t)
    else:
        for t in range(0, -m):
            out = out / (x - t)
    return out


def _factor_ratio(f: Factor, ctx, di: int, dj: int) -> RatFunc:
    """F(n+di, k+dj) / F(n, k) for a single factor, computed in closed form."""
    one = RatFunc.const(ctx, 1)
    if f.kind == "binomial":
        top, bot = f.args
        diff = Affine(top.a - bot.a, top.b - bot.b, top.c - bot.c)
        r = _rising(top.ratfunc(ctx), top.step(di, dj))
        r = r / _rising(bot.ratfunc(ctx), bot.step(di, dj))
        r = r / _rising(diff.ratfunc(ctx), diff.step(di, dj))
    elif f.kind == "factorial":
        (arg,) = f.args
        r = _rising(arg.ratfunc(ctx), arg.step(di, dj))
    elif f.kind == "power":
        base, e = f.args
        r = base.to_ring(ctx) ** e.step(di, dj)
    elif f.kind == "poly":
        p = f.args[0].to_ring(ctx)
        r = p.shift(n=di, k=dj) / p
    else:
        r = one
    return r ** f.exp


def _factor_value(f: Factor, n: int, k: int, values: dict) -> Fraction | RatFunc:
    if f.kind == "binomial":
        a, b = f.args[0].at(n, k), f.args[1].at(n, k)
        v = comb(a, b) if a >= 0 and 0 <= b <= a else 0
    elif f.kind == "factorial":
        a = f.args[0].at(n, k)
        if a < 0:
            if f.exp < 0:
                return Fraction(0)  # 1/(-m)! = 0, the reciprocal-gamma convention
            raise DomainError(f"factorial of negative argument {a} at (n,k)=({n},{k})")
        v = factorial(a)
    elif f.kind == "power":
        base, e = f.args
        b = base.subs(**values) if values else base
        b = b.value() if b.is_constant() else b
        v = b ** e.at(n, k)
    elif f.kind == "poly":
        p = f.args[0].subs(n=n, k=k, **values)
        v = p.value() if p.is_constant() else p
    else:
        c = f.args[0].subs(**values) if values else f.args[0]
        v = c.value() if c.is_constant() else c
    if f.exp < 0:
        if v == 0:
            raise DomainError(f"factor {f.text()} vanishes in a denominator at (n,k)=({n},{k})")
        return Fraction(1) / v ** (-f.exp) if not isinstance(v, RatFunc) else v ** f.exp
    return v ** f.exp if not isinstance(v, int) else Fraction(v ** f.exp)


class HyperTerm:
    """A parsed term with shift quotients ``Rn = H(n+1,k)/H(n,k)`` and ``Rk = H(n,k+1)/H(n,k)``."""

    def __init__(self, factors: Sequence[Factor], ctx, source: str = ""):
        self.factors = tuple(factors)
        self.ctx = ctx
        self.source = source
        self.Rn = self.direct_ratio(1, 0)
        self.Rk = self.direct_ratio(0, 1)
        self._shift_cache: dict[tuple[int, int], RatFunc] = {}
        if not self.path_independent():
            raise UnsupportedTermError(f"term {source!r} is not doubly hypergeometric")

    @property
    def params(self) -> tuple[str, ...]:
        return arith.params_of(self.ctx)

    def direct_ratio(self, di: int, dj: int) -> RatFunc:
        """H(n+di, k+dj)/H(n, k) from the factor structure."""
        r = RatFunc.const(self.ctx, 1)
        for f in self.factors:
            r = r * _factor_ratio(f, self.ctx, di, dj)
        return r

    def path_independent(self) -> bool:
        return self.Rn * self.Rk.shift(n=1) == self.Rk * self.Rn.shift(k=1)

    def shift_ratio(self, i: int, j: int) -> RatFunc:
        """G_{i,j}(n,k) = H(n+i,k+j)/H(n,k): j shifts in k, then i shifts in n."""
        if i < 0 or j < 0:
            raise DomainError("shift amounts must be non-negative")
        key = (i, j)
        if key in self._shift_cache:
            return self._shift_cache[key]
        if i == 0 and j == 0:
            g = RatFunc.const(self.ctx, 1)
        elif i == 0:
            g = self.shift_ratio(0, j - 1) * self.Rk.shift(k=j - 1)
        else:
            g = self.shift_ratio(i - 1, j) * self.Rn.shift(n=i - 1, k=j)
        self._shift_cache[key] = g
        return g

    def eval(self, n: int, k: int, **values: int):
        """Exact H(n, k); zero outside binomial support."""
        v = Fraction(1)
        for f in self.factors:
            fv = _factor_value(f, n, k, values)
            if fv == 0:
                return Fraction(0)
            v = v * fv
        if isinstance(v, RatFunc) and v.is_constant():
            return v.value()
        return v

    def support_note(self) -> str:
        conds = []
        for f in self.factors:
            if f.kind == "binomial" and f.exp > 0:
                top, bot = f.args
                conds.append(f"0 <= {bot} <= {top}")
            elif f.kind == "factorial" and f.exp < 0:
                conds.append(f"{f.args[0]} >= 0")
        if not conds:
            return "nonzero wherever defined"
        return "nonzero only where " + " and ".join(conds)

    def to_text(self) -> str:
        num = [f.text() for f in self.factors if f.exp > 0]
        den = [f.text() for f in self.factors if f.exp < 0]
        out = "*".join(num) if num else "1"
        for d in den:
            out += f"/{d}"
        return out

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"HyperTerm({self.to_text()!r})"


def term_eval(H: HyperTerm, n0: int, k0: int, **values: int):
    return H.eval(n0, k0, **values)


def shift_ratio(H: HyperTerm, i: int, j: int) -> RatFunc:
    return H.shift_ratio(i, j)


# --------------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------------

def _mentions_call(node) -> bool:
    if node[0] == "call":
        return True
    return any(isinstance(x, tuple) and _mentions_call(x) for x in node[1:])


class _TermBuilder:
    def __init__(self, text: str, ctx, rename: dict[str, str]):
        self.text = text
        self.ctx = ctx
        self.rename = rename
        self.allowed = set(ctx.names())
        self.factors: list[Factor] = []

    def rewrite(self, node):
        """Rename outer variables (e.g. ``i`` -> ``n``) throughout the tree."""
        if node[0] == "name":
            return ("name", self.rename.get(node[1], node[1]), node[2])
        if node[0] == "call":
            return ("call", node[1], [self.rewrite(a) for a in node[2]], node[3])
        if node[0] == "int":
            return node
        return (node[0],) + tuple(self.rewrite(x) for x in node[1:])

    def value(self, node) -> RatFunc:
        return evaluate(node, self.ctx, self.text, self.allowed)

    def affine(self, node, pos) -> Affine:
        f = self.value(node)
        form = affine_coefficients(f, VARS)
        if form is None:
            raise UnsupportedTermError(f"argument {f} is not integer-affine in n and k (at {pos})")
        coeffs, c = form
        return Affine(coeffs["n"], coeffs["k"], c)

    def constant_base(self, node) -> RatFunc:
        b = self.value(node)
        if b.variables() & set(VARS):
            raise UnsupportedTermError(f"power base {b} depends on n or k")
        if b.is_zero():
            raise UnsupportedTermError("power base is zero")
        return b

    def add(self, kind, args, exp):
        if exp:
            self.factors.append(Factor(kind, tuple(args), exp))

    def walk(self, node, exp: int):
        kind = node[0]
        if kind == "mul":
            self.walk(node[1], exp)
            self.walk(node[2], exp)
        elif kind == "div":
            self.walk(node[1], exp)
            self.walk(node[2], -exp)
        elif kind == "neg":
            self.add("const", [RatFunc.const(self.ctx, -1)], 1 if exp % 2 else 0)
            self.walk(node[1], exp)
        elif kind == "pow":
            self.walk_pow(node, exp)
        elif kind == "call":
            self.walk_call(node, exp)
        elif _mentions_call(node):
            raise UnsupportedTermError("sums of hypergeometric factors are not hypergeometric")
        else:
            self.add_rational(self.value(node), exp)

    def walk_pow(self, node, exp):
        e = self.value(node[2])
        if e.is_constant():
            v = e.value()
            if v.denominator != 1:
                raise UnsupportedTermError("fractional exponent")
            self.walk(node[1], exp * int(v))
            return
        if _mentions_call(node[1]):
            raise UnsupportedTermError("symbolic exponent on a non-constant factor")
        base = self.constant_base(node[1])
        self.add("power", [base, self.affine(node[2], "exponent")], exp)

    def walk_call(self, node, exp):
        _, name, args, pos = node
        if name not in FUNCTIONS:
            raise TermSyntaxError(f"unknown function {name!r}", self.text, pos)
        want = {"binomial": 2, "factorial": 1, "power": 2, "poly": 1}[name]
        if len(args) != want:
            raise TermSyntaxError(f"{name} takes {want} argument(s)", self.text, pos)
        for a in args:
            if _mentions_call(a):
                raise UnsupportedTermError(f"nested function call inside {name}")
        if name == "binomial":
            self.add("binomial", [self.affine(args[0], pos), self.affine(args[1], pos)], exp)
        elif name == "factorial":
            self.add("factorial", [self.affine(args[0], pos)], exp)
        elif name == "power":
            self.add("power", [self.constant_base(args[0]), self.affine(args[1], pos)], exp)
        else:
            p = self.value(args[0])
            if not p.is_poly():
                raise UnsupportedTermError("poly() needs a polynomial argument")
            self.add_rational(p, exp)

    def add_rational(self, f: RatFunc, exp: int):
        if f.is_zero():
            raise UnsupportedTermError("the zero term has no shift quotients")
        if not f.variables() & set(VARS):
            self.add("const", [f], exp)
            return
        num, den = RatFunc(f.num), RatFunc(f.den)
        # keep integer content out of poly factors so rendering stays tidy
        for part, sign in ((num, exp), (den, -exp)):
            if part.variables() & set(VARS):
                self.add("poly", [part], sign)
            elif part != 1:
                self.add("const", [part], sign)


def parse_term(text: str, n_var: str = "n", k_var: str = "k", params: Sequence[str] = ()) -> HyperTerm:
    """Parse a term; ``n_var``/``k_var`` name the outer and summation variables in ``text``."""
    params = tuple(params)
    for p in params:
        if p in (n_var, k_var, "n", "k", "N") or p in FUNCTIONS:
            raise DomainError(f"parameter name {p!r} is reserved")
    ctx = arith.ring(params)
    rename = {}
    if n_var != "n":
        rename[n_var] = "n"
    if k_var != "k":
        rename[k_var] = "k"
    used = set(_names(parse_tree(text)))
    if any(dst in used for dst in rename.values()):
        raise DomainError("cannot rename variables: target name already used in the term")
    b = _TermBuilder(text, ctx, rename)
    tree = b.rewrite(parse_tree(text))
    b.walk(tree, 1)
    return HyperTerm(_merge(b.factors), ctx, text)


def _names(node) -> list[str]:
    if node[0] == "name":
        return [node[1]]
    if node[0] == "call":
        return [x for a in node[2] for x in _names(a)]
    if node[0] == "int":
        return []
    return [x for sub in node[1:] if isinstance(sub, tuple) for x in _names(sub)]


def _merge(factors: list[Factor]) -> list[Factor]:
    """Combine repeated identical factors and fold constants together."""
    merged: list[Factor] = []
    const = None
    for f in factors:
        if f.kind == "const":
            v = f.args[0] ** f.exp
            const = v if const is None else const * v
            continue
        for i, g in enumerate(merged):
            if g.kind == f.kind and g.args == f.args:
                merged[i] = Factor(g.kind, g.args, g.exp + f.exp)
                break
        else:
            merged.append(f)
    merged = [f for f in merged if f.exp != 0]
    if const is not None and const != 1:
        merged.insert(0, Factor("const", (const,), 1))
    return merged
