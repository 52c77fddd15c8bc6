"""Exact arithmetic over Q(n, k, parameters).

Polynomials are :class:`flint.fmpz_mpoly` values in a graded-lex context whose
generators are ``n``, ``k`` and then any symbolic parameters.  Rational
coefficients only ever appear inside :class:`RatFunc`, whose numerator and
denominator are coprime integer polynomials, so a polynomial over Q is the
rational function ``P/c`` with ``c`` a positive integer.

Linear algebra is done over the field of fractions: a :class:`RatMatrix` is
cleared of denominators row by row and reduced with a fraction-free
Gauss-Jordan elimination.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .errors import AttemptTimeout, DomainError

MultiPoly = flint.fmpz_mpoly

BASE_VARS = ("n", "k")
MOD_PRIME = 2**61 - 1


def ring(params: Iterable[str] = ()) -> flint.fmpz_mpoly_ctx:
    """Polynomial context in ``n, k`` followed by sorted ``params``."""
    extra = tuple(sorted(set(params) - set(BASE_VARS)))
    return flint.fmpz_mpoly_ctx.get(BASE_VARS + extra, "deglex")


def params_of(ctx) -> tuple[str, ...]:
    return tuple(ctx.names()[len(BASE_VARS):])


def join_rings(*ctxs) -> flint.fmpz_mpoly_ctx:
    params: set[str] = set()
    for c in ctxs:
        params.update(params_of(c))
    return ring(params)


def convert(p: MultiPoly, ctx) -> MultiPoly:
    """Re-express ``p`` in ``ctx``, whose variables must include those of ``p``."""
    src = p.context()
    if src is ctx:
        return p
    names = src.names()
    index = {v: i for i, v in enumerate(ctx.names())}
    width = ctx.nvars()
    out = {}
    for exps, c in p.to_dict().items():
        e = [0] * width
        for name, x in zip(names, exps):
            if x:
                if name not in index:
                    raise DomainError(f"variable {name!r} missing from target ring")
                e[index[name]] = x
        out[tuple(e)] = c
    return ctx.from_dict(out)


def format_poly(p: MultiPoly) -> str:
    """Compact text such as ``3*n^2-2*n*k+1`` (descending graded-lex)."""
    return str(p).replace(" ", "")


def poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_one():
        return b
    if b.is_one():
        return a
    g = a.gcd(b)
    return a * (b / g)


def poly_gcd_all(polys: Iterable[MultiPoly]) -> MultiPoly | None:
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else g.gcd(p)
        if g.is_one():
            break
    return g


def _positive_lead(p: MultiPoly) -> bool:
    return p.leading_coefficient() > 0


def poly_content_primitive(p: MultiPoly, main_var: str) -> tuple[MultiPoly, MultiPoly]:
    """Split ``p`` into content and primitive part with respect to ``main_var``.

    The content is the gcd of the coefficients of the powers of ``main_var``
    (integer content included) times the largest power of ``main_var``
    dividing ``p``; the primitive part gets a positive leading coefficient.
    """
    if p.is_zero():
        raise DomainError("content of the zero polynomial is undefined")
    ctx = p.context()
    idx = ctx.variable_to_index(main_var)
    groups: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        e = list(exps)
        deg = e[idx]
        e[idx] = 0
        groups.setdefault(deg, {})[tuple(e)] = c
    low = min(groups)
    content = poly_gcd_all(ctx.from_dict(g) for g in groups.values())
    content = content * ctx.gens()[idx] ** low
    prim = p / content
    if not _positive_lead(prim):
        prim, content = -prim, -content
    return content, prim


class RatFunc:
    """Element of Q(n, k, params) kept as a reduced quotient of integer polynomials.

    Invariants: ``gcd(num, den) == 1`` over Z, ``den`` has a positive leading
    coefficient, and zero is ``0/1``.  Values are immutable.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, _reduced: bool = False):
        ctx = num.context()
        if den is None:
            den = ctx.constant(1)
            _reduced = True
        elif den.context() is not ctx:
            raise DomainError("numerator and denominator live in different rings")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = ctx.constant(1)
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
            if not _positive_lead(den):
                num, den = -num, -den
        self.num = num
        self.den = den

    # construction -----------------------------------------------------------------
    @classmethod
    def const(cls, ctx, value) -> "RatFunc":
        q = Fraction(value)
        return cls(ctx.constant(q.numerator), ctx.constant(q.denominator), _reduced=True)

    @classmethod
    def var(cls, ctx, name: str) -> "RatFunc":
        return cls(ctx.gens()[ctx.variable_to_index(name)])

    @property
    def ctx(self):
        return self.num.context()

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.ctx is not self.ctx:
                ctx = join_rings(self.ctx, other.ctx)
                if ctx is not self.ctx:
                    raise DomainError("mixing rings; convert operands first")
                return other.to_ring(ctx)
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(self.ctx, other)
        if isinstance(other, flint.fmpz_mpoly):
            return RatFunc(convert(other, self.ctx))
        return NotImplemented

    def to_ring(self, ctx) -> "RatFunc":
        if ctx is self.ctx:
            return self
        return RatFunc(convert(self.num, ctx), convert(self.den, ctx), _reduced=True)

    # arithmetic -------------------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        # cross-cancel first so the products stay small
        g1 = self.num.gcd(o.den) if not self.num.is_zero() else o.den
        g2 = o.num.gcd(self.den) if not o.num.is_zero() else self.den
        num = (self.num / g1) * (o.num / g2)
        den = (self.den / g2) * (o.den / g1)
        if num.is_zero():
            return RatFunc(num)
        if not _positive_lead(den):
            num, den = -num, -den
        return RatFunc(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFunc(self.den, self.num, _reduced=True) if _positive_lead(self.num) else \
            RatFunc(-self.den, -self.num, _reduced=True)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, _reduced=True)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((tuple(sorted(self.num.to_dict().items())), tuple(sorted(self.den.to_dict().items()))))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_one()

    # substitution -----------------------------------------------------------------
    def shift(self, **amounts: int) -> "RatFunc":
        """Substitute ``v -> v + amounts[v]`` for each named variable."""
        ctx = self.ctx
        gens = list(ctx.gens())
        for name, a in amounts.items():
            i = ctx.variable_to_index(name)
            gens[i] = gens[i] + a
        return RatFunc(self.num.compose(*gens), self.den.compose(*gens), _reduced=True)

    def subs(self, **values: int) -> "RatFunc":
        """Substitute integer values for named variables (result stays in the same ring)."""
        ctx = self.ctx
        gens = list(ctx.gens())
        for name, a in values.items():
            gens[ctx.variable_to_index(name)] = ctx.constant(int(a))
        den = self.den.compose(*gens)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator vanishes at {values}")
        return RatFunc(self.num.compose(*gens), den)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def value(self) -> Fraction:
        """The rational number this constant function equals."""
        if not self.is_constant():
            raise DomainError(f"{self} is not constant")
        c = self.num.coefficient(0) if not self.num.is_zero() else 0
        return Fraction(int(c), int(self.den.coefficient(0)))

    def __call__(self, **values: int):
        """Evaluate; returns a Fraction when every variable present is given."""
        r = self.subs(**values)
        return r.value() if r.is_constant() else r

    def degree(self, var: str) -> int:
        i = self.ctx.variable_to_index(var)
        return max(self.num.degrees()[i], self.den.degrees()[i]) if not self.num.is_zero() else 0

    def variables(self) -> set[str]:
        names = self.ctx.names()
        used = set()
        for p in (self.num, self.den):
            for i, d in enumerate(p.degrees()):
                if d > 0:
                    used.add(names[i])
        return used

    def __str__(self):
        if self.den.is_one():
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    def __repr__(self):
        return f"RatFunc({self})"


def lcm_denominator(row: Sequence[RatFunc]) -> MultiPoly:
    den = None
    for f in row:
        if f.is_zero():
            continue
        den = f.den if den is None else poly_lcm(den, f.den)
    return den


class RatMatrix:
    """Dense rows x cols grid of :class:`RatFunc` entries."""

    def __init__(self, entries: Sequence[Sequence[RatFunc]], cols: int | None = None):
        self.entries = tuple(tuple(r) for r in entries)
        self.rows = len(self.entries)
        self.cols = cols if cols is not None else (len(self.entries[0]) if self.entries else 0)
        for r in self.entries:
            if len(r) != self.cols:
                raise DomainError("ragged matrix")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def apply(self, v: Sequence[RatFunc]) -> list[RatFunc]:
        out = []
        for row in self.entries:
            acc = None
            for a, b in zip(row, v):
                if a.is_zero() or b.is_zero():
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            out.append(acc if acc is not None else RatFunc.const(v[0].ctx if v else row[0].ctx, 0))
        return out


# --------------------------------------------------------------------------------
# fraction-free elimination on polynomial rows
# --------------------------------------------------------------------------------

def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise AttemptTimeout("elimination exceeded its time budget")


def _primitive_row(row: list[MultiPoly]) -> list[MultiPoly]:
    g = poly_gcd_all(row)
    if g is None or g.is_one():
        return row
    return [e / g for e in row]


def _choose_pivot(rows, start, c):
    best = None
    for r in range(start, len(rows)):
        e = rows[r][c]
        if not e.is_zero():
            d = e.total_degree()
            if best is None or d < best[0]:
                best = (d, r)
    return None if best is None else best[1]


def eliminate(rows: list[list[MultiPoly]], ncols: int, method: str = "primitive",
              deadline: float | None = None) -> list[tuple[int, list[MultiPoly]]]:
    """Reduce polynomial rows to fraction-free reduced echelon form.

    Returns ``[(pivot_col, row), ...]`` with every other pivot column zero in
    each row.  ``method="primitive"`` cross-multiplies by cofactors of the
    pivot gcd and strips row contents; ``method="bareiss"`` divides by the
    previous pivot exactly.
    """
    if method not in ("primitive", "bareiss"):
        raise DomainError(f"unknown elimination method {method!r}")
    rows = [list(r) for r in rows if any(not e.is_zero() for e in r)]
    if method == "primitive":
        rows = [_primitive_row(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    prev = None
    for c in range(ncols):
        _check_deadline(deadline)
        r = _choose_pivot(rows, rank, c)
        if r is None:
            continue
        rows[rank], rows[r] = rows[r], rows[rank]
        prow = rows[rank]
        p = prow[c]
        assert not p.is_zero(), "pivot must be a nonzero polynomial"
        for i in range(len(rows)):
            if i == rank:
                continue
            row = rows[i]
            f = row[c]
            if method == "primitive":
                if f.is_zero():
                    continue
                g = p.gcd(f)
                a, b = p / g, f / g
                new = [a * x - b * y if not y.is_zero() else a * x for x, y in zip(row, prow)]
                new[c] = new[c] * 0
                rows[i] = _primitive_row(new)
            else:
                new = []
                for j, (x, y) in enumerate(zip(row, prow)):
                    if j == c:
                        new.append(x * 0)
                        continue
                    v = p * x
                    if not f.is_zero() and not y.is_zero():
                        v = v - f * y
                    new.append(v / prev if prev is not None else v)
                rows[i] = new
        pivots.append(c)
        prev = p
        rank += 1
        rows = rows[:rank] + [row for row in rows[rank:] if any(not e.is_zero() for e in row)]
    return list(zip(pivots, rows[:rank]))


def _normalize_vector(v: list[MultiPoly]) -> list[MultiPoly]:
    g = poly_gcd_all(v)
    v = [e / g for e in v]
    first = next(e for e in v if not e.is_zero())
    if not _positive_lead(first):
        v = [-e for e in v]
    return v


def _basis_from_echelon(echelon, ncols) -> list[list[MultiPoly]]:
    pivcols = {c for c, _ in echelon}
    basis = []
    for f in range(ncols):
        if f in pivcols:
            continue
        scale = None
        for c, row in echelon:
            if not row[f].is_zero():
                scale = row[c] if scale is None else poly_lcm(scale, row[c])
        ctx = echelon[0][1][0].context() if echelon else None
        if scale is None:
            scale = ctx.constant(1) if ctx is not None else None
        v = [None] * ncols
        for j in range(ncols):
            v[j] = scale * 0
        v[f] = scale
        for c, row in echelon:
            if not row[f].is_zero():
                v[c] = -row[f] * (scale / row[c])
        basis.append(_normalize_vector(v))
    return basis


def _dot_is_zero(row, v) -> bool:
    acc = None
    for a, b in zip(row, v):
        if a.is_zero() or b.is_zero():
            continue
        t = a * b
        acc = t if acc is None else acc + t
    return acc is None or acc.is_zero()


def modular_profile(rows: list[list[MultiPoly]], ncols: int, seed: int = 0) -> tuple[int, list[int]]:
    """Rank and a maximal independent row set after specializing every variable.

    Specialization can only lower the rank, so a full column rank here proves
    the generic nullspace is trivial.
    """
    if not rows:
        return 0, []
    ctx = rows[0][0].context()
    rng = random.Random(seed)
    point = [rng.randrange(2**20, 2**40) for _ in range(ctx.nvars())]
    ents = []
    for j in range(ncols):
        for r in rows:
            e = r[j]
            ents.append(int(e(*point)) % MOD_PRIME if not e.is_zero() else 0)
    T = flint.nmod_mat(ncols, len(rows), ents, MOD_PRIME)
    R, rank = T.rref()
    indep = []
    col = 0
    for i in range(rank):
        while int(R[i, col]) == 0:
            col += 1
        indep.append(col)
    return rank, indep


def cleared_rows(M: RatMatrix) -> list[list[MultiPoly]]:
    out = []
    for row in M.entries:
        den = lcm_denominator(row)
        if den is None:
            continue
        out.append([f.num * (den / f.den) for f in row])
    return out


def _single_variable(rows) -> int | None:
    """Index of the only variable occurring in ``rows``; 0 for constant rows, None if several."""
    used = set()
    for r in rows:
        for e in r:
            if not e.is_zero():
                used.update(i for i, d in enumerate(e.degrees()) if d > 0)
                if len(used) > 1:
                    return None
    return used.pop() if used else 0


def _modular_basis(rows, ncols, rank, check, deadline) -> list[list[MultiPoly]] | None:
    """Kernel basis of a univariate system by evaluation/interpolation modulo primes.

    ``check`` decides whether a lifted candidate is a genuine kernel basis;
    a few candidates are tried before giving up with None.
    """
    from .modular import kernel_candidates

    if rank == ncols:
        return []
    vi = _single_variable(rows)
    if vi is None:
        return None
    ctx = rows[0][0].context()
    zero = [0] * ctx.nvars()

    def poly(cs):
        terms = {}
        for e, c in enumerate(cs):
            if c:
                x = list(zero)
                x[vi] = e
                terms[tuple(x)] = c
        return ctx.from_dict(terms)

    for tries, cand in enumerate(kernel_candidates(rows, ncols, vi, rank, deadline)):
        basis = [_normalize_vector([poly(cs) for cs in vec]) for vec in cand]
        if check(basis):
            return basis
        if tries >= 3:
            break
    return None


def poly_nullspace(rows: list[list[MultiPoly]], ncols: int, method: str = "auto",
                   deadline: float | None = None, prefilter: bool = True) -> list[list[MultiPoly]]:
    """Kernel basis over the fraction field for a matrix given by polynomial rows.

    ``method`` is ``primitive`` or ``bareiss`` (fraction-free elimination),
    ``modular`` (evaluation, interpolation and lifting from word-size primes;
    univariate systems only) or ``auto`` (modular when applicable, else
    primitive).
    Every returned vector is checked against all rows.  Returns None when
    no row is nonzero, since then every vector is in the kernel.
    """
    if method not in ("auto", "modular", "primitive", "bareiss"):
        raise DomainError(f"unknown nullspace method {method!r}")
    rows = [r for r in rows if any(not e.is_zero() for e in r)]
    if not rows:
        return None
    rank, indep = modular_profile(rows, ncols)
    if prefilter and rank == ncols:
        return []
    work = [rows[i] for i in indep] if prefilter else rows

    def valid(basis):
        return all(_dot_is_zero(r, v) for r in rows for v in basis)

    def checked(basis):
        return basis if basis is not None and valid(basis) else None

    basis = None
    if method in ("auto", "modular"):
        basis = _modular_basis(work, ncols, rank, valid, deadline)
        if basis is None and method == "modular":
            raise DomainError("modular route not applicable to this system")
    if basis is None:
        elim = "bareiss" if method == "bareiss" else "primitive"
        basis = checked(_basis_from_echelon(eliminate(work, ncols, elim, deadline), ncols))
        if basis is None and work is not rows:
            basis = _basis_from_echelon(eliminate(rows, ncols, elim, deadline), ncols)
    return basis


def nullspace(M: RatMatrix, method: str = "auto", deadline: float | None = None,
              prefilter: bool = True) -> list[tuple[RatFunc, ...]]:
    """Basis of the right nullspace of ``M`` over the rational-function field.

    Basis vectors have coprime polynomial entries and a positive leading
    coefficient in their first nonzero entry.  With ``prefilter`` a rank
    computation at a random point short-circuits full-rank systems and picks
    the independent rows to work with; the result is always checked against
    every row.
    """
    ncols = M.cols
    if ncols == 0:
        return []
    rows = cleared_rows(M)
    basis = poly_nullspace(rows, ncols, method, deadline, prefilter) if rows else None
    if basis is None:
        ctx = next(e.ctx for r in M.entries for e in r) if M.rows else None
        if ctx is None:
            ctx = ring()
        one = ctx.constant(1)
        return [tuple(RatFunc(one if j == f else one * 0) for j in range(ncols)) for f in range(ncols)]
    return [tuple(RatFunc(e) for e in v) for v in basis]
