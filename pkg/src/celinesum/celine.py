"""Recurrences for sums of powers of a recurrent sequence against a hypergeometric term.

For ``x_n = sum_k a_k^d H(n,k)`` we look for rational ``y_{i,j}(n)`` with

    sum_{i<=I, j<=J} y_{i,j}(n) * H(n+i,k+j)/H(n,k) * a_{k+j}^d == 0

identically in ``k`` and the free values ``a_k, ..., a_{k+D-1}``.  Each
``a_{k+j}`` is rewritten in that basis, the ``d``-th power is expanded
multinomially, and the coefficient of every monomial ``k^e * a^alpha`` gives
one linear equation in the ``y``.  Summing over ``k`` then yields
``(sum_i (sum_j y_{i,j}) N^i) x_n = 0``.
"""
from __future__ import annotations

import itertools
import json
import logging
import time
from dataclasses import dataclass, field
from math import factorial
from typing import Iterator

from . import arith
from .arith import RatFunc, RatMatrix
from .errors import (AttemptTimeout, DegenerateCertificateError, DomainError,
                     RecurrenceNotFound, SystemTooLargeError)
from .hyperterm import HyperTerm
from .operators import RecOperator, integer_roots, normalize, to_text
from .sequences import HoloSeq, shift_reduce

log = logging.getLogger(__name__)

DEFAULT_ROW_CAP = 20000


@dataclass
class CelineProblem:
    H: HyperTerm
    a: HoloSeq
    d: int = 1
    I_max: int = 6
    J_max: int | None = None  # None: use I + D + d for each I
    timeout_seconds: float = 60.0
    row_cap: int = DEFAULT_ROW_CAP
    method: str = "auto"
    start: tuple[int, int] = (1, 0)  # resume the search at this (I, J)

    def __post_init__(self):
        if self.d < 0:
            raise DomainError("d must be non-negative")
        if self.I_max < 1:
            raise DomainError("I_max must be at least 1")
        if self.J_max is not None and self.J_max < 0:
            raise DomainError("J_max must be non-negative")

    @property
    def D(self) -> int:
        return self.a.order

    def J_bound(self, I: int) -> int:
        return self.J_max if self.J_max is not None else I + self.D + self.d

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Search order: I ascending, then J ascending, from ``start`` on."""
        for I in range(1, self.I_max + 1):
            for J in range(0, self.J_bound(I) + 1):
                if (I, J) >= tuple(self.start):
                    yield I, J


@dataclass
class AnsatzSystem:
    I: int
    J: int
    d: int
    unknowns: list[tuple[int, int]]
    rows: list[list]  # integer polynomials in n (and parameters), one per collected monomial
    labels: list[tuple[tuple[int, ...], int]]  # (a-exponents, power of k) per row
    terms: dict  # alpha -> {(i, j): RatFunc}, the uncleared coefficient of y_{i,j}
    ctx: object

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.unknowns)

    def matrix(self) -> RatMatrix:
        return RatMatrix([[RatFunc(e) for e in r] for r in self.rows], len(self.unknowns))


@dataclass
class Attempt:
    I: int
    J: int
    status: str  # "found", "no-solution", "degenerate", "timeout", "too-large", "verification-failed"
    seconds: float
    rows: int = 0
    cols: int = 0
    note: str = ""

    def to_record(self) -> dict:
        return {"I": self.I, "J": self.J, "status": self.status, "seconds": round(self.seconds, 3),
                "rows": self.rows, "cols": self.cols, "note": self.note}


@dataclass
class CelineResult:
    operator: RecOperator
    I_used: int
    J_used: int
    certificate: dict  # (i, j) -> RatFunc in n
    valid_from: int = 0
    verification: object = None
    attempts: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def a_monomials(D: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree ``d`` in ``D`` symbols, in a fixed order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(D), d):
        alpha = [0] * D
        for m in combo:
            alpha[m] += 1
        out.append(tuple(alpha))
    return out


def _multinomial(alpha) -> int:
    r = factorial(sum(alpha))
    for x in alpha:
        r //= factorial(x)
    return r


class _Builder:
    """Caches shift-reduction and expansion pieces shared by successive (I, J) attempts."""

    def __init__(self, H: HyperTerm, rec: RecOperator, d: int):
        self.ctx = arith.join_rings(H.ctx, rec.ctx)
        self.H = H if H.ctx is self.ctx else HyperTerm(H.factors, self.ctx, H.source)
        self.rec = rec.with_var("k").to_ring(self.ctx)
        self.d = d
        self.D = self.rec.order
        self.alphas = a_monomials(self.D, d) if d > 0 else [(0,) * self.D]
        self._c: list = []
        self._power: dict = {}

    def reduced(self, J: int):
        if len(self._c) <= J:
            self._c = shift_reduce(self.rec, max(J, 2 * len(self._c)))
        return self._c

    def power_coeff(self, alpha, j) -> RatFunc:
        """Coefficient of ``a^alpha`` in ``(sum_m c[j][m] a_{k+m})^d``."""
        key = (alpha, j)
        if key not in self._power:
            c = self.reduced(j)[j]
            t = RatFunc.const(self.ctx, _multinomial(alpha))
            for m, e in enumerate(alpha):
                if e and not t.is_zero():
                    t = t * c[m] ** e
            self._power[key] = t
        return self._power[key]

    def build(self, I: int, J: int, row_cap: int, deadline: float | None) -> AnsatzSystem:
        unknowns = [(i, j) for i in range(I + 1) for j in range(J + 1)]
        col = {u: x for x, u in enumerate(unknowns)}
        ki = self.ctx.variable_to_index("k")
        zero = self.ctx.constant(0)
        rows, labels, all_terms = [], [], {}
        for alpha in self.alphas:
            terms = {}
            for (i, j) in unknowns:
                _deadline(deadline)
                t = self.power_coeff(alpha, j)
                if not t.is_zero():
                    terms[(i, j)] = t * self.H.shift_ratio(i, j)
            all_terms[alpha] = terms
            if not terms:
                continue
            den = None
            for t in terms.values():
                den = t.den if den is None else arith.poly_lcm(den, t.den)
            grouped: dict[int, dict] = {}
            for u, t in terms.items():
                num = t.num * (den / t.den)
                for exps, c in num.to_dict().items():
                    e = list(exps)
                    kp = e[ki]
                    e[ki] = 0
                    grouped.setdefault(kp, {}).setdefault(u, {})[tuple(e)] = c
            for kp in sorted(grouped):
                g = grouped[kp]
                row = [zero] * len(unknowns)
                for u, poly in g.items():
                    row[col[u]] = self.ctx.from_dict(poly)
                rows.append(row)
                labels.append((alpha, kp))
            if len(rows) > row_cap:
                raise SystemTooLargeError(
                    f"ansatz at (I,J)=({I},{J}) has more than {row_cap} rows for {len(unknowns)} unknowns")
        return AnsatzSystem(I, J, self.d, unknowns, rows, labels, all_terms, self.ctx)


def _deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise AttemptTimeout("attempt exceeded its time budget")


def build_system(H: HyperTerm, rec: RecOperator, d: int, I: int, J: int,
                 row_cap: int = DEFAULT_ROW_CAP, deadline: float | None = None) -> AnsatzSystem:
    """Linear system for ``y_{i,j}``, one row per monomial ``k^e * a^alpha``."""
    return _Builder(H, rec, d).build(I, J, row_cap, deadline)


def certificate_residual(system: AnsatzSystem, cert: dict) -> list[RatFunc]:
    """The collected expression ``sum y_{i,j} * coeff`` for each a-monomial (all zero for a valid certificate)."""
    out = []
    for alpha, terms in system.terms.items():
        acc = RatFunc.const(system.ctx, 0)
        for u, t in terms.items():
            y = cert.get(u)
            if y is not None and not y.is_zero():
                acc = acc + y * t
        out.append(acc)
    return out


def _operator_sums(vec: list[RatFunc], unknowns, I: int) -> list[RatFunc]:
    ctx = vec[0].ctx
    sums = [RatFunc.const(ctx, 0) for _ in range(I + 1)]
    for (i, _), y in zip(unknowns, vec):
        if not y.is_zero():
            sums[i] = sums[i] + y
    return sums


def select_certificate(basis: list[list[RatFunc]], unknowns, I: int) -> list[RatFunc] | None:
    """Vector in the span of ``basis`` whose induced operator has the lowest order.

    Elimination on the induced coefficient sums, highest power of N first;
    the last pivot row found has the lowest order in the whole span.  Returns
    None when every vector of the span induces the zero operator.
    """
    records = [(_operator_sums(v, unknowns, I), list(v)) for v in basis]
    best = None
    for i in range(I, -1, -1):
        cands = [r for r in records if not r[0][i].is_zero()]
        if not cands:
            continue
        piv = min(cands, key=lambda r: (r[0][i].num.total_degree(), records.index(r)))
        rest = []
        for r in records:
            if r is piv:
                continue
            f = r[0][i]
            if f.is_zero():
                rest.append(r)
                continue
            q = f / piv[0][i]
            rest.append(([a - q * b for a, b in zip(r[0], piv[0])], [a - q * b for a, b in zip(r[1], piv[1])]))
        records = rest
        best = piv
    return None if best is None else best[1]


def _clear(vec: list[RatFunc]) -> list[RatFunc]:
    den = arith.lcm_denominator(vec)
    polys = [v.num * (den / v.den) for v in vec]
    g = arith.poly_gcd_all(polys)
    polys = [p / g for p in polys]
    first = next(p for p in polys if not p.is_zero())
    if first.leading_coefficient() < 0:
        polys = [-p for p in polys]
    return [RatFunc(p) for p in polys]


def solve_ansatz(system: AnsatzSystem, method: str = "auto", deadline: float | None = None) -> dict | None:
    """A certificate ``{(i, j): y_{i,j}(n)}`` of lowest induced order, or None."""
    if not system.rows:
        raise DegenerateCertificateError("empty system: every assignment is a certificate")
    basis = arith.poly_nullspace(system.rows, len(system.unknowns), method, deadline)
    if not basis:
        return None
    vecs = [[RatFunc(e) for e in v] for v in basis]
    chosen = select_certificate(vecs, system.unknowns, system.I)
    if chosen is None:
        raise DegenerateCertificateError(f"all {len(vecs)} kernel vectors induce the zero operator")
    chosen = _clear(chosen)
    return dict(zip(system.unknowns, chosen))


def extract_recurrence(cert: dict, I: int, J: int, var: str = "n") -> RecOperator:
    """Normalized ``sum_i (sum_j y_{i,j}) N^i``."""
    ctx = next(iter(cert.values())).ctx
    sums = [RatFunc.const(ctx, 0) for _ in range(I + 1)]
    for (i, j), y in cert.items():
        if i <= I and j <= J and not y.is_zero():
            sums[i] = sums[i] + y
    if all(s.is_zero() for s in sums):
        raise DegenerateCertificateError("certificate induces the zero operator")
    return normalize(RecOperator(tuple(sums), var))


def valid_from(op: RecOperator) -> int:
    """One past the largest non-negative integer root of the leading coefficient (0 if none)."""
    roots = [r for r in integer_roots(op.leading, op.var) if r >= 0]
    return max(roots) + 1 if roots else 0


def _verification_range(I_used: int) -> int:
    return max(20, 2 * I_used + 5)


def findrec(problem: CelineProblem, checkpoint: str | None = None) -> CelineResult:
    """Search (I, J) pairs in order and return the first verified recurrence.

    With ``checkpoint`` every finished attempt is appended to that JSON-lines
    file, and pairs already recorded there as unsuccessful are skipped, so a
    long search can be resumed with raised bounds.
    """
    from . import oracle

    key = _fingerprint(problem)
    done = _load_checkpoint(checkpoint, key)
    builder = _Builder(problem.H, problem.a.rec, problem.d)
    attempts: list[Attempt] = []
    any_timeout = any_verify_fail = False
    for I, J in problem.pairs():
        if (I, J) in done:
            attempts.append(Attempt(I, J, done[(I, J)], 0.0, note="from checkpoint"))
            continue
        t0 = time.monotonic()
        deadline = t0 + problem.timeout_seconds if problem.timeout_seconds else None
        att = Attempt(I, J, "no-solution", 0.0)
        result = None
        try:
            system = builder.build(I, J, problem.row_cap, deadline)
            att.rows, att.cols = system.shape
            cert = solve_ansatz(system, problem.method, deadline)
            if cert is not None:
                t_solve = time.monotonic() - t0
                residual = certificate_residual(system, cert)
                if any(not r.is_zero() for r in residual):
                    raise AssertionError("certificate does not annihilate the collected expression")
                op = extract_recurrence(cert, I, J)
                n_check = _verification_range(I)
                report = oracle.verify_operator(op, problem, n_check)
                if report.holds:
                    att.status = "found"
                    result = CelineResult(op, I, J, cert, report.valid_from, report, attempts,
                                          {"rows": att.rows, "cols": att.cols, "solve_seconds": t_solve,
                                           "shift_removed": op.shift_removed,
                                           "generic_parameters": list(op.params())})
                else:
                    att.status = "verification-failed"
                    att.note = f"fails at n={[n for n, _ in report.failures][:5]}"
                    any_verify_fail = True
        except AttemptTimeout:
            att.status = "timeout"
            any_timeout = True
        except SystemTooLargeError as e:
            att.status, att.note = "too-large", str(e)
        except DegenerateCertificateError as e:
            att.status, att.note = "degenerate", str(e)
        att.seconds = time.monotonic() - t0
        attempts.append(att)
        _save_checkpoint(checkpoint, att, key)
        log.info("attempt I=%d J=%d: %s in %.2fs (%dx%d)", I, J, att.status, att.seconds, att.rows, att.cols)
        if result is not None:
            result.diagnostics["seconds"] = sum(a.seconds for a in attempts)
            return result
    raise RecurrenceNotFound(
        f"no recurrence found with I <= {problem.I_max}", attempts, any_timeout, any_verify_fail)


def _fingerprint(problem: CelineProblem) -> str:
    """What determines the ansatz systems; initial values and bounds do not."""
    return f"{problem.H.to_text()} | {to_text(problem.a.rec)} | d={problem.d}"


def _load_checkpoint(path: str | None, key: str) -> dict:
    """Unsuccessful (I, J) pairs recorded for the same problem."""
    done = {}
    if not path:
        return done
    try:
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    if rec.get("problem") == key and rec["status"] in ("no-solution", "degenerate"):
                        done[(rec["I"], rec["J"])] = rec["status"]
    except FileNotFoundError:
        pass
    return done


def _save_checkpoint(path: str | None, att: Attempt, key: str):
    if path:
        with open(path, "a") as fh:
            fh.write(json.dumps({"problem": key, **att.to_record()}) + "\n")
