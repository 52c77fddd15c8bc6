"""Brute-force values and combinatorial counts used to check recurrences.

Nothing here touches the ansatz machinery: sums are evaluated term by term
and king walks are counted by dynamic programming on the lattice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import arith
from .arith import RatFunc
from .errors import DomainError
from .hyperterm import HyperTerm
from .operators import RecOperator, integer_roots, operator_annihilates
from .sequences import HoloSeq

KING_CELL_LIMIT = 50_000_000


def _lift(v, ctx):
    return v.to_ring(ctx) if isinstance(v, RatFunc) else v


def brute_sum(a: HoloSeq, H: HyperTerm, d: int, n_max: int) -> list:
    """``x_n = sum_{k=0}^{n} a_k^d H(n,k)`` for ``n = 0..n_max``.

    The range ``k = 0..n`` relies on ``H`` vanishing outside it, which
    binomial factors guarantee.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    ctx = arith.join_rings(a.ctx, H.ctx)
    avals = [_lift(v, ctx) for v in a.values(n_max)]
    powers = [v ** d if d else Fraction(1) for v in avals]
    out = []
    for n in range(n_max + 1):
        acc = Fraction(0)
        for k in range(n + 1):
            h = H.eval(n, k)
            if h != 0:
                acc = acc + powers[k] * _lift(h, ctx)
        if isinstance(acc, RatFunc) and acc.is_constant():
            acc = acc.value()
        out.append(acc)
    return out


def king_walk_count(dim: int, n: int) -> int:
    """Closed walks of ``n`` king steps on Z^dim starting at the origin."""
    if dim < 1 or n < 0:
        raise DomainError("need dim >= 1 and n >= 0")
    R = n // 2  # farther points can never get back in time
    side = 2 * R + 1
    if side ** dim > KING_CELL_LIMIT:
        raise DomainError(f"grid of {side}^{dim} cells exceeds the limit of {KING_CELL_LIMIT}")
    grid = np.zeros((side,) * dim, dtype=object)
    grid[(R,) * dim] = 1
    for _ in range(n):
        box = grid
        for axis in range(dim):
            s = box.copy()
            lo = [slice(None)] * dim
            hi = [slice(None)] * dim
            lo[axis], hi[axis] = slice(0, side - 1), slice(1, side)
            s[tuple(hi)] += box[tuple(lo)]
            s[tuple(lo)] += box[tuple(hi)]
            box = s
        grid = box - grid  # all 3^dim offsets minus staying put
    return int(grid[(R,) * dim])


def trinomial_central(kmax: int) -> list[int]:
    """Middle coefficient of ``(1+z+z^2)^k`` for ``k = 0..kmax`` by direct expansion."""
    if kmax < 0:
        raise DomainError("kmax must be >= 0")
    poly = [1]
    out = [1]
    for k in range(1, kmax + 1):
        nxt = [0] * (len(poly) + 2)
        for i, c in enumerate(poly):
            nxt[i] += c
            nxt[i + 1] += c
            nxt[i + 2] += c
        poly = nxt
        out.append(poly[k])
    return out


@dataclass
class VerificationReport:
    holds: bool
    n_check: int
    valid_from: int
    failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    checked: list = field(default_factory=list)

    def __bool__(self):
        return self.holds

    def to_record(self) -> dict:
        return {"holds": self.holds, "n_check": self.n_check, "valid_from": self.valid_from,
                "failures": [[n, str(r)] for n, r in self.failures], "skipped": self.skipped}


def check_operator(op: RecOperator, x: list, n_check: int) -> VerificationReport:
    """Exact annihilation check of ``op`` on ``x`` for ``n = 0..n_check``.

    Dropping a right factor ``N`` during normalization moves the start of
    validity up by one per factor, so residuals below ``op.shift_removed``
    count as skipped rather than failed.
    """
    roots = [r for r in integer_roots(op.leading, op.var) if r >= 0]
    n0 = max([r + 1 for r in roots] + [op.shift_removed, 0])
    rep = operator_annihilates(op, x, range(n_check + 1))
    early = [n for n, _ in rep.failures if n < op.shift_removed]
    failures = [(n, r) for n, r in rep.failures if n >= op.shift_removed]
    return VerificationReport(not failures, n_check, n0, failures,
                              sorted(rep.skipped + early), rep.checked)


def verify_operator(op: RecOperator, problem, n_check: int) -> VerificationReport:
    """Brute-force ``x_n`` for ``problem`` and check ``op`` on ``0..n_check``."""
    x = brute_sum(problem.a, problem.H, problem.d, n_check + op.order)
    return check_operator(op, x, n_check)


def verify_result(result, problem, n_check: int = 30) -> VerificationReport:
    return verify_operator(result.operator, problem, n_check)
