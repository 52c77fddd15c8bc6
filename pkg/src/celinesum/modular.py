"""Kernels of univariate polynomial matrices by evaluation and interpolation.

The matrix is evaluated at many points modulo word-size primes; each
evaluated kernel is read off a reduced echelon form, the entries are
recovered as rational functions by interpolation and rational
reconstruction, and the coefficients are lifted to Q by Chinese remaindering
and rational number reconstruction.  Callers must check the lifted vectors
exactly; this module only produces candidates.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction
from math import gcd, isqrt

import flint
import numpy as np

from .errors import AttemptTimeout

PRIME_START = 2**31 - 1
MARGIN = 6  # extra points demanded beyond the reconstructed degrees
MAX_PRIMES = 80
MAX_POINTS = 4096


def _check(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise AttemptTimeout("modular kernel computation exceeded its time budget")


def primes(start: int = PRIME_START):
    p = start
    while p > 2**29:
        if flint.fmpz(p).is_prime():
            yield p
        p -= 2


class _Dense:
    """Coefficient tensor ``C[r, c, i]`` of the polynomial matrix (object ints)."""

    def __init__(self, rows, vi: int):
        self.R, self.C = len(rows), len(rows[0])
        deg = max((e.degrees()[vi] for r in rows for e in r if not e.is_zero()), default=0)
        t = np.zeros((self.R, self.C, deg + 1), dtype=object)
        for a, r in enumerate(rows):
            for b, e in enumerate(r):
                for exps, c in e.to_dict().items():
                    t[a, b, exps[vi]] = int(c)
        self.obj = t

    def reduce(self, p: int) -> np.ndarray:
        return (self.obj % p).astype(np.int64)

    @staticmethod
    def evaluate(cp: np.ndarray, t: int, p: int) -> np.ndarray:
        acc = cp[:, :, -1].copy()
        for i in range(cp.shape[2] - 2, -1, -1):
            acc = (acc * t + cp[:, :, i]) % p
        return acc


def _echelon(A: np.ndarray, p: int):
    M = flint.nmod_mat(A.shape[0], A.shape[1], A.ravel().tolist(), p)
    R, rank = M.rref()
    piv = []
    col = 0
    for i in range(rank):
        while int(R[i, col]) == 0:
            col += 1
        piv.append(col)
    return rank, tuple(piv), R


def _interpolate(xs: list[int], ys: list[int], p: int) -> flint.nmod_poly:
    """Newton interpolation through ``(xs[i], ys[i])`` modulo ``p``."""
    n = len(xs)
    c = [y % p for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            c[i] = (c[i] - c[i - 1]) * pow(xs[i] - xs[i - j], -1, p) % p
    P = flint.nmod_poly([c[-1]], p)
    for i in range(n - 2, -1, -1):
        P = P * flint.nmod_poly([-xs[i] % p, 1], p) + c[i]
    return P


def _ratrecon(f, M, num_bound: int):
    """``N/D = f mod M`` with ``deg N <= num_bound`` and D monic, or None."""
    p = M.modulus()
    r0, r1 = M, f
    s0, s1 = flint.nmod_poly([0], p), flint.nmod_poly([1], p)
    while not r1.is_zero() and r1.degree() > num_bound:
        q, r = divmod(r0, r1)
        r0, r1, s0, s1 = r1, r, s1, s0 - q * s1
    if s1.is_zero() or r1.gcd(s1).degree() > 0:
        return None
    inv = pow(int(s1.leading_coefficient()), -1, p)
    return r1 * inv, s1 * inv


class _Unlucky(Exception):
    pass


def _values(cp, ncols, p, rank, pivots, rng, count, deadline):
    """Kernel vectors at ``count`` good points: (points, {free: [values per point]}, pivots)."""
    pts, vals = [], []
    seen = set()
    tries = 0
    while len(pts) < count:
        _check(deadline)
        tries += 1
        if tries > 4 * count + 50:
            raise _Unlucky("too many degenerate evaluation points")
        t = rng.randrange(1, p)
        if t in seen:
            continue
        seen.add(t)
        r, piv, R = _echelon(_Dense.evaluate(cp, t, p), p)
        if r != rank:
            continue
        if pivots is None:
            pivots = piv
        if piv != pivots:
            if piv < pivots:  # a smaller pivot set means the earlier points were special
                pivots, pts, vals = piv, [], []
            else:
                continue
        pts.append(t)
        vals.append(R)
    table = {}
    for f in range(ncols):
        if f not in pivots:
            table[f] = [[(-int(R[i, f])) % p for i in range(len(pivots))] for R in vals]
    return pts, table, pivots


def _reconstruct(pts, vals, m, p, deadline):
    """``(P_0..P_{m-1}, Q)`` with ``v_i = P_i/Q`` at every point and Q monic; None if under-sampled."""
    T = len(pts)
    M = flint.nmod_poly([1], p)
    for t in pts:
        M = M * flint.nmod_poly([-t % p, 1], p)
    Q = flint.nmod_poly([1], p)
    out = []
    for i in range(m):
        _check(deadline)
        ys = [row[i] * int(Q(t)) % p for row, t in zip(vals, pts)]
        P = _interpolate(pts, ys, p)
        if P.degree() + Q.degree() + MARGIN >= T:
            rr = _ratrecon(P, M, T // 2 - 1)
            if rr is None:
                return None
            N, Dn = rr
            if N.degree() + Dn.degree() + Q.degree() + MARGIN >= T:
                return None
            Q = Q * Dn
            P = N
        out.append((P, Q))
    return [P * (Q // q) for P, q in out], Q


def _solve_prime(cp, ncols, p, rank, pivots, rng, count, deadline):
    """Every kernel vector modulo ``p``, doubling the point count until reconstruction succeeds."""
    while count <= MAX_POINTS:
        try:
            pts, table, piv = _values(cp, ncols, p, rank, pivots, rng, count, deadline)
        except _Unlucky:
            return None
        recs = {}
        for f, vals in table.items():
            rec = _reconstruct(pts, vals, len(piv), p, deadline)
            if rec is None:
                break
            recs[f] = rec
        if len(recs) == len(table):
            return piv, recs
        count *= 2
    return None


def _rational_reconstruct(a: int, m: int) -> Fraction | None:
    """``u/v`` with ``|u|, v <= sqrt(m/2)`` and ``u = a*v mod m``, or None."""
    bound = isqrt(m // 2)
    r0, r1, s0, s1 = m, a % m, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1, s0, s1 = r1, r0 - q * r1, s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


def _crt(r1: int, m1: int, r2: int, m2: int) -> int:
    if m1 == 1:
        return r2 % m2
    return r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)


def kernel_candidates(rows, ncols: int, vi: int, rank: int, deadline: float | None = None,
                      seed: int = 1):
    """Candidate kernel bases of a univariate polynomial matrix whose row rank is ``rank``.

    Yields a new candidate whenever two successive primes give the same
    lifted coefficients.  A candidate lists, for each free column, the
    integer coefficient list (ascending degree) of every column entry.
    """
    dense = _Dense(rows, vi)
    rng = random.Random(seed)
    count = 32
    pivots = None
    signature = None
    residues: dict = {}
    modulus = 1
    previous = None
    for used, p in enumerate(primes()):
        if used >= MAX_PRIMES:
            return
        _check(deadline)
        got = _solve_prime(dense.reduce(p), ncols, p, rank, pivots, rng, count, deadline)
        if got is None:
            continue
        piv, recs = got
        if pivots is not None and piv != pivots:
            continue
        pivots = piv
        sig = tuple((f, tuple(P.degree() for P in Ps) + (Q.degree(),)) for f, (Ps, Q) in sorted(recs.items()))
        if signature is not None and sig != signature:
            if sig < signature:
                continue  # degree drop: this prime is unlucky
            residues, modulus, previous = {}, 1, None  # earlier primes were unlucky
        signature = sig
        for f, (Ps, Q) in recs.items():
            for j, P in enumerate(list(Ps) + [Q]):
                for e, c in enumerate(P.coeffs()):
                    residues[(f, j, e)] = _crt(residues.get((f, j, e), 0), modulus, int(c), p)
        modulus *= p
        count = max(32, 2 * max(max(degs) for _, degs in sig) + 4 * MARGIN)
        lifted = {}
        for key, v in residues.items():
            q = _rational_reconstruct(v, modulus)
            if q is None:
                lifted = None
                break
            lifted[key] = q
        if lifted is not None and lifted == previous:
            yield _assemble(lifted, pivots, ncols)
        previous = lifted


def _assemble(lifted: dict, pivots, ncols: int):
    frees = sorted({f for f, _, _ in lifted})
    basis = []
    for f in frees:
        cols = list(pivots) + [f]
        vec = {c: [] for c in range(ncols)}
        for j, c in enumerate(cols):
            degs = sorted(e for (g, jj, e) in lifted if g == f and jj == j)
            vec[c] = [lifted[(f, j, e)] for e in degs]
        den = 1
        for cs in vec.values():
            for q in cs:
                den = den * q.denominator // gcd(den, q.denominator)
        basis.append([[int(q * den) for q in vec[c]] for c in range(ncols)])
    return basis
