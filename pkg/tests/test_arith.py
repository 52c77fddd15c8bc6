from fractions import Fraction

import flint
import pytest
from hypothesis import given, settings, strategies as st

from celinesum import arith
from celinesum.arith import RatFunc, RatMatrix, nullspace, poly_nullspace
from celinesum.celine import select_certificate
from celinesum.errors import DomainError

CTX = arith.ring(("m",))
N, K, M = (RatFunc.var(CTX, v) for v in ("n", "k", "m"))

monomials = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
polys = st.dictionaries(monomials, st.integers(-6, 6), max_size=4).map(
    lambda d: CTX.from_dict({e: c for e, c in d.items() if c}))
nonzero_polys = polys.filter(lambda p: not p.is_zero())
ratfuncs = st.builds(RatFunc, polys, nonzero_polys)
nonzero_ratfuncs = ratfuncs.filter(lambda f: not f.is_zero())


@settings(max_examples=500, deadline=None)
@given(ratfuncs, ratfuncs, ratfuncs)
def test_field_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    assert a + 0 == a and a * 1 == a


@settings(max_examples=200, deadline=None)
@given(nonzero_ratfuncs, ratfuncs)
def test_inverse_and_division(a, b):
    assert a * a.inverse() == 1
    assert (b / a) * a == b


@settings(max_examples=100, deadline=None)
@given(ratfuncs)
def test_canonical_form(f):
    g = f.num.gcd(f.den)
    assert g.is_one()
    assert arith._positive_lead(f.den)


def test_zero_is_canonical():
    z = (N - N) / (K + 1)
    assert z.is_zero() and z.den.is_one()


def test_shift_and_subs():
    f = (N ** 2 + K) / (N + 1)
    assert f.shift(n=1) == ((N + 1) ** 2 + K) / (N + 2)
    assert f(n=1, k=3) == Fraction(4, 2)
    with pytest.raises(ZeroDivisionError):
        f.subs(n=-1)


def test_value_of_nonconstant_raises():
    with pytest.raises(DomainError):
        (N + 1).value()


def test_apply_matrix():
    one = RatFunc.const(CTX, 1)
    A = RatMatrix([[N, one], [K, N]])
    assert A.apply([one, -N]) == [RatFunc.const(CTX, 0), K - N * N]


# --------------------------------------------------------------------------------
# nullspaces
# --------------------------------------------------------------------------------

R2 = arith.ring()
n2 = R2.gens()[0]


def _rows(lists):
    return [[R2.constant(x) if isinstance(x, int) else x for x in r] for r in lists]


@pytest.mark.parametrize("method", ["modular", "primitive", "bareiss"])
def test_nullspace_small(method):
    basis = poly_nullspace(_rows([[1, 1], [2, 2]]), 2, method, prefilter=False)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] == -v[1]


@pytest.mark.parametrize("method", ["modular", "primitive", "bareiss"])
def test_nullspace_polynomial_entries(method):
    rows = _rows([[n2, n2 ** 2, 1], [0, 0, 1]])
    basis = poly_nullspace(rows, 3, method, prefilter=False)
    assert len(basis) == 1
    v = basis[0]
    assert v[2].is_zero() and v[0] + n2 * v[1] == 0


@pytest.mark.parametrize("method", ["auto", "primitive"])
def test_full_rank_has_trivial_kernel(method):
    assert poly_nullspace(_rows([[1, 0], [0, 1]]), 2, method) == []


def test_nullspace_all_zero_rows():
    assert poly_nullspace(_rows([[0, 0]]), 2) is None
    M = RatMatrix([[RatFunc.const(CTX, 0)] * 2])
    assert len(nullspace(M)) == 2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=3),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_modular_and_primitive_agree(coeffs, shifts):
    rows = [[R2.constant(c) * (n2 + s) ** (abs(c) % 3) for c, s in zip(r, shifts)] for r in coeffs]
    a = poly_nullspace(rows, 4, "modular", prefilter=False)
    b = poly_nullspace(rows, 4, "primitive", prefilter=False)
    assert (a is None) == (b is None)
    if a is None:
        return
    assert len(a) == len(b)
    for v in a:
        for r in rows:
            assert sum((e * x for e, x in zip(r, v)), R2.constant(0)) == 0


def test_rational_function_matrix():
    M = RatMatrix([[N / (N + 1), RatFunc.const(CTX, -1)]])
    (v,) = nullspace(M)
    assert M.apply(v)[0].is_zero()


def test_select_certificate_prefers_lower_order():
    # unknowns (i, j); both basis vectors induce order-2 operators, but a
    # combination drops the N^2 term; the selection must find it
    unknowns = [(0, 0), (1, 0), (2, 0)]
    one = RatFunc.const(CTX, 1)
    v1 = [one, 2 * one, N]
    v2 = [3 * one, one, -N]
    chosen = select_certificate([v1, v2], unknowns, 2)
    assert chosen[2].is_zero()
    assert not chosen[1].is_zero()
