from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from celinesum import arith
from celinesum.arith import RatFunc
from celinesum.errors import DomainError, TermSyntaxError
from celinesum.operators import (RecOperator, equal_up_to_unit, integer_roots, is_normalized, normalize,
                                 operator_annihilates, parse_operator, to_record, to_text)

CTX = arith.ring(("m",))

coeff_polys = st.dictionaries(st.tuples(st.integers(0, 3), st.just(0), st.integers(0, 1)),
                              st.integers(-9, 9), max_size=3).map(
    lambda d: RatFunc(CTX.from_dict({e: c for e, c in d.items() if c})))
operators = st.lists(coeff_polys, min_size=1, max_size=5).filter(
    lambda cs: not cs[-1].is_zero()).map(lambda cs: RecOperator(tuple(cs)))


@settings(max_examples=200, deadline=None)
@given(operators)
def test_print_parse_round_trip(op):
    norm = normalize(op)
    again = parse_operator(to_text(norm), params=("m",))
    assert normalize(again) == norm
    assert to_text(normalize(again)) == to_text(norm)


@settings(max_examples=200, deadline=None)
@given(operators, st.sampled_from([-3, -1, 2, Fraction(1, 2)]))
def test_normalize_idempotent_and_unit_invariant(op, unit):
    norm = normalize(op)
    assert is_normalized(norm)
    scaled = RecOperator(tuple(c * unit for c in op.coeffs))
    assert normalize(scaled) == norm
    assert equal_up_to_unit(op, scaled)


def test_text_format():
    op = parse_operator("-n*N^2 + (2*n - 1)*N + 3*n - 3")
    assert to_text(normalize(op)) == "(n)*N^2 + (-2*n+1)*N + (-3*n+3)"
    assert to_text(normalize(parse_operator("N^2 - 3*N + 1"))) == "N^2 + (-3)*N + (1)"


def test_rational_coefficients_are_cleared():
    op = normalize(parse_operator("N/(n+1) - 1/(n+2)"))
    assert to_text(op) == "(n+2)*N + (-n-1)"


def test_right_factor_n_is_removed():
    # n*N^2 - N  =  ((n) N - 1) N  ->  ((n-1) N - 1) after the shift
    op = normalize(parse_operator("n*N^2 - N"))
    assert op.shift_removed == 1
    assert to_text(op) == "(n-1)*N + (-1)"


def test_record_schema():
    rec = to_record(normalize(parse_operator("(n+1)*N - 2*n")))
    assert list(rec) == ["var", "order", "coeffs", "text"]
    assert rec["order"] == 1
    assert rec["coeffs"][1] == [["n", 1], ["1", 1]]


def test_parse_errors():
    with pytest.raises(TermSyntaxError):
        parse_operator("N^2 - ")
    with pytest.raises(TermSyntaxError):
        parse_operator("1/N")
    with pytest.raises(DomainError):
        parse_operator("N - N")
    with pytest.raises((TermSyntaxError, DomainError)):
        parse_operator("N - x")


def test_annihilation_report():
    op = parse_operator("N^2 - N - 1")
    fib = [0, 1]
    for _ in range(20):
        fib.append(fib[-1] + fib[-2])
    assert operator_annihilates(op, fib, range(15)).holds
    bad = fib[:5] + [99] + fib[6:]
    rep = operator_annihilates(op, bad, range(15))
    assert not rep.holds and rep.failures[0][0] == 3


def test_singular_points_are_skipped():
    # (n-2) x_{n+1} = (n+1) x_n leaves x_3 free and fails to hold at n = 2
    op = parse_operator("(n-2)*N - (n+1)")
    x = [2, -1, 2, 5, 20]
    rep = operator_annihilates(op, x, range(4))
    assert rep.holds and rep.skipped == [2]


def test_integer_roots():
    f = RatFunc(CTX.from_dict({(2, 0, 0): 1, (1, 0, 0): -1, (0, 0, 0): -6}))  # n^2 - n - 6
    assert integer_roots(f, "n") == [-2, 3]
