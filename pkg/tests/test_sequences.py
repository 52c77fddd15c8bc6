from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from celinesum import arith
from celinesum.arith import RatFunc
from celinesum.errors import SingularRecurrenceError
from celinesum.operators import parse_operator
from celinesum.sequences import (HoloSeq, central_trinomial, constant_one, fibonacci, m_fibonacci, seq_eval,
                                 shift_reduce, unroll)
from celinesum.oracle import trinomial_central


def test_standard_sequences():
    assert seq_eval(fibonacci(), 10) == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    assert seq_eval(constant_one(), 4) == [1] * 5
    assert seq_eval(central_trinomial(), 30) == trinomial_central(30)
    pell = m_fibonacci().subs(m=2)
    assert seq_eval(pell, 5) == [0, 1, 2, 5, 12, 29]


def test_symbolic_parameter_values():
    vals = m_fibonacci().values(3)
    m = RatFunc.var(vals[2].ctx, "m")
    assert vals[2] == m and vals[3] == m * m + 1


def test_indexing_is_memoized():
    s = fibonacci()
    assert s[30] == 832040
    assert s.values(5) == [0, 1, 1, 2, 3, 5]


def test_singular_recurrence():
    rec = parse_operator("(k-3)*N - 1", var="k")
    with pytest.raises(SingularRecurrenceError) as exc:
        unroll(rec, [1], 10)
    assert exc.value.index == 4


def _reduction_holds(seq, rec, J, base):
    red = shift_reduce(rec, J)
    x = seq.values(base + J + rec.order)
    for j, row in enumerate(red):
        lhs = x[base + j]
        rhs = sum(c(k=base) * x[base + i] for i, c in enumerate(row))
        if lhs != rhs:
            return False
    return True


@pytest.mark.parametrize("seq", [fibonacci(), central_trinomial(), m_fibonacci().subs(m=3)],
                         ids=["fibonacci", "trinomial", "m3"])
def test_shift_reduce_pointwise(seq):
    rec = seq.rec
    for base in range(20):
        assert _reduction_holds(seq, rec, 7, base)


recurrences = st.lists(st.integers(-3, 3), min_size=2, max_size=4).filter(lambda c: c[-1] != 0)


@settings(max_examples=40, deadline=None)
@given(recurrences, st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_shift_reduce_random_c_finite(coeffs, init):
    text = " + ".join(f"({c})*N^{i}" for i, c in enumerate(coeffs))
    rec = parse_operator(text, var="k")
    seq = HoloSeq(rec, init[:rec.order])
    for base in range(20):
        assert _reduction_holds(seq, rec, 5, base)


def test_holonomic_shift_reduce_has_rational_entries():
    rec = central_trinomial().rec
    red = shift_reduce(rec, 3)
    assert not red[2][1].is_poly()
