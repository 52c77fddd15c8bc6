import math
from fractions import Fraction

import mpmath
import pytest

from celinesum.asymptotics import estimate_growth, generate_terms, richardson
from celinesum.errors import DomainError
from celinesum.operators import parse_operator


def test_richardson_removes_inverse_powers():
    ns = list(range(100, 110))
    with mpmath.workdps(40):
        vals = [mpmath.mpf(2) + mpmath.mpf(1) / n + mpmath.mpf(3) / n ** 2 for n in ns]
        assert abs(richardson(vals, ns, 3) - 2) < 1e-30


def test_central_binomial():
    # C(2n, n) ~ 4^n / sqrt(pi n) (1 - 1/(8n) + 1/(128 n^2) + ...)
    fit = estimate_growth(parse_operator("(n+1)*N - (4*n+2)"), [1], 2000)
    assert fit.conclusive
    assert abs(fit.r - 4) < 1e-8
    assert abs(fit.theta + 0.5) < 1e-4 and fit.theta_used == Fraction(-1, 2)
    assert abs(fit.c - 1 / math.sqrt(math.pi)) < 1e-10
    assert abs(fit.corrections[0] + Fraction(1, 8)) < 1e-8
    assert abs(fit.corrections[1] - Fraction(1, 128)) < 1e-6


def test_fit_recovers_a_known_closed_form():
    # x_n = 3^n (n+1)(n+2) = 3^n n^2 (1 + 3/n + 2/n^2) exactly
    op = parse_operator("(n+1)*N - 3*(n+3)")
    x = generate_terms(op, [2], 30)
    assert x == [3 ** n * (n + 1) * (n + 2) for n in range(31)]
    fit = estimate_growth(op, [2], 1000)
    assert fit.r_used == 3 and fit.theta_used == 2
    assert abs(fit.c - 1) < 1e-12
    assert [float(b) for b in fit.corrections[:2]] == pytest.approx([3, 2], abs=1e-8)
    assert abs(fit.corrections[2]) < 1e-8


def test_negative_sequences_keep_their_sign():
    fit = estimate_growth(parse_operator("N - 2"), [-3], 200)
    assert fit.c == pytest.approx(-3)


def test_inconclusive_cases():
    assert not estimate_growth(parse_operator("N + 2"), [1], 200).conclusive
    assert not estimate_growth(parse_operator("N^2 - 1"), [1, 0], 200).conclusive
    assert not estimate_growth(parse_operator("(n-150)*N - 1"), [1], 300).conclusive


def test_bad_ranges():
    with pytest.raises(DomainError):
        estimate_growth(parse_operator("N - 2"), [1], 10, n_min=9)


def test_report_and_record():
    fit = estimate_growth(parse_operator("N - 2"), [1], 100)
    rec = fit.to_record()
    assert rec["r"] == pytest.approx(2) and rec["conclusive"]
    assert "r     = 2" in fit.report()
