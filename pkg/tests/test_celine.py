import json

import pytest

from celinesum.celine import (CelineProblem, a_monomials, build_system, certificate_residual,
                              extract_recurrence, findrec, solve_ansatz, valid_from)
from celinesum.errors import DomainError, RecurrenceNotFound
from celinesum.hyperterm import parse_term
from celinesum.operators import equal_up_to_unit, parse_operator, to_text
from celinesum.oracle import brute_sum
from celinesum.sequences import constant_one, fibonacci, unroll

CLASSICAL = [
    ("binomial(n,k)", "N - 2"),
    ("binomial(n,k)^2", "(n+1)*N - (4*n+2)"),
    ("binomial(n-k,k)", "N^2 - N - 1"),
    ("binomial(n,k)*power(2,k)", "N - 3"),
    ("binomial(n,k)*k", "n*N - 2*(n+1)"),
]


@pytest.mark.parametrize("term,expected", CLASSICAL, ids=[t for t, _ in CLASSICAL])
def test_classical_celine(term, expected):
    res = findrec(CelineProblem(parse_term(term), constant_one(), 1))
    assert equal_up_to_unit(res.operator, parse_operator(expected)), to_text(res.operator)
    assert res.verification.holds


def test_franel_needs_order_three():
    # k-free recurrences of binomial(n,k)^3 with two n-shifts do not exist at
    # any J (every J adds as many rows as unknowns), so the search moves on to
    # I = 3 and returns a left multiple of the order-2 Franel operator
    problem = CelineProblem(parse_term("binomial(n,k)^3"), constant_one(), 1)
    res = findrec(problem)
    assert res.operator.order == 3 and res.I_used == 3
    x = brute_sum(problem.a, problem.H, 1, 40)
    assert all(res.operator.residual(x, n) == 0 for n in range(37))


def test_a_monomials():
    assert a_monomials(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(a_monomials(2, 4)) == 5


def test_system_and_certificate():
    H = parse_term("binomial(n,k)")
    system = build_system(H, fibonacci().rec, 1, 2, 2)
    assert system.shape[1] == 9
    cert = solve_ansatz(system)
    assert all(r.is_zero() for r in certificate_residual(system, cert))
    assert to_text(extract_recurrence(cert, 2, 2)) == "N^2 + (-3)*N + (1)"


def test_no_solution_for_small_ansatz():
    system = build_system(parse_term("binomial(n,k)^3"), constant_one().rec, 1, 1, 1)
    assert solve_ansatz(system) is None


def test_recurrence_unrolls_to_the_sum():
    problem = CelineProblem(parse_term("binomial(n,k)"), fibonacci(), 2)
    res = findrec(problem)
    x = brute_sum(problem.a, problem.H, 2, 30)
    start = max(res.valid_from, res.operator.shift_removed) + res.operator.order
    again = unroll(res.operator.with_var("k"), x[:start], 30)
    assert again == x


def test_valid_from_uses_leading_roots():
    assert valid_from(parse_operator("(n-3)*(n+1)*N - 1")) == 4
    assert valid_from(parse_operator("(n+5)*N - 1")) == 0


def test_not_found_within_bounds():
    problem = CelineProblem(parse_term("binomial(n,k)^3"), constant_one(), 1, I_max=1, J_max=1)
    with pytest.raises(RecurrenceNotFound) as exc:
        findrec(problem)
    assert not exc.value.timed_out
    assert [a.status for a in exc.value.attempts] == ["no-solution", "no-solution"]


def test_timeouts_are_reported():
    problem = CelineProblem(parse_term("binomial(n,k)"), fibonacci(), 3, I_max=2, timeout_seconds=1e-6)
    with pytest.raises(RecurrenceNotFound) as exc:
        findrec(problem)
    assert exc.value.timed_out


def test_checkpoint_skips_failed_pairs(tmp_path):
    path = str(tmp_path / "search.jsonl")
    H = parse_term("binomial(n,k)")
    first = findrec(CelineProblem(H, fibonacci(), 1), path)
    lines = [json.loads(x) for x in open(path)]
    assert [r["status"] for r in lines][-1] == "found"
    again = findrec(CelineProblem(H, fibonacci(), 1), path)
    skipped = [a for a in again.attempts if a.note == "from checkpoint"]
    assert len(skipped) == len(lines) - 1
    assert again.operator == first.operator
    # a different problem ignores those records
    other = findrec(CelineProblem(H, fibonacci(), 2), path)
    assert not any(a.note == "from checkpoint" for a in other.attempts)


def test_bad_problem_arguments():
    H = parse_term("binomial(n,k)")
    with pytest.raises(DomainError):
        CelineProblem(H, constant_one(), -1)
    with pytest.raises(DomainError):
        CelineProblem(H, constant_one(), 1, I_max=0)


def test_d_zero_is_the_plain_sum():
    res = findrec(CelineProblem(parse_term("binomial(n,k)"), fibonacci(), 0))
    assert equal_up_to_unit(res.operator, parse_operator("N - 2"))
