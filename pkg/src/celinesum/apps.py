"""Drivers for the worked applications: transforms, king walks, chained sums, asymptotics."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import oracle
from .arith import RatFunc
from .asymptotics import AsymptoticFit, estimate_growth
from .celine import CelineProblem, CelineResult, findrec
from .errors import DomainError, VerificationError
from .hyperterm import HyperTerm, parse_term
from .operators import RecOperator, parse_operator
from .parsing import parse_rational
from .sequences import HoloSeq, central_trinomial, constant_one
from . import arith

log = logging.getLogger(__name__)

KING_KERNEL = "binomial(n,k)*(-1)^(n-k)"
# closed-walk checks per dimension (n range for king_walk_count)
KING_CHECK = {1: 40, 2: 40, 3: 25, 4: 20}


def parse_values(text: str, params: Sequence[str] = ()) -> list:
    """Comma-separated exact values such as ``0,1`` or ``1/2,m``."""
    ctx = arith.ring(params)
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise DomainError(f"empty value in {text!r}")
        v = parse_rational(part, ctx)
        out.append(v.value() if v.is_constant() else v)
    return out


def make_sequence(rec_text: str, init_text: str, params: Sequence[str] = (), name: str = "a") -> HoloSeq:
    rec = parse_operator(rec_text, var="k", params=params)
    return HoloSeq(rec, parse_values(init_text, params), name)


def run_findrec(rec_text: str, init_text: str, term_text: str, d: int = 1, params: Sequence[str] = (),
                I_max: int = 6, J_max: int | None = 8, timeout: float = 60.0,
                checkpoint: str | None = None, method: str = "auto") -> CelineResult:
    a = make_sequence(rec_text, init_text, params)
    H = parse_term(term_text, params=params)
    problem = CelineProblem(H, a, d, I_max=I_max, J_max=J_max, timeout_seconds=timeout, method=method)
    return findrec(problem, checkpoint)


# --------------------------------------------------------------------------------
# king walks
# --------------------------------------------------------------------------------

@dataclass
class KingReport:
    dim: int
    result: CelineResult
    walk_check: oracle.VerificationReport
    sum_check: oracle.VerificationReport | None = None
    fit: AsymptoticFit | None = None


def king_problem(dim: int, I_max: int = 10, J_max: int | None = None, timeout: float = 600.0) -> CelineProblem:
    """``x_n = sum_k T_k^dim C(n,k) (-1)^(n-k)``, with T the central trinomial numbers."""
    if dim < 1:
        raise DomainError("dimension must be >= 1")
    return CelineProblem(parse_term(KING_KERNEL), central_trinomial(), dim,
                         I_max=I_max, J_max=J_max, timeout_seconds=timeout)


def initial_terms(op: RecOperator, values: Sequence) -> list:
    """Enough leading values of a verified sequence to unroll ``op`` from them."""
    from .celine import valid_from
    need = max(valid_from(op), op.shift_removed) + op.order
    if len(values) < need:
        raise DomainError(f"need {need} initial values, got {len(values)}")
    return list(values[:need])


def kingwalks(dim: int, n_check: int | None = None, n_sum: int = 60, asymptotics: bool = False,
              n_max: int = 5000, I_max: int = 10, J_max: int | None = None, timeout: float = 600.0,
              checkpoint: str | None = None) -> KingReport:
    problem = king_problem(dim, I_max, J_max, timeout)
    result = findrec(problem, checkpoint)
    op = result.operator
    n_check = n_check if n_check is not None else KING_CHECK.get(dim, 12)
    walks = [oracle.king_walk_count(dim, n) for n in range(n_check + op.order + 1)]
    walk_check = oracle.check_operator(op, walks, n_check)
    if not walk_check.holds:
        raise VerificationError(f"{dim}D operator fails on closed-walk counts", walk_check)
    sum_check = oracle.verify_operator(op, problem, n_sum) if n_sum > n_check else None
    if sum_check is not None and not sum_check.holds:
        raise VerificationError(f"{dim}D operator fails on brute-force sums", sum_check)
    fit = None
    if asymptotics:
        fit = estimate_growth(op, initial_terms(op, walks), n_max)
    return KingReport(dim, result, walk_check, sum_check, fit)


# --------------------------------------------------------------------------------
# chained sums
# --------------------------------------------------------------------------------

@dataclass
class Stage:
    term: HyperTerm
    sum_var: str
    outer_var: str
    result: CelineResult
    initial_values: list = field(default_factory=list)
    text: str = ""


def _free_names(text: str) -> set[str]:
    from .hyperterm import FUNCTIONS
    from .parsing import parse_tree

    def walk(node):
        if node[0] == "name":
            return {node[1]}
        if node[0] == "call":
            return set().union(*(walk(a) for a in node[2]))
        if node[0] == "int":
            return set()
        return set().union(*(walk(x) for x in node[1:] if isinstance(x, tuple)))
    return walk(parse_tree(text)) - set(FUNCTIONS)


def stage_variables(terms: Sequence[str], params: Sequence[str] = (), first_sum: str = "k") -> list[tuple[str, str]]:
    """(summation, outer) variable per stage; each outer variable is summed in the next stage."""
    out = []
    s = first_sum
    for t, text in enumerate(terms):
        names = _free_names(text) - set(params) - {s}
        if t == len(terms) - 1:
            outer = "n" if not names else None
            if names:
                if len(names) != 1:
                    raise DomainError(f"stage {t + 1}: cannot tell the outer variable among {sorted(names)}")
                outer = names.pop()
        else:
            if len(names) != 1:
                raise DomainError(f"stage {t + 1}: expected exactly one outer variable, found {sorted(names)}")
            outer = names.pop()
        out.append((s, outer))
        s = outer
    return out


def multisum(terms: Sequence[str], d: int = 1, params: Sequence[str] = (), I_max: int = 6,
             J_max: int | None = 8, timeout: float = 60.0, first_sum: str = "k") -> list[Stage]:
    """Chain findrec over nested sums given innermost first.

    Stage ``t`` uses the operator found at stage ``t-1`` as the recurrence of
    its summand sequence (``d`` applies to every stage after the first), with
    initial values computed by brute-force summation.
    """
    if not terms:
        raise DomainError("multisum needs at least one stage")
    stages: list[Stage] = []
    a = constant_one()
    for t, ((s, outer), text) in enumerate(zip(stage_variables(terms, params, first_sum), terms)):
        H = parse_term(text, n_var=outer, k_var=s, params=params)
        power = 1 if t == 0 else d
        problem = CelineProblem(H, a, power, I_max=I_max, J_max=J_max, timeout_seconds=timeout)
        try:
            result = findrec(problem)
        except Exception as exc:
            exc.stage = t + 1
            raise
        op = result.operator
        need = max(result.valid_from, op.shift_removed) + op.order
        values = oracle.brute_sum(a, H, power, max(need - 1, 0))
        stages.append(Stage(H, s, outer, result, values, text))
        a = HoloSeq(op.with_var("k"), values, name=f"stage{t + 1}")
    return stages


# --------------------------------------------------------------------------------
# asymptotics from operator text
# --------------------------------------------------------------------------------

def asym(op_text: str, init_text: str, n_max: int, n_min: int | None = None, depth: int = 4) -> AsymptoticFit:
    op = parse_operator(op_text, var="n")
    init = [Fraction(v) if not isinstance(v, RatFunc) else v for v in parse_values(init_text)]
    if len(init) < op.order:
        raise DomainError(f"need {op.order} initial values, got {len(init)}")
    if len(init) > op.order:
        report = oracle.check_operator(op, init, len(init) - op.order - 1)
        if not report.holds:
            raise DomainError(f"initial values contradict the operator at n = {report.failures}")
    return estimate_growth(op, init, n_max, n_min=n_min, depth=depth)
