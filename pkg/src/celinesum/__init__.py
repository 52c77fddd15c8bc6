"""Recurrences for sums of powers of recurrent sequences against hypergeometric terms.

Typical use::

    from celinesum import CelineProblem, findrec, parse_term, fibonacci
    result = findrec(CelineProblem(parse_term("binomial(n,k)"), fibonacci(), d=1))
    print(result.operator)        # N^2 + (-3)*N + (1)
"""
from .arith import RatFunc, RatMatrix, nullspace, poly_content_primitive
from .asymptotics import AsymptoticFit, estimate_growth
from .celine import (AnsatzSystem, CelineProblem, CelineResult, build_system, extract_recurrence, findrec,
                     solve_ansatz)
from .errors import (AttemptTimeout, CelineError, DegenerateCertificateError, DomainError, RecurrenceNotFound,
                     SingularRecurrenceError, SystemTooLargeError, TermSyntaxError, UnsupportedTermError,
                     VerificationError)
from .hyperterm import HyperTerm, parse_term, shift_ratio, term_eval
from .operators import (RecOperator, normalize, operator_annihilates, parse_operator, to_record, to_text)
from .oracle import brute_sum, king_walk_count, trinomial_central, verify_result
from .sequences import (HoloSeq, central_trinomial, constant_one, fibonacci, m_fibonacci, seq_eval,
                        shift_reduce)

operator_normalize = normalize

__version__ = "0.1.0"
