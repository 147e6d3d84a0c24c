"""D-finite functions, P-recursive sequences and D-finite numbers.

Exact operator arithmetic over Q(i), algebraic sequences converging to roots,
and enclosure evaluation of D-finite functions by analytic continuation.
"""

from .algebraic import BivariatePolynomial, alg_to_diffop, compose_dfinite_algebraic, series_root
from .enclosure import Enclosure, format_decimal
from .evaluator import (DFiniteInstance, EvalPath, EvalResult, auto_path, continue_to, evaluate,
                        evaluate_local, local_taylor)
from .gaussian import GQ, GaussianRational
from .limits import (ConvergentRecurrence, LimitResult, build_lemma_polynomial, limit_of_recurrence, root_limit,
                     root_sequence, to_function_limit)
from .ore import (DiffOperator, SequenceWindow, ShiftOperator, annihilator_product, annihilator_sum,
                  diffop_to_rec, geometric_twist, homogenize, lclm, partial_sum_annihilator, realify,
                  rec_to_diffop, singularities, unroll)
from .poly import Polynomial, RationalFunction
from .roots import complex_roots

__version__ = "0.1.0"

__all__ = [
    "BivariatePolynomial", "alg_to_diffop", "compose_dfinite_algebraic", "series_root",
    "Enclosure", "format_decimal",
    "DFiniteInstance", "EvalPath", "EvalResult", "auto_path", "continue_to", "evaluate", "evaluate_local",
    "local_taylor",
    "GQ", "GaussianRational",
    "ConvergentRecurrence", "LimitResult", "build_lemma_polynomial", "limit_of_recurrence", "root_limit",
    "root_sequence", "to_function_limit",
    "DiffOperator", "SequenceWindow", "ShiftOperator", "annihilator_product", "annihilator_sum", "diffop_to_rec",
    "geometric_twist", "homogenize", "lclm", "partial_sum_annihilator", "realify", "rec_to_diffop",
    "singularities", "unroll",
    "Polynomial", "RationalFunction", "complex_roots",
]
