from gcweyl.oracle.evaluate import (
    compare_symbolic_numeric,
    eval_series,
    monomial_pairs,
    monomials,
    moyal_oracle,
    numeric_star,
    to_sympy,
)
from gcweyl.oracle.models import EvalPoint, FieldModel, load_model, random_points, stack_points
from gcweyl.oracle.oscillator import oscillator_check

__all__ = [
    "EvalPoint",
    "FieldModel",
    "compare_symbolic_numeric",
    "eval_series",
    "load_model",
    "monomial_pairs",
    "monomials",
    "moyal_oracle",
    "numeric_star",
    "oscillator_check",
    "random_points",
    "stack_points",
    "to_sympy",
]
