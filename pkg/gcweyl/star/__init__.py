from gcweyl.star.operators import (
    BiDiffTerm,
    POperator,
    build_l,
    build_ln,
    build_p,
    clear_cache,
    weight_w,
)
from gcweyl.star.product import moyal_bracket, poisson_bracket, star, symmetrized_star

__all__ = [
    "BiDiffTerm",
    "POperator",
    "build_l",
    "build_ln",
    "build_p",
    "clear_cache",
    "moyal_bracket",
    "poisson_bracket",
    "star",
    "symmetrized_star",
    "weight_w",
]
