from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.series import (
    Chart,
    Generator,
    GradedSeries,
    TermKey,
    Truncation,
    add,
    equals,
    mul_pointwise,
    normalize,
    partial_v,
    partial_x,
    truncate_to,
)

__all__ = [
    "Chart",
    "Coefficient",
    "Generator",
    "GradedSeries",
    "TermKey",
    "Truncation",
    "add",
    "equals",
    "mul_pointwise",
    "normalize",
    "partial_v",
    "partial_x",
    "truncate_to",
]
