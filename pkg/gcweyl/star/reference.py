"""
The hbar^2 expansion of P written out by hand.

Nothing here goes through ``build_ln`` or the weights, so comparing it with
``build_p(2)`` checks the general construction independently.
"""

from fractions import Fraction
from typing import Dict, List, Tuple

from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.series import Generator, GradedSeries
from gcweyl.star.operators import (
    IDENTITY,
    BiDiffTerm,
    POperator,
    add_terms,
    compose_terms,
    merge_terms,
    scale_terms,
    terms_as_dict,
)

X_AXIS = (1, 0)
Y_AXIS = (0, 1)
AXES = (X_AXIS, Y_AXIS)

# (j, l, sign) of eps_{jlz}
_ROTATION = ((X_AXIS, Y_AXIS, 1), (Y_AXIS, X_AXIS, -1))


def _sum(a, b):
    return (a[0] + b[0], a[1] + b[1])


def hand_l() -> List[BiDiffTerm]:
    half = Fraction(1, 2)
    one = GradedSeries.constant(1)
    terms = []
    for e in AXES:
        terms.append(BiDiffTerm(Coefficient(half), one, d_left_v=e, d_right_x=e))
        terms.append(BiDiffTerm(Coefficient(-half), one, d_left_x=e, d_right_v=e))
    return merge_terms(terms)


def hand_l1() -> List[BiDiffTerm]:
    """-(1/2) B (da_x db_y - da_y db_x)"""
    b = GradedSeries.monomial(bhalf=2)
    return merge_terms(
        BiDiffTerm(Coefficient(Fraction(-sign, 2)), b, d_left_v=j, d_right_v=l) for j, l, sign in _ROTATION
    )


def hand_l2() -> List[BiDiffTerm]:
    """-(i/12) sum_i B_{,i} eps_{jl} da_j db_l (db_i - da_i)"""
    c = Coefficient(0, Fraction(-1, 12))
    terms = []
    for i, axis in enumerate(AXES):
        gradient = GradedSeries.monomial(gens=[(Generator("B", *axis), 1)])
        for j, l, sign in _ROTATION:
            terms.append(BiDiffTerm(c * sign, gradient, d_left_v=j, d_right_v=_sum(l, axis)))
            terms.append(BiDiffTerm(-c * sign, gradient, d_left_v=_sum(j, axis), d_right_v=l))
    return merge_terms(terms)


def expected_p_blocks() -> Dict[Tuple[int, int], List[BiDiffTerm]]:
    """Blocks of P through hbar^2, keyed by (hbar power, eps power)."""
    minus_i = Coefficient(0, -1)
    l, l1, l2 = hand_l(), hand_l1(), hand_l2()
    return {
        (0, 0): [IDENTITY],
        (1, 0): scale_terms(l, minus_i),
        (1, -1): scale_terms(l1, minus_i),
        (2, 0): scale_terms(compose_terms(l, l), Fraction(-1, 2)),
        (2, -1): add_terms(scale_terms(compose_terms(l, l1), -1), scale_terms(l2, minus_i)),
        (2, -2): scale_terms(compose_terms(l1, l1), Fraction(-1, 2)),
    }


def block_mismatches(p: POperator) -> List[str]:
    """Blocks where ``p`` differs from the hand expansion; empty when they agree."""
    expected = {key: terms_as_dict(terms) for key, terms in expected_p_blocks().items()}
    actual = p.as_dict()
    problems = []
    for key in sorted(set(expected) | set(actual)):
        want, got = expected.get(key, {}), actual.get(key, {})
        if want != got:
            differing = {shape for shape in set(want) | set(got) if want.get(shape) != got.get(shape)}
            problems.append(f"hbar^{key[0]} eps^{key[1]}: {len(differing)} operator terms differ")
    return problems
