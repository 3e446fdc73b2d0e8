"""
Bidifferential operators of the gauge-invariant star product.

A BiDiffTerm acts on a pair of symbols ``(left, right)``: it differentiates
the left factor in ``(x, v)``, the right factor in ``(x, v)``, multiplies the
results and scales them by a field prefactor evaluated at the common point.
"""

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, Iterable, List, Tuple

from gcweyl import logger
from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.errors import DomainError
from gcweyl.algebra.series import ONE_KEY, Generator, GradedSeries, TermKey, Truncation, mul_pointwise
from gcweyl.utils.constants import HBAR_CAP

MultiIndex = Tuple[int, int]
NO_DERIVATIVE: MultiIndex = (0, 0)

_NEG_I = Coefficient(0, -1)


def _unit(axis: int) -> MultiIndex:
    return (1, 0) if axis == 0 else (0, 1)


def _plus(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] + b[0], a[1] + b[1])


def _counts(indices: Iterable[int]) -> MultiIndex:
    indices = list(indices)
    return (indices.count(0), indices.count(1))


# -----------------------------------------------------------------------------
# Terms
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class BiDiffTerm:
    coeff: Coefficient
    prefactor: GradedSeries
    d_left_x: MultiIndex = NO_DERIVATIVE
    d_left_v: MultiIndex = NO_DERIVATIVE
    d_right_x: MultiIndex = NO_DERIVATIVE
    d_right_v: MultiIndex = NO_DERIVATIVE

    @property
    def prefactor_key(self) -> TermKey:
        keys = list(self.prefactor.keys())
        return keys[0] if keys else ONE_KEY

    @property
    def shape(self):
        return (self.prefactor_key, self.d_left_x, self.d_left_v, self.d_right_x, self.d_right_v)

    @property
    def order(self) -> int:
        return sum(map(sum, (self.d_left_x, self.d_left_v, self.d_right_x, self.d_right_v)))

    def then(self, other: "BiDiffTerm") -> "BiDiffTerm":
        """Composition; partials commute with the prefactors so orders simply add."""
        return BiDiffTerm(
            self.coeff * other.coeff,
            mul_pointwise(self.prefactor, other.prefactor),
            _plus(self.d_left_x, other.d_left_x),
            _plus(self.d_left_v, other.d_left_v),
            _plus(self.d_right_x, other.d_right_x),
            _plus(self.d_right_v, other.d_right_v),
        )

    def scaled(self, factor) -> "BiDiffTerm":
        return BiDiffTerm(
            self.coeff * factor,
            self.prefactor,
            self.d_left_x,
            self.d_left_v,
            self.d_right_x,
            self.d_right_v,
        )


IDENTITY = BiDiffTerm(Coefficient(1), GradedSeries.constant(1))


def _prefactor_sort(term: BiDiffTerm):
    return (term.prefactor_key.sort_key(),) + term.shape[1:]


def merge_terms(terms: Iterable[BiDiffTerm]) -> List[BiDiffTerm]:
    """Collect like shapes, drop zeros, return in a fixed order."""
    merged: Dict[tuple, BiDiffTerm] = {}
    for term in terms:
        shape = term.shape
        if shape in merged:
            kept = merged[shape]
            merged[shape] = replace(kept, coeff=kept.coeff + term.coeff)
        else:
            merged[shape] = term
    return sorted((t for t in merged.values() if not t.coeff.is_zero()), key=_prefactor_sort)


def compose_terms(first: List[BiDiffTerm], second: List[BiDiffTerm]) -> List[BiDiffTerm]:
    return merge_terms(a.then(b) for a in first for b in second)


def add_terms(*groups: List[BiDiffTerm]) -> List[BiDiffTerm]:
    return merge_terms(itertools.chain(*groups))


def scale_terms(terms: List[BiDiffTerm], factor) -> List[BiDiffTerm]:
    return merge_terms(t.scaled(factor) for t in terms)


def terms_as_dict(terms: Iterable[BiDiffTerm]) -> Dict[tuple, Coefficient]:
    return {t.shape: t.coeff for t in merge_terms(terms)}


# -----------------------------------------------------------------------------
# L and L_n
# -----------------------------------------------------------------------------


@lru_cache(maxsize=None)
def build_l() -> Tuple[BiDiffTerm, ...]:
    """L = 1/2 sum_i (d_{v_i}^left d_{x_i}^right - d_{x_i}^left d_{v_i}^right)"""
    half = Coefficient(Fraction(1, 2))
    one = GradedSeries.constant(1)
    terms = []
    for axis in (0, 1):
        e = _unit(axis)
        terms.append(BiDiffTerm(half, one, d_left_v=e, d_right_x=e))
        terms.append(BiDiffTerm(-half, one, d_left_x=e, d_right_v=e))
    return tuple(merge_terms(terms))


def weight_w(n: int, k: int) -> int:
    if n < 1 or not 1 <= k <= n:
        raise DomainError(f"weight W(n={n}, k={k}) requires 1 <= k <= n")
    return comb(n + 1, k) * ((1 - (-1) ** k) * (n + 1) - (1 - (-1) ** (n + 1)) * k)


def _b_derivative(indices: MultiIndex) -> GradedSeries:
    if indices == NO_DERIVATIVE:
        return GradedSeries.monomial(bhalf=2)
    return GradedSeries.monomial(gens=[(Generator("B", *indices), 1)])


# The Levi-Civita contraction with r=z leaves (j, l) = (x, y) and (y, x)
_LEVI_CIVITA_Z = ((0, 1, 1), (1, 0, -1))


@lru_cache(maxsize=None)
def build_ln(n: int) -> Tuple[BiDiffTerm, ...]:
    if n < 1:
        raise DomainError("L_n is defined for n >= 1")
    overall = Coefficient(0, Fraction(1, 2)) ** (n + 1) * Fraction(1, (n + 1) ** 2 * factorial(n))
    terms = []
    for indices in itertools.product((0, 1), repeat=n - 1):
        prefactor = _b_derivative(_counts(indices))
        for j, l, sign in _LEVI_CIVITA_Z:
            for k in range(1, n + 1):
                w = weight_w(n, k)
                if w == 0:
                    continue
                left = _plus(_counts(indices[: k - 1]), _unit(j))
                right = _plus(_counts(indices[k - 1 :]), _unit(l))
                terms.append(
                    BiDiffTerm(overall * (sign * w), prefactor, d_left_v=left, d_right_v=right)
                )
    return tuple(merge_terms(terms))


# -----------------------------------------------------------------------------
# P = exp[-i hbar L - (i/eps) sum_n hbar^n L_n]
# -----------------------------------------------------------------------------


class POperator:
    """Graded blocks ``(hbar power, eps power) -> list of BiDiffTerm``."""

    def __init__(self, blocks: Dict[Tuple[int, int], List[BiDiffTerm]], max_hbar: int, magnetic: bool):
        self.blocks = {key: terms for key, terms in blocks.items() if terms}
        self.max_hbar = max_hbar
        self.magnetic = magnetic

    @property
    def entries(self) -> List[Tuple[int, int, List[BiDiffTerm]]]:
        return [(h, e, self.blocks[(h, e)]) for h, e in sorted(self.blocks, key=lambda he: (he[0], -he[1]))]

    def block(self, hbar: int, eps: int) -> List[BiDiffTerm]:
        return self.blocks.get((hbar, eps), [])

    def hbar_block(self, hbar: int) -> Dict[int, List[BiDiffTerm]]:
        return {e: terms for (h, e), terms in self.blocks.items() if h == hbar}

    def as_dict(self):
        return {key: terms_as_dict(terms) for key, terms in self.blocks.items()}

    def __repr__(self):
        return f"POperator(max_hbar={self.max_hbar}, magnetic={self.magnetic}, blocks={sorted(self.blocks)})"


def _generators(max_hbar: int, magnetic: bool):
    """The commuting exponents as (hbar power, eps power, terms)."""
    ops = [(1, 0, scale_terms(list(build_l()), _NEG_I))]
    if magnetic:
        for n in range(1, max_hbar + 1):
            ops.append((n, -1, scale_terms(list(build_ln(n)), _NEG_I)))
    return ops


def _multiplicities(weights: List[int], budget: int):
    """All exponent tuples with sum(w*j) <= budget."""
    if not weights:
        yield ()
        return
    head, rest = weights[0], weights[1:]
    for j in range(budget // head + 1):
        for tail in _multiplicities(rest, budget - j * head):
            yield (j,) + tail


def build_p(trunc=None, magnetic: bool = True) -> POperator:
    if isinstance(trunc, Truncation):
        max_hbar = trunc.max_hbar
    elif trunc is None:
        max_hbar = Truncation().max_hbar
    else:
        max_hbar = int(trunc)
    if max_hbar > HBAR_CAP:
        raise DomainError(f"max_hbar={max_hbar} exceeds the hard cap of {HBAR_CAP}")
    return _build_p(max_hbar, magnetic)


@lru_cache(maxsize=None)
def _build_p(max_hbar: int, magnetic: bool) -> POperator:
    logger.debug("building P operator up to hbar^%d (magnetic=%s)", max_hbar, magnetic)
    ops = _generators(max_hbar, magnetic)
    blocks: Dict[Tuple[int, int], List[BiDiffTerm]] = {}
    for exponents in _multiplicities([h for h, _, _ in ops], max_hbar):
        product = [IDENTITY]
        denominator = 1
        hbar = eps = 0
        for (h, e, terms), j in zip(ops, exponents):
            for _ in range(j):
                product = compose_terms(product, terms)
            denominator *= factorial(j)
            hbar += h * j
            eps += e * j
        product = scale_terms(product, Fraction(1, denominator))
        blocks[(hbar, eps)] = add_terms(blocks.get((hbar, eps), []), product)
    return POperator(blocks, max_hbar, magnetic)


def clear_cache():
    build_l.cache_clear()
    build_ln.cache_clear()
    _build_p.cache_clear()
