from functools import lru_cache
from typing import Callable, Dict, Mapping, Optional

from gcweyl import logger
from gcweyl.algebra.errors import ChartMismatch, NotReducibleToJ
from gcweyl.algebra.series import DEFAULT_TRUNCATION, Chart, GradedSeries, TermKey, Truncation
from gcweyl.guiding_center.words import GCWordSeries, concatenate, normal_order
from gcweyl.io.text import render, to_structured


@lru_cache(maxsize=None)
def j_power(k: int) -> GCWordSeries:
    """Normal-ordered J^{*k} with J = V_x*V_x + V_y*V_y, kept exactly."""
    wide = Truncation(max_hbar=k, min_eps=-k, max_eps=0)
    if k == 0:
        return GCWordSeries.word("", trunc=wide)
    logger.debug("expanding J^%d", k)
    j = GCWordSeries({(TermKey(), "xx"): 1, (TermKey(), "yy"): 1}, wide)
    return normal_order(concatenate(j_power(k - 1), j, wide))


class JPolynomial:
    """``sum_k coeffs[k] * J^{*k}`` with scalar coefficients in (X, Y)."""

    def __init__(self, coeffs: Mapping[int, GradedSeries], trunc: Optional[Truncation] = None):
        self.trunc = trunc or DEFAULT_TRUNCATION
        cleaned = {}
        for k, c in coeffs.items():
            if c.chart != Chart.GUIDING_CENTER:
                raise ChartMismatch("J-polynomial coefficients live in the guiding-center chart")
            if not c.is_zero():
                cleaned[int(k)] = c
        self.coeffs: Dict[int, GradedSeries] = dict(sorted(cleaned.items()))

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def coefficient(self, k: int) -> GradedSeries:
        return self.coeffs.get(k, GradedSeries.zero(Chart.GUIDING_CENTER, self.trunc))

    def map(self, function: Callable[[GradedSeries], GradedSeries]) -> "JPolynomial":
        return JPolynomial({k: function(c) for k, c in self.coeffs.items()}, self.trunc)

    def restrict(self, predicate) -> "JPolynomial":
        return self.map(lambda c: c.restrict(predicate))

    def classical(self) -> "JPolynomial":
        return self.restrict(lambda key: key.hbar == 0)

    def has_field(self, field: str) -> bool:
        return any(c.has_field(field) for c in self.coeffs.values())

    def expand(self) -> GCWordSeries:
        """The normal-ordered word series this polynomial stands for."""
        total = GCWordSeries.zero(self.trunc)
        for k, c in self.coeffs.items():
            total = total + concatenate(GCWordSeries.from_scalar(c, self.trunc), j_power(k), self.trunc)
        return total

    def __eq__(self, other):
        if not isinstance(other, JPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __repr__(self):
        return f"JPolynomial(degree={self.degree})"

    def render(self, style: str = "canonical") -> str:
        if not self.coeffs:
            return "0"
        return "\n".join(f"J^{k}: {render(c, style)}" for k, c in self.coeffs.items())

    def to_structured(self) -> dict:
        return {f"J^{k}": to_structured(c) for k, c in self.coeffs.items()}


def express_in_j(s: GCWordSeries) -> JPolynomial:
    """
    Write a word series as a polynomial in J.

    The highest J power is read off the pure V_x word of matching length, its
    full expansion is subtracted, and the procedure repeats downward.
    Raises NotReducibleToJ with whatever cannot be absorbed.
    """
    residual = normal_order(s)
    longest = max((len(word) for word in residual.words()), default=0)
    coeffs = {}
    for k in range(longest // 2, -1, -1):
        c = residual.word_coefficient("x" * (2 * k))
        if c.is_zero():
            continue
        coeffs[k] = c
        residual = residual - concatenate(GCWordSeries.from_scalar(c, s.trunc), j_power(k), s.trunc)
    if not residual.is_zero():
        raise NotReducibleToJ(residual)
    return JPolynomial(coeffs, s.trunc)
