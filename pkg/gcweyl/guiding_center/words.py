"""
Ordered products of the gyration velocities.

A word is a string over the letters ``x`` and ``y`` standing for the star
product ``V_x * V_y * ...`` in that order. Scalars (fields at the guiding
center) are central. The only relation is ``[V_x, V_y] = i hbar / eps``.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from gcweyl.algebra.coefficient import Coefficient, Number
from gcweyl.algebra.errors import ChartMismatch, DomainError
from gcweyl.algebra.series import (
    DEFAULT_TRUNCATION,
    Chart,
    Generator,
    GradedSeries,
    TermKey,
    Truncation,
    partial_x,
)
from gcweyl.io.text import join_terms, render_term

Word = str
WordKey = Tuple[TermKey, Word]

_MINUS_I = Coefficient(0, -1)


class GCWordSeries:
    """Sum of ``scalar(X, Y) * word`` terms in the guiding-center chart."""

    __slots__ = ("trunc", "_terms")

    def __init__(self, terms: Optional[Mapping[WordKey, Number]] = None, trunc: Optional[Truncation] = None):
        self.trunc = trunc or DEFAULT_TRUNCATION
        cleaned = {}
        for (key, word), coeff in (terms or {}).items():
            if key.vel != (0, 0):
                raise DomainError("word series scalars cannot carry pointwise velocities")
            if set(word) - {"x", "y"}:
                raise DomainError(f"invalid word {word!r}")
            coeff = Coefficient.of(coeff)
            if coeff.is_zero() or not self.trunc.admits(key.hbar, key.eps):
                continue
            cleaned[(key, word)] = coeff
        self._terms = cleaned

    @classmethod
    def zero(cls, trunc=None) -> "GCWordSeries":
        return cls({}, trunc)

    @classmethod
    def from_scalar(cls, s: GradedSeries, trunc=None) -> "GCWordSeries":
        if s.chart != Chart.GUIDING_CENTER:
            raise ChartMismatch("word series live in the guiding-center chart")
        return cls({(key, ""): c for key, c in s.items()}, trunc or s.trunc)

    @classmethod
    def word(cls, word: Word, coeff: Number = 1, trunc=None) -> "GCWordSeries":
        return cls({(TermKey(), word): coeff}, trunc)

    # Inspection -----------------------------------------------------------

    @property
    def terms(self):
        return sorted(self._terms.items(), key=lambda item: (item[0][0].sort_key(), len(item[0][1]), item[0][1]))

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def words(self):
        return sorted({word for _, word in self._terms}, key=lambda w: (len(w), w))

    def word_coefficient(self, word: Word) -> GradedSeries:
        """Scalar multiplying ``word``."""
        return GradedSeries(
            {key: c for (key, w), c in self._terms.items() if w == word},
            Chart.GUIDING_CENTER,
            self.trunc,
        )

    def scalar_part(self) -> GradedSeries:
        return self.word_coefficient("")

    def has_field(self, field: str) -> bool:
        return any(field in key.fields() for key, _ in self._terms)

    def __repr__(self):
        return f"GCWordSeries({len(self)} terms)"

    # Arithmetic -----------------------------------------------------------

    def _new(self, terms, trunc=None) -> "GCWordSeries":
        return GCWordSeries(terms, trunc or self.trunc)

    def __add__(self, other: "GCWordSeries") -> "GCWordSeries":
        terms = dict(self._terms)
        for wk, c in other.items():
            terms[wk] = terms[wk] + c if wk in terms else c
        return self._new(terms, self.trunc.intersect(other.trunc))

    def __neg__(self):
        return self._new({wk: -c for wk, c in self._terms.items()})

    def __sub__(self, other: "GCWordSeries") -> "GCWordSeries":
        return self + (-other)

    def scale(self, factor: Number) -> "GCWordSeries":
        factor = Coefficient.of(factor)
        return self._new({wk: c * factor for wk, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            return self.scale(other)
        if isinstance(other, GradedSeries):
            other = GCWordSeries.from_scalar(other)
        return concatenate(self, other)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, GCWordSeries):
            return NotImplemented
        return dict(self._terms) == dict(other.items())

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def truncate_to(self, trunc: Truncation) -> "GCWordSeries":
        return GCWordSeries(dict(self._terms), trunc)

    def render(self, style: str = "canonical") -> str:
        letters = {"x": "V_x", "y": "V_y"}
        rendered = []
        for (key, word), coeff in self.terms:
            extra = [".".join(letters[ch] for ch in word)] if word else []
            rendered.append(render_term(key, coeff, Chart.GUIDING_CENTER, style, extra))
        return join_terms(rendered)


def concatenate(a: GCWordSeries, b: GCWordSeries, trunc: Optional[Truncation] = None) -> GCWordSeries:
    """Star product in the word algebra: scalars multiply, words concatenate."""
    trunc = trunc or a.trunc.intersect(b.trunc)
    terms: Dict[WordKey, Coefficient] = {}
    for (ka, wa), ca in a.items():
        for (kb, wb), cb in b.items():
            if not trunc.admits(ka.hbar + kb.hbar, ka.eps + kb.eps):
                continue
            wk = (ka.times(kb), wa + wb)
            coeff = ca * cb
            terms[wk] = terms[wk] + coeff if wk in terms else coeff
    return GCWordSeries(terms, trunc)


# -----------------------------------------------------------------------------
# Weyl symmetrization
# -----------------------------------------------------------------------------


@lru_cache(maxsize=None)
def arrangements(kx: int, ky: int) -> Tuple[Word, ...]:
    """Distinct orderings of kx letters x and ky letters y."""
    n = kx + ky
    words = []
    for places in combinations(range(n), kx):
        letters = ["y"] * n
        for p in places:
            letters[p] = "x"
        words.append("".join(letters))
    return tuple(words)


def to_star_form(pointwise: GradedSeries, trunc: Optional[Truncation] = None) -> GCWordSeries:
    """Replace each pointwise V_x^a V_y^b by the average of its distinct orderings."""
    if pointwise.chart != Chart.GUIDING_CENTER:
        raise ChartMismatch("to_star_form expects a guiding-center series")
    terms: Dict[WordKey, Coefficient] = {}
    for key, coeff in pointwise.items():
        kx, ky = key.vel
        scalar = key._replace(vel=(0, 0))
        weight = coeff * Fraction(1, comb(kx + ky, kx))
        for word in arrangements(kx, ky):
            wk = (scalar, word)
            terms[wk] = terms[wk] + weight if wk in terms else weight
    return GCWordSeries(terms, trunc or pointwise.trunc)


# -----------------------------------------------------------------------------
# Normal ordering
# -----------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _normal_form(word: Word) -> Tuple[Tuple[int, int, Coefficient, Word], ...]:
    """``word`` as a sum of ``hbar^h eps^e * c * normal word`` (x letters first)."""
    p = word.find("yx")
    if p < 0:
        return ((0, 0, Coefficient(1), word),)
    collected: Dict[Tuple[int, int, Word], Coefficient] = {}

    def collect(h, e, c, w):
        key = (h, e, w)
        collected[key] = collected[key] + c if key in collected else c

    for h, e, c, w in _normal_form(word[:p] + "xy" + word[p + 2 :]):
        collect(h, e, c, w)
    for h, e, c, w in _normal_form(word[:p] + word[p + 2 :]):
        collect(h + 1, e - 1, c * _MINUS_I, w)
    return tuple((h, e, c, w) for (h, e, w), c in sorted(collected.items()) if not c.is_zero())


def is_normal(word: Word) -> bool:
    return "yx" not in word


def normal_order(s: GCWordSeries) -> GCWordSeries:
    """Rewrite every word with V_y V_x -> V_x V_y - i hbar / eps."""
    terms: Dict[WordKey, Coefficient] = {}
    for (key, word), coeff in s.items():
        for h, e, c, normal in _normal_form(word):
            hbar, eps = key.hbar + h, key.eps + e
            if not s.trunc.admits(hbar, eps):
                continue
            wk = (key.replace_grading(hbar, eps), normal)
            value = coeff * c
            terms[wk] = terms[wk] + value if wk in terms else value
    return GCWordSeries(terms, s.trunc)


# -----------------------------------------------------------------------------
# Taylor expansion around the guiding center
# -----------------------------------------------------------------------------


def symmetrized_product(factors: Sequence[GCWordSeries], trunc: Truncation) -> GCWordSeries:
    """Average of the ordered products over distinct arrangements of ``factors``."""
    if not factors:
        return GCWordSeries.from_scalar(GradedSeries.constant(1, Chart.GUIDING_CENTER, trunc), trunc)
    distinct = []
    labels = []
    for f in factors:
        for index, seen in enumerate(distinct):
            if seen is f or seen == f:
                labels.append(index)
                break
        else:
            distinct.append(f)
            labels.append(len(distinct) - 1)
    orderings = _distinct_permutations(tuple(labels))
    total = GCWordSeries.zero(trunc)
    for order in orderings:
        product = distinct[order[0]].truncate_to(trunc)
        for index in order[1:]:
            product = concatenate(product, distinct[index])
        total = total + product
    return total.scale(Fraction(1, len(orderings)))


@lru_cache(maxsize=None)
def _distinct_permutations(labels: Tuple[int, ...]):
    if len(labels) <= 1:
        return (labels,)
    result = []
    for value in sorted(set(labels)):
        rest = list(labels)
        rest.remove(value)
        for tail in _distinct_permutations(tuple(rest)):
            result.append((value,) + tail)
    return tuple(result)


def _as_scalar(gen: Union[GradedSeries, Generator, int], trunc: Truncation) -> GradedSeries:
    if isinstance(gen, GradedSeries):
        if not gen.is_scalar():
            raise DomainError("taylor_shift expands functions of the position only")
        return gen.with_chart(Chart.GUIDING_CENTER)
    if isinstance(gen, Generator):
        return GradedSeries.monomial(gens=[(gen, 1)], chart=Chart.GUIDING_CENTER, trunc=trunc)
    return GradedSeries.monomial(bhalf=int(gen), chart=Chart.GUIDING_CENTER, trunc=trunc)


def _as_words(shift) -> GCWordSeries:
    if isinstance(shift, GradedSeries):
        return to_star_form(shift)
    return shift


def taylor_shift(gen, shifts, trunc: Optional[Truncation] = None) -> GCWordSeries:
    """
    Expand ``g(X + dx, Y + dy)`` around the guiding center.

    Parameters:
        gen: a scalar GradedSeries, a Generator, or an integer B power (in halves)
        shifts: pair ``(dx, dy)`` of word series (pointwise series are symmetrized first)
        trunc (Truncation): order window of the result
    """
    dx, dy = (_as_words(s) for s in shifts)
    trunc = trunc or dx.trunc.intersect(dy.trunc)
    for shift in (dx, dy):
        if any(key.eps < 1 for (key, _), _ in shift.items()):
            raise DomainError("Taylor shifts must be of order eps")
    g = _as_scalar(gen, trunc)
    result = GCWordSeries.from_scalar(g, trunc)
    derivatives = {(0, 0): g}

    def derivative(b1, b2):
        if (b1, b2) not in derivatives:
            if b2:
                derivatives[(b1, b2)] = partial_x(derivative(b1, b2 - 1), 1)
            else:
                derivatives[(b1, b2)] = partial_x(derivative(b1 - 1, b2), 0)
        return derivatives[(b1, b2)]

    order = 1
    while True:
        contributed = False
        for b1 in range(order, -1, -1):
            b2 = order - b1
            product = symmetrized_product([dx] * b1 + [dy] * b2, trunc)
            if product.is_zero():
                continue
            contributed = True
            d = derivative(b1, b2)
            if d.is_zero():
                continue
            weight = Fraction(1, factorial(b1) * factorial(b2))
            result = result + concatenate(GCWordSeries.from_scalar(d, trunc), product).scale(weight)
        if not contributed:
            return result
        order += 1
