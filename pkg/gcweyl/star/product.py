from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.errors import ChartMismatch, DomainError
from gcweyl.algebra.series import (
    Chart,
    GradedSeries,
    TermKey,
    Truncation,
    partial_v,
    partial_x,
    truncate_to,
)
from gcweyl.star.operators import BiDiffTerm, build_p


def _require_particle(*series: GradedSeries):
    for s in series:
        if s.chart != Chart.PARTICLE:
            raise ChartMismatch("star products are taken in the particle chart")


def _resolve(a: GradedSeries, b: GradedSeries, trunc: Optional[Truncation]) -> Truncation:
    return trunc if trunc is not None else a.trunc.intersect(b.trunc)


class _Derivatives:
    """Memoized partial derivatives of one factor."""

    def __init__(self, series: GradedSeries):
        self.series = series
        self._cache: Dict[Tuple, GradedSeries] = {((0, 0), (0, 0)): series}

    def get(self, dx, dv) -> GradedSeries:
        key = (dx, dv)
        if key in self._cache:
            return self._cache[key]
        # peel one derivative off and reuse the cached lower order
        if dv[1]:
            result = partial_v(self.get(dx, (dv[0], dv[1] - 1)), 1)
        elif dv[0]:
            result = partial_v(self.get(dx, (dv[0] - 1, dv[1])), 0)
        elif dx[1]:
            result = partial_x(self.get((dx[0], dx[1] - 1), dv), 1)
        else:
            result = partial_x(self.get((dx[0] - 1, dx[1]), dv), 0)
        self._cache[key] = result
        return result


def apply_blocks(
    a: GradedSeries,
    b: GradedSeries,
    entries: Sequence[Tuple[int, int, List[BiDiffTerm]]],
    trunc: Truncation,
) -> GradedSeries:
    """Sum of ``hbar^h eps^e * prefactor * (D_left a) * (D_right b)`` over the given blocks."""
    left, right = _Derivatives(a), _Derivatives(b)
    terms: Dict[TermKey, Coefficient] = {}
    for h, e, block in entries:
        if h > trunc.max_hbar:
            continue
        for op in block:
            da = left.get(op.d_left_x, op.d_left_v)
            if da.is_zero():
                continue
            db = right.get(op.d_right_x, op.d_right_v)
            if db.is_zero():
                continue
            pre = op.prefactor_key
            for ka, ca in da.items():
                for kb, cb in db.items():
                    hbar = h + ka.hbar + kb.hbar
                    eps = e + ka.eps + kb.eps
                    if not trunc.admits(hbar, eps):
                        continue
                    key = pre.times(ka).times(kb).replace_grading(hbar, eps)
                    coeff = op.coeff * ca * cb
                    terms[key] = terms[key] + coeff if key in terms else coeff
    return GradedSeries(terms, Chart.PARTICLE, trunc)


def star(
    a: GradedSeries,
    b: GradedSeries,
    trunc: Optional[Truncation] = None,
    magnetic: bool = True,
) -> GradedSeries:
    """
    Gauge-invariant star product ``a * b``.

    Parameters:
        a (GradedSeries): left factor, particle chart
        b (GradedSeries): right factor, particle chart
        trunc (Truncation): order window; defaults to the intersection of the factors' windows
        magnetic (bool): False drops every L_n, which is the ordinary Moyal product (B = 0)
    """
    _require_particle(a, b)
    trunc = _resolve(a, b, trunc)
    return apply_blocks(a, b, build_p(trunc, magnetic).entries, trunc)


def moyal_bracket(
    a: GradedSeries,
    b: GradedSeries,
    trunc: Optional[Truncation] = None,
    magnetic: bool = True,
) -> GradedSeries:
    """``a*b - b*a`` from the odd-hbar blocks only; even blocks are symmetric in the factors."""
    _require_particle(a, b)
    trunc = _resolve(a, b, trunc)
    odd = [(h, e, terms) for h, e, terms in build_p(trunc, magnetic).entries if h % 2]
    return apply_blocks(a, b, odd, trunc).scale(2)


def poisson_bracket(a: GradedSeries, b: GradedSeries, trunc: Optional[Truncation] = None) -> GradedSeries:
    """{f,g} = f_x g_v - f_v g_x + (B/eps)(f_{v_x} g_{v_y} - f_{v_y} g_{v_x})"""
    _require_particle(a, b)
    trunc = _resolve(a, b, trunc)
    ta, tb = truncate_to(a, trunc), truncate_to(b, trunc)
    result = GradedSeries.zero(Chart.PARTICLE, trunc)
    for axis in (0, 1):
        result = result + partial_x(ta, axis) * partial_v(tb, axis)
        result = result - partial_v(ta, axis) * partial_x(tb, axis)
    # one extra power of eps survives the 1/eps in front of the magnetic part
    wide = trunc.replace(
        max_eps=trunc.max_eps + 1,
        max_total=None if trunc.max_total is None else trunc.max_total + 1,
    )
    wa, wb = truncate_to(a, wide), truncate_to(b, wide)
    magnetic = partial_v(wa, 0) * partial_v(wb, 1) - partial_v(wa, 1) * partial_v(wb, 0)
    return result + magnetic.shift(eps=-1) * GradedSeries.monomial(bhalf=2, trunc=trunc)


def symmetrized_star(factors: Sequence[GradedSeries], trunc: Optional[Truncation] = None) -> GradedSeries:
    """Average of the star-chained product over every ordering of ``factors``."""
    if not factors:
        raise DomainError("symmetrized_star needs at least one factor")
    _require_particle(*factors)
    if trunc is None:
        trunc = factors[0].trunc
        for f in factors[1:]:
            trunc = trunc.intersect(f.trunc)
    total = GradedSeries.zero(Chart.PARTICLE, trunc)
    for order in permutations(range(len(factors))):
        product = factors[order[0]]
        for index in order[1:]:
            product = star(product, factors[index], trunc)
        total = total + product
    return total.scale(Fraction(1, factorial(len(factors))))
