"""
Guiding-center coordinate maps.

The backward map (particle coordinates in terms of guiding-center ones) is
stored as text. The forward map is its series reversion, computed once and
cached.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Optional, Sequence, Tuple

from gcweyl import logger
from gcweyl.algebra.errors import DomainError
from gcweyl.algebra.series import (
    Chart,
    GradedSeries,
    TermKey,
    Truncation,
    partial_x,
    substitute_potential,
    truncate_to,
)
from gcweyl.io.text import parse
from gcweyl.utils.constants import MAP_MAX_EPS, REVERSION_MAX_ITERATIONS

COORDINATES = ("x", "y", "vx", "vy")
GC_NAMES = ("X", "Y", "V_x", "V_y")
PARTICLE_NAMES = ("x", "y", "v_x", "v_y")

Map = Tuple[GradedSeries, GradedSeries, GradedSeries, GradedSeries]

# Second derivatives of the potential written through E = -grad(phi)
_EXX = "(-d[x,x]phi)"
_EYY = "(-d[y,y]phi)"
_EXY = "(-d[x,y]phi)"

# The eps^2 part of x carries E_x, not d[x]B. The V_x*V_y^2 term of v_y is the
# x <-> y mirror of the V_x^2*V_y term of v_x, with c1 -> -c1.
BACKWARD_MAP = {
    "x": (
        "X - eps*B^(-1/2)*V_y"
        " - (1/2)*eps^2*B^-2*(2*d[x]B*V_x^2 + d[y]B*V_x*V_y + d[x]B*V_y^2 - 2*E_x)"
    ),
    "y": (
        "Y + eps*B^(-1/2)*V_x"
        " - (1/2)*eps^2*B^-2*(d[y]B*V_x^2 + d[x]B*V_x*V_y + 2*d[y]B*V_y^2 - 2*E_y)"
    ),
    "vx": (
        "B^(1/2)*V_x - eps*B^-1*((d[x]B*V_x + d[y]B*V_y)*V_y - E_y)"
        " + (1/16)*eps^2*B^(-5/2)*("
        "(-11*d[x]B^2 + B*d[x,x]B - 3*d[y]B^2 + B*d[y,y]B)*V_x^3"
        " - 4*(5*d[x]B*d[y]B + B*d[x,y]B + (1/2)*c1)*V_x^2*V_y"
        " + (d[x]B^2 + 5*B*d[x,x]B - 15*d[y]B^2 - 3*B*d[y,y]B)*V_x*V_y^2"
        " + 4*(d[x]B*d[y]B + B*d[x,y]B - (1/2)*c1)*V_y^3"
        f" + 4*(3*d[x]B*E_x - B*{_EXX} + d[y]B*E_y + B*{_EYY})*V_x"
        " - 2*(c2 - d[x]B*E_y - d[y]B*E_x)*V_y)"
    ),
    "vy": (
        "B^(1/2)*V_y + eps*B^-1*((d[x]B*V_x + d[y]B*V_y)*V_x - E_x)"
        " + (1/16)*eps^2*B^(-5/2)*("
        "4*(d[x]B*d[y]B + B*d[x,y]B + (1/2)*c1)*V_x^3"
        " + (-15*d[x]B^2 - 3*B*d[x,x]B + d[y]B^2 + 5*B*d[y,y]B)*V_x^2*V_y"
        " - 4*(5*d[x]B*d[y]B + B*d[x,y]B - (1/2)*c1)*V_x*V_y^2"
        " + (-3*d[x]B^2 + B*d[x,x]B - 11*d[y]B^2 + B*d[y,y]B)*V_y^3"
        f" + 2*(c2 + 3*d[x]B*E_y + 3*d[y]B*E_x - 8*B*{_EXY})*V_x"
        f" + 4*(d[x]B*E_x + B*{_EXX} + 3*d[y]B*E_y - B*{_EYY})*V_y)"
    ),
}


def map_truncation() -> Truncation:
    return Truncation(min_eps=-2, max_eps=MAP_MAX_EPS)


def identity_map(chart: Chart, trunc: Optional[Truncation] = None) -> Map:
    return tuple(GradedSeries.variable(name, chart, trunc) for name in COORDINATES)


@lru_cache(maxsize=None)
def _backward_map(potential: Optional[str]) -> Map:
    trunc = map_truncation()
    series = tuple(parse(BACKWARD_MAP[name], Chart.GUIDING_CENTER, trunc) for name in COORDINATES)
    if potential is not None:
        series = tuple(substitute_potential(s, potential) for s in series)
    return series


def backward_map(potential: Optional[str] = None) -> Map:
    """
    x, y, v_x, v_y in terms of X, Y, V_x, V_y through eps^2.

    ``potential`` may be "spin" (phi -> -mu_z*B) or "off" (phi -> 0).
    """
    return _backward_map(potential)


@lru_cache(maxsize=None)
def _forward_map(potential: Optional[str]) -> Map:
    logger.debug("inverting the backward map (potential=%s)", potential)
    return invert_map(backward_map(potential))


def forward_map(potential: Optional[str] = None) -> Map:
    """X, Y, V_x, V_y in terms of x, y, v_x, v_y through eps^2."""
    return _forward_map(potential)


# -----------------------------------------------------------------------------
# Composition
# -----------------------------------------------------------------------------


class _Powers:
    def __init__(self, base: GradedSeries, trunc: Truncation):
        self._powers = [GradedSeries.constant(1, base.chart, trunc), truncate_to(base, trunc)]

    def __getitem__(self, k: int) -> GradedSeries:
        while len(self._powers) <= k:
            self._powers.append(self._powers[-1] * self._powers[1])
        return self._powers[k]


def taylor_pointwise(g: GradedSeries, dx: GradedSeries, dy: GradedSeries, trunc: Truncation) -> GradedSeries:
    """``g(P + d)`` expanded around P with commuting (pointwise) shifts of order eps."""
    for shift in (dx, dy):
        if any(key.eps < 1 for key in shift.keys()):
            raise DomainError("Taylor shifts must be of order eps")
    px, py = _Powers(dx, trunc), _Powers(dy, trunc)
    derivatives = {(0, 0): truncate_to(g, trunc)}

    def derivative(b1, b2):
        if (b1, b2) not in derivatives:
            if b2:
                derivatives[(b1, b2)] = partial_x(derivative(b1, b2 - 1), 1)
            else:
                derivatives[(b1, b2)] = partial_x(derivative(b1 - 1, b2), 0)
        return derivatives[(b1, b2)]

    result = derivatives[(0, 0)]
    order = 1
    while True:
        contributed = False
        for b1 in range(order, -1, -1):
            b2 = order - b1
            shift = px[b1] * py[b2]
            if shift.is_zero():
                continue
            contributed = True
            d = derivative(b1, b2)
            if not d.is_zero():
                result = result + (d * shift).scale(Fraction(1, factorial(b1) * factorial(b2)))
        if not contributed:
            return result
        order += 1


def compose(series: GradedSeries, substitution: Sequence[GradedSeries], trunc: Optional[Truncation] = None) -> GradedSeries:
    """
    Substitute ``substitution = (x, y, v_x, v_y)``, given in another chart, into ``series``.

    Fields in ``series`` are re-expanded around the target chart's position.
    """
    sx, sy, svx, svy = substitution
    target = sx.chart
    trunc = trunc or series.trunc.intersect(sx.trunc)
    lowest = min((key.eps for key in series.keys()), default=0)
    # negative powers of eps in ``series`` pull higher orders of the factors down
    wide = trunc
    if lowest < 0:
        wide = trunc.replace(
            max_eps=trunc.max_eps - lowest,
            max_total=None if trunc.max_total is None else trunc.max_total - lowest,
        )
    dx = truncate_to(sx, wide) - GradedSeries.variable("x", target, wide)
    dy = truncate_to(sy, wide) - GradedSeries.variable("y", target, wide)
    powers = [_Powers(s, wide) for s in (sx, sy, svx, svy)]
    shifted: Dict[TermKey, GradedSeries] = {}

    total = GradedSeries.zero(target, wide)
    for key, coeff in series.items():
        field_key = TermKey(bhalf=key.bhalf, gens=key.gens)
        if field_key not in shifted:
            g = GradedSeries({field_key: 1}, target, wide)
            shifted[field_key] = taylor_pointwise(g, dx, dy, wide) if field_key != TermKey() else g
        factor = shifted[field_key]
        for p, k in zip(powers, key.pos + key.vel):
            if k:
                factor = factor * p[k]
        total = total + factor.shift(key.hbar, key.eps).scale(coeff)
    return truncate_to(total, trunc)


def compose_map(outer: Map, inner: Map, trunc: Optional[Truncation] = None) -> Map:
    return tuple(compose(s, inner, trunc) for s in outer)


def invert_map(backward: Map, trunc: Optional[Truncation] = None) -> Map:
    """
    Series reversion of a near-identity guiding-center map.

    The leading part ``x = X, v = B(X)^(1/2) V`` is inverted exactly; the
    remainder is handled by fixed-point iteration, which gains one power of
    eps per pass.
    """
    trunc = trunc or backward[0].trunc
    gc = Chart.GUIDING_CENTER
    root_b = GradedSeries.monomial(bhalf=1, chart=gc, trunc=trunc)
    leading = (
        GradedSeries.variable("x", gc, trunc),
        GradedSeries.variable("y", gc, trunc),
        root_b * GradedSeries.variable("vx", gc, trunc),
        root_b * GradedSeries.variable("vy", gc, trunc),
    )
    remainder = tuple(truncate_to(b, trunc) - lead for b, lead in zip(backward, leading))

    x, y, vx, vy = identity_map(Chart.PARTICLE, trunc)
    inverse_root_b = GradedSeries.monomial(bhalf=-1, trunc=trunc)
    current = (x, y, inverse_root_b * vx, inverse_root_b * vy)
    for iteration in range(REVERSION_MAX_ITERATIONS):
        r = compose_map(remainder, current, trunc)
        new_x = x - r[0]
        new_y = y - r[1]
        scale = taylor_pointwise(inverse_root_b, new_x - x, new_y - y, trunc)
        updated = (new_x, new_y, scale * (vx - r[2]), scale * (vy - r[3]))
        if updated == current:
            logger.debug("map reversion converged after %d iterations", iteration + 1)
            return updated
        current = updated
    raise DomainError("map reversion did not converge")
