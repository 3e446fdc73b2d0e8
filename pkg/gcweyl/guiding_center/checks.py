import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from gcweyl.algebra.errors import UndeterminedOrderWarning
from gcweyl.algebra.series import Chart, GradedSeries, Truncation, truncate_to
from gcweyl.guiding_center.maps import (
    GC_NAMES,
    Map,
    backward_map,
    compose,
    forward_map,
    identity_map,
    map_truncation,
)
from gcweyl.guiding_center.reference import (
    FORWARD_MAP_FIRST_ORDER,
    FORWARD_MAP_NO_POTENTIAL,
    reference_forward_map,
)
from gcweyl.io.text import render
from gcweyl.star.product import poisson_bracket
from gcweyl.utils.constants import MAP_MAX_EPS


@dataclass
class CompositionReport:
    residuals: Dict[str, GradedSeries]

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def residual_at(self, name: str, eps: int) -> GradedSeries:
        return self.residuals[name].coefficient_at(0, eps)

    def lines(self) -> List[str]:
        return [f"{name}: {render(r)}" for name, r in self.residuals.items()]


def compose_identity_check(forward: Optional[Map] = None, backward: Optional[Map] = None) -> CompositionReport:
    """Substitute the backward map into the forward map; every residual should vanish through eps^2."""
    forward = forward or forward_map()
    backward = backward or backward_map()
    trunc = map_truncation()
    identity = identity_map(Chart.GUIDING_CENTER, trunc)
    residuals = {
        name: compose(f, backward, trunc) - target
        for name, f, target in zip(GC_NAMES, forward, identity)
    }
    return CompositionReport(residuals)


def forward_reference_check() -> CompositionReport:
    """
    Compare the reverted forward map with its closed form.

    The electric-field terms are compared through eps^1; the full eps^2 map
    is compared with phi switched off.
    """
    first = reference_forward_map(FORWARD_MAP_FIRST_ORDER, max_eps=1)
    no_potential = reference_forward_map(FORWARD_MAP_NO_POTENTIAL)
    residuals = {}
    for name, actual, actual_off in zip(GC_NAMES, forward_map(), forward_map("off")):
        expected = first[name]
        residuals[name] = truncate_to(actual, expected.trunc) - expected
        residuals[f"{name} (phi = 0)"] = actual_off - no_potential[name]
    return CompositionReport(residuals)


# -----------------------------------------------------------------------------
# Classical brackets of the guiding-center coordinates
# -----------------------------------------------------------------------------

BRACKET_PAIRS = (
    ("V_x", "V_y"),
    ("X", "Y"),
    ("X", "V_x"),
    ("X", "V_y"),
    ("Y", "V_x"),
    ("Y", "V_y"),
)

# Maps known through eps^2 fix brackets carrying a 1/eps through eps^1
DETERMINED_MAX_EPS = MAP_MAX_EPS - 1
LOWEST_BRACKET_EPS = -1


def expected_bracket(pair: Tuple[str, str], trunc: Truncation) -> GradedSeries:
    gc = Chart.GUIDING_CENTER
    if pair == ("V_x", "V_y"):
        return GradedSeries.monomial(eps=-1, chart=gc, trunc=trunc)
    if pair == ("X", "Y"):
        return GradedSeries.monomial(coeff=-1, eps=1, bhalf=-2, chart=gc, trunc=trunc)
    return GradedSeries.zero(gc, trunc)


@dataclass
class BracketRow:
    pair: Tuple[str, str]
    eps: int
    residual: GradedSeries
    asserted: bool
    determined: bool

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


@dataclass
class BracketReport:
    rows: List[BracketRow] = field(default_factory=list)
    first_undetermined: int = DETERMINED_MAX_EPS + 1

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows if row.asserted)

    def row(self, pair, eps) -> BracketRow:
        return next(r for r in self.rows if r.pair == tuple(pair) and r.eps == eps)

    def lines(self) -> List[str]:
        out = []
        for row in self.rows:
            status = "ok" if row.ok else "MISMATCH"
            if not row.asserted:
                status += " (reported)" if row.determined else " (undetermined)"
            out.append(f"{{{row.pair[0]},{row.pair[1]}}} eps^{row.eps}: {status}")
        return out


def _asserted_orders(expected: GradedSeries) -> set:
    """The two lowest orders, plus the leading order of the expected value when it is determined."""
    orders = {LOWEST_BRACKET_EPS, LOWEST_BRACKET_EPS + 1}
    leading = min((e for _, e in expected.gradings()), default=None)
    if leading is not None and leading <= DETERMINED_MAX_EPS:
        orders.add(leading)
    return orders


def verify_classical_brackets(forward: Optional[Map] = None, backward: Optional[Map] = None) -> BracketReport:
    """
    Poisson brackets of the forward-map coordinates, rewritten at the guiding center.

    Expected: {V_x,V_y} = 1/eps, {X,Y} = -eps/B, and zero for mixed pairs.
    """
    forward = forward or forward_map()
    backward = backward or backward_map()
    trunc = map_truncation()
    coordinates = dict(zip(GC_NAMES, forward))
    report = BracketReport()
    for pair in BRACKET_PAIRS:
        bracket = poisson_bracket(coordinates[pair[0]], coordinates[pair[1]], trunc)
        expected = expected_bracket(pair, trunc)
        residual = compose(bracket, backward, trunc) - expected
        asserted = _asserted_orders(expected)
        for eps in range(LOWEST_BRACKET_EPS, trunc.max_eps + 1):
            report.rows.append(
                BracketRow(
                    pair=pair,
                    eps=eps,
                    residual=residual.coefficient_at(0, eps),
                    asserted=eps in asserted,
                    determined=eps <= DETERMINED_MAX_EPS,
                )
            )
    warnings.warn(
        f"brackets above eps^{DETERMINED_MAX_EPS} are not fixed by maps truncated at eps^{MAP_MAX_EPS}",
        UndeterminedOrderWarning,
        stacklevel=2,
    )
    return report
