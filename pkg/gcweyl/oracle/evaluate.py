"""
Numeric evaluation of symbols and an independent route to the star product.

``numeric_star`` never touches the symbolic product: it converts both
factors to closed-form sympy polynomials, differentiates them exactly and
applies the operator blocks of P directly at the evaluation points.
"""

from itertools import product as cartesian
from math import factorial
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import sympy as sp
import xarray as xr

from gcweyl import logger
from gcweyl.algebra.errors import DomainError, DomainViolation, WordPresent
from gcweyl.algebra.series import Chart, Generator, GradedSeries, TermKey, Truncation
from gcweyl.guiding_center.words import GCWordSeries
from gcweyl.io.text import parse, render
from gcweyl.oracle.models import X, Y, EvalPoint, FieldModel, random_points
from gcweyl.star.operators import build_p
from gcweyl.star.product import star
from gcweyl.utils.constants import (
    CONSTANT_FIELDS,
    DEFAULT_MAX_EPS,
    DEFAULT_POINTS,
    DEFAULT_SEED,
    ORACLE_ABS_FLOOR,
    ORACLE_MAX_DEGREE,
    ORACLE_MAX_HBAR,
    ORACLE_TOLERANCE,
)

VX, VY, HBAR, EPS = sp.symbols("v_x v_y hbar eps", real=True)
PHASE_SPACE = (X, Y, VX, VY)
ARGUMENTS = PHASE_SPACE + (HBAR, EPS)

ORACLE_TRUNCATION = Truncation(max_hbar=ORACLE_MAX_HBAR, min_eps=-ORACLE_MAX_HBAR, max_eps=DEFAULT_MAX_EPS)

Symbol = Union[GradedSeries, sp.Expr]


# -----------------------------------------------------------------------------
# evalSeries
# -----------------------------------------------------------------------------


class _FieldValues:
    """Field derivatives at the evaluation point(s), computed on first use."""

    def __init__(self, model: FieldModel, point: EvalPoint):
        self.model = model
        self.point = point
        self._values = {}

    def __getitem__(self, generator) -> np.ndarray:
        if generator not in self._values:
            if generator.field in CONSTANT_FIELDS:
                value = self.model.constants[generator.field]
            else:
                value = self.model.derivative(generator.field, generator.nx, generator.ny)(self.point.x, self.point.y)
            self._values[generator] = np.asarray(value, dtype=float)
        return self._values[generator]

    def b_power(self, bhalf: int) -> np.ndarray:
        b = self[_B]
        if (bhalf < 0 or bhalf % 2) and np.any(b <= 0):
            raise DomainViolation("B must be positive where negative or half-integer powers are taken")
        return np.power(b, bhalf / 2)


_B = Generator("B")


def _key_value(key: TermKey, values: _FieldValues) -> np.ndarray:
    p = values.point
    value = np.power(p.hbar, key.hbar) * np.power(p.eps, key.eps)
    if key.bhalf:
        value = value * values.b_power(key.bhalf)
    for g, power in key.gens:
        value = value * np.power(values[g], power)
    for coordinate, k in zip((p.x, p.y, p.vx, p.vy), key.pos + key.vel):
        if k:
            value = value * np.power(coordinate, k)
    return value


def _scalar_series(s) -> GradedSeries:
    if isinstance(s, GCWordSeries):
        if any(word for word in s.words()):
            raise WordPresent("only scalar series can be evaluated; normal order and reduce words first")
        return s.scalar_part()
    return s


def eval_series(s, model: FieldModel, point: EvalPoint):
    """
    Value of a series at ``point``.

    Guiding-center series are evaluated with the point's coordinates read as
    X, Y, V_x, V_y. Returns a complex number, or an array for stacked points.
    """
    series = _scalar_series(s)
    point.validate(model)
    values = _FieldValues(model, point)
    total = np.zeros(np.shape(point.x), dtype=complex)
    for key, coeff in series.items():
        total = total + complex(coeff) * _key_value(key, values)
    return complex(total) if total.ndim == 0 else total


# -----------------------------------------------------------------------------
# Closed forms
# -----------------------------------------------------------------------------


def _rational(value) -> sp.Rational:
    return sp.Rational(value.numerator, value.denominator)


def to_sympy(s: GradedSeries, model: FieldModel) -> sp.Expr:
    """Closed form of a series with the model's fields substituted."""
    fields = model.fields
    expr = sp.Integer(0)
    for key, coeff in s.items():
        term = _rational(coeff.re) + sp.I * _rational(coeff.im)
        term *= HBAR**key.hbar * EPS**key.eps
        if key.bhalf:
            term *= model.b ** sp.Rational(key.bhalf, 2)
        for g, power in key.gens:
            if g.field in CONSTANT_FIELDS:
                term *= sp.nsimplify(model.constants[g.field]) ** power
            else:
                term *= sp.diff(fields[g.field], X, g.nx, Y, g.ny) ** power
        for symbol, k in zip(PHASE_SPACE, key.pos + key.vel):
            term *= symbol**k
        expr += term
    return sp.expand(expr)


def _as_expr(f: Symbol, model: FieldModel) -> sp.Expr:
    expr = to_sympy(f, model) if isinstance(f, GradedSeries) else sp.sympify(f)
    if not expr.is_polynomial(*PHASE_SPACE):
        raise DomainViolation(f"{expr} is not polynomial in (x, y, v_x, v_y)")
    return expr


class _Partials:
    """Compiled partial derivatives of one closed-form factor."""

    def __init__(self, expr: sp.Expr):
        self.expr = expr
        self._compiled = {}

    def __call__(self, dx, dv, point: EvalPoint):
        key = (dx, dv)
        if key not in self._compiled:
            d = self.expr
            for symbol, k in zip(PHASE_SPACE, dx + dv):
                if k:
                    d = sp.diff(d, symbol, k)
            self._compiled[key] = None if d == 0 else sp.lambdify(ARGUMENTS, d, "numpy")
        function = self._compiled[key]
        if function is None:
            return 0
        return function(point.x, point.y, point.vx, point.vy, point.hbar, point.eps)


def numeric_star(
    fa: Symbol,
    fb: Symbol,
    model: FieldModel,
    point: EvalPoint,
    trunc: Optional[Truncation] = None,
    magnetic: bool = True,
):
    """
    Apply the truncated operator P to two closed-form polynomials.

    Blocks outside ``trunc`` are skipped; grading carried by the factors
    themselves is evaluated numerically, so compare ungraded factors only.
    """
    trunc = trunc or ORACLE_TRUNCATION
    point.validate(model)
    left, right = _Partials(_as_expr(fa, model)), _Partials(_as_expr(fb, model))
    values = _FieldValues(model, point)
    prefactors: Dict[TermKey, np.ndarray] = {}
    total = np.zeros(np.shape(point.x), dtype=complex)
    for h, e, block in build_p(trunc, magnetic).entries:
        if not trunc.admits(h, e):
            continue
        weight = np.power(point.hbar, h) * np.power(point.eps, e)
        for op in block:
            da = left(op.d_left_x, op.d_left_v, point)
            if np.all(da == 0):
                continue
            db = right(op.d_right_x, op.d_right_v, point)
            if np.all(db == 0):
                continue
            pre = op.prefactor_key
            if pre not in prefactors:
                prefactors[pre] = _key_value(pre, values)
            total = total + complex(op.coeff) * weight * prefactors[pre] * da * db
    return complex(total) if total.ndim == 0 else total


def moyal_oracle(fa: Symbol, fb: Symbol, model: FieldModel, max_hbar: int) -> sp.Expr:
    """
    Ordinary Moyal product by direct expansion of
    ``exp[(i hbar/2) sum_i (dL_{x_i} dR_{v_i} - dL_{v_i} dR_{x_i})]``.
    """
    a, b = _as_expr(fa, model), _as_expr(fb, model)
    # (left symbol, right symbol, sign) for each commuting piece of the exponent
    pieces = ((X, VX, 1), (VX, X, -1), (Y, VY, 1), (VY, Y, -1))
    result = sp.Integer(0)
    for powers in cartesian(range(max_hbar + 1), repeat=len(pieces)):
        order = sum(powers)
        if order > max_hbar:
            continue
        da, db = a, b
        weight = (sp.I * HBAR / 2) ** order
        for (sl, sr, sign), k in zip(pieces, powers):
            if k:
                da = sp.diff(da, sl, k)
                db = sp.diff(db, sr, k)
                weight *= sp.Integer(sign) ** k / factorial(k)
        result += weight * da * db
    return sp.expand(result)


# -----------------------------------------------------------------------------
# Symbolic against numeric
# -----------------------------------------------------------------------------


def monomials(max_degree: int = ORACLE_MAX_DEGREE, trunc: Optional[Truncation] = None) -> List[GradedSeries]:
    """Every x^i y^j v_x^k v_y^l with i + j + k + l <= max_degree."""
    trunc = trunc or ORACLE_TRUNCATION
    found = []
    for i, j, k, l in cartesian(range(max_degree + 1), repeat=4):
        if i + j + k + l <= max_degree:
            found.append(GradedSeries.monomial(pos=(i, j), vel=(k, l), trunc=trunc))
    return sorted(found, key=lambda m: next(iter(m.keys())).sort_key())


def monomial_pairs(max_degree: int = ORACLE_MAX_DEGREE, trunc: Optional[Truncation] = None):
    pool = monomials(max_degree, trunc)
    return [(a, b) for a in pool for b in pool]


def _as_series(s, trunc: Truncation) -> GradedSeries:
    return parse(s, Chart.PARTICLE, trunc) if isinstance(s, str) else s


def compare_symbolic_numeric(
    pairs: Iterable[Tuple],
    model: FieldModel,
    points: Union[int, EvalPoint] = DEFAULT_POINTS,
    tol: float = ORACLE_TOLERANCE,
    seed: int = DEFAULT_SEED,
    trunc: Optional[Truncation] = None,
    magnetic: bool = True,
) -> xr.Dataset:
    """
    Evaluate ``star(a, b)`` and ``numeric_star(a, b)`` on the same points.

    Parameters:
        pairs: ``(a, b)`` symbols, as series or particle-chart text
        model (FieldModel): fields used by both paths
        points: number of seeded random points, or an explicit (stacked) EvalPoint
        tol (float): relative tolerance; a point passes when the discrepancy is
            at most ``ORACLE_ABS_FLOOR + tol * |numeric|``

    Returns an ``xr.Dataset`` over ``pair`` and ``point`` with the seed,
    tolerance and verdict in its attributes.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    trunc = trunc or ORACLE_TRUNCATION
    sample = points if isinstance(points, EvalPoint) else random_points(model, points, seed)
    n = sample.size
    labels, symbolic, numeric = [], [], []
    for a, b in pairs:
        a, b = _as_series(a, trunc), _as_series(b, trunc)
        labels.append(f"{render(a)} | {render(b)}")
        symbolic.append(np.broadcast_to(eval_series(star(a, b, trunc, magnetic), model, sample), (n,)))
        numeric.append(np.broadcast_to(numeric_star(a, b, model, sample, trunc, magnetic), (n,)))

    symbolic = np.array(symbolic, dtype=complex).reshape(len(labels), n)
    numeric = np.array(numeric, dtype=complex).reshape(len(labels), n)
    discrepancy = np.abs(symbolic - numeric)
    bound = ORACLE_ABS_FLOOR + tol * np.abs(numeric)
    relative = discrepancy / np.maximum(np.abs(numeric), ORACLE_ABS_FLOOR)
    passed = bool(np.all(discrepancy <= bound))
    logger.info("oracle: %d pairs on %d points, passed=%s", len(labels), n, passed)

    def along_points(values):
        return (["point"], np.broadcast_to(np.asarray(values, dtype=float), (n,)))

    return xr.Dataset(
        {
            "symbolic": (["pair", "point"], symbolic),
            "numeric": (["pair", "point"], numeric),
            "discrepancy": (["pair", "point"], discrepancy),
            "relative": (["pair", "point"], relative),
            "within": (["pair", "point"], discrepancy <= bound),
        },
        coords={
            "pair": (["pair"], labels),
            "point": (["point"], np.arange(n)),
            "x": along_points(sample.x),
            "y": along_points(sample.y),
            "v_x": along_points(sample.vx),
            "v_y": along_points(sample.vy),
            "hbar": along_points(sample.hbar),
            "eps": along_points(sample.eps),
        },
        attrs={
            "seed": seed,
            "tol": tol,
            "abs_floor": ORACLE_ABS_FLOOR,
            "max_relative": float(relative.max()) if relative.size else 0.0,
            "passed": passed,
        },
    )
