"""
Concrete polynomial field models for numeric checks.

A model file holds ``key = value`` lines::

    # slowly varying field
    B = 2 + 0.1*x + 0.02*y^2
    phi = 0.05*x*y
    domain = -1 1 -1 1

Optional keys ``c1``, ``c2`` and ``mu_z`` give numeric values to the free
constants (default 0).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from gcweyl import logger
from gcweyl.algebra.errors import DomainError, DomainViolation, ParseError
from gcweyl.utils.constants import (
    CONSTANT_FIELDS,
    EPS_RANGE,
    HBAR_RANGE,
    MAX_MODEL_DEGREE,
    POSITIVITY_GRID,
    POSITIVITY_MARGIN,
    VELOCITY_RANGE,
)

X, Y = sp.symbols("x y", real=True)
TRANSFORMATIONS = standard_transformations + (convert_xor,)
DEFAULT_DOMAIN = (-1.0, 1.0, -1.0, 1.0)
MODEL_KEYS = ("B", "phi", "domain") + CONSTANT_FIELDS
POINT_FIELDS = ("x", "y", "vx", "vy", "hbar", "eps")

Domain = Tuple[float, float, float, float]


def parse_field(text: str, name: str = "field") -> sp.Expr:
    """Polynomial in x and y of total degree at most four."""
    try:
        expr = parse_expr(str(text), local_dict={"x": X, "y": Y}, transformations=TRANSFORMATIONS)
    except (SyntaxError, TypeError, sp.SympifyError) as e:
        raise ParseError(f"cannot read {name} = {text!r}: {e}")
    expr = sp.sympify(expr)
    if not expr.free_symbols <= {X, Y} or not expr.is_polynomial(X, Y):
        raise DomainError(f"{name} must be a polynomial in x and y")
    if sp.Poly(expr, X, Y).total_degree() > MAX_MODEL_DEGREE:
        raise DomainError(f"{name} has degree above {MAX_MODEL_DEGREE}")
    return expr


@dataclass
class FieldModel:
    b: sp.Expr
    phi: sp.Expr = sp.Integer(0)
    domain: Domain = DEFAULT_DOMAIN
    constants: Dict[str, float] = field(default_factory=dict)
    _derivatives: Dict[Tuple[str, int, int], Callable] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        x0, x1, y0, y1 = self.domain
        if not (x0 < x1 and y0 < y1):
            raise DomainError(f"empty domain {self.domain}")
        unknown = set(self.constants) - set(CONSTANT_FIELDS)
        if unknown:
            raise DomainError(f"unknown constants {sorted(unknown)}")
        self.constants = {name: float(self.constants.get(name, 0.0)) for name in CONSTANT_FIELDS}
        self.check_positive()

    @classmethod
    def from_strings(cls, b: str, phi: str = "0", domain: Domain = DEFAULT_DOMAIN, **constants) -> "FieldModel":
        return cls(parse_field(b, "B"), parse_field(phi, "phi"), tuple(map(float, domain)), constants)

    @property
    def fields(self) -> Dict[str, sp.Expr]:
        return {"B": self.b, "phi": self.phi}

    def check_positive(self):
        x0, x1, y0, y1 = self.domain
        gx, gy = np.meshgrid(np.linspace(x0, x1, POSITIVITY_GRID), np.linspace(y0, y1, POSITIVITY_GRID))
        values = np.broadcast_to(self.derivative("B", 0, 0)(gx, gy), gx.shape)
        lowest = float(np.min(values))
        if lowest < POSITIVITY_MARGIN:
            raise DomainError(f"B drops to {lowest:.3g} on the domain (needs at least {POSITIVITY_MARGIN})")

    def derivative(self, name: str, nx: int = 0, ny: int = 0) -> Callable:
        """Vectorized ``d^nx/dx^nx d^ny/dy^ny`` of a field, compiled once."""
        key = (name, nx, ny)
        if key not in self._derivatives:
            expr = self.fields[name]
            if nx:
                expr = sp.diff(expr, X, nx)
            if ny:
                expr = sp.diff(expr, Y, ny)
            self._derivatives[key] = sp.lambdify((X, Y), expr, "numpy")
        return self._derivatives[key]

    def contains(self, x, y) -> bool:
        x0, x1, y0, y1 = self.domain
        return bool(np.all((x0 <= x) & (x <= x1) & (y0 <= y) & (y <= y1)))


def load_model(path: Union[str, Path]) -> FieldModel:
    values = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in MODEL_KEYS:
            raise ParseError(f"{path}: line {number}: expected one of {', '.join(MODEL_KEYS)} = value")
        values[key] = value.strip()
    if "B" not in values:
        raise ParseError(f"{path}: no B given")

    domain = DEFAULT_DOMAIN
    if "domain" in values:
        try:
            domain = tuple(float(v) for v in values["domain"].split())
        except ValueError:
            domain = ()
        if len(domain) != 4:
            raise ParseError(f"{path}: domain needs four numbers: xmin xmax ymin ymax")
    constants = {name: float(values[name]) for name in CONSTANT_FIELDS if name in values}
    logger.debug("loaded field model %s", values)
    return FieldModel.from_strings(values["B"], values.get("phi", "0"), domain, **constants)


# -----------------------------------------------------------------------------
# Evaluation points
# -----------------------------------------------------------------------------


@dataclass
class EvalPoint:
    """A phase-space point with values for hbar and eps.

    The coordinates may also be numpy arrays of equal length, in which case
    every evaluation is vectorized over the points.
    """

    x: float
    y: float
    vx: float
    vy: float
    hbar: float = 0.1
    eps: float = 0.5

    def __post_init__(self):
        for name in POINT_FIELDS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))

    def validate(self, model: FieldModel) -> "EvalPoint":
        if not model.contains(self.x, self.y):
            raise DomainViolation(f"point ({self.x}, {self.y}) lies outside the model domain {model.domain}")
        if np.any(np.asarray(self.hbar) <= 0) or np.any(np.asarray(self.eps) <= 0):
            raise DomainViolation("hbar and eps must be positive")
        return self

    @property
    def size(self) -> int:
        return int(np.size(self.x))


def stack_points(points: Sequence[EvalPoint]) -> EvalPoint:
    return EvalPoint(
        *(np.array([getattr(p, name) for p in points]) for name in POINT_FIELDS)
    )


def random_points(model: FieldModel, count: int, seed: int) -> EvalPoint:
    """``count`` seeded points drawn uniformly from the domain and the default ranges."""
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = model.domain
    return EvalPoint(
        x=rng.uniform(x0, x1, count),
        y=rng.uniform(y0, y1, count),
        vx=rng.uniform(*VELOCITY_RANGE, count),
        vy=rng.uniform(*VELOCITY_RANGE, count),
        hbar=rng.uniform(*HBAR_RANGE, count),
        eps=rng.uniform(*EPS_RANGE, count),
    )
