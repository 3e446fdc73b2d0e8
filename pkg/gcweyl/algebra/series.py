from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple

from gcweyl.algebra.coefficient import Coefficient, Number
from gcweyl.algebra.errors import ChartMismatch, DomainError, EpsUnderflow
from gcweyl.utils.constants import (
    CONSTANT_FIELDS,
    DEFAULT_MAX_EPS,
    DEFAULT_MAX_HBAR,
    DEFAULT_MIN_EPS,
    FIELD_ORDER,
)

AXES = ("x", "y")


def axis_index(axis) -> int:
    if axis in (0, 1):
        return axis
    try:
        return AXES.index(axis)
    except ValueError:
        raise DomainError(f"{axis!r} is not a planar axis (expected 'x' or 'y')")


class Chart(str, Enum):
    PARTICLE = "particle"
    GUIDING_CENTER = "guiding_center"


# -----------------------------------------------------------------------------
# Monomial keys
# -----------------------------------------------------------------------------


class Generator(NamedTuple):
    """A derivative of a field, or one of the free constants.

    ``Generator("B", 1, 0)`` is B_{,x}; ``Generator("phi")`` is the bare
    potential. Multi-indices are stored as counts so mixed partials coincide.
    """

    field: str
    nx: int = 0
    ny: int = 0

    @property
    def order(self) -> int:
        return self.nx + self.ny

    def sort_key(self):
        return (FIELD_ORDER.index(self.field), self.nx, self.ny)

    def derived(self, axis: int) -> "Generator":
        if axis == 0:
            return Generator(self.field, self.nx + 1, self.ny)
        return Generator(self.field, self.nx, self.ny + 1)

    def validate(self) -> "Generator":
        if self.field not in FIELD_ORDER:
            raise DomainError(f"unknown field {self.field!r}")
        if self.nx < 0 or self.ny < 0:
            raise DomainError("derivative orders must be non-negative")
        if self.field == "B" and self.order == 0:
            raise DomainError("underived B is carried by the B power, not as a generator")
        if self.field in CONSTANT_FIELDS and self.order:
            raise DomainError(f"{self.field} is a constant and cannot be differentiated")
        return self


Gens = Tuple[Tuple[Generator, int], ...]


def make_gens(counts: Mapping[Generator, int]) -> Gens:
    return tuple(
        sorted(((g, p) for g, p in counts.items() if p), key=lambda item: item[0].sort_key())
    )


def merge_gens(first: Gens, second: Gens) -> Gens:
    if not first:
        return second
    if not second:
        return first
    counts = dict(first)
    for g, p in second:
        counts[g] = counts.get(g, 0) + p
    return make_gens(counts)


class TermKey(NamedTuple):
    """Everything about a term except its coefficient."""

    hbar: int = 0
    eps: int = 0
    bhalf: int = 0
    gens: Gens = ()
    pos: Tuple[int, int] = (0, 0)
    vel: Tuple[int, int] = (0, 0)

    def sort_key(self):
        return (
            self.hbar,
            self.eps,
            self.bhalf,
            tuple((g.sort_key(), p) for g, p in self.gens),
            self.pos,
            self.vel,
        )

    @property
    def total(self) -> int:
        return self.hbar + self.eps

    def is_scalar(self) -> bool:
        return self.pos == (0, 0) and self.vel == (0, 0)

    def fields(self):
        return {g.field for g, _ in self.gens}

    def times(self, other: "TermKey") -> "TermKey":
        return TermKey(
            self.hbar + other.hbar,
            self.eps + other.eps,
            self.bhalf + other.bhalf,
            merge_gens(self.gens, other.gens),
            (self.pos[0] + other.pos[0], self.pos[1] + other.pos[1]),
            (self.vel[0] + other.vel[0], self.vel[1] + other.vel[1]),
        )

    def replace_grading(self, hbar: int, eps: int) -> "TermKey":
        return self._replace(hbar=hbar, eps=eps)


ONE_KEY = TermKey()


# -----------------------------------------------------------------------------
# Truncation
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Truncation:
    """
    Order window in hbar and eps.

    Terms above ``max_hbar``, above ``max_eps`` or with hbar+eps above
    ``max_total`` are dropped. A surviving term below ``min_eps`` raises
    EpsUnderflow instead of being dropped.
    """

    max_hbar: int = DEFAULT_MAX_HBAR
    min_eps: int = DEFAULT_MIN_EPS
    max_eps: int = DEFAULT_MAX_EPS
    max_total: Optional[int] = None

    def __post_init__(self):
        if self.max_hbar < 0:
            raise DomainError("max_hbar must be non-negative")
        if self.min_eps > self.max_eps:
            raise DomainError(f"min_eps={self.min_eps} exceeds max_eps={self.max_eps}")

    def admits(self, hbar: int, eps: int) -> bool:
        if hbar > self.max_hbar or eps > self.max_eps:
            return False
        if self.max_total is not None and hbar + eps > self.max_total:
            return False
        if eps < self.min_eps:
            raise EpsUnderflow(eps, self.min_eps)
        return True

    def intersect(self, other: "Truncation") -> "Truncation":
        if other is None or other == self:
            return self
        totals = [t for t in (self.max_total, other.max_total) if t is not None]
        return Truncation(
            max_hbar=min(self.max_hbar, other.max_hbar),
            min_eps=max(self.min_eps, other.min_eps),
            max_eps=min(self.max_eps, other.max_eps),
            max_total=min(totals) if totals else None,
        )

    def replace(self, **changes) -> "Truncation":
        values = asdict(self)
        values.update(changes)
        return Truncation(**values)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: Mapping) -> "Truncation":
        known = {k: values[k] for k in ("max_hbar", "min_eps", "max_eps", "max_total") if k in values}
        return cls(**known)


DEFAULT_TRUNCATION = Truncation()


# -----------------------------------------------------------------------------
# Graded series
# -----------------------------------------------------------------------------


class GradedSeries:
    """
    Finite sum of terms ``coeff * hbar^h * eps^e * B^(b/2) * gens * pos * vel``.

    Instances are normalized on construction (zero coefficients purged,
    truncation applied) and never mutated afterwards.
    """

    __slots__ = ("chart", "trunc", "_terms", "_hash")

    def __init__(
        self,
        terms: Optional[Mapping[TermKey, Number]] = None,
        chart: Chart = Chart.PARTICLE,
        trunc: Optional[Truncation] = None,
    ):
        self.chart = Chart(chart)
        self.trunc = trunc or DEFAULT_TRUNCATION
        cleaned = {}
        for key, coeff in (terms or {}).items():
            coeff = Coefficient.of(coeff)
            if coeff.is_zero() or not self.trunc.admits(key.hbar, key.eps):
                continue
            cleaned[key] = coeff
        self._terms = cleaned
        self._hash = None

    # Constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, chart=Chart.PARTICLE, trunc=None) -> "GradedSeries":
        return cls({}, chart, trunc)

    @classmethod
    def constant(cls, value: Number = 1, chart=Chart.PARTICLE, trunc=None) -> "GradedSeries":
        return cls({ONE_KEY: value}, chart, trunc)

    @classmethod
    def monomial(
        cls,
        coeff: Number = 1,
        hbar: int = 0,
        eps: int = 0,
        bhalf: int = 0,
        gens: Iterable[Tuple[Generator, int]] = (),
        pos: Tuple[int, int] = (0, 0),
        vel: Tuple[int, int] = (0, 0),
        chart=Chart.PARTICLE,
        trunc=None,
    ) -> "GradedSeries":
        counts = {}
        for g, p in gens:
            g = Generator(*g).validate()
            counts[g] = counts.get(g, 0) + p
        key = TermKey(hbar, eps, bhalf, make_gens(counts), tuple(pos), tuple(vel))
        return cls({key: coeff}, chart, trunc)

    @classmethod
    def variable(cls, name: str, chart=Chart.PARTICLE, trunc=None) -> "GradedSeries":
        """``name`` is one of 'x', 'y', 'vx', 'vy' in the given chart."""
        exponents = {
            "x": ((1, 0), (0, 0)),
            "y": ((0, 1), (0, 0)),
            "vx": ((0, 0), (1, 0)),
            "vy": ((0, 0), (0, 1)),
        }
        pos, vel = exponents[name]
        return cls.monomial(pos=pos, vel=vel, chart=chart, trunc=trunc)

    def _new(self, terms, trunc=None) -> "GradedSeries":
        return GradedSeries(terms, self.chart, trunc or self.trunc)

    # Inspection -----------------------------------------------------------

    @property
    def terms(self):
        """Terms in canonical order as ``(TermKey, Coefficient)`` pairs."""
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coefficient(self, key: TermKey) -> Coefficient:
        return self._terms.get(key, Coefficient(0))

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[TermKey, Coefficient]]:
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(key.is_scalar() for key in self._terms)

    def has_field(self, field: str) -> bool:
        return any(field in key.fields() for key in self._terms)

    def gradings(self):
        return sorted({(key.hbar, key.eps) for key in self._terms})

    def __repr__(self):
        return f"GradedSeries({self.chart.value}, {len(self)} terms)"

    # Arithmetic -----------------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(other, self))

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return add(self, -_coerce(other, self))

    def __rsub__(self, other):
        return add(_coerce(other, self), -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            return self.scale(other)
        return mul_pointwise(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise DomainError("negative powers of a series are not defined")
        result = GradedSeries.constant(1, self.chart, self.trunc)
        for _ in range(exponent):
            result = mul_pointwise(result, self)
        return result

    def scale(self, factor: Number) -> "GradedSeries":
        factor = Coefficient.of(factor)
        return self._new({k: c * factor for k, c in self._terms.items()})

    def shift(self, hbar: int = 0, eps: int = 0) -> "GradedSeries":
        """Multiply by ``hbar^hbar * eps^eps``."""
        return self._new(
            {k.replace_grading(k.hbar + hbar, k.eps + eps): c for k, c in self._terms.items()}
        )

    # Selection ------------------------------------------------------------

    def restrict(self, predicate: Callable[[TermKey], bool]) -> "GradedSeries":
        return self._new({k: c for k, c in self._terms.items() if predicate(k)})

    def coefficient_at(self, hbar: int, eps: int) -> "GradedSeries":
        """The part multiplying ``hbar^hbar * eps^eps``, with the grading removed."""
        return self._new(
            {
                k.replace_grading(0, 0): c
                for k, c in self._terms.items()
                if k.hbar == hbar and k.eps == eps
            }
        )

    def with_chart(self, chart: Chart) -> "GradedSeries":
        return GradedSeries(self._terms, chart, self.trunc)

    # Comparison -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Coefficient)):
            other = GradedSeries.constant(other, self.chart)
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return equals(self, other)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self._terms.items())))
        return self._hash


def _coerce(value, like: GradedSeries) -> GradedSeries:
    if isinstance(value, GradedSeries):
        return value
    return GradedSeries.constant(value, like.chart, like.trunc)


def _check_charts(a: GradedSeries, b: GradedSeries):
    if a.chart != b.chart:
        raise ChartMismatch(f"cannot combine {a.chart.value} and {b.chart.value} series")


# -----------------------------------------------------------------------------
# Operations
# -----------------------------------------------------------------------------


def add(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    _check_charts(a, b)
    terms = dict(a.items())
    for key, coeff in b.items():
        terms[key] = terms[key] + coeff if key in terms else coeff
    return GradedSeries(terms, a.chart, a.trunc.intersect(b.trunc))


def mul_pointwise(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    _check_charts(a, b)
    trunc = a.trunc.intersect(b.trunc)
    terms: Dict[TermKey, Coefficient] = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            if not trunc.admits(ka.hbar + kb.hbar, ka.eps + kb.eps):
                continue
            key = ka.times(kb)
            coeff = ca * cb
            terms[key] = terms[key] + coeff if key in terms else coeff
    return GradedSeries(terms, a.chart, trunc)


def partial_x(a: GradedSeries, axis) -> GradedSeries:
    """Total derivative along a position axis, acting on fields and positions."""
    i = axis_index(axis)
    terms: Dict[TermKey, Coefficient] = {}

    def accumulate(key, coeff):
        terms[key] = terms[key] + coeff if key in terms else coeff

    db = Generator("B").derived(i)
    for key, coeff in a.items():
        if key.bhalf:
            accumulate(
                key._replace(bhalf=key.bhalf - 2, gens=merge_gens(key.gens, ((db, 1),))),
                coeff * Fraction(key.bhalf, 2),
            )
        for g, p in key.gens:
            if g.field in CONSTANT_FIELDS:
                continue
            counts = dict(key.gens)
            counts[g] = p - 1
            shifted = g.derived(i)
            counts[shifted] = counts.get(shifted, 0) + 1
            accumulate(key._replace(gens=make_gens(counts)), coeff * p)
        if key.pos[i]:
            pos = list(key.pos)
            pos[i] -= 1
            accumulate(key._replace(pos=tuple(pos)), coeff * key.pos[i])
    return GradedSeries(terms, a.chart, a.trunc)


def partial_v(a: GradedSeries, axis) -> GradedSeries:
    i = axis_index(axis)
    terms: Dict[TermKey, Coefficient] = {}
    for key, coeff in a.items():
        k = key.vel[i]
        if not k:
            continue
        vel = list(key.vel)
        vel[i] -= 1
        new_key = key._replace(vel=tuple(vel))
        terms[new_key] = terms[new_key] + coeff * k if new_key in terms else coeff * k
    return GradedSeries(terms, a.chart, a.trunc)


def normalize(a: GradedSeries) -> GradedSeries:
    return GradedSeries(dict(a.items()), a.chart, a.trunc)


def equals(a: GradedSeries, b: GradedSeries) -> bool:
    if a.chart != b.chart:
        return False
    return dict(a.items()) == dict(b.items())


def truncate_to(a: GradedSeries, trunc: Truncation) -> GradedSeries:
    return GradedSeries(dict(a.items()), a.chart, trunc)


def substitute_potential(a: GradedSeries, mode: str) -> GradedSeries:
    """
    Rewrite the electrostatic potential.

    ``mode="spin"`` replaces phi by -mu_z*B (and each derivative of phi by the
    matching derivative of -mu_z*B). ``mode="off"`` sets phi to zero.
    """
    if mode not in ("spin", "off"):
        raise DomainError(f"unknown potential substitution {mode!r}")
    mu = Generator("mu_z")
    terms: Dict[TermKey, Coefficient] = {}
    for key, coeff in a.items():
        if "phi" not in key.fields():
            terms[key] = terms.get(key, Coefficient(0)) + coeff
            continue
        if mode == "off":
            continue
        counts = {}
        bhalf = key.bhalf
        for g, p in key.gens:
            if g.field != "phi":
                counts[g] = counts.get(g, 0) + p
                continue
            coeff = coeff * (-1) ** p
            counts[mu] = counts.get(mu, 0) + p
            if g.order == 0:
                bhalf += 2 * p
            else:
                db = Generator("B", g.nx, g.ny)
                counts[db] = counts.get(db, 0) + p
        new_key = key._replace(bhalf=bhalf, gens=make_gens(counts))
        terms[new_key] = terms.get(new_key, Coefficient(0)) + coeff
    return GradedSeries(terms, a.chart, a.trunc)
