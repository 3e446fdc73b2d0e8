from fractions import Fraction

import numpy as np
import pytest

from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.errors import ChartMismatch, DomainError, EpsUnderflow
from gcweyl.algebra.series import (
    Chart,
    Generator,
    GradedSeries,
    TermKey,
    Truncation,
    partial_v,
    partial_x,
    substitute_potential,
    truncate_to,
)


def test_coefficient_arithmetic():
    i = Coefficient.i()
    assert i * i == -1
    assert Coefficient(Fraction(1, 2), 3) + Fraction(1, 2) == Coefficient(1, 3)
    assert (Coefficient(1, 1) / Coefficient(1, 1)) == 1
    assert Coefficient(0, 2) ** -1 == Coefficient(0, Fraction(-1, 2))
    assert Coefficient(3, 4).conjugate() == Coefficient(3, -4)
    assert complex(Coefficient(Fraction(1, 4), -2)) == complex(0.25, -2)


def test_coefficient_rejects_floats():
    with pytest.raises(TypeError):
        Coefficient(0.5)


def test_zero_terms_are_purged(particle):
    s = particle("v_x + x - v_x")
    assert s == particle("x")
    assert len(s) == 1
    assert (s - s).is_zero()


def test_truncation_drops_and_underflows():
    trunc = Truncation(max_hbar=1, min_eps=-1, max_eps=1, max_total=1)
    assert trunc.admits(1, 0)
    assert not trunc.admits(2, 0)
    assert not trunc.admits(0, 2)
    assert not trunc.admits(1, 1)
    with pytest.raises(EpsUnderflow) as info:
        trunc.admits(0, -2)
    assert info.value.eps == -2
    # dropped terms never underflow
    assert not trunc.admits(5, -4)


def test_truncation_round_trips_through_dict():
    trunc = Truncation(max_hbar=3, min_eps=-1, max_eps=2, max_total=3)
    assert Truncation.from_dict(trunc.to_dict()) == trunc
    with pytest.raises(DomainError):
        Truncation(min_eps=2, max_eps=1)


def test_truncation_applies_on_construction():
    trunc = Truncation(max_hbar=1)
    s = GradedSeries({TermKey(hbar=2): 1, TermKey(hbar=1): 3}, trunc=trunc)
    assert s.gradings() == [(1, 0)]


def test_charts_do_not_mix(particle, gc):
    with pytest.raises(ChartMismatch):
        particle("x") + gc("X")


def test_pointwise_product_commutes(particle):
    a = particle("x*v_x + B")
    b = particle("hbar*v_y - d[x]B")
    assert a * b == b * a
    assert a * b == particle("x*v_x*hbar*v_y - x*v_x*d[x]B + B*hbar*v_y - B*d[x]B")


def test_partial_x_of_b_power(particle):
    assert partial_x(particle("B^(1/2)"), "x") == particle("(1/2)*B^(-1/2)*d[x]B")
    assert partial_x(particle("B^-1"), 1) == particle("-B^-2*d[y]B")
    assert partial_x(particle("B"), "x") == particle("d[x]B")


def test_partial_x_of_generators(particle):
    assert partial_x(particle("d[x]B^2"), "y") == particle("2*d[x]B*d[x,y]B")
    assert partial_x(particle("x^3*phi"), "x") == particle("3*x^2*phi + x^3*d[x]phi")
    assert partial_x(particle("c1*mu_z"), "x").is_zero()


def test_mixed_partials_commute(particle):
    s = particle("x*y^2*B^(3/2)*d[x]phi + d[y]B*v_x")
    assert partial_x(partial_x(s, "x"), "y") == partial_x(partial_x(s, "y"), "x")


def test_partial_v(particle):
    s = particle("v_x^3*v_y + x*B")
    assert partial_v(s, "x") == particle("3*v_x^2*v_y")
    assert partial_v(s, 1) == particle("v_x^3")
    with pytest.raises(DomainError):
        partial_v(s, "z")


def test_generator_validation():
    with pytest.raises(DomainError):
        Generator("B").validate()
    with pytest.raises(DomainError):
        Generator("c1", 1, 0).validate()
    assert Generator("phi").validate() == Generator("phi", 0, 0)


def test_shift_and_coefficient_at(particle):
    s = particle("v_x + hbar*eps^-1*B")
    assert s.coefficient_at(1, -1) == particle("B")
    assert s.shift(eps=1).coefficient_at(1, 0) == particle("B")


def test_truncate_to_narrows(particle):
    s = particle("1 + hbar + hbar^2")
    assert truncate_to(s, Truncation(max_hbar=1)) == particle("1 + hbar")


def test_spin_substitution(gc):
    s = gc("phi + d[x]phi*d[y]phi")
    assert substitute_potential(s, "spin") == gc("-mu_z*B + mu_z^2*d[x]B*d[y]B")
    assert substitute_potential(s, "off").is_zero()
    with pytest.raises(DomainError):
        substitute_potential(s, "magnetic")


def test_chart_conversion_keeps_terms(particle):
    s = particle("x*v_y")
    moved = s.with_chart(Chart.GUIDING_CENTER)
    assert moved.chart == Chart.GUIDING_CENTER
    assert moved != s
    assert dict(moved.items()) == dict(s.items())


RING_PIECES = ("x", "v_y", "hbar", "eps", "B^(1/2)", "d[x]B", "phi", "mu_z", "i")


def random_series(rng, particle, terms=4):
    parts = []
    for _ in range(terms):
        factors = rng.choice(RING_PIECES, size=rng.integers(1, 4))
        sign = "-" if rng.random() < 0.5 else "+"
        parts.append(f"{sign} {rng.integers(1, 4)}*" + "*".join(factors))
    return particle(" ".join(parts))


def test_ring_axioms(particle):
    rng = np.random.default_rng(17)
    for _ in range(10):
        a, b, c = (random_series(rng, particle) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a + b) + c == a + (b + c)


@pytest.mark.parametrize("m", range(-8, 9, 3))
def test_b_powers_add(m):
    for n in range(-8, 9):
        product = GradedSeries.monomial(bhalf=m) * GradedSeries.monomial(bhalf=n)
        (key,) = product.keys()
        assert key.bhalf == m + n


@pytest.mark.parametrize("axis", [0, 1])
def test_partials_are_derivations(particle, axis):
    rng = np.random.default_rng(31 + axis)
    for _ in range(20):
        a, b = random_series(rng, particle, terms=6), random_series(rng, particle, terms=6)
        assert partial_x(a * b, axis) == partial_x(a, axis) * b + a * partial_x(b, axis)
        assert partial_v(a * b, axis) == partial_v(a, axis) * b + a * partial_v(b, axis)
