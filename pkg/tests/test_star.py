import numpy as np
import pytest

from gcweyl.algebra.errors import ChartMismatch, DomainError
from gcweyl.algebra.series import Chart, GradedSeries, Truncation
from gcweyl.io.text import parse
from gcweyl.star import operators
from gcweyl.star.operators import build_l, build_ln, build_p, clear_cache, terms_as_dict, weight_w
from gcweyl.star.product import moyal_bracket, poisson_bracket, star, symmetrized_star
from gcweyl.star.reference import block_mismatches, hand_l, hand_l1, hand_l2

RANDOM_PIECES = ("x", "y", "v_x", "v_y", "B", "d[x]B", "d[y]B", "phi", "x*v_y", "v_x^2")
FIELD_PIECES = ("", "", "B", "d[x]B", "d[y,y]B", "phi", "B^(1/2)")


@pytest.fixture
def fresh_operators(monkeypatch):
    clear_cache()
    yield monkeypatch
    clear_cache()


def random_symbol(rng, particle, terms=3):
    parts = []
    for _ in range(terms):
        factors = rng.choice(RANDOM_PIECES, size=rng.integers(1, 3))
        sign = "-" if rng.random() < 0.5 else "+"
        parts.append(f"{sign} {rng.integers(1, 4)}*" + "*".join(factors))
    return particle(" ".join(parts))


# -----------------------------------------------------------------------------
# Operators
# -----------------------------------------------------------------------------


def test_weights():
    assert weight_w(1, 1) == 8
    assert weight_w(2, 1) == 12
    assert weight_w(2, 2) == -12
    with pytest.raises(DomainError):
        weight_w(2, 3)
    with pytest.raises(DomainError):
        weight_w(0, 1)


def test_l_operators_match_hand_forms():
    assert terms_as_dict(build_l()) == terms_as_dict(hand_l())
    assert terms_as_dict(build_ln(1)) == terms_as_dict(hand_l1())
    assert terms_as_dict(build_ln(2)) == terms_as_dict(hand_l2())


def test_p_expansion_through_hbar_squared():
    assert block_mismatches(build_p(2)) == []


def test_p_blocks_span_eps_orders():
    p = build_p(3)
    assert sorted(p.hbar_block(3)) == [-3, -2, -1, 0]
    assert build_p(3, magnetic=False).hbar_block(3).keys() == {0}


def test_hbar_cap():
    with pytest.raises(DomainError):
        build_p(5)


def test_flipped_weight_is_detected(fresh_operators):
    original = operators.weight_w
    fresh_operators.setattr(operators, "weight_w", lambda n, k: -original(n, k) if (n, k) == (2, 2) else original(n, k))
    assert block_mismatches(build_p(2)) == ["hbar^2 eps^-1: 4 operator terms differ"]


# -----------------------------------------------------------------------------
# Products
# -----------------------------------------------------------------------------


def test_kinetic_momenta(particle, variables):
    assert star(variables["vx"], variables["vy"]) == particle("v_x*v_y + (1/2)*i*hbar*eps^-1*B")
    assert star(variables["x"], variables["vx"]) == particle("x*v_x + (1/2)*i*hbar")
    assert star(variables["vx"], variables["x"]) == particle("x*v_x - (1/2)*i*hbar")


def test_ordinary_moyal_without_field(particle):
    a, b = particle("x^2"), particle("v_x^2")
    assert star(a, b, magnetic=False) == particle("x^2*v_x^2 + 2*i*hbar*x*v_x - (1/2)*hbar^2")


def test_unit_is_neutral(particle):
    f = particle("x*v_y^2*B + phi")
    one = GradedSeries.constant(1)
    assert star(one, f) == f
    assert star(f, one) == f


def test_fundamental_brackets(particle, variables):
    x, vx, vy = variables["x"], variables["vx"], variables["vy"]
    assert moyal_bracket(x, vx) == particle("i*hbar")
    assert moyal_bracket(vx, vy) == particle("i*hbar*eps^-1*B")
    assert poisson_bracket(vx, vy) == particle("eps^-1*B")
    assert poisson_bracket(x, vx) == particle("1")


def test_poisson_bracket_of_fields(particle):
    assert poisson_bracket(particle("B"), particle("v_y")) == particle("d[y]B")
    assert poisson_bracket(particle("v_x"), particle("phi")) == particle("-d[x]phi")


def test_moyal_bracket_is_odd_part(particle):
    rng = np.random.default_rng(7)
    for _ in range(5):
        a, b = random_symbol(rng, particle), random_symbol(rng, particle)
        assert moyal_bracket(a, b) == star(a, b) - star(b, a)


def test_moyal_bracket_leading_order(particle):
    rng = np.random.default_rng(11)
    for _ in range(5):
        a, b = random_symbol(rng, particle), random_symbol(rng, particle)
        i_poisson = poisson_bracket(a, b).shift(hbar=1) * particle("i")
        difference = moyal_bracket(a, b) - i_poisson
        assert all(h != 1 for h, _ in difference.gradings())


def random_polynomial(rng, max_terms=8, degree=3):
    """Up to ``max_terms`` monomials of degree at most ``degree``, each with an optional field factor."""
    terms = []
    for _ in range(rng.integers(1, max_terms + 1)):
        exponents = np.bincount(rng.integers(0, 4, size=rng.integers(0, degree + 1)), minlength=4)
        monomial = GradedSeries.monomial(
            coeff=int(rng.integers(1, 6)) * (-1 if rng.random() < 0.5 else 1),
            pos=(int(exponents[0]), int(exponents[1])),
            vel=(int(exponents[2]), int(exponents[3])),
        )
        field = rng.choice(FIELD_PIECES)
        terms.append(monomial * parse(field) if field else monomial)
    return sum(terms, GradedSeries.zero())


def test_associativity():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        a, b, c = (random_polynomial(rng) for _ in range(3))
        assert star(star(a, b), c) == star(a, star(b, c))


@pytest.mark.parametrize("text", ["v_x^2", "v_x*v_y", "v_x^2*v_y", "v_x*v_y^3", "v_x^2*v_y^2"])
def test_symmetrized_velocities_are_pointwise(particle, text):
    monomial = particle(text)
    (kx, ky) = next(iter(monomial.keys())).vel
    factors = [particle("v_x")] * kx + [particle("v_y")] * ky
    assert symmetrized_star(factors) == monomial


def test_star_needs_particle_chart(gc, particle):
    with pytest.raises(ChartMismatch):
        star(gc("V_x"), particle("v_x"))


def test_truncation_limits_product(particle):
    trunc = Truncation(max_hbar=1)
    a, b = particle("x^2"), particle("v_x^2")
    assert star(a, b, trunc, magnetic=False) == particle("x^2*v_x^2 + 2*i*hbar*x*v_x")


def test_chart_of_result(variables):
    assert star(variables["x"], variables["y"]).chart == Chart.PARTICLE
