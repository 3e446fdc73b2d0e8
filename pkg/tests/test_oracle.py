import numpy as np
import pytest
import sympy as sp

from gcweyl.algebra.errors import DomainError, DomainViolation, ParseError, WordPresent
from gcweyl.algebra.series import partial_x
from gcweyl.guiding_center import GCWordSeries
from gcweyl.oracle import (
    EvalPoint,
    FieldModel,
    compare_symbolic_numeric,
    eval_series,
    load_model,
    monomial_pairs,
    monomials,
    moyal_oracle,
    numeric_star,
    oscillator_check,
    random_points,
    stack_points,
    to_sympy,
)
from gcweyl.oracle.evaluate import HBAR, VX
from gcweyl.oracle.models import X, Y
from gcweyl.oracle.oscillator import velocity_matrices
from gcweyl.star.product import star

POINT = EvalPoint(x=0.2, y=-0.1, vx=0.3, vy=-0.2, hbar=0.1, eps=0.5)


# -----------------------------------------------------------------------------
# Models
# -----------------------------------------------------------------------------


def test_load_model(model_files):
    model = load_model(model_files["varying"])
    assert sp.expand(model.b - (2 + X / 10 + Y**2 / 50)) == 0
    assert sp.expand(model.phi - X * Y / 20) == 0
    assert model.domain == (-1.0, 1.0, -1.0, 1.0)
    assert model.constants == {"c1": 0.0, "c2": 0.0, "mu_z": 0.0}
    assert load_model(model_files["constant"]).b == sp.Rational(3, 2)


@pytest.mark.parametrize(
    "text",
    [
        "phi = x\n",
        "B = 1\nA = x\n",
        "B = 1\ndomain = 0 1\n",
        "B = 1 +\n",
    ],
)
def test_malformed_model_files(tmp_path, text):
    path = tmp_path / "model.txt"
    path.write_text(text)
    with pytest.raises(ParseError):
        load_model(path)


def test_field_must_stay_positive():
    with pytest.raises(DomainError):
        FieldModel.from_strings("x")
    with pytest.raises(DomainError):
        FieldModel.from_strings("1 + x^5")
    with pytest.raises(DomainError):
        FieldModel.from_strings("1 + sin(x)")
    FieldModel.from_strings("x", domain=(1, 2, -1, 1))


def test_points_are_checked(constant_model):
    with pytest.raises(DomainViolation):
        EvalPoint(x=1.5, y=0, vx=0, vy=0).validate(constant_model)
    with pytest.raises(DomainViolation):
        EvalPoint(x=0, y=0, vx=0, vy=0, eps=0).validate(constant_model)


def test_random_points_are_seeded(varying_model):
    first = random_points(varying_model, 5, seed=3)
    second = random_points(varying_model, 5, seed=3)
    assert first.size == 5
    np.testing.assert_array_equal(first.x, second.x)
    np.testing.assert_array_equal(first.eps, second.eps)
    assert varying_model.contains(first.x, first.y)


# -----------------------------------------------------------------------------
# Evaluation
# -----------------------------------------------------------------------------


def test_eval_half_power_of_b(particle):
    model = FieldModel.from_strings("4")
    assert eval_series(particle("B^(1/2)"), model, POINT) == pytest.approx(2)
    assert eval_series(particle("B^(-1/2)*hbar"), model, POINT) == pytest.approx(0.05)


def test_eval_refuses_words(constant_model):
    with pytest.raises(WordPresent):
        eval_series(GCWordSeries.word("xy"), constant_model, POINT)


def test_eval_stacked_points(particle, varying_model):
    points = [POINT, EvalPoint(x=-0.5, y=0.7, vx=1.0, vy=0.0, hbar=0.2, eps=0.3)]
    s = particle("x*v_x*B + i*hbar*eps^-1*phi")
    stacked = eval_series(s, varying_model, stack_points(points))
    assert stacked.shape == (2,)
    for value, point in zip(stacked, points):
        assert value == pytest.approx(eval_series(s, varying_model, point))


def test_partial_x_matches_central_difference(particle, varying_model):
    s = particle("B^(1/2)*x*d[y]B + phi*v_x + B^-1")
    step = 1e-5
    ahead = EvalPoint(x=0.2 + step, y=-0.1, vx=0.3, vy=-0.2)
    behind = EvalPoint(x=0.2 - step, y=-0.1, vx=0.3, vy=-0.2)
    difference = (eval_series(s, varying_model, ahead) - eval_series(s, varying_model, behind)) / (2 * step)
    assert eval_series(partial_x(s, "x"), varying_model, POINT) == pytest.approx(difference, rel=1e-7)


def test_to_sympy_substitutes_fields(particle, constant_model):
    assert sp.expand(to_sympy(particle("B*v_x + hbar"), constant_model) - (sp.Rational(3, 2) * VX + HBAR)) == 0


# -----------------------------------------------------------------------------
# Star products
# -----------------------------------------------------------------------------


def test_kinetic_momenta_at_a_point(variables):
    model = FieldModel.from_strings("2")
    expected = 0.3 * -0.2 + 0.5j * 0.1 / 0.5 * 2
    assert eval_series(star(variables["vx"], variables["vy"]), model, POINT) == pytest.approx(expected)
    assert numeric_star(variables["vx"], variables["vy"], model, POINT) == pytest.approx(expected)


def test_numeric_star_with_unit(particle, varying_model):
    f = particle("x*v_y^2 + B*v_x")
    value = eval_series(f, varying_model, POINT)
    assert numeric_star(sp.Integer(1), f, varying_model, POINT) == pytest.approx(value)
    assert numeric_star(f, sp.Integer(1), varying_model, POINT) == pytest.approx(value)


def test_ordinary_moyal_at_a_point(particle, constant_model):
    point = EvalPoint(x=0.5, y=0.0, vx=0.4, vy=0.0, hbar=0.1)
    expected = 0.25 * 0.16 + 2j * 0.1 * 0.5 * 0.4 - 0.1**2 / 2
    a, b = particle("x^2"), particle("v_x^2")
    assert numeric_star(a, b, constant_model, point, magnetic=False) == pytest.approx(expected)
    assert eval_series(star(a, b, magnetic=False), constant_model, point) == pytest.approx(expected)


def test_moyal_oracle_agrees_with_engine(particle, constant_model):
    a, b = particle("x^2*y"), particle("v_x^2*v_y + x*v_y")
    engine = to_sympy(star(a, b, magnetic=False), constant_model)
    assert sp.expand(engine - moyal_oracle(a, b, constant_model, 2)) == 0


def test_numeric_star_is_linear(particle, varying_model):
    a, b, c = particle("x*v_x"), particle("v_y^2"), particle("y*v_x*v_y")
    together = numeric_star(a + b, c, varying_model, POINT)
    apart = numeric_star(a, c, varying_model, POINT) + numeric_star(b, c, varying_model, POINT)
    assert together == pytest.approx(apart)


# -----------------------------------------------------------------------------
# Symbolic against numeric
# -----------------------------------------------------------------------------


@pytest.mark.parametrize("model_name", ["constant_model", "varying_model"])
def test_symbolic_matches_numeric(request, model_name):
    model = request.getfixturevalue(model_name)
    pairs = monomial_pairs(3)
    report = compare_symbolic_numeric(pairs, model, points=100, seed=5)
    assert report.attrs["passed"], float(report["relative"].max())
    assert report.sizes == {"pair": len(monomials(3)) ** 2, "point": 100}
    assert bool(report["within"].all())


def test_text_pairs_and_small_eps(varying_model):
    n = 8
    rng = np.random.default_rng(0)
    points = EvalPoint(
        x=rng.uniform(-1, 1, n),
        y=rng.uniform(-1, 1, n),
        vx=rng.uniform(-1, 1, n),
        vy=rng.uniform(-1, 1, n),
        hbar=np.full(n, 0.05),
        eps=np.full(n, 1e-3),
    )
    pairs = [("v_x", "v_y"), ("x*v_y^2", "v_x^3"), ("y^2*v_x", "x*v_x*v_y")]
    report = compare_symbolic_numeric(pairs, varying_model, points=points)
    assert report.attrs["passed"], float(report["relative"].max())
    assert list(report["pair"].values) == ["v_x | v_y", "x*v_y^2 | v_x^3", "y^2*v_x | x*v_x*v_y"]
    np.testing.assert_allclose(report["eps"].values, 1e-3)


def test_oracle_is_deterministic(varying_model):
    pairs = [("x*v_x", "v_y^2")]
    first = compare_symbolic_numeric(pairs, varying_model, points=10, seed=9)
    second = compare_symbolic_numeric(pairs, varying_model, points=10, seed=9)
    np.testing.assert_array_equal(first["symbolic"].values, second["symbolic"].values)
    assert first.attrs["seed"] == 9


def test_oracle_rejects_bad_tolerance(constant_model):
    with pytest.raises(DomainError):
        compare_symbolic_numeric([("x", "v_x")], constant_model, tol=0)


# -----------------------------------------------------------------------------
# Oscillator matrices
# -----------------------------------------------------------------------------


def test_velocity_matrices_commute_to_constant():
    vx, vy = velocity_matrices(0.3, 0.7, 10)
    commutator = vx @ vy - vy @ vx
    np.testing.assert_allclose(commutator[:9, :9], 1j * 0.3 / 0.7 * np.eye(9), atol=1e-12)


@pytest.mark.parametrize(
    "text",
    [
        "(V_x^2 + V_y^2)^2",
        "V_x^2 + V_y^2",
        "3*(V_x^2 + V_y^2)^2 - hbar*eps^-1*(V_x^2 + V_y^2) + 2",
    ],
)
def test_oscillator_check(gc, text):
    report = oscillator_check(gc(text), hbar=0.3, eps=0.7)
    assert report.attrs["passed"], report.attrs["max_relative"]
    assert report.sizes == {"row": 7, "col": 7}


def test_oscillator_check_needs_constant_coefficients(gc, particle):
    with pytest.raises(DomainError):
        oscillator_check(gc("B*(V_x^2 + V_y^2)"), hbar=0.3, eps=0.7)
    with pytest.raises(DomainError):
        oscillator_check(particle("v_x^2"), hbar=0.3, eps=0.7)
