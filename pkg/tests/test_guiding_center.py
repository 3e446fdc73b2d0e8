from fractions import Fraction

import pytest

from gcweyl.algebra.coefficient import Coefficient
from gcweyl.algebra.errors import (
    ChartMismatch,
    DomainError,
    FieldPresent,
    NotReducibleToJ,
    UndeterminedOrderWarning,
)
from gcweyl.algebra.series import Chart, Generator, TermKey, Truncation
from gcweyl.guiding_center import (
    GCWordSeries,
    JPolynomial,
    backward_map,
    classical_hamiltonian,
    compose,
    compose_identity_check,
    concatenate,
    derive_hamiltonian,
    express_in_j,
    forward_map,
    forward_reference_check,
    invert_map,
    j_power,
    level_coefficients,
    normal_order,
    quantized_levels,
    taylor_shift,
    to_star_form,
    verify_classical_brackets,
)
from gcweyl.guiding_center.maps import map_truncation
from gcweyl.guiding_center.reference import (
    CURVATURE_1,
    CLASSICAL_HAMILTONIAN,
    CLASSICAL_HAMILTONIAN_VECTOR,
    HAMILTONIAN,
    SPIN_HAMILTONIAN,
    reference_levels,
    reference_polynomial,
)
from gcweyl.guiding_center.words import is_normal

COMMUTATOR = TermKey(hbar=1, eps=-1)


# -----------------------------------------------------------------------------
# Word algebra
# -----------------------------------------------------------------------------


def test_normal_order_swaps_with_commutator():
    assert normal_order(GCWordSeries.word("yx")) == GCWordSeries(
        {(TermKey(), "xy"): 1, (COMMUTATOR, ""): Coefficient(0, -1)}
    )
    assert normal_order(GCWordSeries.word("yyx")) == GCWordSeries(
        {(TermKey(), "xyy"): 1, (COMMUTATOR, "y"): Coefficient(0, -2)}
    )
    assert normal_order(GCWordSeries.word("xxy")) == GCWordSeries.word("xxy")


def test_to_star_form_averages_orderings(gc, variables):
    words = to_star_form(gc("2*B*V_x*V_y + phi"))
    assert words == GCWordSeries(
        {
            (TermKey(bhalf=2), "xy"): 1,
            (TermKey(bhalf=2), "yx"): 1,
            (TermKey(gens=((Generator("phi"), 1),)), ""): 1,
        }
    )
    with pytest.raises(ChartMismatch):
        to_star_form(variables["vx"])


def test_concatenate_does_not_commute():
    x, y = GCWordSeries.word("x"), GCWordSeries.word("y")
    difference = normal_order(concatenate(x, y) - concatenate(y, x))
    assert difference == GCWordSeries({(COMMUTATOR, ""): Coefficient(0, 1)})


def test_j_powers():
    assert j_power(1) == GCWordSeries({(TermKey(), "xx"): 1, (TermKey(), "yy"): 1})
    assert j_power(0) == GCWordSeries.word("")
    assert all(is_normal(word) for word in j_power(3).words())


def test_ordering_lemma(gc):
    assert express_in_j(to_star_form(gc("V_x^2 + V_y^2"))) == JPolynomial({1: gc("1")})
    squared = express_in_j(to_star_form(gc("(V_x^2 + V_y^2)^2")))
    assert squared == JPolynomial({2: gc("1"), 0: gc("hbar^2*eps^-2")})


def test_expand_then_reduce(gc):
    polynomial = JPolynomial({2: gc("B^-1*d[x]B"), 1: gc("B"), 0: gc("phi")})
    assert express_in_j(polynomial.expand()) == polynomial


def test_not_reducible_to_j(gc):
    with pytest.raises(NotReducibleToJ):
        express_in_j(GCWordSeries.word("x"))
    with pytest.raises(NotReducibleToJ) as info:
        express_in_j(to_star_form(gc("B*V_x*V_y")))
    assert not info.value.residual.is_zero()


def test_taylor_shift_along_x(gc):
    shifted = taylor_shift(gc("B"), (gc("eps*V_x"), gc("0")))
    expected = gc(
        "B + eps*d[x]B*V_x + (1/2)*eps^2*d[x,x]B*V_x^2 + (1/6)*eps^3*d[x,x,x]B*V_x^3"
    )
    assert shifted == to_star_form(expected)


def test_taylor_shift_mixes_symmetrically(gc):
    window = Truncation(max_eps=2)
    shifted = taylor_shift(Generator("phi"), (gc("eps*V_y", window), gc("eps*V_x", window)), window)
    expected = gc(
        "phi + eps*d[x]phi*V_y + eps*d[y]phi*V_x"
        " + (1/2)*eps^2*(d[x,x]phi*V_y^2 + 2*d[x,y]phi*V_x*V_y + d[y,y]phi*V_x^2)",
        window,
    )
    assert shifted == to_star_form(expected)


def test_taylor_shift_needs_small_shifts(gc):
    with pytest.raises(DomainError):
        taylor_shift(gc("B"), (gc("V_x"), gc("0")))
    with pytest.raises(DomainError):
        taylor_shift(gc("B*V_x"), (gc("eps*V_x"), gc("0")))


# -----------------------------------------------------------------------------
# Maps
# -----------------------------------------------------------------------------


def test_backward_map_inverts_forward_map():
    report = compose_identity_check()
    assert report.passed, report.lines()
    assert report.residual_at("V_x", 2).is_zero()


def test_classical_brackets():
    with pytest.warns(UndeterminedOrderWarning):
        report = verify_classical_brackets()
    assert report.passed, report.lines()
    assert report.row(("V_x", "V_y"), -1).ok
    assert report.row(("X", "Y"), 1).asserted
    assert report.row(("X", "Y"), 1).ok
    assert not report.row(("X", "V_x"), 2).determined


def test_backward_map_carries_free_constants():
    velocities = backward_map()[2:]
    assert any(v.has_field("c1") and v.has_field("c2") for v in velocities)
    assert not backward_map("spin")[0].has_field("phi")


# -----------------------------------------------------------------------------
# Hamiltonian
# -----------------------------------------------------------------------------


def test_hamiltonian_matches_closed_form():
    assert derive_hamiltonian() == reference_polynomial(HAMILTONIAN)


def test_quantum_correction_ignores_potential():
    quantum = derive_hamiltonian().restrict(lambda key: key.hbar == 2)
    assert quantum.degree == 0
    assert not quantum.has_field("phi")


def test_spin_hamiltonian_matches_closed_form():
    assert derive_hamiltonian(spin=True) == reference_polynomial(SPIN_HAMILTONIAN)


def test_classical_hamiltonian_forms_agree():
    classical = classical_hamiltonian()
    assert classical == reference_polynomial(CLASSICAL_HAMILTONIAN)
    assert classical == reference_polynomial(CLASSICAL_HAMILTONIAN_VECTOR)


@pytest.mark.parametrize("spin", [False, True])
def test_free_constants_cancel(spin):
    hamiltonian = derive_hamiltonian(spin=spin)
    assert not hamiltonian.has_field("c1")
    assert not hamiltonian.has_field("c2")


def test_levels_match_closed_form():
    assert level_coefficients() == reference_levels()


def test_ground_level(gc):
    window = Truncation(max_hbar=4, min_eps=0, max_eps=0)
    c = reference_levels()
    expected = c[0] + c[1].scale(Fraction(1, 2)) + c[2].scale(Fraction(1, 4))
    assert quantized_levels(0) == expected
    assert quantized_levels(0).coefficient_at(1, 0) == gc("(1/2)*B", window)


def test_levels_reject_potential_and_negative_index():
    with pytest.raises(FieldPresent):
        level_coefficients(derive_hamiltonian())
    with pytest.raises(DomainError):
        quantized_levels(-1)


def test_hamiltonian_lives_in_guiding_center_chart():
    assert all(c.chart == Chart.GUIDING_CENTER for c in derive_hamiltonian().coeffs.values())


def test_invert_leading_map(gc, particle):
    trunc = map_truncation()
    backward = tuple(gc(text, trunc) for text in ("X", "Y", "B^(1/2)*V_x", "B^(1/2)*V_y"))
    forward = invert_map(backward)
    assert forward == tuple(particle(text) for text in ("x", "y", "B^(-1/2)*v_x", "B^(-1/2)*v_y"))


def test_forward_then_backward_is_identity(particle):
    trunc = map_truncation()
    forward = forward_map()
    for name, series in zip(("x", "y", "v_x", "v_y"), backward_map()):
        assert compose(series, forward, trunc) == particle(name), name


def test_forward_map_matches_closed_form():
    report = forward_reference_check()
    assert report.passed, report.lines()


def test_forward_map_electric_term_at_first_order(particle):
    vx, vy = forward_map()[2:]
    assert vx.coefficient_at(0, 1).has_field("phi")
    assert vy.coefficient_at(0, 1).has_field("phi")
    electric = particle("-B^(-3/2)*E_y")
    gradient = particle("(1/2)*B^(-5/2)*(d[y]B*v_x^2 + d[x]B*v_x*v_y + 2*d[y]B*v_y^2)")
    assert vx.coefficient_at(0, 1) == gradient + electric


def test_velocity_maps_mirror_under_axis_swap(gc):
    # v_y's V_x*V_y^2 term is v_x's V_x^2*V_y term with x <-> y and c1 -> -c1
    vx, vy = backward_map()[2:]
    vx_term = gc("-(1/4)*B^(-5/2)*(5*d[x]B*d[y]B + B*d[x,y]B + (1/2)*c1)*V_x^2*V_y")
    vy_term = gc("-(1/4)*B^(-5/2)*(5*d[x]B*d[y]B + B*d[x,y]B - (1/2)*c1)*V_x*V_y^2")
    assert vx.coefficient_at(0, 2).restrict(lambda key: key.vel == (2, 1)) == vx_term.coefficient_at(0, 0)
    assert vy.coefficient_at(0, 2).restrict(lambda key: key.vel == (1, 2)) == vy_term.coefficient_at(0, 0)


def test_quantum_correction_curvature(gc):
    curvature = gc(CURVATURE_1)
    assert curvature == gc("B*d[x,x]B + B*d[y,y]B - d[x]B^2 - d[y]B^2")
    quantum = derive_hamiltonian().coefficient(0).coefficient_at(2, 0)
    assert quantum == gc("(1/16)*B^-2*(B*d[x,x]B + B*d[y,y]B - d[x]B^2 - d[y]B^2)")
