from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional

from gcweyl import logger
from gcweyl.algebra.errors import DomainError, FieldPresent
from gcweyl.algebra.series import Chart, GradedSeries, TermKey, Truncation, truncate_to
from gcweyl.guiding_center.jpoly import JPolynomial, express_in_j
from gcweyl.guiding_center.maps import backward_map
from gcweyl.guiding_center.words import concatenate, normal_order, taylor_shift, to_star_form
from gcweyl.io.text import parse
from gcweyl.utils.constants import PIPELINE_WINDOW

PIPELINE_TRUNCATION = Truncation(**PIPELINE_WINDOW)
LEVEL_TRUNCATION = Truncation(max_hbar=4, min_eps=0, max_eps=0)


def _potential_mode(spin: bool, electric: bool) -> Optional[str]:
    if spin:
        return "spin"
    return None if electric else "off"


def _potential(spin: bool, electric: bool) -> GradedSeries:
    gc = Chart.GUIDING_CENTER
    if spin:
        return parse("-mu_z*B", gc, PIPELINE_TRUNCATION)
    if electric:
        return parse("phi", gc, PIPELINE_TRUNCATION)
    return GradedSeries.zero(gc, PIPELINE_TRUNCATION)


@lru_cache(maxsize=None)
def derive_hamiltonian(spin: bool = False, electric: bool = True) -> JPolynomial:
    """
    Guiding-center Hamiltonian symbol as a polynomial in J.

    Parameters:
        spin (bool): replace the potential by -mu_z*B
        electric (bool): False sets the electrostatic potential to zero
    """
    trunc = PIPELINE_TRUNCATION
    mode = _potential_mode(spin, electric)
    x, y, vx, vy = (truncate_to(s, trunc) for s in backward_map(mode))
    gc = Chart.GUIDING_CENTER

    logger.info("symmetrizing backward map")
    vx_words = to_star_form(vx, trunc)
    vy_words = to_star_form(vy, trunc)
    dx = to_star_form(x - GradedSeries.variable("x", gc, trunc), trunc)
    dy = to_star_form(y - GradedSeries.variable("y", gc, trunc), trunc)

    logger.info("forming kinetic energy")
    kinetic = (concatenate(vx_words, vx_words) + concatenate(vy_words, vy_words)).scale(Fraction(1, 2))

    potential = _potential(spin, electric)
    if not potential.is_zero():
        logger.info("expanding potential around the guiding center")
        kinetic = kinetic + taylor_shift(potential, (dx, dy), trunc)

    logger.info("normal ordering and reducing to J")
    return express_in_j(normal_order(kinetic))


def classical_hamiltonian() -> JPolynomial:
    return derive_hamiltonian(False).classical()


def _set_eps_to_one(s: GradedSeries, trunc: Truncation) -> GradedSeries:
    terms = {}
    for key, coeff in s.items():
        flat = key.replace_grading(key.hbar, 0)
        terms[flat] = terms[flat] + coeff if flat in terms else coeff
    return GradedSeries(terms, Chart.GUIDING_CENTER, trunc)


def level_coefficients(hamiltonian: Optional[JPolynomial] = None) -> Dict[int, GradedSeries]:
    """
    Landau levels as a polynomial in nu = n + 1/2.

    J is replaced by 2*nu*hbar and eps by 1. Returns ``{power of nu: coefficient}``.
    """
    if hamiltonian is None:
        hamiltonian = derive_hamiltonian(electric=False)
    if hamiltonian.has_field("phi"):
        raise FieldPresent("quantized levels need a Hamiltonian without electrostatic potential")
    trunc = LEVEL_TRUNCATION
    coefficients = {}
    for k, c in hamiltonian.coeffs.items():
        flat = _set_eps_to_one(c, trunc)
        scaled = flat * GradedSeries({TermKey(hbar=k): 2**k}, Chart.GUIDING_CENTER, trunc)
        if not scaled.is_zero():
            coefficients[k] = scaled
    return coefficients


def quantized_levels(n: int, hamiltonian: Optional[JPolynomial] = None) -> GradedSeries:
    if n < 0:
        raise DomainError("the level index must be non-negative")
    nu = Fraction(2 * n + 1, 2)
    total = GradedSeries.zero(Chart.GUIDING_CENTER, LEVEL_TRUNCATION)
    for k, c in level_coefficients(hamiltonian).items():
        total = total + c.scale(nu**k)
    return total
