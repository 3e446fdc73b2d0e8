"""
The appendix suite run by ``gcweyl verify appendix``.

Every check returns a CheckResult; failures carry the residuals that did not
vanish. Checks never raise: an engine error is reported as a failure.
"""

import warnings
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable, List

import sympy as sp

from gcweyl import logger
from gcweyl.algebra.errors import GCWeylError
from gcweyl.algebra.series import Chart, GradedSeries, Truncation
from gcweyl.guiding_center.checks import (
    compose_identity_check,
    forward_reference_check,
    verify_classical_brackets,
)
from gcweyl.guiding_center.hamiltonian import derive_hamiltonian, level_coefficients
from gcweyl.guiding_center.jpoly import JPolynomial, express_in_j
from gcweyl.guiding_center.maps import backward_map
from gcweyl.guiding_center.reference import (
    HAMILTONIAN,
    SPIN_HAMILTONIAN,
    reference_levels,
    reference_polynomial,
)
from gcweyl.guiding_center.words import to_star_form
from gcweyl.io.text import parse, render
from gcweyl.oracle.evaluate import moyal_oracle, to_sympy
from gcweyl.oracle.models import FieldModel
from gcweyl.oracle.oscillator import oscillator_check
from gcweyl.star.operators import build_p
from gcweyl.star.product import moyal_bracket, poisson_bracket, star
from gcweyl.star.reference import block_mismatches

MOYAL_TRUNCATION = Truncation(max_hbar=3, min_eps=-3, max_eps=3)
# pairs whose degrees add up to at most this are compared with the plain Moyal product
MOYAL_PAIR_DEGREE = 4


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: List[str] = field(default_factory=list)

    def lines(self) -> List[str]:
        out = [f"{'PASS' if self.passed else 'FAIL'} {self.name}"]
        if not self.passed:
            out.extend(f"    {line}" for line in self.details)
        return out


def _polynomial_residuals(actual: JPolynomial, expected: JPolynomial) -> List[str]:
    lines = []
    for k in sorted(set(actual.coeffs) | set(expected.coeffs)):
        residual = actual.coefficient(k) - expected.coefficient(k)
        if not residual.is_zero():
            lines.append(f"J^{k}: {render(residual)}")
    return lines


# -----------------------------------------------------------------------------
# Star product
# -----------------------------------------------------------------------------


def check_p_expansion() -> CheckResult:
    problems = block_mismatches(build_p(2))
    return CheckResult("P expansion through hbar^2", not problems, problems)


def _particle_monomials(max_degree: int, trunc: Truncation):
    for i, j, k, l in cartesian(range(max_degree + 1), repeat=4):
        if i + j + k + l <= max_degree:
            yield i + j + k + l, GradedSeries.monomial(pos=(i, j), vel=(k, l), trunc=trunc)


def check_moyal_reduction() -> CheckResult:
    """Without magnetic terms the product is the ordinary Moyal product."""
    trunc = MOYAL_TRUNCATION
    flat = FieldModel.from_strings("1")
    pool = list(_particle_monomials(MOYAL_PAIR_DEGREE, trunc))
    details = []
    for da, a in pool:
        for db, b in pool:
            if da + db > MOYAL_PAIR_DEGREE:
                continue
            engine = to_sympy(star(a, b, trunc, magnetic=False), flat)
            expected = moyal_oracle(a, b, flat, trunc.max_hbar)
            if sp.expand(engine - expected) != 0:
                details.append(f"{render(a)} * {render(b)}: {sp.expand(engine - expected)}")
    return CheckResult("Moyal reduction without magnetic field", not details, details)


def check_fundamental_brackets() -> CheckResult:
    trunc = Truncation()
    x, vx, vy = (GradedSeries.variable(name, trunc=trunc) for name in ("x", "vx", "vy"))
    cases = [
        ("[x, v_x]", moyal_bracket(x, vx, trunc), "i*hbar"),
        ("[v_x, v_y]", moyal_bracket(vx, vy, trunc), "i*hbar*eps^-1*B"),
        ("{v_x, v_y}", poisson_bracket(vx, vy, trunc), "eps^-1*B"),
    ]
    details = []
    for name, actual, expected in cases:
        residual = actual - parse(expected, Chart.PARTICLE, trunc)
        if not residual.is_zero():
            details.append(f"{name}: {render(residual)}")
    return CheckResult("fundamental brackets", not details, details)


# -----------------------------------------------------------------------------
# Guiding-center maps
# -----------------------------------------------------------------------------


def check_composition() -> CheckResult:
    report = compose_identity_check()
    return CheckResult("backward map inverts forward map through eps^2", report.passed, report.lines())


def check_forward_map() -> CheckResult:
    report = forward_reference_check()
    failing = [line for line, r in zip(report.lines(), report.residuals.values()) if not r.is_zero()]
    return CheckResult("forward map matches its closed form", report.passed, failing)


def check_classical_brackets() -> CheckResult:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = verify_classical_brackets()
    for w in caught:
        logger.info("%s", w.message)
    failing = [line for line, row in zip(report.lines(), report.rows) if row.asserted and not row.ok]
    return CheckResult("guiding-center Poisson brackets", report.passed, failing)


# -----------------------------------------------------------------------------
# Hamiltonian
# -----------------------------------------------------------------------------


def check_hamiltonian() -> CheckResult:
    actual = derive_hamiltonian()
    details = _polynomial_residuals(actual, reference_polynomial(HAMILTONIAN))
    quantum = actual.restrict(lambda key: key.hbar == 2)
    if quantum.has_field("phi"):
        details.append("hbar^2 coefficient depends on phi")
    return CheckResult("guiding-center Hamiltonian", not details, details)


def check_spin_hamiltonian() -> CheckResult:
    details = _polynomial_residuals(derive_hamiltonian(spin=True), reference_polynomial(SPIN_HAMILTONIAN))
    return CheckResult("spin Hamiltonian", not details, details)


def check_levels() -> CheckResult:
    actual, expected = level_coefficients(), reference_levels()
    details = []
    for k in sorted(set(actual) | set(expected)):
        residual = actual.get(k, GradedSeries.zero(Chart.GUIDING_CENTER)) - expected.get(
            k, GradedSeries.zero(Chart.GUIDING_CENTER)
        )
        if not residual.is_zero():
            details.append(f"nu^{k}: {render(residual)}")
    return CheckResult("quantized levels", not details, details)


def check_free_constants() -> CheckResult:
    details = []
    if not any(s.has_field("c1") and s.has_field("c2") for s in backward_map()[2:]):
        details.append("backward map does not carry c1 and c2")
    for spin in (False, True):
        for name in ("c1", "c2"):
            if derive_hamiltonian(spin=spin).has_field(name):
                details.append(f"{name} survives in the {'spin ' if spin else ''}Hamiltonian")
    return CheckResult("c1, c2 cancel", not details, details)


def check_ordering_lemma() -> CheckResult:
    gc = Chart.GUIDING_CENTER
    trunc = Truncation()
    pointwise = parse("(V_x^2 + V_y^2)^2", gc, trunc)
    actual = express_in_j(to_star_form(pointwise))
    expected = JPolynomial(
        {2: GradedSeries.constant(1, gc, trunc), 0: parse("hbar^2*eps^-2", gc, trunc)},
        trunc,
    )
    details = _polynomial_residuals(actual, expected)
    matrices = oscillator_check(pointwise, hbar=0.3, eps=0.7)
    if not matrices.attrs["passed"]:
        details.append(f"oscillator matrices differ by {matrices.attrs['max_relative']:.3g}")
    return CheckResult("ordering of J^2", not details, details)


APPENDIX_CHECKS: List[Callable[[], CheckResult]] = [
    check_p_expansion,
    check_moyal_reduction,
    check_fundamental_brackets,
    check_composition,
    check_forward_map,
    check_classical_brackets,
    check_hamiltonian,
    check_spin_hamiltonian,
    check_levels,
    check_free_constants,
    check_ordering_lemma,
]


def run_appendix() -> List[CheckResult]:
    results = []
    for check in APPENDIX_CHECKS:
        logger.info("running %s", check.__name__)
        try:
            result = check()
        except GCWeylError as e:
            result = CheckResult(check.__name__.replace("check_", "").replace("_", " "), False, [repr(e)])
        results.append(result)
    return results
