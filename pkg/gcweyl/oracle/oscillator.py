"""
Matrix check of the velocity ordering rules.

V_x and V_y are represented on a truncated harmonic-oscillator basis with
``[V_x, V_y] = i hbar / eps``. A pointwise polynomial in the velocities is
Weyl-symmetrized word by word and compared with the matrix of its
J-polynomial. Only the low block is compared; the truncation corrupts the
top levels.
"""

import numpy as np
import xarray as xr

from gcweyl import logger
from gcweyl.algebra.errors import DomainError
from gcweyl.algebra.series import Chart, GradedSeries
from gcweyl.guiding_center.jpoly import express_in_j
from gcweyl.guiding_center.words import normal_order, to_star_form
from gcweyl.utils.constants import OSCILLATOR_BLOCK, OSCILLATOR_LEVELS, OSCILLATOR_TOLERANCE


def velocity_matrices(hbar: float, eps: float, levels: int = OSCILLATOR_LEVELS):
    annihilation = np.diag(np.sqrt(np.arange(1, levels)), k=1).astype(complex)
    creation = annihilation.conj().T
    scale = np.sqrt(hbar / (2 * eps))
    vx = scale * (annihilation + creation)
    vy = -1j * scale * (annihilation - creation)
    return vx, vy


def _term(key, coeff, hbar: float, eps: float) -> complex:
    if key.bhalf or key.gens or key.pos != (0, 0) or key.vel != (0, 0):
        raise DomainError("the oscillator check needs constant coefficients")
    return complex(coeff) * hbar**key.hbar * eps**key.eps


def _number(s: GradedSeries, hbar: float, eps: float) -> complex:
    return sum((_term(key, coeff, hbar, eps) for key, coeff in s.items()), 0j)


def _word_matrix(word: str, letters, levels: int) -> np.ndarray:
    matrix = np.eye(levels, dtype=complex)
    for letter in word:
        matrix = matrix @ letters[letter]
    return matrix


def oscillator_check(
    pointwise: GradedSeries,
    hbar: float,
    eps: float,
    levels: int = OSCILLATOR_LEVELS,
    block: int = OSCILLATOR_BLOCK,
    tol: float = OSCILLATOR_TOLERANCE,
) -> xr.Dataset:
    """
    Compare the symmetrized matrix of ``pointwise`` with its J-polynomial.

    Parameters:
        pointwise (GradedSeries): guiding-center polynomial in V_x, V_y with constant coefficients
        hbar, eps (float): numeric values of the grading parameters
        levels (int): size of the truncated basis
        block (int): number of low levels compared
    """
    if pointwise.chart != Chart.GUIDING_CENTER:
        raise DomainError("the oscillator check works on guiding-center symbols")
    vx, vy = velocity_matrices(hbar, eps, levels)
    letters = {"x": vx, "y": vy}

    words = to_star_form(pointwise)
    weyl = np.zeros((levels, levels), dtype=complex)
    for (key, word), coeff in words.items():
        weyl += _term(key, coeff, hbar, eps) * _word_matrix(word, letters, levels)

    polynomial = express_in_j(normal_order(words))
    j = vx @ vx + vy @ vy
    reduced = np.zeros((levels, levels), dtype=complex)
    for k, c in polynomial.coeffs.items():
        reduced += _number(c, hbar, eps) * np.linalg.matrix_power(j, k)

    low_weyl = weyl[:block, :block]
    low_reduced = reduced[:block, :block]
    discrepancy = np.abs(low_weyl - low_reduced)
    scale = max(float(np.abs(low_weyl).max()), 1.0)
    relative = float(discrepancy.max()) / scale
    passed = relative <= tol
    logger.debug("oscillator check: relative discrepancy %.3g", relative)
    return xr.Dataset(
        {
            "weyl": (["row", "col"], low_weyl),
            "j_polynomial": (["row", "col"], low_reduced),
            "discrepancy": (["row", "col"], discrepancy),
        },
        coords={"row": np.arange(block), "col": np.arange(block)},
        attrs={
            "hbar": hbar,
            "eps": eps,
            "levels": levels,
            "tol": tol,
            "max_relative": relative,
            "passed": passed,
        },
    )
