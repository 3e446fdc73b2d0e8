from gcweyl.guiding_center.checks import (
    compose_identity_check,
    forward_reference_check,
    verify_classical_brackets,
)
from gcweyl.guiding_center.hamiltonian import (
    classical_hamiltonian,
    derive_hamiltonian,
    level_coefficients,
    quantized_levels,
)
from gcweyl.guiding_center.jpoly import JPolynomial, express_in_j, j_power
from gcweyl.guiding_center.maps import backward_map, compose, forward_map, invert_map
from gcweyl.guiding_center.words import (
    GCWordSeries,
    concatenate,
    normal_order,
    taylor_shift,
    to_star_form,
)

__all__ = [
    "GCWordSeries",
    "JPolynomial",
    "backward_map",
    "classical_hamiltonian",
    "compose",
    "compose_identity_check",
    "concatenate",
    "derive_hamiltonian",
    "express_in_j",
    "forward_map",
    "forward_reference_check",
    "invert_map",
    "j_power",
    "level_coefficients",
    "normal_order",
    "quantized_levels",
    "taylor_shift",
    "to_star_form",
    "verify_classical_brackets",
]
