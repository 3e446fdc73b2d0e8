"""
Closed-form results the derivations are checked against.

Hamiltonian and level strings are guiding-center chart symbols, forward map
strings are particle chart symbols. E_x, E_y stand for -d[x]phi, -d[y]phi as
everywhere else.
"""

from gcweyl.algebra.series import Chart
from gcweyl.guiding_center.hamiltonian import LEVEL_TRUNCATION, PIPELINE_TRUNCATION
from gcweyl.guiding_center.jpoly import JPolynomial
from gcweyl.guiding_center.maps import map_truncation
from gcweyl.io.text import parse

LAPLACIAN_TERM = "B*d[x,x]B + B*d[y,y]B"
GRADIENT_SQUARED = "d[x]B^2 + d[y]B^2"

# (B Laplacian(B) - 3 |grad B|^2) and (B Laplacian(B) - |grad B|^2)
CURVATURE_3 = f"({LAPLACIAN_TERM} - 3*d[x]B^2 - 3*d[y]B^2)"
CURVATURE_1 = f"({LAPLACIAN_TERM} - ({GRADIENT_SQUARED}))"

QUANTUM_CORRECTION = f"(1/16)*hbar^2*B^-2*{CURVATURE_1}"

HAMILTONIAN = {
    0: f"phi - (1/2)*eps^2*B^-2*(E_x^2 + E_y^2) + {QUANTUM_CORRECTION}",
    1: "(1/2)*B + (1/4)*eps^2*B^-2*(3*E_x*d[x]B + B*d[x,x]phi + 3*E_y*d[y]B + B*d[y,y]phi)",
    2: f"(1/16)*eps^2*B^-2*{CURVATURE_3}",
}

SPIN_HAMILTONIAN = {
    0: f"-mu_z*B - (1/2)*eps^2*mu_z^2*B^-2*({GRADIENT_SQUARED}) + {QUANTUM_CORRECTION}",
    1: f"(1/2)*B - (1/4)*eps^2*mu_z*B^-2*{CURVATURE_3}",
    2: f"(1/16)*eps^2*B^-2*{CURVATURE_3}",
}

CLASSICAL_HAMILTONIAN = {
    0: "phi - (1/2)*eps^2*B^-2*(E_x^2 + E_y^2)",
    1: HAMILTONIAN[1],
    2: HAMILTONIAN[2],
}

# Vector form: J^2 (B lap B - 3|grad B|^2)/16B^2 + J (3 E.grad B - B div E)/4B^2 - |E|^2/2B^2
CLASSICAL_HAMILTONIAN_VECTOR = {
    0: "phi - (1/2)*eps^2*B^-2*(E_x*E_x + E_y*E_y)",
    1: "(1/2)*B + (1/4)*eps^2*B^-2*(3*(E_x*d[x]B + E_y*d[y]B) - B*(-d[x,x]phi - d[y,y]phi))",
    2: "(1/16)*eps^2*B^-2*(B*(d[x,x]B + d[y,y]B) - 3*(d[x]B*d[x]B + d[y]B*d[y]B))",
}

# Powers of (n + 1/2)
LEVELS = {
    0: QUANTUM_CORRECTION,
    1: "hbar*B",
    2: f"(1/4)*hbar^2*B^-2*{CURVATURE_3}",
}


def reference_polynomial(table, trunc=None) -> JPolynomial:
    trunc = trunc or PIPELINE_TRUNCATION
    return JPolynomial({k: parse(text, Chart.GUIDING_CENTER, trunc) for k, text in table.items()}, trunc)


def reference_levels():
    return {k: parse(text, Chart.GUIDING_CENTER, LEVEL_TRUNCATION) for k, text in LEVELS.items()}


# Forward map X, Y, V_x, V_y in particle variables. Through eps^1 with the
# electric field; the eps^2 table holds the map with phi switched off.
FORWARD_MAP_FIRST_ORDER = {
    "X": "x + eps*B^-1*v_y",
    "Y": "y - eps*B^-1*v_x",
    "V_x": "B^(-1/2)*v_x + (1/2)*eps*B^(-5/2)*(d[y]B*v_x^2 + d[x]B*v_x*v_y + 2*d[y]B*v_y^2 - 2*B*E_y)",
    "V_y": "B^(-1/2)*v_y - (1/2)*eps*B^(-5/2)*(2*d[x]B*v_x^2 + d[y]B*v_x*v_y + d[x]B*v_y^2 - 2*B*E_x)",
}

FORWARD_MAP_NO_POTENTIAL = {
    "X": "x + eps*B^-1*v_y + (1/2)*eps^2*B^-3*(d[y]B*v_x - d[x]B*v_y)*v_y",
    "Y": "y - eps*B^-1*v_x - (1/2)*eps^2*B^-3*(d[y]B*v_x - d[x]B*v_y)*v_x",
    "V_x": (
        "B^(-1/2)*v_x + (1/2)*eps*B^(-5/2)*(d[y]B*v_x^2 + d[x]B*v_x*v_y + 2*d[y]B*v_y^2)"
        " + (1/16)*eps^2*B^(-9/2)*("
        "(-5*d[x]B^2 - B*d[x,x]B + 13*d[y]B^2 - 5*B*d[y,y]B)*v_x^3"
        " - 2*(4*d[x]B*d[y]B + 2*B*d[x,y]B - c1)*v_x^2*v_y"
        " + (-15*d[x]B^2 + 7*B*d[x,x]B + 23*d[y]B^2 - 13*B*d[y,y]B)*v_x*v_y^2"
        " + 2*(-14*d[x]B*d[y]B + 6*B*d[x,y]B + c1)*v_y^3"
        " + 2*B*c2*v_y)"
    ),
    "V_y": (
        "B^(-1/2)*v_y - (1/2)*eps*B^(-5/2)*(2*d[x]B*v_x^2 + d[y]B*v_x*v_y + d[x]B*v_y^2)"
        " + (1/16)*eps^2*B^(-9/2)*("
        "2*(-14*d[x]B*d[y]B + 6*B*d[x,y]B - c1)*v_x^3"
        " + (23*d[x]B^2 - 13*B*d[x,x]B - 15*d[y]B^2 + 7*B*d[y,y]B)*v_x^2*v_y"
        " - 2*(4*d[x]B*d[y]B + 2*B*d[x,y]B + c1)*v_x*v_y^2"
        " + (13*d[x]B^2 - 5*B*d[x,x]B - 5*d[y]B^2 - B*d[y,y]B)*v_y^3"
        " - 2*B*c2*v_x)"
    ),
}


def reference_forward_map(table, max_eps=None):
    trunc = map_truncation()
    if max_eps is not None:
        trunc = trunc.replace(max_eps=max_eps)
    return {name: parse(text, Chart.PARTICLE, trunc) for name, text in table.items()}
