# Truncation window used when nothing else is requested
DEFAULT_MAX_HBAR = 2
DEFAULT_MIN_EPS = -2
DEFAULT_MAX_EPS = 3

# buildP refuses anything above this many powers of hbar
HBAR_CAP = 4

# Guiding-center pipeline: keep hbar^0 eps^{0,1,2} and hbar^2 eps^0
PIPELINE_WINDOW = {
    "max_hbar": 2,
    "min_eps": -2,
    "max_eps": 2,
    "max_total": 2,
}

# the coordinate maps are known through eps^2
MAP_MAX_EPS = 2
REVERSION_MAX_ITERATIONS = 6

# Used in the numeric oracle

ORACLE_TOLERANCE = 1e-9
ORACLE_ABS_FLOOR = 1e-12
DEFAULT_SEED = 42
DEFAULT_POINTS = 100
POSITIVITY_MARGIN = 0.1
POSITIVITY_GRID = 41
MAX_MODEL_DEGREE = 4
HBAR_RANGE = (0.01, 0.5)
EPS_RANGE = (0.1, 1.0)
VELOCITY_RANGE = (-1.0, 1.0)
ORACLE_MAX_HBAR = 3
ORACLE_MAX_DEGREE = 3
OSCILLATOR_LEVELS = 12
# levels of the truncated basis that products of four ladder operators leave intact
OSCILLATOR_BLOCK = 7
OSCILLATOR_TOLERANCE = 1e-10

# Rendering

POSITION_NAMES = {
    "particle": ("x", "y"),
    "guiding_center": ("X", "Y"),
}
VELOCITY_NAMES = {
    "particle": ("v_x", "v_y"),
    "guiding_center": ("V_x", "V_y"),
}
FIELD_ORDER = ("B", "phi", "c1", "c2", "mu_z")
CONSTANT_FIELDS = ("c1", "c2", "mu_z")
