import pytest

from gcweyl.algebra.series import Chart, GradedSeries, Truncation
from gcweyl.io.text import parse
from gcweyl.oracle.models import FieldModel

CONSTANT_MODEL = """\
# uniform field
B = 3/2
domain = -1 1 -1 1
"""

VARYING_MODEL = """\
B = 2 + x/10 + y^2/50
phi = x*y/20
domain = -1 1 -1 1
"""


@pytest.fixture(scope="session")
def trunc():
    return Truncation()


@pytest.fixture(scope="session")
def particle(trunc):
    """Parse particle-chart text in the default window."""

    def _parse(text):
        return parse(text, Chart.PARTICLE, trunc)

    return _parse


@pytest.fixture(scope="session")
def gc(trunc):
    def _parse(text, window=None):
        return parse(text, Chart.GUIDING_CENTER, window or trunc)

    return _parse


@pytest.fixture(scope="session")
def variables(trunc):
    return {name: GradedSeries.variable(name, trunc=trunc) for name in ("x", "y", "vx", "vy")}


@pytest.fixture(scope="session")
def model_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("models")
    paths = {}
    for name, text in (("constant", CONSTANT_MODEL), ("varying", VARYING_MODEL)):
        paths[name] = root / f"{name}.txt"
        paths[name].write_text(text)
    return paths


@pytest.fixture(scope="session")
def constant_model():
    return FieldModel.from_strings("3/2")


@pytest.fixture(scope="session")
def varying_model():
    return FieldModel.from_strings("2 + x/10 + y^2/50", "x*y/20")
