import json

import pytest

from gcweyl import __version__, logger
from gcweyl.algebra.errors import NotReducibleToJ
from gcweyl.algebra.series import GradedSeries
from gcweyl.cli import main as cli_main
from gcweyl.cli.main import EXIT_MISMATCH, EXIT_OK, EXIT_UNDERFLOW, EXIT_USAGE, run
from gcweyl.cli.verify import APPENDIX_CHECKS, run_appendix
from gcweyl.star import operators


def output(capsys, argv):
    code = run(argv)
    return code, capsys.readouterr().out


def test_star(capsys):
    code, out = output(capsys, ["star", "v_x", "v_y"])
    assert code == EXIT_OK
    assert out.strip() == "v_x*v_y + (1/2)*i*hbar*eps^-1*B"


def test_star_is_deterministic(capsys):
    argv = ["star", "x*v_y + phi", "B*v_x^2 - d[y]B"]
    _, first = output(capsys, argv)
    _, second = output(capsys, argv)
    assert first == second


def test_poisson_bracket(capsys):
    code, out = output(capsys, ["bracket", "--type", "poisson", "v_x", "v_y"])
    assert code == EXIT_OK
    assert out.strip() == "eps^-1*B"


def test_moyal_bracket(capsys):
    _, out = output(capsys, ["bracket", "x", "v_x"])
    assert out.strip() == "i*hbar"


def test_json_output(capsys):
    code, out = output(capsys, ["star", "--format", "json", "--max-hbar", "1", "x", "v_x"])
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["truncation"]["max_hbar"] == 1
    assert len(document["terms"]) == 2
    assert {term["hbar"] for term in document["terms"]} == {0, 1}


def test_config_file_is_overridden_by_flags(capsys, tmp_path):
    config = tmp_path / "window.json"
    config.write_text(json.dumps({"max_hbar": 0, "min_eps": -1}))
    _, out = output(capsys, ["star", "--config", str(config), "x^2", "v_x^2"])
    assert out.strip() == "x^2*v_x^2"
    _, out = output(capsys, ["star", "--config", str(config), "--max-hbar", "1", "x", "v_x"])
    assert out.strip() == "x*v_x + (1/2)*i*hbar"


@pytest.mark.parametrize(
    "argv",
    [
        ["star", "x +", "v_x"],
        ["star", "X", "v_x"],
        ["star", "x^-1", "v_x"],
        ["bracket", "--type", "jacobi", "x", "y"],
        ["derive", "levels"],
        ["oracle", "--model", "missing.txt"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_eps_underflow():
    assert run(["star", "--min-eps", "0", "v_x", "v_y"]) == EXIT_UNDERFLOW


def test_version(capsys):
    code, out = output(capsys, ["--version"])
    assert code == EXIT_OK
    assert __version__ in out


def test_derive_hamiltonian(capsys):
    code, out = output(capsys, ["derive", "hamiltonian"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert [line.split(":")[0] for line in lines] == ["J^0", "J^1", "J^2"]
    assert "c1" not in out and "c2" not in out


def test_derive_spin_efield(capsys):
    _, out = output(capsys, ["derive", "hamiltonian", "--spin", "--style", "efield"])
    assert "mu_z" in out
    assert "phi" not in out


def test_derive_levels(capsys):
    code, out = output(capsys, ["derive", "levels", "--symbolic"])
    assert code == EXIT_OK
    assert "nu^1: hbar*B" in out.splitlines()
    code, out = output(capsys, ["derive", "levels", "--n", "0", "--format", "json"])
    assert code == EXIT_OK
    assert json.loads(out)


def test_verify_appendix(capsys):
    code, out = output(capsys, ["verify", "appendix"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert len(lines) == len(APPENDIX_CHECKS)
    assert all(line.startswith("PASS ") for line in lines)


def test_flipped_weight_fails_verification(capsys, monkeypatch):
    original = operators.weight_w

    def flipped(n, k):
        value = original(n, k)
        return -value if (n, k) == (2, 2) else value

    operators.clear_cache()
    monkeypatch.setattr(operators, "weight_w", flipped)
    try:
        code, out = output(capsys, ["verify", "appendix"])
    finally:
        monkeypatch.undo()
        operators.clear_cache()
    assert code == EXIT_MISMATCH
    assert "FAIL P expansion through hbar^2" in out
    assert all(result.passed for result in run_appendix())


def test_oracle(capsys, model_files):
    argv = ["oracle", "--model", str(model_files["varying"]), "--points", "5", "--max-degree", "1"]
    code, out = output(capsys, argv)
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "PASS"
    assert "pairs: 25" in out


def test_oracle_json(capsys, model_files):
    argv = ["oracle", "--model", str(model_files["constant"]), "--points", "3", "--max-degree", "1"]
    code, out = output(capsys, argv + ["--format", "json", "--seed", "7"])
    summary = json.loads(out)
    assert code == EXIT_OK
    assert summary["passed"] is True
    assert summary["seed"] == 7
    assert summary["points"] == 3


def test_derivation_fault_is_not_a_usage_error(monkeypatch):
    def unreducible(spin=False):
        raise NotReducibleToJ(GradedSeries.zero())

    monkeypatch.setattr(cli_main, "derive_hamiltonian", unreducible)
    assert run(["derive", "hamiltonian"]) == EXIT_MISMATCH
    assert run(["derive", "hamiltonian", "--spin"]) == EXIT_MISMATCH


def test_package_logger_gets_cli_handler():
    run(["--verbose", "star", "x", "v_x"])
    assert logger.name == "gcweyl"
    assert any(getattr(handler, "_gcweyl", False) for handler in logger.handlers)
