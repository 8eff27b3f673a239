import numpy as np
import pytest

import sympade


def rotation(theta):
    return theta * np.array([[0.0, -1.0], [1.0, 0.0]])


def test_pade_coefficients_44():
    a, b = sympade.pade_coefficients(4, 4)
    assert a == pytest.approx([1 / 2, 3 / 28, 1 / 84, 1 / 1680], rel=1e-15)
    assert b == a


def test_cayley_map_is_symplectic_and_close_to_exp():
    b = rotation(0.1)
    p = sympade.pade_transfer_matrix(b, 1, 1)
    assert p.shape == (2, 2)
    assert sympade.symplectic_defect(p) <= 1e-15
    assert np.max(np.abs(p - sympade.matrix_exp(b))) <= 1e-3


def test_non_square_input_raises():
    with pytest.raises(sympade.SympadeError):
        sympade.matrix_exp(np.zeros((2, 3)))


def test_builtins_listed():
    names = [name for name, _ in sympade.builtin_experiments()]
    assert "kubo-(2,2)" in names
    assert "oscillator-integral" in names


def test_invariants_builtin_passes_checks():
    out = sympade.run_experiment("invariants", builtin="kubo-(2,2)")
    assert out["passed"]
    assert out["header"] == ["t", "H", "defect"]
    assert out["rows"].shape[1] == 3
    assert out["csv"].startswith("t,H,defect\n")
    assert f"seed={sympade.DEFAULT_SEED}" in out["footer"]


def test_config_text_and_reproducibility():
    text = 'builtin = "kubo-(1,1)"\nT = 1\ngrid = [0.1, 0.05, 0.025]\n'
    a = sympade.run_experiment("convergence", config=text, paths=20, seed=3, workers=2)
    b = sympade.run_experiment("convergence", config=text, paths=20, seed=3, workers=1)
    assert a["csv"] == b["csv"]
    assert "seed=3" in a["footer"]


def test_config_error_carries_code():
    with pytest.raises(sympade.SympadeError) as info:
        sympade.run_experiment("convergence", config="bogus = 1\n")
    assert info.value.args[1] == "ConfigError"
