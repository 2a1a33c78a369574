import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractwind.dynamics import correlation_on_grid, trajectory
from fractwind.errors import SpectrumError
from fractwind.model import KWindow, damping_matrix, scenario_params
from fractwind.pauli import SIGMA0, SIGMAY, reconstruct
from fractwind.symmetry import (MATRIX_FUNCTIONS, apply_matrix_function, ball_states,
                                correlation_from_modular, density_matrix, inversion_defect,
                                matrix_function_alignment, modular_hamiltonian, modular_trajectory,
                                random_states)
from fractwind.topology import berry_winding, bloch_vector


def test_inversion_defect_reports_worst_point():
    w = KWindow(-3, 3, 200)
    rep = inversion_defect(lambda k: damping_matrix(scenario_params("fig2"), k), w, "X")
    assert rep.max_defect < 1e-12 and rep.samples == 200
    broken = scenario_params("fig2", sy_perturbation=0.1)
    rep = inversion_defect(lambda k: damping_matrix(broken, k), w, "X")
    assert rep.max_defect == pytest.approx(0.2 * np.sqrt(2))
    assert rep.as_dict()["operator"] == "X"


@pytest.mark.parametrize("t", [None, 0.0, 0.15])
def test_evolved_states_keep_inversion(t):
    p = scenario_params("fig3")
    rep = inversion_defect(lambda k: correlation_on_grid(p, k, t=t)[0], KWindow(-9, 9, 301))
    assert rep.max_defect < 1e-10


def test_modular_roundtrip_and_transpose():
    D = random_states(np.random.default_rng(1), 50)
    K = modular_hamiltonian(D)
    np.testing.assert_allclose(correlation_from_modular(K), D, atol=1e-12)
    pure = 0.5 * (SIGMA0 + SIGMAY)
    with pytest.raises(SpectrumError):
        modular_hamiltonian(pure)
    d = 0.3 * SIGMAY + 0.5 * SIGMA0
    assert bloch_vector(modular_hamiltonian(d)).nvec[1] == pytest.approx(1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(sorted(MATRIX_FUNCTIONS)))
def test_alignment_property(seed, name):
    D = random_states(np.random.default_rng(seed), 40)
    assert np.max(np.abs(matrix_function_alignment(D, name) - 1)) < 1e-10


def test_alignment_signs():
    D = random_states(np.random.default_rng(5), 100)
    np.testing.assert_allclose(matrix_function_alignment(D, "modular", signed=True), -1, atol=1e-10)
    np.testing.assert_allclose(matrix_function_alignment(D, "cube", signed=True), 1, atol=1e-10)
    with pytest.raises(ValueError):
        apply_matrix_function(D, "sine")


def test_density_matrix_normalization():
    D = reconstruct(np.array([2.0, 0.5, 0.1, -0.3]))
    rho = density_matrix(D)
    assert np.trace(rho).real == pytest.approx(1)
    np.testing.assert_allclose(bloch_vector(rho).nvec, bloch_vector(D).nvec)


def test_ball_states_keep_directions():
    tr = trajectory(scenario_params("fig2"), KWindow(0, 6 * np.pi, 300))
    B = ball_states(tr)
    w = np.linalg.eigvalsh(B)
    assert w.min() > 0 and w.max() < 1
    np.testing.assert_allclose(bloch_vector(B).nvec, tr.unit_vectors(), atol=1e-12)


@pytest.mark.parametrize("gamma", [0.3, 0.5, 0.7, 1.5])
def test_modular_trajectory_winding(gamma):
    tr = trajectory(scenario_params("fig2", gamma=gamma), KWindow(0, 6 * np.pi, 3000))
    kt = modular_trajectory(tr)
    assert abs(berry_winding(tr)) == pytest.approx(abs(berry_winding(kt)), abs=1e-9)
