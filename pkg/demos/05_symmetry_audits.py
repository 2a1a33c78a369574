"""Inversion symmetry of every operator and the direction of matrix functions.

Run: python3 demos/05_symmetry_audits.py
"""
import numpy as np

from fractwind import KWindow, berry_winding, correlation_on_grid, damping_matrix, scenario_params, trajectory
from fractwind.symmetry import MATRIX_FUNCTIONS, inversion_defect, matrix_function_alignment, modular_trajectory, random_states

p = scenario_params("fig3")
w = KWindow(0.0, p.period, 1200)
for t in (None, 0.0, 0.1, 0.2):
    rep = inversion_defect(lambda k: correlation_on_grid(p, k, t=t)[0], w, f"Delta(t={t})")
    print(f"{rep.operator_name:>16}: max defect {rep.max_defect:.1e}")

# A constant sigma_y term in X breaks the symmetry visibly.
broken = p.replace(sy_perturbation=0.1)
print("broken X:", inversion_defect(lambda k: damping_matrix(broken, k), w, "X").max_defect)

# %% f(Delta) shares the Bloch axis of Delta; the modular map reverses it.
states = random_states(np.random.default_rng(42), 1000)
for name in MATRIX_FUNCTIONS:
    cos = matrix_function_alignment(states, name, signed=True)
    print(f"{name:>12}: cos in [{cos.min():+.12f}, {cos.max():+.12f}]")

tr = trajectory(scenario_params("fig2"), KWindow(0.0, 6 * np.pi, 3000))
print("berry(Delta) =", berry_winding(tr), " berry(K) =", berry_winding(modular_trajectory(tr)))
