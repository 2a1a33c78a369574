"""Closed-form propagation and the Lyapunov steady state against brute force.

Run: python3 demos/06_oracle_checks.py
"""
import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import expm

from fractwind import EvolutionState, gain_matrix, integrate_ode, propagate, scenario_params, solve_lyapunov

p = scenario_params("fig3")
k = np.linspace(0.1, 18.0, 8)
state = EvolutionState.prepare(p, k)
Mg = gain_matrix(p, k)

for t in (0.1, 0.2, 1.0):
    rk = integrate_ode(state.delta, state.damping, Mg, t, 1e-3)
    print(f"t={t}: |closed form - RK4| = {np.abs(propagate(state, t) - rk).max():.1e}")

X0, M0 = state.damping[0], Mg[0]
quad, _ = quad_vec(lambda s: 2 * expm(X0 * s) @ M0 @ expm(X0.conj().T * s), 0, 30)
print(f"|Lyapunov - integral| = {np.abs(solve_lyapunov(X0, M0) - quad).max():.1e}")
