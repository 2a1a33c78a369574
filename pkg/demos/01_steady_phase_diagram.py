"""Steady-state phases of the dissipative chain as the gain offset gamma varies.

Run: python3 demos/01_steady_phase_diagram.py
"""
import numpy as np

from fractwind import KWindow, berry_winding, detect_steady_transitions, planar_winding, scenario_params, trajectory

# %% The full momentum period is 6 pi for n = 3.
p = scenario_params("fig2")
window = KWindow(0.0, p.period, 3000)

for gamma in (0.2, 0.5, 0.8, 1.2, 1.5):
    tr = trajectory(p.replace(gamma=gamma), window)
    print(f"gamma={gamma:.1f}  berry={berry_winding(tr):+.4f}  planar={planar_winding(tr):+.4f}"
          f"  min |d|={tr.purity.min():.3f}")

# %% The purity gap closes once, at gamma = 1 and k = 3 pi, where the steady
# correlation matrix becomes the identity.
(event,) = detect_steady_transitions(p, (0.5, 1.5), gamma_steps=21)
print(f"\ntransition at gamma={event.control:.8f}, k0/pi={event.k0 / np.pi:.8f}, gap={event.gap_at_event:.1e}")
print("analytic check (gain and loss proportional to identity):", event.analytic_match)
