"""Transient windings after a quench from an eigenstate of the damping matrix.

Starts integer (3 over the 6 pi period), passes through fractional window
values after the transient gap closes near t = 0.12, and ends in the
trivial steady state.

Run: python3 demos/02_integer_to_fraction.py
"""
import numpy as np

from fractwind import detect_dynamical_transition, scenario_params, window_windings

p = scenario_params("fig3")

for t in (0.0, 0.05, 0.1, 0.15, 0.2, 0.5, None):
    rep = window_windings(p, t=t, grid=3000)
    label = "steady" if t is None else f"t={t:.2f}"
    pieces = " ".join(f"{w['berry']:+.3f}" for w in rep.per_window)
    planar = "n/a" if rep.planar is None else f"{rep.planar:+.3f}"
    print(f"{label:>8}  berry={rep.berry:+.4f}  planar={planar}  windows=[{pieces}]")

# %% The transient gap closing
for e in detect_dynamical_transition(p, (0.0, 0.5), t_steps=101):
    print(f"\ngap closes at t*={e.control:.6f}, k0/pi={e.k0 / np.pi:.5f}")
