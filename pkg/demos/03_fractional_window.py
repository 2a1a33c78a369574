"""Berry value of the middle 2 pi window of the steady state.

Each window is closed through the north pole; the three values add up to
the full-period winding.  The gain offset is then tuned until the middle
window carries exactly 1/3.

Run: python3 demos/03_fractional_window.py
"""
from fractwind import scenario_params, tune_gamma, window_value, window_windings

p = scenario_params("fig4")
rep = window_windings(p, grid=3000)
print("windows:", [round(w["berry"], 6) for w in rep.per_window], " total:", round(rep.berry, 6))
print(f"middle window at gamma={p.gamma}: {window_value(p):.10f}")

g = tune_gamma(p, 1 / 3, (0.3, 0.6))
print(f"middle window equals 1/3 at gamma*={g:.10f}: {window_value(p.replace(gamma=g)):.10f}")
