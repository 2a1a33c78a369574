"""A chain with third-neighbour hopping and single-valued gain.

Under K = 3k it is the n = 3 chain with gamma = 0, so the two full-zone
windings agree and the three k-windows of width 2 pi / 3 reproduce the
2 pi windows of the standard chain.

Run: python3 demos/04_long_range_chain.py
"""
from fractwind import ModelParams, scenario_params, window_windings

lr = scenario_params("longrange")
std = ModelParams(t1=lr.t1, t2=lr.t3, gamma=0.0, n=3)

for name, p in (("long-range", lr), ("standard n=3", std)):
    rep = window_windings(p, n_windows=3, grid=3000)
    print(f"{name:>13}: total={rep.berry:+.6f} windows={[round(w['berry'], 6) for w in rep.per_window]}")
