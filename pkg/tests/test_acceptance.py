"""Acceptance criteria; each test records one pass/fail line in the summary."""
import filecmp

import numpy as np

from fractwind.cli import main
from fractwind.dynamics import (EvolutionState, correlation_on_grid, integrate_ode, propagate,
                                trajectory)
from fractwind.model import (KWindow, ModelParams, bloch_hamiltonian, damping_matrix, gain_matrix,
                             loss_matrix, scenario_params)
from fractwind.pauli import SIGMA0, expm2, reconstruct, solve_lyapunov
from fractwind.symmetry import (MATRIX_FUNCTIONS, inversion_defect, matrix_function_alignment,
                                modular_trajectory, random_states)
from fractwind.topology import (berry_winding, detect_dynamical_transition,
                                detect_steady_transitions, tune_gamma, window_value,
                                window_windings)
import oracles

GRID = 3000


def _full(p, t=None, grid=GRID):
    return trajectory(p, KWindow(0.0, p.period, grid), t=t)


def _int_dist(x):
    return abs(x - round(x))


def test_criterion_1_steady_phase_diagram(criterion):
    b_top = berry_winding(_full(scenario_params("fig2", gamma=0.5)))
    b_triv = berry_winding(_full(scenario_params("fig2", gamma=1.5)))
    events = detect_steady_transitions(scenario_params("fig2"), (0.5, 1.5), gamma_steps=21, grid=GRID)
    ok = abs(b_top - 1) <= 1e-3 and abs(b_triv) <= 1e-3 and len(events) == 1
    detail = f"berry(0.5)={b_top:.6f} berry(1.5)={b_triv:.2e} events={len(events)}"
    if events:
        e = events[0]
        Ds, _ = correlation_on_grid(scenario_params("fig2", gamma=e.control), np.array([e.k0]))
        err = np.max(np.abs(Ds[0] - SIGMA0))
        ok &= abs(e.control - 1) <= 0.01 and abs(e.k0 - 3 * np.pi) <= 0.01 and err <= 1e-8
        detail += f" gamma_c={e.control:.8f} k0/pi={e.k0 / np.pi:.8f} |Ds-1|={err:.1e}"
    assert criterion(1, "steady topological/trivial phases and transition", ok, detail)


def test_criterion_2_fractional_middle_window(criterion):
    p = scenario_params("fig4")
    value = window_value(p, 1, 1000)
    g_star = tune_gamma(p, 1 / 3, (0.3, 0.6))
    at_star = window_value(p.replace(gamma=g_star), 1, 1000)
    checks = {"value": abs(value - 1 / 3) <= 0.02, "exact": abs(at_star - 1 / 3) <= 1e-6,
              "gamma*": abs(g_star - 0.35) <= 0.05}
    detail = (f"window[2pi,4pi]@0.35={value:.6f} gamma*={g_star:.6f} value@gamma*={at_star:.8f} "
              f"checks={checks}")
    assert criterion(2, "middle-window fractional value", all(checks.values()), detail)


def test_criterion_3_integer_to_fraction(criterion):
    p = scenario_params("fig3")
    r0 = window_windings(p, t=0.0, grid=GRID)
    per_planar = [w["planar"] for w in r0.per_window]
    events = detect_dynamical_transition(p, (0.0, 0.5), t_steps=101, grid=GRID)
    b02 = berry_winding(_full(p, t=0.2))
    bss = berry_winding(_full(p))
    ok = (all(abs(x - 1) <= 1e-3 for x in per_planar) and abs(r0.planar - 3) <= 1e-3
          and any(0.1 < e.control < 0.2 for e in events) and abs(b02 - 1) <= 1e-3
          and abs(bss) <= 1e-3)
    detail = (f"t=0 per-window planar={np.round(per_planar, 6).tolist()} total={r0.planar:.6f}; "
              f"events t*={[round(e.control, 6) for e in events]}; berry(t=0.2)={b02:.6f}; "
              f"berry(steady)={bss:.2e}")
    assert criterion(3, "transient integer-fraction-integer sequence", ok, detail)


def _draws(n, count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        p = ModelParams(t1=rng.uniform(0.2, 2.0), t2=rng.uniform(0.2, 3.0),
                        gamma=rng.uniform(-2.0, 2.0), n=n)
        if np.min(_full(p).purity) > 0.05:
            out.append(p)
    return out


def test_criterion_4_single_valued_quantization(criterion):
    values = [berry_winding(_full(p)) for p in _draws(1, 20, seed=42)]
    worst = max(min(abs(v), abs(abs(v) - 1)) for v in values)
    kinds = sorted({round(v) % 2 for v in values})
    assert criterion(4, "n=1 Berry phase in {0, pi}", worst <= 1e-3,
                     f"20 draws, worst distance={worst:.2e}, classes={kinds}")


def test_criterion_5_multi_period_requantization(criterion):
    worst = 0.0
    for n in (2, 3):
        for p in _draws(n, 10, seed=42 + n):
            worst = max(worst, _int_dist(berry_winding(_full(p))))
    lr = scenario_params("longrange")
    std = ModelParams(t1=lr.t1, t2=lr.t3, gamma=0.0, gamma1=lr.gamma1, gamma2=lr.gamma2, n=3)
    b_lr, b_std = berry_winding(_full(lr)), berry_winding(_full(std))
    ok = worst <= 1e-3 and _int_dist(b_lr) <= 1e-3 and abs(b_lr - b_std) <= 1e-3
    assert criterion(5, "full-span re-quantization", ok,
                     f"n=2,3 worst distance={worst:.2e}; longrange={b_lr:.6f} standard n=3={b_std:.6f}")


def test_criterion_6_oracles(criterion):
    p = scenario_params("fig3")
    k = np.random.default_rng(42).uniform(0, p.period, 10)
    X, Mg = damping_matrix(p, k), gain_matrix(p, k)
    state = EvolutionState.prepare(p, k)
    long = integrate_ode(state.delta, X, Mg, 30 / p.Gamma, 2e-3)
    e_lyap = np.max(np.abs(long - state.steady))
    e_prop = max(np.max(np.abs(propagate(state, t) - integrate_ode(state.delta, X, Mg, t, 1e-3)))
                 for t in (0.1, 0.2))
    rng = np.random.default_rng(42)
    mats = reconstruct(rng.uniform(-3, 3, (200, 4)) + 1j * rng.uniform(-3, 3, (200, 4)))
    e_exp = max(np.max(np.abs(expm2(M) - oracles.series_expm(M))) / max(1, np.max(np.abs(expm2(M))))
                for M in mats)
    e_quad = max(np.max(np.abs(oracles.steady_quadrature(X[i], Mg[i]) - solve_lyapunov(X[i], Mg[i])))
                 for i in range(10))
    ok = e_lyap <= 1e-6 and e_prop <= 1e-8 and e_exp <= 1e-10 and e_quad <= 1e-6
    assert criterion(6, "oracle equivalences", ok,
                     f"lyapunov-vs-rk4={e_lyap:.1e} propagate-vs-rk4={e_prop:.1e} "
                     f"expm2-vs-series(rel)={e_exp:.1e} quadrature={e_quad:.1e}")


def test_criterion_7_symmetry_suites(criterion):
    worst = 0.0
    for name in ("fig2", "fig3", "fig4"):
        p = scenario_params(name)
        w = KWindow(0.0, p.period, 1200)
        samplers = [lambda k: bloch_hamiltonian(p, k), lambda k: gain_matrix(p, k),
                    lambda k: loss_matrix(p, k), lambda k: damping_matrix(p, k),
                    lambda k: correlation_on_grid(p, k)[0]]
        samplers += [lambda k, t=t: correlation_on_grid(p, k, t=t)[0] for t in (0.0, 0.1, 0.2)]
        worst = max(worst, *(inversion_defect(s, w).max_defect for s in samplers))
    states = random_states(np.random.default_rng(42), 1000)
    align = max(np.max(np.abs(matrix_function_alignment(states, f) - 1)) for f in MATRIX_FUNCTIONS)
    tr = _full(scenario_params("fig2", gamma=0.5))
    b_d, b_k = berry_winding(tr), berry_winding(modular_trajectory(tr))
    diff = abs(abs(b_d) - abs(b_k))
    ok = worst <= 1e-10 and align <= 1e-10 and diff <= 1e-9
    assert criterion(7, "inversion and matrix-function suites", ok,
                     f"max defect={worst:.1e} max |cos|-1={align:.1e} "
                     f"berry(D)={b_d:.6f} berry(K)={b_k:.6f}")


RUNS = [["steady", "--scenario", "fig2"], ["evolve", "--scenario", "fig3"],
        ["steady", "--scenario", "fig4"], ["longrange"],
        ["sweep", "--scenario", "fig2", "--steps", "11"],
        ["audit", "--scenario", "fig3", "--grid", "900"]]


def test_criterion_8_determinism(criterion, tmp_path):
    mismatched = []
    for i, args in enumerate(RUNS):
        a, b = tmp_path / f"{i}a", tmp_path / f"{i}b"
        codes = main([*args, "--out", str(a)]), main([*args, "--out", str(b)])
        files = sorted(f.name for f in a.iterdir())
        match, diff, err = filecmp.cmpfiles(a, b, files, shallow=False)
        if codes[0] != codes[1] or diff or err or files != sorted(f.name for f in b.iterdir()):
            mismatched.append(" ".join(args))
    assert criterion(8, "byte-identical reruns", not mismatched,
                     f"{len(RUNS)} configurations, mismatches={mismatched}")
