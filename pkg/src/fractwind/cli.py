"""Command-line front end.

Every subcommand writes a JSON report (``report.json``) into ``--out``;
trajectory-producing commands also write ``trajectories.csv`` (or
``.json``) and ``sweep`` writes ``sweep.csv``.

Exit codes: 0 success, 1 invalid configuration, 2 numerical refusal or
failed audit.
"""
import argparse
from dataclasses import asdict, dataclass, field, fields
import math
from pathlib import Path
import re
import sys

import numpy as np

from .dynamics import EvolutionState, correlation_on_grid, propagate, trajectory
from .errors import ConfigError, FractwindError, GapClosedError
from .model import (BANDS, KWindow, bloch_hamiltonian, damping_matrix, gain_matrix, loss_matrix,
                    scenario_params)
from .report import fmt, write_report, write_table, write_trajectories
from .symmetry import (MATRIX_FUNCTIONS, inversion_defect, matrix_function_alignment,
                       modular_trajectory, random_states)
from .topology import (GAP_TOL, INT_TOL, berry_winding, classify, detect_dynamical_transition,
                       detect_steady_transitions, planar_angle, report_for, solid_angle, tune_gamma,
                       window_value)

SCENARIOS = ("fig2", "fig3", "fig4", "longrange", "custom")
COMMANDS = ("steady", "evolve", "sweep", "detect", "audit", "longrange")
PARAM_KEYS = ("t1", "t2", "t3", "gamma1", "gamma2", "gamma", "n")
AUDIT_TOL = 1e-10
ALIGN_TOL = 1e-10
FIG4_TARGET = 1 / 3
FIG4_BRACKET = (0.3, 0.6)

_DEFAULT_TIMES = {"fig3": (0.0, 0.1, 0.2)}
_DEFAULT_RANGE = {"gamma": (0.5, 1.5), "time": (0.0, 0.5)}
_DEFAULT_STEPS = {"gamma": 21, "time": 101}


@dataclass
class RunConfig:
    command: str = "steady"
    scenario: str = "fig2"
    params: dict = field(default_factory=dict)
    window: tuple = None
    times: tuple = None
    grid: int = 3000
    out: str = "out"
    format: str = "csv"
    seed: int = 42
    gap_tol: float = GAP_TOL
    int_tol: float = INT_TOL
    band: str = "upper"
    control: str = None
    range: tuple = None
    steps: int = None
    break_symmetry: float = 0.0
    audit_samples: int = 1000

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.grid < 64:
            raise ConfigError(f"grid must be at least 64, got {self.grid}")
        if self.gap_tol <= 0 or self.int_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.band not in BANDS:
            raise ConfigError(f"unknown band {self.band!r}")
        if self.control not in (None, "gamma", "time"):
            raise ConfigError(f"unknown control {self.control!r}")
        if self.times is not None and any(t < 0 for t in self.times):
            raise ConfigError("times must be non-negative")
        if self.audit_samples < 1:
            raise ConfigError("audit_samples must be positive")
        unknown = set(self.params) - set(PARAM_KEYS)
        if unknown:
            raise ConfigError(f"unknown model parameters {sorted(unknown)}")
        self.model()  # validates parameter values

    def model(self):
        return scenario_params(self.scenario, sy_perturbation=self.break_symmetry or None,
                               **self.params)

    def resolved(self):
        """Everything that determines the output, with defaults filled in."""
        p = self.model()
        out = asdict(self)
        out.pop("out")
        out["params"] = p.as_dict()
        out["window"] = list(self.resolved_window(p))
        out["times"] = None if self.times is None else list(self.times)
        if self.command in ("sweep", "detect"):
            control = self.control or "gamma"
            out["control"] = control
            out["range"] = list(self.range or _DEFAULT_RANGE[control])
            out["steps"] = self.steps or _DEFAULT_STEPS[control]
        elif out["range"] is not None:
            out["range"] = list(out["range"])
        return out

    def resolved_window(self, p):
        return tuple(self.window) if self.window is not None else (0.0, float(p.period))


# --- config parsing ---------------------------------------------------------

_PI = re.compile(r"^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*$")


def parse_number(text):
    """Float, optionally written as a multiple of pi (``6pi``, ``2*pi``, ``pi``)."""
    text = str(text).strip()
    m = _PI.match(text)
    try:
        if m:
            coef = m.group(1)
            return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
        return float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_pair(text, name):
    parts = [s for s in str(text).split(",") if s.strip()]
    if len(parts) != 2:
        raise ConfigError(f"{name} needs two comma-separated values, got {text!r}")
    lo, hi = (parse_number(s) for s in parts)
    return lo, hi


def parse_times(text):
    text = str(text).strip()
    if text.lower() in ("", "steady", "none"):
        return None
    return tuple(parse_number(s) for s in text.split(",") if s.strip())


def parse_int(text, name):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {text!r}") from None
    if value != int(value):
        raise ConfigError(f"{name} must be an integer, got {text!r}")
    return int(value)


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


_CONVERTERS = {
    "scenario": str, "out": str, "format": str, "band": str, "control": str,
    "grid": lambda v: parse_int(v, "grid"), "seed": lambda v: parse_int(v, "seed"),
    "steps": lambda v: parse_int(v, "steps"),
    "audit_samples": lambda v: parse_int(v, "audit_samples"),
    "gap_tol": parse_number, "int_tol": parse_number, "break_symmetry": parse_number,
    "window": lambda v: parse_pair(v, "window"), "range": lambda v: parse_pair(v, "range"),
    "times": parse_times,
}


def build_config(command, raw):
    """RunConfig from string-valued settings (file values already merged)."""
    kwargs, params = {"command": command}, {}
    known = {f.name for f in fields(RunConfig)} - {"command", "params"}
    for key, value in raw.items():
        if value is None:
            continue
        if key in PARAM_KEYS:
            params[key] = parse_int(value, key) if key == "n" else parse_number(value)
        elif key in known:
            kwargs[key] = _CONVERTERS[key](value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return RunConfig(params=params, **kwargs)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def make_parser():
    parser = _Parser(prog="fractwind", description="Winding numbers of dissipative two-band chains.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "steady": "steady-state trajectory and windings",
        "evolve": "transient trajectories at the given times",
        "sweep": "gap and winding table over gamma or time, plus detected transitions",
        "detect": "detected gap-closing transitions only",
        "audit": "inversion-symmetry and matrix-function audits",
        "longrange": "long-range chain next to the matched standard n=3 chain",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--scenario", choices=SCENARIOS)
        for key in PARAM_KEYS:
            sp.add_argument(f"--{key}")
        sp.add_argument("--window", help="lo,hi (e.g. 0,6pi)")
        sp.add_argument("--grid", help="momentum samples (>= 64)")
        sp.add_argument("--times", help="comma-separated times, or 'steady'")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--seed")
        sp.add_argument("--band", choices=BANDS)
        sp.add_argument("--gap-tol", dest="gap_tol")
        sp.add_argument("--int-tol", dest="int_tol")
        sp.add_argument("--control", choices=("gamma", "time"))
        sp.add_argument("--range", help="lo,hi of the swept control")
        sp.add_argument("--steps")
        sp.add_argument("--break-symmetry", dest="break_symmetry", nargs="?", const="0.1",
                        help="add a constant sigma_y term to X (default strength 0.1)")
        sp.add_argument("--audit-samples", dest="audit_samples")
    return parser


def parse_args(argv):
    ns = make_parser().parse_args(argv)
    raw = read_config_file(ns.config) if ns.config else {}
    for key, value in vars(ns).items():
        if key not in ("command", "config") and value is not None:
            raw[key] = value
    return build_config(ns.command, raw)


# --- computations -----------------------------------------------------------

class Refusal(Exception):
    def __init__(self, t, k, message):
        super().__init__(message)
        self.record = {"t": t, "k": k, "message": message}


def _window_of(cfg, p):
    lo, hi = cfg.resolved_window(p)
    span = hi - lo
    closed = math.isclose(span / p.period, round(span / p.period), abs_tol=1e-12) and span > 0
    n_windows = None
    if closed:
        n_windows = round(span / p.period) * p.n if p.variant == "standard" else round(span / p.period) * 3
    grid = cfg.grid if not n_windows else int(math.ceil(cfg.grid / n_windows) * n_windows)
    return KWindow(lo, hi, grid, closed=closed), n_windows


def _winding(cfg, traj, n_windows):
    try:
        if n_windows:
            return report_for(traj, n_windows, gap_tol=cfg.gap_tol, int_tol=cfg.int_tol).as_dict()
        n = traj.unit_vectors(cfg.gap_tol)
        berry = solid_angle(n, closed=False) / (2 * np.pi)
        try:
            planar = planar_angle(traj.dvec, closed=False) / (2 * np.pi)
        except GapClosedError:
            planar = None
        w = traj.window
        return {"t": traj.t, "window": [w.k_lo, w.k_hi], "planar": planar, "berry": berry,
                "per_window": [], "integrality": classify(berry, cfg.int_tol)}
    except ConfigError:
        raise
    except FractwindError as exc:
        k = getattr(exc, "k", None)
        if k is None and getattr(exc, "index", None) is not None:
            k = traj.k[exc.index]
        raise Refusal(traj.t, None if k is None else float(k), str(exc)) from None


def _new_report(cfg):
    return {"config": cfg.resolved(), "windings": [], "transitions": [], "audits": []}


def _emit_trajectories(cfg, trajs):
    name = "trajectories." + cfg.format
    write_trajectories(Path(cfg.out) / name, trajs, cfg.format)


def run_scenario(cfg):
    """``steady``/``evolve``: trajectory files and a winding report.

    Returns ``(exit_code, report)``; the report is also written to disk.
    """
    p = cfg.model()
    report = _new_report(cfg)
    if cfg.command == "evolve":
        times = cfg.times if cfg.times is not None else _DEFAULT_TIMES.get(cfg.scenario, (0.0,))
        report["config"]["times"] = list(times)
    else:
        times = (None,) if cfg.times is None else cfg.times
    code = 0
    trajs = []
    try:
        window, n_windows = _window_of(cfg, p)
        for t in times:
            traj = trajectory(p, window, t=t, band=cfg.band)
            trajs.append(traj)
            report["windings"].append(_winding(cfg, traj, n_windows))
    except Refusal as exc:
        report["refusal"] = exc.record
        code = 2
    if cfg.scenario == "fig4" and code == 0:
        report["fig4"] = fig4_values(p)
    _emit_trajectories(cfg, trajs)
    write_report(Path(cfg.out) / "report.json", report)
    return code, report


def fig4_values(p):
    """Middle-window Berry value at the configured gamma and the tuned gamma."""
    value = window_value(p, 1, 1000)
    g_star = tune_gamma(p, FIG4_TARGET, FIG4_BRACKET)
    return {"gamma": p.gamma, "window": [2 * np.pi, 4 * np.pi], "middle_window_berry": value,
            "target": FIG4_TARGET, "gamma_star": g_star,
            "value_at_gamma_star": window_value(p.replace(gamma=g_star), 1, 1000)}


def _controls(cfg):
    r = cfg.resolved()
    lo, hi = r["range"]
    if not hi > lo or r["steps"] < 2:
        raise ConfigError(f"empty sweep range [{lo}, {hi}] with {r['steps']} steps")
    return r["control"], (lo, hi), r["steps"]


def _detect(cfg, p, control, rng, steps):
    if control == "gamma":
        events = detect_steady_transitions(p, rng, gamma_steps=steps, grid=cfg.grid,
                                           gap_tol=cfg.gap_tol)
    else:
        events = detect_dynamical_transition(p, rng, t_steps=steps, grid=cfg.grid, band=cfg.band,
                                             gap_tol=cfg.gap_tol)
    out = []
    for e in events:
        d = e.as_dict()
        d["windings_before"] = e.windings_before.as_dict()["berry"] if e.windings_before else None
        d["windings_after"] = e.windings_after.as_dict()["berry"] if e.windings_after else None
        if e.analytic_match is not None:
            d["analytic_match"] = e.analytic_match
        out.append(d)
    return out


def sweep(cfg, table=True):
    """Scan a control parameter; ``table`` adds the per-step ``sweep.csv``."""
    control, rng, steps = _controls(cfg)
    p = cfg.model()
    report = _new_report(cfg)
    if table:
        rows = []
        window, n_windows = _window_of(cfg, p)
        values = np.linspace(rng[0], rng[1], steps)
        state = None
        for c in values:
            if control == "gamma":
                q = p.replace(gamma=float(c))
                D, valid = correlation_on_grid(q, window.grid())
                t = None
            else:
                if state is None:
                    state = EvolutionState.prepare(p, window.grid(), band=cfg.band)
                D, valid, t = propagate(state, float(c)), None, float(c)
            from .topology import Trajectory

            traj = Trajectory.from_correlations(window.grid(), D, closed=window.closed,
                                                window=window, valid=valid, t=t)
            gap = float(np.nanmin(traj.purity))
            try:
                w = _winding(cfg, traj, n_windows)
                berry, planar = w["berry"], w["planar"]
            except Refusal:
                berry = planar = None
            rows.append((float(c), gap, berry, planar))
        write_table(Path(cfg.out) / "sweep.csv", ["control", "min_gap", "berry", "planar"], rows)
    report["transitions"] = _detect(cfg, p, control, rng, steps)
    write_report(Path(cfg.out) / "report.json", report)
    return 0, report


def detect(cfg):
    return sweep(cfg, table=False)


def _operator_samplers(p, cfg):
    """Momentum-array samplers for model operators and evolved states."""
    out = {
        "h": lambda k: bloch_hamiltonian(p, k),
        "M_g": lambda k: gain_matrix(p, k),
        "M_l": lambda k: loss_matrix(p, k),
        "X": lambda k: damping_matrix(p, k),
        "Delta_steady": lambda k: correlation_on_grid(p, k)[0],
    }
    times = cfg.times if cfg.times is not None else _DEFAULT_TIMES.get(cfg.scenario, (0.0, 0.1, 0.2))
    for t in times:
        out[f"Delta(t={fmt(t)})"] = lambda k, t=t: correlation_on_grid(p, k, t=t, band=cfg.band)[0]
    return out


def audit(cfg):
    """Symmetry audits on the configured scenario; exit 2 on any failure."""
    p = cfg.model()
    report = _new_report(cfg)
    window, _ = _window_of(cfg, p)
    ok = True
    for name, sampler in _operator_samplers(p, cfg).items():
        rep = inversion_defect(sampler, window, name).as_dict()
        rep.update(kind="inversion", tolerance=AUDIT_TOL, passed=bool(rep["max_defect"] <= AUDIT_TOL))
        ok &= rep["passed"]
        report["audits"].append(rep)

    gen = np.random.default_rng(cfg.seed)
    states = random_states(gen, cfg.audit_samples)
    for name in MATRIX_FUNCTIONS:
        dev = float(np.max(np.abs(matrix_function_alignment(states, name) - 1)))
        passed = dev <= ALIGN_TOL
        ok &= passed
        report["audits"].append({"kind": "alignment", "operator": name, "max_deviation": dev,
                                 "samples": cfg.audit_samples, "seed": cfg.seed,
                                 "tolerance": ALIGN_TOL, "passed": bool(passed)})

    entry = {"kind": "modular_winding", "operator": "K", "tolerance": 1e-9}
    try:
        traj = trajectory(p, window, t=None)
        b_delta = berry_winding(traj)
        b_mod = berry_winding(modular_trajectory(traj))
        diff = abs(abs(b_delta) - abs(b_mod))
        entry.update(berry_delta=b_delta, berry_modular=b_mod, difference=diff,
                     passed=bool(diff <= 1e-9))
    except FractwindError as exc:
        entry.update(passed=False, error=str(exc))
    ok &= entry["passed"]
    report["audits"].append(entry)
    write_report(Path(cfg.out) / "report.json", report)
    return (0 if ok else 2), report


def longrange(cfg):
    """Long-range chain over its full zone next to the matched n=3 chain.

    The long-range gain has unit identity part and no offset, so the two
    agree for ``gamma=0``, ``gamma1+gamma2=1`` and ``t2=t3`` under
    ``k_standard = 3 k``.
    """
    p = cfg.model().replace(variant="longrange")
    matched = p.replace(variant="standard", n=3, gamma=0.0, t2=p.t3)
    report = _new_report(cfg)
    report["config"]["params"] = p.as_dict()
    report["config"]["window"] = [0.0, float(p.period)]
    report["config"]["matched_params"] = matched.as_dict()
    times = (None,) if cfg.times is None else cfg.times
    grid = int(math.ceil(cfg.grid / 3) * 3)
    trajs, code = [], 0
    try:
        for t in times:
            for q in (p, matched):
                traj = trajectory(q, KWindow(0.0, q.period, grid), t=t, band=cfg.band)
                w = _winding(cfg, traj, 3)
                w["variant"] = q.variant
                report["windings"].append(w)
                if q is p:
                    trajs.append(traj)
    except Refusal as exc:
        report["refusal"] = exc.record
        code = 2
    ws = report["windings"]
    report["matches"] = [
        {"t": a["t"], "longrange": a["berry"], "standard": b["berry"],
         "difference": abs(a["berry"] - b["berry"])}
        for a, b in zip(ws[::2], ws[1::2])
    ]
    _emit_trajectories(cfg, trajs)
    write_report(Path(cfg.out) / "report.json", report)
    return code, report


_HANDLERS = {"steady": run_scenario, "evolve": run_scenario, "sweep": sweep, "detect": detect,
             "audit": audit, "longrange": longrange}


def run(cfg):
    return _HANDLERS[cfg.command](cfg)


def main(argv=None):
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
        code, report = run(cfg)
    except ConfigError as exc:
        print(f"fractwind: configuration error: {exc}", file=sys.stderr)
        return 1
    except FractwindError as exc:
        print(f"fractwind: numerical refusal: {exc}", file=sys.stderr)
        return 2
    if "refusal" in report:
        r = report["refusal"]
        print(f"fractwind: numerical refusal at t={r['t']}, k={r['k']}: {r['message']}",
              file=sys.stderr)
    print(f"wrote {Path(cfg.out) / 'report.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())
