"""Bloch-sphere geometry of momentum trajectories and transition detection.

Winding conventions
-------------------
* ``planar_winding``: net angle of the (<sx>, <sy>) projection around the
  origin divided by 2 pi.
* ``berry_winding``: solid angle Omega swept by the unit Bloch vector
  divided by 2 pi (Berry phase Omega/2 in units of pi).  Omega is
  accumulated as signed spherical-triangle excesses against a reference
  point.  For a closed curve this is only defined modulo 4 pi, so closed
  values are folded into (-1, 1]; open curves are closed through the
  reference point and are left unfolded.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq, minimize

from .dynamics import EvolutionState, correlation_on_grid, propagate
from .errors import (CoarseGridError, ConfigError, GapClosedError, OriginCrossingError,
                     ReferenceOnPathError)
from .model import KWindow, gain_matrix, k_transpose, loss_matrix, traceless_vector
from .pauli import decompose, reconstruct

GAP_TOL = 1e-6
ORIGIN_TOL = 1e-6
INT_TOL = 1e-3
MAX_STEP_ANGLE = 0.5
REF_TOL = 1e-6
_FOLD_SNAP = 1e-9

SOUTH = np.array([0.0, 0.0, -1.0])
NORTH = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class BlochVector:
    delta0: np.ndarray
    dvec: np.ndarray
    nvec: np.ndarray
    purity: np.ndarray


def bloch_vector(delta, gap_tol=GAP_TOL, unit=True):
    """Pauli averages of a Hermitian correlation matrix (batched).

    With ``unit=True`` a closed gap raises; otherwise ``nvec`` is NaN there.
    """
    c = decompose(delta).real
    d0, d = c[..., 0], c[..., 1:]
    purity = np.linalg.norm(d, axis=-1)
    closed = purity < gap_tol
    if unit and np.any(closed):
        idx = int(np.flatnonzero(np.ravel(closed))[0])
        raise GapClosedError(f"purity gap closed (|d| < {gap_tol:g})", index=idx)
    with np.errstate(invalid="ignore", divide="ignore"):
        n = np.where(closed[..., None], np.nan, d / purity[..., None])
    return BlochVector(d0, d, n, purity)


def purify(delta, gap_tol=GAP_TOL):
    """Pure state with the same Bloch direction: ``(1 + n.sigma) / 2``."""
    b = bloch_vector(delta, gap_tol=gap_tol)
    c = np.concatenate([np.full(b.delta0.shape + (1,), 0.5), 0.5 * b.nvec], axis=-1)
    return reconstruct(c)


@dataclass(frozen=True)
class Trajectory:
    k: np.ndarray
    delta0: np.ndarray
    dvec: np.ndarray
    closed: bool = True
    window: KWindow = None
    valid: np.ndarray = None
    t: float = None

    def __post_init__(self):
        if len(self.k) > 1 and np.any(np.diff(self.k) <= 0):
            raise ConfigError("trajectory momenta must be strictly increasing")
        if self.valid is None:
            object.__setattr__(self, "valid", np.ones(len(self.k), dtype=bool))

    @classmethod
    def from_correlations(cls, k, delta, **kw):
        c = decompose(delta).real
        return cls(np.asarray(k, dtype=float), c[:, 0], c[:, 1:], **kw)

    def __len__(self):
        return len(self.k)

    @property
    def purity(self):
        return np.linalg.norm(self.dvec, axis=-1)

    @property
    def flagged(self):
        """True when some sample could not be evaluated."""
        return not bool(np.all(self.valid))

    def correlations(self):
        c = np.concatenate([self.delta0[:, None], self.dvec], axis=-1)
        return reconstruct(c)

    def unit_vectors(self, gap_tol=GAP_TOL):
        if self.flagged:
            i = int(np.flatnonzero(~self.valid)[0])
            raise GapClosedError("trajectory has invalid samples", index=i, k=self.k[i])
        p = self.purity
        bad = p < gap_tol
        if np.any(bad):
            i = int(np.argmin(p))
            raise GapClosedError(f"purity gap closed at k={self.k[i]:.6g} (|d|={p[i]:.3g})",
                                 index=i, k=self.k[i])
        return self.dvec / p[:, None]

    def segment(self, i0, i1):
        """Open sub-trajectory of samples ``i0 .. i1`` inclusive."""
        return Trajectory(self.k[i0:i1 + 1], self.delta0[i0:i1 + 1], self.dvec[i0:i1 + 1],
                          closed=False, valid=self.valid[i0:i1 + 1], t=self.t)


def _check_unit(n):
    n = np.asarray(n, dtype=float)
    if n.ndim != 2 or n.shape[1] != 3:
        raise ValueError("expected an (N, 3) array of unit vectors")
    return n


def planar_angle(d, closed=True, origin_tol=ORIGIN_TOL, k=None):
    """Net xy-plane angle (radians) swept by a sequence of 3-vectors."""
    d = _check_unit(d)
    norm = np.linalg.norm(d, axis=-1)
    rxy = np.hypot(d[:, 0], d[:, 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(norm > 0, rxy / norm, 0.0)
    bad = (norm < GAP_TOL) | (rel < origin_tol)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        where = f" at k={k[i]:.6g}" if k is not None else ""
        raise OriginCrossingError(f"xy-projection passes through the origin{where}",
                                  index=i, k=None if k is None else k[i])
    theta = np.arctan2(d[:, 1], d[:, 0])
    if closed:
        theta = np.append(theta, theta[0])
    step = np.diff(theta)
    step = np.pi - np.mod(np.pi - step, 2 * np.pi)  # wrap into (-pi, pi]
    return float(np.sum(step))


def planar_winding(traj, origin_tol=ORIGIN_TOL):
    """Winding of the (<sx>, <sy>) projection around the origin."""
    if traj.flagged:
        raise GapClosedError("trajectory has invalid samples")
    return planar_angle(traj.dvec, closed=traj.closed, origin_tol=origin_tol, k=traj.k) / (2 * np.pi)


def triangle_excess(ref, a, b):
    """Signed area of the spherical triangles ``(ref, a_j, b_j)``."""
    num = np.cross(a, b) @ ref
    den = 1.0 + a @ ref + np.sum(a * b, axis=-1) + b @ ref
    return 2.0 * np.arctan2(num, den)


def fold_winding(value):
    """Representative of ``value`` modulo 2 in (-1, 1]."""
    f = math.fmod(value + 1.0, 2.0)
    if f < 0:
        f += 2.0
    f -= 1.0
    if f <= -1.0 + _FOLD_SNAP:
        f = 1.0
    return f


def solid_angle(n, closed=True, reference=SOUTH, max_step=MAX_STEP_ANGLE, ref_tol=REF_TOL):
    """Signed solid angle traced by unit vectors ``n`` (radians, unfolded).

    Open curves are closed through ``reference``.
    """
    n = _check_unit(n)
    ref = np.asarray(reference, dtype=float)
    ref = ref / np.linalg.norm(ref)
    near = np.minimum(np.linalg.norm(n - ref, axis=-1), np.linalg.norm(n + ref, axis=-1))
    if np.any(near < ref_tol):
        i = int(np.argmin(near))
        raise ReferenceOnPathError(f"sample {i} lies on the reference axis {ref.tolist()}")
    a = n
    b = np.roll(n, -1, axis=0) if closed else n[1:]
    if not closed:
        a = n[:-1]
    cosang = np.clip(np.sum(a * b, axis=-1), -1.0, 1.0)
    ang = np.arccos(cosang)
    if np.any(ang > max_step):
        i = int(np.argmax(ang))
        raise CoarseGridError(f"step {i} spans {ang[i]:.3f} rad > {max_step}; refine the grid")
    return float(np.sum(triangle_excess(ref, a, b)))


def berry_winding(traj, reference=SOUTH, gap_tol=GAP_TOL, max_step=MAX_STEP_ANGLE):
    """Solid-angle winding ``Omega / 2 pi`` of a trajectory.

    Closed trajectories are folded into (-1, 1]; open ones are closed
    through ``reference`` and returned as is.
    """
    n = traj.unit_vectors(gap_tol)
    omega = solid_angle(n, closed=traj.closed, reference=reference, max_step=max_step)
    value = omega / (2 * np.pi)
    return fold_winding(value) if traj.closed else value


def classify(value, int_tol=INT_TOL):
    m = round(value)
    if abs(value - m) <= int_tol:
        return {"kind": "integer", "value": int(m)}
    return {"kind": "fractional", "value": float(value)}


@dataclass
class WindingReport:
    t: float
    window: tuple
    planar: float
    berry: float
    per_window: list = field(default_factory=list)
    total_window_span: float = 0.0
    integrality: dict = None

    def as_dict(self):
        return {
            "t": self.t,
            "window": list(self.window),
            "planar": self.planar,
            "berry": self.berry,
            "per_window": self.per_window,
            "integrality": self.integrality,
        }


def decompose_windows(traj, n_windows, reference=NORTH, gap_tol=GAP_TOL):
    """Split a closed full-period trajectory into ``n_windows`` open pieces.

    Each piece is closed through ``reference``; with the north pole these
    values add up to the unfolded full-span winding.  Only the full-span
    value is topological, the pieces are a gauge-dependent decomposition.
    """
    if not traj.closed:
        raise ConfigError("window decomposition needs a closed trajectory")
    N = len(traj)
    if N % n_windows:
        raise ConfigError(f"grid of {N} points does not split into {n_windows} windows")
    G = N // n_windows
    n = traj.unit_vectors(gap_tol)
    n = np.vstack([n, n[:1]])
    d = np.vstack([traj.dvec, traj.dvec[:1]])
    span = traj.window.k_hi - traj.window.k_lo if traj.window is not None else None
    out = []
    for j in range(n_windows):
        sl = slice(j * G, (j + 1) * G + 1)
        berry = solid_angle(n[sl], closed=False, reference=reference) / (2 * np.pi)
        try:
            planar = planar_angle(d[sl], closed=False) / (2 * np.pi)
        except OriginCrossingError:
            planar = None
        lo = traj.k[0] + (span / n_windows * j if span else 0.0)
        hi = lo + (span / n_windows if span else 0.0)
        out.append({"window": [lo, hi], "berry": berry, "planar": planar})
    return out


def full_span_window(p, grid):
    return KWindow(0.0, p.period, grid, closed=True)


def window_windings(p, t=None, n_windows=None, grid=3000, band="upper",
                    gap_tol=GAP_TOL, int_tol=INT_TOL, reference=SOUTH):
    """Full-span and per-window windings at time ``t`` (None = steady state).

    The full span is one period of the model: ``[0, 2 pi n]`` for the
    standard chain, ``[0, 2 pi]`` for the long-range chain.
    """
    from .dynamics import trajectory

    n_windows = n_windows or p.n
    grid = int(math.ceil(grid / n_windows) * n_windows)
    traj = trajectory(p, full_span_window(p, grid), t=t, band=band)
    return report_for(traj, n_windows, gap_tol=gap_tol, int_tol=int_tol, reference=reference)


def report_for(traj, n_windows, gap_tol=GAP_TOL, int_tol=INT_TOL, reference=SOUTH):
    berry = berry_winding(traj, reference=reference, gap_tol=gap_tol)
    try:
        planar = planar_winding(traj)
    except OriginCrossingError:
        planar = None
    per = decompose_windows(traj, n_windows, gap_tol=gap_tol)
    w = traj.window
    return WindingReport(t=traj.t, window=(w.k_lo, w.k_hi), planar=planar, berry=berry,
                         per_window=per, total_window_span=w.k_hi - w.k_lo,
                         integrality=classify(berry, int_tol))


def window_value(p, window_index=1, grid_per_window=1000, t=None, band="upper"):
    """Berry value of one 2 pi window, closed through the north pole."""
    lo = 2 * np.pi * window_index if p.variant == "standard" else p.period * window_index / p.n
    width = 2 * np.pi if p.variant == "standard" else p.period / p.n
    w = KWindow(lo, lo + width, grid_per_window, closed=False)
    from .dynamics import trajectory

    traj = trajectory(p, w, t=t, band=band)
    return solid_angle(traj.unit_vectors(), closed=False, reference=NORTH) / (2 * np.pi)


def tune_gamma(p, target, bracket, window_index=1, grid_per_window=1000, xtol=1e-12):
    """Gain parameter at which one window's steady Berry value hits ``target``."""

    def f(g):
        return window_value(p.replace(gamma=g), window_index, grid_per_window) - target

    return brentq(f, bracket[0], bracket[1], xtol=xtol)


@dataclass
class TransitionEvent:
    kind: str
    control: float
    k0: float
    gap_at_event: float
    windings_before: WindingReport = None
    windings_after: WindingReport = None
    analytic_match: bool = None

    def as_dict(self):
        return {"kind": self.kind, "control": self.control, "k0": self.k0,
                "gap": self.gap_at_event}


def _local_minima(values):
    v = np.asarray(values)
    idx = []
    for i in range(len(v)):
        left = v[i - 1] if i > 0 else np.inf
        right = v[i + 1] if i < len(v) - 1 else np.inf
        if v[i] <= left and v[i] <= right:
            idx.append(i)
    return idx


def _refine(gap2, x0, scale):
    res = minimize(gap2, x0, method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-30, "maxiter": 4000,
                            "initial_simplex": [x0, x0 + [scale[0], 0], x0 + [0, scale[1]]]})
    return res.x, math.sqrt(max(res.fun, 0.0))


def _scan(p, controls, make, grid):
    k = full_span_window(p, grid).grid()
    mins, args = [], []
    for c in controls:
        D = make(c, k)
        purity = np.linalg.norm(decompose(D).real[:, 1:], axis=-1)
        i = int(np.nanargmin(purity))
        mins.append(float(purity[i]))
        args.append(float(k[i]))
    return np.array(mins), np.array(args), k[1] - k[0]


def _dedupe(events):
    out = []
    for e in sorted(events, key=lambda e: (e.control, e.k0)):
        if out and abs(e.control - out[-1].control) < 1e-7 and abs(e.k0 - out[-1].k0) < 1e-5:
            continue
        out.append(e)
    return out


def _safe_report(fn):
    try:
        return fn()
    except (GapClosedError, CoarseGridError, ReferenceOnPathError):
        return None


def steady_gap_scan(p, gamma_range, gamma_steps, grid=3000):
    gammas = np.linspace(gamma_range[0], gamma_range[1], gamma_steps)
    mins, args, _ = _scan(p, gammas,
                          lambda g, k: correlation_on_grid(p.replace(gamma=g), k)[0], grid)
    return gammas, mins, args


def detect_steady_transitions(p, gamma_range, gamma_steps=21, grid=3000,
                              gap_tol=GAP_TOL, analytic_tol=1e-6):
    """Values of the gain parameter where the steady purity gap closes.

    The grid minimum of |d| is scanned in gamma; every local minimum is
    refined by minimizing |d|^2 jointly in (gamma, k) and kept if the gap
    falls below ``gap_tol`` inside the scanned range.
    """
    lo, hi = gamma_range
    if not hi > lo or gamma_steps < 2:
        raise ConfigError("need a non-empty gamma range and at least 2 steps")
    gammas, mins, args = steady_gap_scan(p, gamma_range, gamma_steps, grid)
    dg = gammas[1] - gammas[0]
    dk = p.period / grid

    def gap2(x):
        D, _ = correlation_on_grid(p.replace(gamma=x[0]), np.array([x[1]]))
        return float(np.sum(decompose(D[0]).real[1:] ** 2))

    events = []
    for i in _local_minima(mins):
        (g, k0), gap = _refine(gap2, np.array([gammas[i], args[i]]), (dg / 2, dk))
        if gap > gap_tol or not (lo - 1e-12 <= g <= hi + 1e-12):
            continue
        k0 = float(np.mod(k0, p.period))
        q = p.replace(gamma=g)
        mg = traceless_vector(gain_matrix(q, k0))
        ml = traceless_vector(k_transpose(loss_matrix, q, -k0))
        match = bool(np.linalg.norm(mg) < analytic_tol and np.linalg.norm(ml) < analytic_tol)
        before = _safe_report(lambda: window_windings(p.replace(gamma=g - dg / 2), grid=grid))
        after = _safe_report(lambda: window_windings(p.replace(gamma=g + dg / 2), grid=grid))
        events.append(TransitionEvent("steady", float(g), k0, gap, before, after, match))
    return _dedupe(events)


def dynamical_gap_scan(p, t_range, t_steps, grid=3000, band="upper"):
    times = np.linspace(t_range[0], t_range[1], t_steps)
    state = EvolutionState.prepare(p, full_span_window(p, grid).grid(), band=band)
    mins, args, _ = _scan(p, times, lambda t, k: propagate(state, t), grid)
    return times, mins, args


def detect_dynamical_transition(p, t_range, t_steps=101, grid=3000, band="upper",
                                gap_tol=GAP_TOL):
    """Times at which the transient purity gap closes at some momentum."""
    lo, hi = t_range
    if not hi > lo or t_steps < 2 or lo < 0:
        raise ConfigError("need a non-empty, non-negative time range and at least 2 steps")
    times, mins, args = dynamical_gap_scan(p, t_range, t_steps, grid, band)
    dt = times[1] - times[0]
    dk = p.period / grid

    def gap2(x):
        if x[0] < 0:
            return 1e3 + x[0] ** 2
        D, _ = correlation_on_grid(p, np.array([x[1]]), t=x[0], band=band)
        return float(np.sum(decompose(D[0]).real[1:] ** 2))

    events = []
    for i in _local_minima(mins):
        (t, k0), gap = _refine(gap2, np.array([times[i], args[i]]), (dt / 2, dk))
        if gap > gap_tol or not (lo - 1e-12 <= t <= hi + 1e-12):
            continue
        k0 = float(np.mod(k0, p.period))
        before = _safe_report(lambda: window_windings(p, t=max(t - dt / 2, 0.0), grid=grid, band=band))
        after = _safe_report(lambda: window_windings(p, t=t + dt / 2, grid=grid, band=band))
        events.append(TransitionEvent("dynamical", float(t), k0, gap, before, after))
    return _dedupe(events)
