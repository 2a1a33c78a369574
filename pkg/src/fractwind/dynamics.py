"""Steady states and transient evolution of the correlation matrix.

The correlation matrix obeys ``dD/dt = X D + D X^+ + 2 M_g``.  The steady
state comes from the Lyapunov solve; transients are propagated in closed
form around it.  :func:`integrate_ode` is a plain RK4 kept as an oracle.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateError, StepSizeError
from .model import KWindow, damping_matrix, gain_matrix, initial_correlation
from .pauli import dagger, expm2, solve_lyapunov


def steady_state(X, Mg):
    return solve_lyapunov(X, Mg)


@dataclass(frozen=True)
class EvolutionState:
    """Everything needed to evaluate D(t, k) on a batch of momenta."""

    k: np.ndarray
    t: float
    delta: np.ndarray
    steady: np.ndarray
    deviation: np.ndarray
    damping: np.ndarray

    @classmethod
    def prepare(cls, p, k, band="upper", delta0=None):
        k = np.asarray(k, dtype=float)
        X = damping_matrix(p, k)
        Ds = steady_state(X, gain_matrix(p, k))
        D0 = initial_correlation(p, k, band=band) if delta0 is None else np.asarray(delta0, complex)
        return cls(k=k, t=0.0, delta=D0, steady=Ds, deviation=D0 - Ds, damping=X)


def propagate(state, t):
    """``e^{Xt} (D(0) - D_s) e^{X^+ t} + D_s``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    E = expm2(state.damping * t)
    return E @ state.deviation @ dagger(E) + state.steady


def rebase(state, t):
    """State advanced to time ``t`` and used as a new origin."""
    D = propagate(state, t)
    return EvolutionState(k=state.k, t=state.t + t, delta=D, steady=state.steady,
                          deviation=D - state.steady, damping=state.damping)


def integrate_ode(delta0, X, Mg, t_end, dt):
    """Fixed-step RK4 for ``dD/dt = X D + D X^+ + 2 M_g``.

    The step count is ``ceil(t_end / dt)`` with the step shrunk to land on
    ``t_end``.  Batches over leading axes.
    """
    X = np.asarray(X, dtype=complex)
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    norm = float(np.max(np.linalg.norm(X, ord=2, axis=(-2, -1))))
    if dt > 0.1 / norm:
        raise StepSizeError(f"dt={dt:g} exceeds 0.1/|X| = {0.1 / norm:.3g}")
    Xd = dagger(X)
    src = 2 * np.asarray(Mg, dtype=complex)

    def rhs(D):
        return X @ D + D @ Xd + src

    steps = math.ceil(t_end / dt - 1e-12) if t_end > 0 else 0
    h = t_end / steps if steps else 0.0
    D = np.array(delta0, dtype=complex)
    for _ in range(steps):
        k1 = rhs(D)
        k2 = rhs(D + 0.5 * h * k1)
        k3 = rhs(D + 0.5 * h * k2)
        k4 = rhs(D + h * k3)
        D = D + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return D


def correlation_on_grid(p, k, t=None, band="upper"):
    """D(t, k) on a momentum array; ``t=None`` gives the steady state.

    Returns ``(delta, valid)``; momenta where the initial state is undefined
    (exceptional points of X) come back as NaN with ``valid`` False.
    """
    k = np.asarray(k, dtype=float)
    X = damping_matrix(p, k)
    Ds = steady_state(X, gain_matrix(p, k))
    valid = np.ones(k.shape, dtype=bool)
    if t is None:
        return Ds, valid
    D0 = np.full(Ds.shape, np.nan, dtype=complex)
    for i, ki in enumerate(k):
        try:
            D0[i] = initial_correlation(p, ki, band=band)
        except DegenerateError:
            valid[i] = False
    state = EvolutionState(k=k, t=0.0, delta=D0, steady=Ds, deviation=D0 - Ds, damping=X)
    return propagate(state, t), valid


def trajectory(p, window, t=None, band="upper"):
    """Bloch-vector trajectory over ``window`` at time ``t`` (None = steady)."""
    from .topology import Trajectory  # topology depends on dynamics output only

    if not isinstance(window, KWindow):
        raise TypeError("window must be a KWindow")
    k = window.grid()
    D, valid = correlation_on_grid(p, k, t=t, band=band)
    return Trajectory.from_correlations(k, D, closed=window.closed, window=window,
                                        valid=valid, t=t)
