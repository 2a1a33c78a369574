"""Inversion-symmetry audits and matrix-function direction checks."""
from dataclasses import dataclass

import numpy as np

from .errors import SpectrumError
from .model import KWindow
from .pauli import SIGMAX, dagger, reconstruct
from .topology import GAP_TOL, Trajectory, bloch_vector

SPECTRUM_EPS = 1e-12


@dataclass(frozen=True)
class SymmetryReport:
    operator_name: str
    max_defect: float
    worst_k: float
    samples: int

    def as_dict(self):
        return {"operator": self.operator_name, "max_defect": self.max_defect,
                "worst_k": self.worst_k, "samples": self.samples}


def inversion_defect(sampler, window, name="O"):
    """Largest Frobenius norm of ``sx O(k) sx - O(-k)`` over the window grid.

    ``sampler`` maps a momentum array to a ``(N, 2, 2)`` array.
    """
    k = window.grid() if isinstance(window, KWindow) else np.asarray(window, dtype=float)
    lhs = SIGMAX @ sampler(k) @ SIGMAX
    defect = np.linalg.norm(lhs - sampler(-k), axis=(-2, -1))
    i = int(np.argmax(defect))
    return SymmetryReport(name, float(defect[i]), float(k[i]), len(k))


def _eigh(delta):
    delta = np.asarray(delta, dtype=complex)
    return np.linalg.eigh(0.5 * (delta + dagger(delta)))


def _spectral(w, v, values):
    return (v * values[..., None, :]) @ dagger(v)


def modular_hamiltonian(delta, eps=SPECTRUM_EPS):
    """K with ``K^T = ln(D^{-1} - 1)``; needs the spectrum inside (0, 1)."""
    w, v = _eigh(delta)
    bad = (w <= eps) | (w >= 1 - eps)
    if np.any(bad):
        first = w.reshape(-1, 2)[np.flatnonzero(bad.reshape(-1, 2).any(axis=1))[0]]
        raise SpectrumError(f"{int(bad.any(axis=-1).sum())} matrices with spectrum outside (0, 1), "
                            f"e.g. {first.tolist()}")
    kt = _spectral(w, v, np.log(1 / w - 1))
    return np.swapaxes(kt, -1, -2)


def correlation_from_modular(K):
    """Inverse map ``D = (exp(K^T) + 1)^{-1}``."""
    w, v = _eigh(np.swapaxes(K, -1, -2))
    return _spectral(w, v, 1 / (np.exp(w) + 1))


MATRIX_FUNCTIONS = {
    "modular": None,
    "square": np.square,
    "cube": lambda w: w ** 3,
    "exponential": np.exp,
}


def apply_matrix_function(delta, name):
    if name not in MATRIX_FUNCTIONS:
        raise ValueError(f"unknown matrix function {name!r}; choose from {sorted(MATRIX_FUNCTIONS)}")
    if name == "modular":
        # the matrix function itself is K^T; K carries a transposed sigma_y
        return np.swapaxes(modular_hamiltonian(delta), -1, -2)
    w, v = _eigh(delta)
    return _spectral(w, v, MATRIX_FUNCTIONS[name](w))


def matrix_function_alignment(delta, name, signed=False, gap_tol=GAP_TOL):
    """Cosine between the Bloch directions of ``f(D)`` and ``D``.

    Returns the absolute value unless ``signed``; a decreasing odd part of
    ``f`` (the modular map) flips the direction.
    """
    n = bloch_vector(delta, gap_tol=gap_tol).nvec
    nf = bloch_vector(apply_matrix_function(delta, name), gap_tol=gap_tol * 1e-3).nvec
    cos = np.sum(n * nf, axis=-1)
    return cos if signed else np.abs(cos)


def density_matrix(delta):
    """Trace-normalized state ``D / Tr D``; same Bloch direction as ``D``."""
    tr = np.trace(delta, axis1=-2, axis2=-1).real
    return delta / tr[..., None, None]


def ball_states(traj, margin=1e-2):
    """``(1 + d.sigma / R) / 2`` with one global ``R`` slightly above max ``|d|``.

    Every sample keeps its Bloch direction and lands strictly inside the
    Bloch ball, so its modular Hamiltonian exists even when the raw
    correlation matrix has eigenvalues outside (0, 1).
    """
    R = (1 + margin) * float(np.max(traj.purity))
    c = np.concatenate([np.full((len(traj), 1), 0.5), 0.5 * traj.dvec / R], axis=1)
    return reconstruct(c)


def modular_trajectory(traj, margin=1e-2):
    """Trajectory of modular Hamiltonians of :func:`ball_states`."""
    K = modular_hamiltonian(ball_states(traj, margin))
    return Trajectory.from_correlations(traj.k, K, closed=traj.closed, window=traj.window,
                                        valid=traj.valid, t=traj.t)


def random_states(rng, count, max_purity=0.49, min_purity=1e-3):
    """Hermitian correlation matrices ``1/2 + d.sigma`` with ``|d|`` in range."""
    direction = rng.normal(size=(count, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = rng.uniform(min_purity, max_purity, size=count)
    c = np.concatenate([np.full((count, 1), 0.5), direction * r[:, None]], axis=1)
    return reconstruct(c)
