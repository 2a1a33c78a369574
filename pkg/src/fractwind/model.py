"""Per-momentum matrices of the dissipative SSH chain.

All builders accept scalar or array momenta and return ``(..., 2, 2)``
complex arrays.  The standard model has the usual SSH Bloch Hamiltonian
with gain/loss matrices that are ``2 pi n``-periodic in k; the long-range
variant trades the fractional momentum in the gain for a ``3k`` hopping.
"""
from dataclasses import asdict, dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateError
from .pauli import SIGMA0, SIGMAX, SIGMAY, decompose, eig2, reconstruct

VARIANTS = ("standard", "longrange")
CONVENTIONS = ("explicit", "composed")
BANDS = ("upper", "lower")


@dataclass(frozen=True)
class ModelParams:
    t1: float = 1.0
    t2: float = 2.0
    t3: float = 2.0
    gamma1: float = 0.5
    gamma2: float = 0.5
    gamma: float = 0.5
    gamma0: float = 0.0
    n: int = 3
    variant: str = "standard"
    damping: str = "explicit"
    # constant sigma_y term added to X; breaks inversion symmetry on purpose
    sy_perturbation: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.damping not in CONVENTIONS:
            raise ConfigError(f"unknown damping convention {self.damping!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"branch count n must be a positive integer, got {self.n}")
        if self.gamma1 < 0 or self.gamma2 < 0 or self.gamma0 < 0:
            raise ConfigError("dissipation rates must be non-negative")
        if self.gamma1 + self.gamma2 <= 0:
            raise ConfigError("Liouvillian gap gamma1 + gamma2 must be positive")
        vals = [self.t1, self.t2, self.t3, self.gamma, self.sy_perturbation]
        if not np.all(np.isfinite(vals)):
            raise ConfigError("parameters must be finite")

    @property
    def Gamma(self):
        return self.gamma1 + self.gamma2

    @property
    def period(self):
        """Momentum period of the full model (all matrices single-valued)."""
        return 2 * np.pi * self.n if self.variant == "standard" else 2 * np.pi

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class KWindow:
    """Uniform momentum grid on ``[k_lo, k_hi)``.

    A closed window identifies ``k_hi`` with ``k_lo`` and holds ``count``
    points; an open window also carries the endpoint ``k_hi``.
    """

    k_lo: float
    k_hi: float
    count: int
    closed: bool = True

    def __post_init__(self):
        if not self.k_hi > self.k_lo:
            raise ConfigError("window needs k_hi > k_lo")
        if self.count < 2:
            raise ConfigError("window needs at least 2 points")

    @property
    def step(self):
        return (self.k_hi - self.k_lo) / self.count

    def grid(self):
        m = self.count if self.closed else self.count + 1
        return self.k_lo + self.step * np.arange(m)


def _pauli(c0, c1, c2, c3=0.0):
    c0, c1, c2, c3 = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (c0, c1, c2, c3)))
    return reconstruct(np.stack([c0, c1, c2, c3], axis=-1))


def bloch_hamiltonian(p, k):
    k = np.asarray(k, dtype=float)
    if p.variant == "longrange":
        return _pauli(0.0, p.t1 + p.t3 * np.cos(3 * k), p.t3 * np.sin(3 * k))
    return _pauli(0.0, p.t1 + p.t2 * np.cos(k), p.t2 * np.sin(k))


def _gain_vector(p, k):
    k = np.asarray(k, dtype=float)
    if p.variant == "longrange":
        return 1.0, np.cos(k), np.sin(k)
    return p.Gamma, p.gamma + np.cos(k / p.n), np.sin(k / p.n)


def gain_matrix(p, k):
    c0, c1, c2 = _gain_vector(p, k)
    return _pauli(c0, c1, c2)


def loss_matrix(p, k):
    c0, c1, c2 = _gain_vector(p, k)
    return _pauli(c0, -c1, -c2)


def k_transpose(builder, p, k):
    """Momentum-space transpose ``M^T(k) = [M(-k)]^T``."""
    return np.swapaxes(builder(p, -np.asarray(k, dtype=float)), -1, -2)


def damping_matrix(p, k, convention=None):
    """Damping matrix X(k).

    ``explicit``: ``i h(k) - Gamma``, the closed form used for every preset
    scenario.  ``composed``: ``i h^T - M_l^T - M_g`` built from the gain and
    loss matrices; for the standard model its identity part is ``-2 Gamma``.
    """
    convention = convention or p.damping
    if convention == "explicit":
        X = 1j * bloch_hamiltonian(p, k) - p.Gamma * SIGMA0
    elif convention == "composed":
        X = (1j * k_transpose(bloch_hamiltonian, p, k)
             - k_transpose(loss_matrix, p, k) - gain_matrix(p, k))
    else:
        raise ConfigError(f"unknown damping convention {convention!r}")
    if p.sy_perturbation:
        X = X + p.sy_perturbation * SIGMAY
    return X


class Jump(NamedTuple):
    name: str
    kind: str  # "gain" or "loss"
    coeffs: np.ndarray  # (D_A, D_B)


def jump_operators(p, k):
    """Momentum-space jump operators of the standard model.

    Gain operators are ``sum_i D_i c_i^dagger`` and loss operators
    ``sum_i D_i c_i``.  Terms proportional to ``sqrt(gamma0)`` are dropped
    when ``gamma0 == 0``.
    """
    phase = np.exp(-1j * k / p.n)
    s1, s2, s0 = np.sqrt(p.gamma1), np.sqrt(p.gamma2), np.sqrt(p.gamma0)
    jumps = [
        Jump("Lg1", "gain", np.array([s1, s1], dtype=complex)),
        Jump("Lg2", "gain", np.array([s2 * phase, s2], dtype=complex)),
        Jump("Lg3", "gain", np.array([s0, 0], dtype=complex)),
        Jump("Lg4", "gain", np.array([0, s0], dtype=complex)),
        Jump("Ll1", "loss", np.array([s1, -s1], dtype=complex)),
        Jump("Ll2", "loss", np.array([s2 * phase, -s2], dtype=complex)),
        Jump("Ll3", "loss", np.array([s0, 1j * s0], dtype=complex)),
    ]
    return [j for j in jumps if np.any(j.coeffs != 0)]


def m_from_jumps(jumps):
    """Gram matrices ``(M)_ij = sum_mu conj(D_mu,i) D_mu,j`` for gain and loss."""
    out = {"gain": np.zeros((2, 2), dtype=complex), "loss": np.zeros((2, 2), dtype=complex)}
    for j in jumps:
        out[j.kind] += np.outer(np.conj(j.coeffs), j.coeffs)
    return out["gain"], out["loss"]


def initial_correlation(p, k, band="upper"):
    """Rank-one projector onto an eigenvector of X(k).

    ``band="upper"`` takes the eigenvalue with the larger imaginary part
    (upper band of the Hermitian generator), ``"lower"`` the smaller one.
    Accepts a scalar or a 1-d array of momenta.

    Raises
    ------
    DegenerateError
        At band-touching momenta where X has no eigenbasis.
    """
    if band not in BANDS:
        raise ConfigError(f"unknown band {band!r}")
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    X = damping_matrix(p, k_arr)
    out = np.empty((len(k_arr), 2, 2), dtype=complex)
    for i in range(len(k_arr)):
        pairs = eig2(X[i])
        pairs = sorted(pairs, key=lambda pr: pr[0].imag)
        if abs(pairs[1][0] - pairs[0][0]) < 1e-10:
            raise DegenerateError(f"bands touch at k={k_arr[i]:.6g}; no unique eigenstate")
        u = pairs[1][1] if band == "upper" else pairs[0][1]
        out[i] = np.outer(u, np.conj(u))
    return out[0] if np.ndim(k) == 0 else out


def traceless_vector(M):
    """Real parts of ``(c1, c2, c3)`` for Hermitian input."""
    return decompose(M)[..., 1:].real


def is_psd(M, tol=1e-12):
    w = np.linalg.eigvalsh(0.5 * (M + np.conj(np.swapaxes(M, -1, -2))))
    return bool(np.all(w >= -tol))


def scenario_params(name, **overrides):
    """Named parameter presets (fig2, fig3, fig4, longrange, custom)."""
    base = dict(t1=1.0, t2=2.0, gamma1=0.5, gamma2=0.5)
    presets = {
        "fig2": dict(gamma=0.5),
        "fig3": dict(gamma=1.2),
        "fig4": dict(gamma=0.35),
        "longrange": dict(variant="longrange", t3=2.0, gamma=0.0),
        "custom": {},
    }
    if name not in presets:
        raise ConfigError(f"unknown scenario {name!r}")
    base.update(presets[name])
    base.update({key: v for key, v in overrides.items() if v is not None})
    return ModelParams(**base)


__all__ = [
    "ModelParams", "KWindow", "Jump", "bloch_hamiltonian", "gain_matrix", "loss_matrix",
    "damping_matrix", "jump_operators", "m_from_jumps", "initial_correlation",
    "k_transpose", "traceless_vector", "is_psd", "scenario_params", "SIGMAX",
]
