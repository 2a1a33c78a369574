"""Reference implementations that share no code with the library."""
import numpy as np
from scipy.integrate import quad_vec, solve_ivp
from scipy.linalg import expm, solve_continuous_lyapunov

S0 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (S0, SX, SY, SZ)


def pauli_coefficients(M):
    return np.array([0.5 * np.trace(M @ s) for s in PAULIS])


def series_expm(M, terms=40):
    """Scaling and squaring around a truncated Taylor series."""
    M = np.asarray(M, dtype=complex)
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(M, 1), 1e-300)))) + 1)
    A = M / 2 ** s
    out, term = np.eye(2, dtype=complex), np.eye(2, dtype=complex)
    for j in range(1, terms):
        term = term @ A / j
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def steady_lyapunov(X, Mg):
    """``X D + D X^+ = -2 M_g`` via scipy."""
    return solve_continuous_lyapunov(X, -2 * Mg)


def steady_quadrature(X, Mg, t_max=30.0):
    """``2 int_0^inf e^{Xt} M_g e^{X^+ t} dt`` truncated at ``t_max``."""
    Xd = X.conj().T

    def f(t):
        E = expm(X * t)
        return (2 * E @ Mg @ expm(Xd * t)).ravel()

    val, _ = quad_vec(f, 0.0, t_max, epsabs=1e-13, epsrel=1e-12)
    return val.reshape(2, 2)


def ode_solution(D0, X, Mg, t_end):
    """Adaptive high-order integration of ``dD/dt = X D + D X^+ + 2 M_g``."""
    Xd = X.conj().T

    def rhs(_, y):
        D = y.reshape(2, 2)
        return (X @ D + D @ Xd + 2 * Mg).ravel()

    sol = solve_ivp(rhs, (0.0, t_end), np.asarray(D0, complex).ravel(), method="DOP853",
                    rtol=1e-13, atol=1e-14)
    return sol.y[:, -1].reshape(2, 2)


def berry_phase_winding(n):
    """Closed-loop winding from the discrete Berry phase of ``n.sigma`` eigenstates.

    The spin-1/2 state aligned with ``n`` picks up minus half the enclosed
    solid angle, so ``Omega / 2 pi = -phase / pi`` modulo 2.
    """
    states = []
    for v in n:
        H = v[0] * SX + v[1] * SY + v[2] * SZ
        w, u = np.linalg.eigh(H)
        states.append(u[:, np.argmax(w)])
    prod = 1.0 + 0j
    for a, b in zip(states, states[1:] + states[:1]):
        prod *= np.vdot(a, b)
    phase = -np.angle(prod)
    value = -phase / np.pi
    r = value - 2 * np.round(value / 2)
    return r + 2 if r <= -1 + 1e-9 else r


def planar_winding(d):
    theta = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    return (theta[-1] - theta[0] + _wrap(np.arctan2(d[0, 1], d[0, 0]) - theta[-1])) / (2 * np.pi)


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def bloch(D):
    c = pauli_coefficients(D).real
    return c[1:]
