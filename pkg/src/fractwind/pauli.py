"""Exact 2x2 matrix machinery in the Pauli basis.

Matrices are plain complex ndarrays of shape ``(..., 2, 2)``; every routine
broadcasts over the leading axes so a whole momentum grid is handled in one
call.  Pauli coefficients use the convention ``c_a = Tr(M sigma_a) / 2`` so
that ``M = sum_a c_a sigma_a``.
"""
import numpy as np

from .errors import DegenerateError, SingularSystemError, UnstableError

SIGMA0 = np.eye(2, dtype=complex)
SIGMAX = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMAY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMAZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA0, SIGMAX, SIGMAY, SIGMAZ])

STAB_TOL = 1e-9
_SERIES_RADIUS = 1e-6


def decompose(M):
    """Pauli coefficients ``(c0, c1, c2, c3)`` of ``M``, shape ``(..., 4)``."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * np.einsum("...ij,aji->...a", M, PAULI)


def reconstruct(c):
    """Inverse of :func:`decompose`."""
    c = np.asarray(c, dtype=complex)
    return np.einsum("...a,aij->...ij", c, PAULI)


def dagger(M):
    return np.conj(np.swapaxes(M, -1, -2))


def expm2(M):
    """Matrix exponential from the closed form

        exp(c0 + c.sigma) = e^c0 (cosh r + sinh(r)/r c.sigma),  r^2 = c.c

    Both ``cosh`` and ``sinh(r)/r`` are even in ``r`` so the square-root
    branch does not matter; small ``|r|`` switches to the Taylor series.
    """
    c = decompose(M)
    c0, vec = c[..., 0], c[..., 1:]
    r = np.sqrt(np.sum(vec * vec, axis=-1))
    small = np.abs(r) < _SERIES_RADIUS
    r_safe = np.where(small, 1.0, r)
    r2 = r * r
    sinhc = np.where(small, 1 + r2 / 6 + r2 * r2 / 120, np.sinh(r_safe) / r_safe)
    cosh = np.where(small, 1 + r2 / 2 + r2 * r2 / 24, np.cosh(r_safe))
    scale = np.exp(c0)
    out = np.empty(c.shape, dtype=complex)
    out[..., 0] = scale * cosh
    out[..., 1:] = (scale * sinhc)[..., None] * vec
    return reconstruct(out)


def _phase_fix(v):
    v = v / np.linalg.norm(v)
    lead = v[0] if abs(v[0]) > 1e-14 else v[1]
    return v * (abs(lead) / lead)


def eig2(M, tol=1e-10):
    """Eigenpairs of a single 2x2 matrix.

    Pairs are ordered by ascending real part (ties within ``tol`` broken by
    ascending imaginary part).  Each eigenvector is unit-normalized with its
    first nonzero component real and positive.

    Raises
    ------
    DegenerateError
        If the eigenvalues coincide and ``M`` is not a multiple of the
        identity (no eigenbasis exists).
    """
    M = np.asarray(M, dtype=complex)
    c = decompose(M)
    r = np.sqrt(np.sum(c[1:] ** 2))
    scale = max(1.0, float(np.max(np.abs(M))))
    lams = [c[0] - r, c[0] + r]
    if abs(r) <= tol * scale:
        if np.linalg.norm(c[1:]) > tol * scale:
            raise DegenerateError(f"non-diagonalizable matrix, eigenvalue {c[0]:.6g}")
        return [(c[0], np.array([1, 0], dtype=complex)), (c[0], np.array([0, 1], dtype=complex))]

    a, b = M[0]
    cc, d = M[1]
    pairs = []
    for lam in lams:
        # two candidate null vectors of M - lam; keep the larger one
        v1 = np.array([b, lam - a])
        v2 = np.array([lam - d, cc])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        pairs.append((lam, _phase_fix(v)))

    def key(pair):
        lam = pair[0]
        return (round(lam.real / (tol * scale)), lam.imag)

    return sorted(pairs, key=key)


def _check_stable(X):
    c = decompose(X)
    r = np.sqrt(np.sum(c[..., 1:] ** 2, axis=-1))
    re_max = np.maximum((c[..., 0] + r).real, (c[..., 0] - r).real)
    if np.any(re_max >= -STAB_TOL):
        raise UnstableError(f"damping matrix not stable: max Re(eig) = {np.max(re_max):.3g}")


def solve_lyapunov(X, C):
    """Hermitian ``D`` with ``X D + D X^dagger + 2 C = 0``.

    Solved as the 4x4 linear system of the column-stacked unknown; batches
    over leading axes.
    """
    X = np.asarray(X, dtype=complex)
    C = np.asarray(C, dtype=complex)
    X, C = np.broadcast_arrays(X, C)
    _check_stable(X)
    eye = np.eye(2)
    # vec(X D) = (I kron X) vec D,  vec(D X^+) = (conj(X) kron I) vec D
    A = np.einsum("ij,...kl->...ikjl", eye, X).reshape(X.shape[:-2] + (4, 4))
    A = A + np.einsum("...ij,kl->...ikjl", np.conj(X), eye).reshape(X.shape[:-2] + (4, 4))
    if np.any(np.linalg.cond(A) > 1e13):
        raise SingularSystemError("Lyapunov operator is numerically singular")
    rhs = -2 * np.swapaxes(C, -1, -2).reshape(C.shape[:-2] + (4, 1))
    D = np.linalg.solve(A, rhs)[..., 0].reshape(C.shape[:-2] + (2, 2))
    D = np.swapaxes(D, -1, -2)
    return 0.5 * (D + dagger(D))
