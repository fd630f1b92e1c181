"""Finite-dimensional matrix Lie algebra layer: su(n) and SU(n).

Elements of su(n) are traceless anti-hermitian complex matrices, stored as
plain numpy arrays so that all operations vectorize over leading grid axes.
The invariant pairing is normalized as

    <X, Y> = -2 Re Tr(X Y)

which makes the standard basis t_a = -(i/2) * sigma_a orthonormal for su(2).
Every quantity downstream (loop pairings, contact pairings, action values)
inherits this normalization.
"""

import numpy as np

__all__ = [
    "su_basis", "cartan_coweight", "bracket", "pair", "exp_map", "adjoint",
    "random_algebra_element", "random_group_element",
    "check_algebra_element", "check_group_element",
]


def su_basis(n=2):
    """Orthonormal basis of su(n) w.r.t. <X,Y> = -2 Re Tr(XY).

    Returns an array of shape (n*n-1, n, n).  For n=2 these are
    t_a = -(i/2) sigma_a.  For general n the generalized Gell-Mann
    matrices scaled by -(i/2).
    """
    mats = []
    # off-diagonal symmetric and antisymmetric pairs
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            mats.append(s)
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            mats.append(a)
    # diagonal generators
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[np.arange(l), np.arange(l)] = 1.0
        d[l, l] = -l
        d *= np.sqrt(2.0 / (l * (l + 1)))
        mats.append(d)
    lam = np.array(mats)
    return -0.5j * lam


def cartan_coweight(n=2, j=0):
    """Integral coweight direction H with exp(2*pi*H) = identity.

    For su(2), cartan_coweight() = 2*t_3 = -i*sigma_3.
    """
    h = np.zeros((n, n), dtype=complex)
    h[j, j] = -1j
    h[j + 1, j + 1] = 1j
    return h


def _same_rank(x, y):
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(
            "rank mismatch: %d vs %d" % (x.shape[-1], y.shape[-1]))


def bracket(x, y):
    """Matrix commutator [X, Y] = XY - YX, broadcasting over grid axes."""
    _same_rank(x, y)
    return x @ y - y @ x


def pair(x, y):
    """Invariant pairing <X,Y> = -2 Re Tr(XY); broadcasts over grid axes."""
    _same_rank(x, y)
    return -2.0 * np.real(np.einsum("...ij,...ji->...", x, y))


def exp_map(x):
    """Matrix exponential of anti-hermitian X via unitary diagonalization.

    exp(X) = U exp(-i diag(l)) U* where X = -iH, H = U diag(l) U*.
    Exactly unitary up to eigh roundoff; vectorized over leading axes.
    """
    h = 1j * x
    lam, u = np.linalg.eigh(h)
    phase = np.exp(-1j * lam)
    return np.einsum("...ij,...j,...kj->...ik", u, phase, np.conj(u))


def adjoint(g, x):
    """Adjoint action g X g^{-1} for unitary g."""
    _same_rank(g, x)
    return g @ x @ np.conj(np.swapaxes(g, -1, -2))


def random_algebra_element(rng, n=2, scale=1.0):
    """Random su(n) element with normal coefficients in the su_basis."""
    basis = su_basis(n)
    coeff = rng.standard_normal(n * n - 1) * scale
    return np.tensordot(coeff, basis, axes=(0, 0))


def random_group_element(rng, n=2, scale=1.0):
    return exp_map(random_algebra_element(rng, n, scale))


def check_algebra_element(x, tol=1e-13):
    """Invariants of an su(n) element: anti-hermitian and traceless."""
    herm = np.max(np.abs(x + np.conj(np.swapaxes(x, -1, -2))))
    tr = np.max(np.abs(np.trace(x, axis1=-2, axis2=-1)))
    return herm < tol and tr < tol


def check_group_element(u, tol=1e-12):
    """Invariants of an SU(n) element: unitary with unit determinant."""
    n = u.shape[-1]
    eye = np.eye(n)
    uni = np.max(np.abs(u @ np.conj(np.swapaxes(u, -1, -2)) - eye))
    det = np.max(np.abs(np.linalg.det(u) - 1.0))
    return uni < tol and det < tol
