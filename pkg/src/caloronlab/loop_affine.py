"""Loop algebra L[g], the rotation extension, and the level-k affine algebra.

Loops are sampled on a uniform grid of n_theta points over the unit circle.
All angular derivatives are taken with respect to the 2*pi-scaled angle,

    (d xi)(theta) := (1/2pi) d/d theta xi,

so that d(sin) = cos on loops written in terms of cos(2 pi theta) and
sin(2 pi theta).  The loop pairing is the normalized fiber average

    <<xi, eta>> = mean_theta <xi(theta), eta(theta)>.

The affine algebra t_R + L[g] + t_c carries the bracket

    [(x1,xi1,y1),(x2,xi2,y2)] = (0, [xi1,xi2] + x1 xi2' - x2 xi1',
                                 k <<xi1, xi2'>>)

and the invariant pairing  <<<u,v>>>_k = k <<xi1,xi2>> - x1 y2 - x2 y1.
The central terms of the adjoint action and of the group cocycle are scaled
by the same level k so that Ad differentiates to the bracket.
"""

from dataclasses import dataclass

import numpy as np

from . import lie_core

__all__ = [
    "AffineVector", "LoopGroupElement",
    "dtheta", "band_limit", "is_band_limited", "loop_pair",
    "affine_bracket", "affine_pair", "affine_adjoint",
    "beta_map", "group_cocycle_sigma",
    "random_loop_element", "random_loop_group", "winding_loop",
    "higgs_vector", "constraint_residuals",
]


@dataclass
class AffineVector:
    """Element (x, xi, y) of t_R + L[g] + t_c.

    x : rotation component (units of the fiber period)
    xi : loop part, array of shape (n_theta, n, n)
    y : central component

    CheckVector-style elements of t_R + L[g] are represented with y=0.
    """
    x: float
    xi: np.ndarray
    y: float = 0.0

    def __add__(self, other):
        return AffineVector(self.x + other.x, self.xi + other.xi,
                            self.y + other.y)

    def __sub__(self, other):
        return AffineVector(self.x - other.x, self.xi - other.xi,
                            self.y - other.y)

    def __mul__(self, c):
        return AffineVector(c * self.x, c * self.xi, c * self.y)

    __rmul__ = __mul__

    def norm(self):
        return float(np.sqrt(self.x ** 2 + self.y ** 2
                             + np.max(np.abs(self.xi)) ** 2))


@dataclass
class LoopGroupElement:
    """Loop gamma: T -> SU(n) sampled on the theta grid, with winding label."""
    samples: np.ndarray        # (n_theta, n, n)
    winding: int = 0

    def inverse(self):
        return LoopGroupElement(
            np.conj(np.swapaxes(self.samples, -1, -2)), -self.winding)

    def __matmul__(self, other):
        return LoopGroupElement(self.samples @ other.samples,
                                self.winding + other.winding)


def _check_grid(a, b):
    if a.shape[0] != b.shape[0]:
        raise ValueError("grid mismatch: %d vs %d" % (a.shape[0], b.shape[0]))


def dtheta(xi):
    """Spectral derivative w.r.t. the 2*pi-scaled angle (mode m -> i*m)."""
    nt = xi.shape[0]
    modes = np.fft.fftfreq(nt, d=1.0 / nt)
    hat = np.fft.fft(xi, axis=0)
    hat *= (1j * modes).reshape((nt,) + (1,) * (xi.ndim - 1))
    out = np.fft.ifft(hat, axis=0)
    if np.isrealobj(xi):
        return out.real
    return out


def band_limit(xi, frac=1.0 / 3.0):
    """Zero all Fourier modes above frac of the grid size (dealiasing)."""
    nt = xi.shape[0]
    modes = np.abs(np.fft.fftfreq(nt, d=1.0 / nt))
    keep = (modes <= nt * frac).reshape((nt,) + (1,) * (xi.ndim - 1))
    hat = np.fft.fft(xi, axis=0) * keep
    out = np.fft.ifft(hat, axis=0)
    return out.real if np.isrealobj(xi) else out


def is_band_limited(xi, frac=1.0 / 3.0, tol=1e-12):
    return np.max(np.abs(xi - band_limit(xi, frac))) < tol


def loop_pair(xi1, xi2):
    """<<xi1, xi2>> = fiber-averaged invariant pairing."""
    _check_grid(xi1, xi2)
    return float(np.mean(lie_core.pair(xi1, xi2)))


def affine_bracket(u, v, k=1):
    _check_grid(u.xi, v.xi)
    dxi1 = dtheta(u.xi)
    dxi2 = dtheta(v.xi)
    xi = lie_core.bracket(u.xi, v.xi) + u.x * dxi2 - v.x * dxi1
    y = k * loop_pair(u.xi, dxi2)
    return AffineVector(0.0, xi, y)


def affine_pair(u, v, k=1):
    _check_grid(u.xi, v.xi)
    return k * loop_pair(u.xi, v.xi) - u.x * v.y - v.x * u.y


def _mc_form(gamma):
    """gamma^{-1} gamma' with the angle-normalized derivative."""
    ginv = np.conj(np.swapaxes(gamma.samples, -1, -2))
    return ginv @ dtheta(gamma.samples)


def affine_adjoint(gamma, v, k=1):
    """Adjoint action of a loop gamma on (x, xi, y) at level k.

    Ad_gamma(x,xi,y) = (x, g xi g^{-1} - x (dg) g^{-1},
                        y - k<<g^{-1}dg, xi>> + (k/2) x <<g^{-1}dg, g^{-1}dg>>)

    The closed formula exponentiates the bracket on the identity component;
    for SU(n) every loop lies there.
    """
    g = gamma.samples
    ginv = np.conj(np.swapaxes(g, -1, -2))
    mc = ginv @ dtheta(g)
    xi = g @ v.xi @ ginv - v.x * (dtheta(g) @ ginv)
    y = v.y - k * loop_pair(mc, v.xi) + 0.5 * k * v.x * loop_pair(mc, mc)
    return AffineVector(v.x, xi, y)


def beta_map(u, v):
    """beta((t,X),(s,Y)) = (0, sX - tY); equivariant splitting map."""
    _check_grid(u.xi, v.xi)
    return AffineVector(0.0, v.x * u.xi - u.x * v.xi, 0.0)


def group_cocycle_sigma(gamma, u, k=1):
    """sigma(gamma,(x,xi)) = k << -xi + (x/2) g^{-1}dg, g^{-1}dg >>.

    Equals the central component of affine_adjoint(gamma, (x,xi,0), k).
    """
    mc = _mc_form(gamma)
    return k * loop_pair(-u.xi + 0.5 * u.x * mc, mc)


def higgs_vector(phi, k=1):
    """Orbit element V_Phi = (1, -Phi, (k/2)<<Phi,Phi>>) through d=(1,0,0)."""
    return AffineVector(1.0, -phi, 0.5 * k * loop_pair(phi, phi))


def constraint_residuals(v, k=1):
    """Residuals of the two orbit constraints <<<V,V>>>=0, <<<V,c>>>=-1."""
    c = AffineVector(0.0, np.zeros_like(v.xi), 1.0)
    return abs(affine_pair(v, v, k)), abs(affine_pair(v, c, k) + 1.0)


def random_loop_element(rng, nt, n=2, max_mode=None, scale=1.0):
    """Random band-limited loop in L su(n) with decaying mode amplitudes."""
    if max_mode is None:
        max_mode = max(1, nt // 3 - 1)
    basis = lie_core.su_basis(n)
    xi = np.zeros((nt, n, n), dtype=complex)
    theta = np.arange(nt) / nt
    for a in range(len(basis)):
        f = rng.standard_normal() * np.ones(nt)
        for m in range(1, max_mode + 1):
            amp = scale / (1.0 + m * m)
            f = f + amp * rng.standard_normal() * np.cos(2 * np.pi * m * theta)
            f = f + amp * rng.standard_normal() * np.sin(2 * np.pi * m * theta)
        xi += f[:, None, None] * basis[a]
    return xi * scale


def winding_loop(nt, n=2, w=1, j=0):
    """The loop exp(2 pi theta w H) for the integral coweight H."""
    h = lie_core.cartan_coweight(n, j)
    theta = np.arange(nt) / nt
    samples = lie_core.exp_map(
        (2 * np.pi * w) * theta[:, None, None] * h)
    return LoopGroupElement(samples, winding=w)


def random_loop_group(rng, nt, n=2, scale=0.7, winding=0):
    """exp of a random loop element, optionally times a winding loop."""
    g = LoopGroupElement(lie_core.exp_map(
        random_loop_element(rng, nt, n, scale=scale)), 0)
    if winding:
        g = g @ winding_loop(nt, n, winding)
    return g
