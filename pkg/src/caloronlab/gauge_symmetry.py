"""Gauge actions, extended symmetry algebras, and lift bookkeeping.

Three layers of symmetry act on the discretized data:

* 3d gauge maps g: M_d -> G act on connections A and on the reduced pair
  (kappa, a) through  a -> g^{-1} a g + g^{-1}(d - kappa L_R) g.
* The same maps, read as loop-valued maps on the base, act on the caloron
  data (lambda, Lambda, Phi).
* The extended algebra t_R^Sigma + g^M + t_c^Sigma carries the bracket

      [(x1,xi1),(x2,xi2)] = (0, [xi1,xi2] - L_{x1 R} xi2 + L_{x2 R} xi1)

  with central cocycle gamma(xi1,xi2) = K<xi1, L_R xi2> and the invariant
  t^Sigma-valued pairing <<xi1,xi2>> - x1 y2 - x2 y1.  It is represented on
  extended connection triples (kappa, a, b) by covariant derivatives, with
  moment map F = (dkappa, F_a - kappa L_R a, db + (1/2)<<a, L_R a>>).

Large gauge transformations and lift twists are tracked through an integer
curvature class on the lift; the associated action shifts are the
integer-quantization checks of the BF side.
"""

from dataclasses import dataclass

import numpy as np

from . import lie_core
from . import manifold as mf
from . import caloron as cal

__all__ = [
    "GaugeMap3d", "random_gauge_map", "torus_winding_map", "degree_map",
    "gauge_act_3d", "gauge_act_reduced", "gauge_act_caloron",
    "cocycle_k0", "gprime_bracket",
    "ExtendedAlgebraElement", "extended_bracket", "extended_pair",
    "random_extended_element",
    "CConnection", "rep_on_cconnection", "moment_f",
    "moment_hamiltonian", "symplectic_form",
    "lift_twist", "large_gauge_on_lift", "hfield_adjoint_check",
]


@dataclass
class GaugeMap3d:
    """Group-valued 0-form on M_d with winding labels (x, y, theta)."""
    g: mf.FieldGrid
    winding: tuple = (0, 0, 0)

    @property
    def geom(self):
        return self.g.geom

    def inverse_values(self):
        return np.conj(np.swapaxes(self.g.values[0], -1, -2))


def random_gauge_map(rng, geom, amp=0.25, x_width=1.3, base_modes=(0, 2),
                     theta_modes=1):
    """Contractible smooth gauge map exp(X); narrow x-band keeps pure-gauge
    curvature residuals at the 1e-7 level on 32^3 grids."""
    X = mf.random_form(rng, geom, 0, matrix_valued=True, x_width=x_width,
                       base_modes=base_modes, theta_modes=theta_modes,
                       dressing=0, amp=amp)
    return GaugeMap3d(mf.FieldGrid(0, lie_core.exp_map(X.values), geom))


def torus_winding_map(geom, wx=0, wy=0, wt=0, j=0):
    """Winding gauge map exp(2 pi (wx x + wy y + wt theta) H).

    theta-winding requires the d=0 torus; x- and y-windings are valid on
    every M_d (exp(2 pi H) = 1 closes the twisted gluing).
    """
    if wt != 0 and geom.degree != 0:
        raise ValueError("theta-winding maps are only smooth on d=0")
    h = lie_core.cartan_coweight(geom.group_rank, j)
    x, y, th = geom.axes()
    phase = (wx * x[:, None, None] + wy * y[None, :, None]
             + wt * th[None, None, :])
    g = lie_core.exp_map(2 * np.pi * phase[..., None, None] * h)
    return GaugeMap3d(mf.FieldGrid(0, g[None], geom), (wx, wy, wt))


def degree_map(geom, square=False):
    """Degree +-1 (or +-2) map T^3 -> SU(2) built from trig polynomials.

    The unit quaternion (w1, w2)/|w| with

        w1 = exp(2 pi i theta) - (3 + cos 2pi x + cos 2pi y)/4,
        w2 = sin 2pi x + i sin 2pi y,

    hits the selected zeros of w2 with a net count of one; squaring the map
    doubles the degree.  The winding_number quadrature is the oracle for
    the actual integer.
    """
    if geom.degree != 0:
        raise ValueError("degree maps are constructed on the d=0 torus")
    x, y, th = geom.axes()
    X = x[:, None, None]
    Y = y[None, :, None]
    T = th[None, None, :]
    w1 = np.exp(2j * np.pi * T) \
        - (3.0 + np.cos(2 * np.pi * X) + np.cos(2 * np.pi * Y)) / 4.0
    w2 = np.broadcast_to(np.sin(2 * np.pi * X) + 1j * np.sin(2 * np.pi * Y)
                         + 0.0 * T, w1.shape)
    nrm = np.sqrt(np.abs(w1) ** 2 + np.abs(w2) ** 2)
    g = np.zeros(w1.shape + (2, 2), dtype=complex)
    g[..., 0, 0] = w1 / nrm
    g[..., 0, 1] = -np.conj(w2) / nrm
    g[..., 1, 0] = w2 / nrm
    g[..., 1, 1] = np.conj(w1) / nrm
    if square:
        g = g @ g
    return GaugeMap3d(mf.FieldGrid(0, g[None], geom))


# ---------------------------------------------------------------------------
# gauge actions

def _conjugate(gmap, fld):
    ginv = gmap.inverse_values()
    return mf.FieldGrid(fld.degree_p, ginv[None] @ fld.values @
                        gmap.g.values[0][None], fld.geom)


def _mc(gmap):
    dg = mf.exterior_d(gmap.g)
    ginv = gmap.inverse_values()
    return mf.FieldGrid(1, ginv[None] @ dg.values, gmap.geom)


def gauge_act_3d(gmap, conn):
    """A -> g^{-1} A g + g^{-1} dg."""
    A = _conjugate(gmap, conn.A) + _mc(gmap)
    return cal.Connection3d(A, conn.kappa)


def gauge_act_reduced(gmap, a, kappa):
    """Reduced action a -> g^{-1} a g + g^{-1}(d - kappa L_R) g."""
    theta = _mc(gmap)
    vert = mf.wedge(kappa.form, mf.iota_R(theta))
    out = _conjugate(gmap, a) + theta - vert
    out.values[2] = 0.0
    return out


def gauge_act_caloron(gmap, f):
    """The loop-group gauge action on (lambda, Lambda, Phi).

    Matches cal_forward of the 3d action: Lambda picks up the horizontal
    Maurer-Cartan part, Phi transforms as a fiberwise connection.
    """
    theta = _mc(gmap)
    lam_y = f.lam.values[1]
    Lam = _conjugate(gmap, f.Lambda)
    Lam.values[0] += theta.values[0]
    Lam.values[1] += theta.values[1] - lam_y[..., None, None] * theta.values[2]
    phi = _conjugate(gmap, f.Phi)
    phi.values[0] += theta.values[2]
    return cal.CaloronFields(f.lam, Lam, phi, f.geom)


# ---------------------------------------------------------------------------
# the reduced-space cocycle of the rigid extension

def gprime_bracket(u1, xi1, u2, xi2):
    """Bracket on t_R + g^M: (0, [xi1,xi2] - u1 L_R xi2 + u2 L_R xi1)."""
    val = lie_core.bracket(xi1.values[0], xi2.values[0]) \
        - u1 * mf.lie_R(xi2).values[0] + u2 * mf.lie_R(xi1).values[0]
    return 0.0, mf.FieldGrid(0, val[None], xi1.geom)


def cocycle_k0(xi1, xi2, kappa):
    """k0(xi1, xi2) = <<L_R xi1, xi2>> in the contact pairing
    int_M kappa^dkappa <.,.>; antisymmetric 2-cocycle of the rigid
    extension (d != 0 only)."""
    geom = xi1.geom
    if geom.degree == 0:
        raise ValueError("degenerate contact volume at d=0")
    integrand = lie_core.pair(mf.lie_R(xi1).values[0], xi2.values[0])
    return float(geom.degree * np.mean(integrand))


# ---------------------------------------------------------------------------
# extended algebra on the base

@dataclass
class ExtendedAlgebraElement:
    """(x, xi, y): base functions x, y and a g-valued function xi on M."""
    x: np.ndarray        # (nx, ny) real
    xi: mf.FieldGrid     # degree-0 matrix-valued
    y: np.ndarray        # (nx, ny) real

    def scaled(self, c):
        return ExtendedAlgebraElement(c * self.x, c * self.xi, c * self.y)

    def plus(self, other):
        return ExtendedAlgebraElement(self.x + other.x, self.xi + other.xi,
                                      self.y + other.y)


def random_extended_element(rng, geom, amp=1.0, **kw):
    kw.setdefault("x_width", 0.7)
    kw.setdefault("base_modes", 2)
    kw.setdefault("theta_modes", 2)
    x = mf.random_scalar_field(rng, geom, **kw)[:, :, 0] * amp
    y = mf.random_scalar_field(rng, geom, **kw)[:, :, 0] * amp
    xi = mf.random_form(rng, geom, 0, matrix_valued=True, amp=amp, **kw)
    return ExtendedAlgebraElement(x, xi, y)


def _kavg(arr):
    return np.mean(arr, axis=2)


def extended_bracket(u, v):
    """[(x1,xi1,y1),(x2,xi2,y2)] with the K-averaged central cocycle."""
    xi1, xi2 = u.xi.values[0], v.xi.values[0]
    dxi1 = mf.lie_R(u.xi).values[0]
    dxi2 = mf.lie_R(v.xi).values[0]
    x1 = u.x[:, :, None, None, None]
    x2 = v.x[:, :, None, None, None]
    loop = lie_core.bracket(xi1, xi2) - x1 * dxi2 + x2 * dxi1
    central = _kavg(lie_core.pair(xi1, dxi2))
    geom = u.xi.geom
    return ExtendedAlgebraElement(
        np.zeros_like(u.x), mf.FieldGrid(0, loop[None], geom), central)


def extended_pair(u, v):
    """t^Sigma-valued pairing <<xi1,xi2>> - x1 y2 - x2 y1 (a base function)."""
    return _kavg(lie_core.pair(u.xi.values[0], v.xi.values[0])) \
        - u.x * v.y - v.x * u.y


# ---------------------------------------------------------------------------
# extended connections (kappa, a, b) and their moment map

@dataclass
class CConnection:
    kappa: mf.Kappa
    a: mf.FieldGrid      # horizontal matrix 1-form
    b: mf.FieldGrid      # real 1-form, T_R-basic

    @property
    def geom(self):
        return self.a.geom


def rep_on_cconnection(u, lc):
    """Infinitesimal action d_l(x,xi,y) of the extended algebra on
    (kappa, a, b); returns tangent fields (dkappa, da, db)."""
    geom = lc.geom
    xi = u.xi
    xgrid = mf.zeros_field(geom, 0)
    xgrid.values[0] = u.x[:, :, None]
    ygrid = mf.zeros_field(geom, 0)
    ygrid.values[0] = u.y[:, :, None]

    dkap = mf.exterior_d(xgrid)

    dxi = mf.exterior_d(xi)
    comm = mf.FieldGrid(1, lc.a.values @ xi.values[0][None]
                        - xi.values[0][None] @ lc.a.values, geom)
    vert = mf.wedge(lc.kappa.form, mf.FieldGrid(
        0, mf.lie_R(xi).values, geom))
    da = dxi + comm - vert + mf.FieldGrid(
        1, u.x[None, :, :, None, None, None] * mf.lie_R(lc.a).values, geom)

    coc = mf.zeros_field(geom, 1)
    for i in range(2):
        coc.values[i] = np.broadcast_to(
            _kavg(lie_core.pair(lc.a.values[i], mf.lie_R(xi).values[0]))
            [:, :, None], (geom.nx, geom.ny, geom.nt))
    db = mf.exterior_d(ygrid) + coc
    return dkap, da, db


def moment_f(lc):
    """F = (dkappa, F_a - kappa L_R a, db + (1/2)<<a, L_R a>>)."""
    geom = lc.geom
    dk = mf.exterior_d(lc.kappa.form)
    Fa = mf.exterior_d(lc.a) + mf.mat_wedge(lc.a, lc.a)
    g_part = Fa - mf.wedge(lc.kappa.form, mf.lie_R(lc.a))
    coc = mf.pair_wedge(lc.a, mf.lie_R(lc.a))
    central = mf.exterior_d(lc.b)
    central.values[0] = central.values[0] \
        + 0.5 * np.broadcast_to(_kavg(coc.values[0])[:, :, None],
                                central.values[0].shape)
    central.values[1:] += 0.5 * 0.0
    return dk, g_part, central


def moment_hamiltonian(u, lc):
    """H_u = int_Sigma <<<F_l, u>>>, the Hamiltonian of the action of u."""
    geom = lc.geom
    dk, g_part, central = moment_f(lc)
    pair2 = mf.zeros_field(geom, 2)
    pair2.values[0] = (_kavg(lie_core.pair(g_part.values[0],
                                           u.xi.values[0]))[:, :, None]
                       - dk.values[0] * u.y[:, :, None]
                       - central.values[0] * u.x[:, :, None])
    return mf.fiber_integrate(mf.wedge(lc.kappa.form, pair2))


def symplectic_form(t1, t2, lc):
    """Omega(t1, t2) = int_Sigma [ <<da1 ^ da2>> - dk1 ^ db2 - db1 ^ dk2 ]."""
    geom = lc.geom
    dk1, da1, db1 = t1
    dk2, da2, db2 = t2
    w = mf.zeros_field(geom, 2)
    paired = mf.pair_wedge(da1, da2)
    w.values[0] = (_kavg(paired.values[0])[:, :, None]
                   - (mf.wedge(dk1, db2) + mf.wedge(db1, dk2)).values[0])
    return mf.fiber_integrate(mf.wedge(lc.kappa.form, w))


# ---------------------------------------------------------------------------
# lift twists and large gauge transformations

def lift_twist(lc, beta=None, twist_class=0):
    """New lift with central connection alpha + beta and shifted harmonic
    curvature class; the BF action shifts by exactly the integer class
    plus int_Sigma d(beta) (zero for any global smooth beta)."""
    alpha = lc.alpha if beta is None else lc.alpha + beta
    return cal.LiftedConnection(lc.fields, alpha, lc.twist + twist_class)


def large_gauge_on_lift(gmap, lc, k=1):
    """Action of a 3d gauge map on the lifted connection data.

    The caloron pair transforms by gauge_act_caloron; the central 1-form
    picks up the level-k group-cocycle correction

        alpha -> alpha + k << Z, Lambda + (1/2) lambda Z >>,   Z = (dg) g^{-1}.

    The remaining line-bundle class of the transformation is integer-valued
    and shows up as a mod-Z shift of the BF action.
    """
    f = gauge_act_caloron(gmap, lc.fields)
    geom = lc.fields.geom
    g = gmap.g.values[0]
    ginv = gmap.inverse_values()
    Z = mf.lie_R(gmap.g).values[0] @ ginv
    lam_y = lc.fields.lam.values[1]
    corr = mf.zeros_field(geom, 1)
    for i in range(2):
        lam_i = lam_y if i == 1 else np.zeros_like(lam_y)
        integrand = lie_core.pair(
            Z, lc.fields.Lambda.values[i] + 0.5 * lam_i[..., None, None] * Z)
        corr.values[i] = np.broadcast_to(
            _kavg(integrand)[:, :, None], corr.values[i].shape)
    alpha = lc.alpha + k * corr
    return cal.LiftedConnection(f, alpha, lc.twist)


def hfield_adjoint_check(rng, geom, kappa, amp=0.6):
    """Infinitesimal adjoint transformation of the h-field v = (1, -phi):

    the 3d gauge/rotation action on phi = iota_R A linearizes to
    delta phi = L_R xi + [phi, xi] + x L_R phi, which is minus the g-part of
    ad_{(x,xi)} v_phi.  Returns the sup residual of that match.
    """
    u = random_extended_element(rng, geom, amp=amp)
    phi = mf.random_form(rng, geom, 0, matrix_valued=True, x_width=0.8,
                         base_modes=(1, 2), theta_modes=2, dressing=0)
    # linearized action on phi
    dphi = (mf.lie_R(u.xi).values[0]
            + lie_core.bracket(phi.values[0], u.xi.values[0])
            + u.x[:, :, None, None, None] * mf.lie_R(phi).values[0])
    # ad_{(x,xi)} (1, -phi) loop part: [xi, -phi] - x dt(-phi) + 1 dt(xi)
    ad_loop = (lie_core.bracket(u.xi.values[0], -phi.values[0])
               - u.x[:, :, None, None, None] * mf.lie_R(
                   mf.FieldGrid(0, -phi.values, geom)).values[0]
               + mf.lie_R(u.xi).values[0])
    return float(np.max(np.abs(dphi - (-1.0) * (-ad_loop))))
