"""The caloron correspondence between 3d connection data and 2d loop data.

A G-connection A on the circle bundle M_d, together with the bundle form
kappa, is traded for a triple on the base:

    lambda = horizontal part of kappa (local T-connection form),
    Lambda = P_kappa A   (loop-valued 1-form on the base, no dtheta slot),
    Phi    = iota_R A    (loop-valued scalar: the fiberwise holonomy data),

with the Higgs-type element V = (1, -Phi) and the inverse assembly
A = Lambda + kappa * Phi.  Both directions are pointwise reshuffles of the
same (x, y, theta) storage, so the bijection is exact to roundoff and all
discretization error sits in derivative-based checks.

On the base, loop-valued forms carry the semidirect bracket in which the
rotation component acts by -L_R (the sign is fixed by matching the 3d
curvature decomposition below).  The curvature of L = (lambda, Lambda),
the covariant derivative of V, and the curvature of the reassembled looped
connection are then related by

    F_A|_(dx^dy)   =  FF + Phi dlambda - lambda ^ DPhi   (= beta-assembled),
    F_A(., R)      =  DPhi,
    FF := d_base Lambda + Lambda^Lambda - lambda ^ dt(Lambda),
    DPhi := d_base Phi + [Lambda, Phi] - lambda dt(Phi) - dt(Lambda),

where dt is the plain theta-derivative of the loop coordinate.  These are
the identities the residual checks below exercise, with the two sides
assembled through independent code paths.
"""

from dataclasses import dataclass

import numpy as np

from . import manifold as mf

__all__ = [
    "Connection3d", "CaloronFields", "LiftedConnection",
    "cal_forward", "cal_inverse", "curvature_3d",
    "base_curvature_FF", "nabla_phi", "bf_combination", "loop_curvature",
    "looped_curvature_identity", "random_connection",
]


@dataclass
class Connection3d:
    """The 3d pair (kappa, A) with A a g-valued 1-form on M_d."""
    A: mf.FieldGrid
    kappa: mf.Kappa


@dataclass
class CaloronFields:
    """Base-side data (lambda, Lambda, Phi) stored on the (x,y,theta) grid."""
    lam: mf.FieldGrid      # real 1-form, vanishing dtheta component
    Lambda: mf.FieldGrid   # loop-valued 1-form, vanishing dtheta component
    Phi: mf.FieldGrid      # loop-valued 0-form
    geom: mf.GeometrySpec

    def check_invariants(self, tol=1e-12):
        assert np.max(np.abs(self.Lambda.values[2])) < tol, \
            "Lambda must be horizontal"
        assert np.max(np.abs(self.lam.values[2])) < tol


@dataclass
class LiftedConnection:
    """Caloron fields plus the central connection 1-form of a chosen lift.

    alpha is a theta-independent real 1-form on the base; `twist` records
    the harmonic curvature class of the lift line bundle, contributing
    twist * dx^dy to d(alpha) on top of the exact part.
    """
    fields: CaloronFields
    alpha: mf.FieldGrid
    twist: int = 0

    def dalpha(self):
        out = mf.exterior_d(self.alpha)
        out.values[0] += float(self.twist)
        return out


def cal_forward(conn):
    """(kappa, A) -> (lambda, Lambda, Phi); pointwise component reshuffle."""
    kap = conn.kappa
    lam = kap.lam.copy()
    Lambda = mf.project_horizontal(conn.A, kap)
    Lambda.values[2] = 0.0   # exact horizontality of the storage
    Phi = mf.iota_R(conn.A)
    return CaloronFields(lam, Lambda, Phi, conn.A.geom)


def cal_inverse(f):
    """(lambda, Lambda, Phi) -> (kappa, A) with A = Lambda + kappa * Phi."""
    kap = mf.make_kappa(f.geom)
    A = f.Lambda + mf.wedge(kap.form, f.Phi)
    return Connection3d(A, kap)


def curvature_3d(conn):
    """Full 3d curvature F_A = dA + A ^ A."""
    return mf.exterior_d(conn.A) + mf.mat_wedge(conn.A, conn.A)


def _lam_y(f):
    return f.lam.values[1]


def base_curvature_FF(f):
    """Loop part of F_L: d_base Lambda + Lambda^Lambda - lambda ^ dt Lambda.

    Returned as the dx^dy coefficient (matrix-valued grid array).
    """
    dl = mf.exterior_d(f.Lambda)
    sq = mf.mat_wedge(f.Lambda, f.Lambda)
    dtheta_Lx = mf.lie_R(f.Lambda).values[0]
    # (lambda ^ dt Lambda)_xy = -lam_y * dt(Lambda_x)
    lam_y = _lam_y(f)[..., None, None]
    return dl.values[0] + sq.values[0] + lam_y * dtheta_Lx


def nabla_phi(f):
    """Covariant derivative of the Higgs datum as a base 1-form.

    DPhi = d_base Phi + [Lambda, Phi] - lambda dt Phi - dt Lambda.
    """
    dphi = mf.exterior_d(f.Phi)
    dtphi = dphi.values[2]
    dtL = mf.lie_R(f.Lambda)
    out = mf.zeros_field(f.geom, 1, matrix_valued=True)
    phi = f.Phi.values[0]
    for i, comp in enumerate((0, 1)):
        out.values[comp] = (dphi.values[comp]
                            + f.Lambda.values[comp] @ phi
                            - phi @ f.Lambda.values[comp]
                            - dtL.values[comp])
    out.values[1] -= _lam_y(f)[..., None, None] * dtphi
    return out


def bf_combination(f):
    """beta(F_L, V) loop part: FF + dlambda * Phi (the BF equation LHS)."""
    geom = f.geom
    return base_curvature_FF(f) + float(geom.degree) * f.Phi.values[0]


def loop_curvature(f):
    """Curvature of the reassembled looped connection, from base data only:

    beta(F_L, V) - beta(L, d_L V) = FF + dlambda Phi - lambda ^ DPhi.
    """
    dphi = nabla_phi(f)
    lam_y = _lam_y(f)[..., None, None]
    # (lambda ^ DPhi)_xy = -lam_y * DPhi_x
    return bf_combination(f) + lam_y * dphi.values[0]


def looped_curvature_identity(f, rel=True):
    """Residual of F_A = beta(F_L,V) - beta(L, d_L V), both sides independent.

    The left side reassembles A and differentiates on M_d; the right side
    never forms A.  Matches the dx^dy slot against the beta assembly and the
    fiber slots against DPhi.  Returns (residual, scale).
    """
    FA = curvature_3d(cal_inverse(f))
    rhs_xy = loop_curvature(f)
    dphi = nabla_phi(f)
    res = max(
        float(np.max(np.abs(FA.values[0] - rhs_xy))),
        float(np.max(np.abs(FA.values[1] - dphi.values[0]))),
        float(np.max(np.abs(FA.values[2] - dphi.values[1]))),
    )
    scale = max(mf.sup_norm(FA), 1e-30)
    return (res / scale, scale) if rel else (res, scale)


_FIELD_GRADES = {
    # x-band controls 6th-order FD truncation at d != 0; see manifold docs
    "identity": dict(x_width=0.75, base_modes=(1, 3), theta_modes=2,
                     dressing=0),
    "msv": dict(x_width=1.0, base_modes=(0, 3), theta_modes=2, dressing=0),
    "rough": dict(x_width=0.5, base_modes=(2, 3), theta_modes=2, dressing=1),
}


def random_connection(rng, geom, grade="identity", amp=1.0):
    """Random smooth test connection on M_d.

    grade picks the x-spectral profile: "identity" and "msv" keep 6th-order
    FD truncation below the 1e-6 identity tolerances at nx=32 (the latter
    with no hard x-band at all); "rough" has enough broadband x-content to
    exhibit the FD convergence order between nx=16 and 48.
    """
    kw = dict(_FIELD_GRADES[grade], amp=amp)
    kap = mf.make_kappa(geom)
    A = mf.random_form(rng, geom, 1, matrix_valued=True, kappa=kap, **kw)
    return Connection3d(A, kap)
