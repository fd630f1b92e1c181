"""Discretized degree-d circle bundle over the 2-torus, with exterior calculus.

The total space is realized globally as the quotient of R^2 x S^1 by

    (x+1, y, theta) ~ (x, y, theta + d*y),
    (x, y+1, theta) ~ (x, y, theta),
    (x, y, theta+1) ~ (x, y, theta),

a Heisenberg nilmanifold for d != 0 and the 3-torus for d = 0.  The fiber
generator is R = d/d theta and the bundle connection is the global 1-form

    kappa = d theta + d * x * dy,        d kappa = d * dx ^ dy.

Fields are sampled on a uniform (nx, ny, nt) grid over the fundamental
domain.  They are plain-periodic in y and theta (spectral derivatives), while
the x-direction uses 6th-order centered finite differences with ghost layers
filled through the twisted identification above.  Crossing the x-seam shifts
theta by d*y (an exact grid roll because ny | nt) and mixes form components
through the frame transition d theta -> d theta + d * dy.

Component order is normative for storage: 1-forms (dx, dy, dtheta), 2-forms
(dx^dy, dx^dtheta, dy^dtheta).
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import lie_core

__all__ = [
    "GeometrySpec", "FieldGrid", "Kappa", "make_kappa",
    "zeros_field", "scalar_to_field", "form_from_frame",
    "exterior_d", "iota_R", "lie_R", "project_horizontal",
    "fiber_average_K", "fiber_integrate", "integrate_base",
    "wedge", "pair_wedge", "mat_wedge", "comm_wedge",
    "sup_norm", "rel_residual",
    "random_scalar_field", "random_lie_field", "random_form",
    "save_field", "load_field",
]

_NCOMP = {0: 1, 1: 3, 2: 3, 3: 1}
_COMPONENT_LABELS = {
    0: ["1"],
    1: ["dx", "dy", "dtheta"],
    2: ["dx^dy", "dx^dtheta", "dy^dtheta"],
    3: ["dx^dy^dtheta"],
}


@dataclass(frozen=True)
class GeometrySpec:
    """Degree, grid resolutions, level and structure-group rank."""
    degree: int
    nx: int
    ny: int
    nt: int
    level: int = 1
    group_rank: int = 2

    def __post_init__(self):
        if min(self.nx, self.ny, self.nt) < 8:
            raise ValueError("all grid sizes must be >= 8")
        if self.nt % self.ny != 0:
            raise ValueError(
                "nt must be a multiple of ny so the twisted gluing "
                "lands on grid points (nt=%d, ny=%d)" % (self.nt, self.ny))

    @property
    def shift_per_y(self):
        """theta grid shift per unit y-index when crossing the x-seam."""
        return self.degree * (self.nt // self.ny)

    def axes(self):
        x = np.arange(self.nx) / self.nx
        y = np.arange(self.ny) / self.ny
        t = np.arange(self.nt) / self.nt
        return x, y, t


@dataclass
class FieldGrid:
    """Sampled p-form with real or matrix coefficients.

    values has shape (ncomp, nx, ny, nt) for real coefficients or
    (ncomp, nx, ny, nt, n, n) for Lie-algebra/group valued ones.
    """
    degree_p: int
    values: np.ndarray
    geom: GeometrySpec
    base_only: bool = False

    def __post_init__(self):
        if self.values.shape[0] != _NCOMP[self.degree_p]:
            raise ValueError("wrong component count for degree %d"
                             % self.degree_p)

    @property
    def matrix_valued(self):
        return self.values.ndim == 6

    def copy(self):
        return FieldGrid(self.degree_p, self.values.copy(), self.geom,
                         self.base_only)

    def __add__(self, other):
        return FieldGrid(self.degree_p, self.values + other.values,
                         self.geom, self.base_only and other.base_only)

    def __sub__(self, other):
        return FieldGrid(self.degree_p, self.values - other.values,
                         self.geom, self.base_only and other.base_only)

    def __mul__(self, c):
        return FieldGrid(self.degree_p, self.values * c, self.geom,
                         self.base_only)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)


def zeros_field(geom, p, matrix_valued=False, base_only=False):
    n = geom.group_rank
    shape = (_NCOMP[p], geom.nx, geom.ny, geom.nt)
    if matrix_valued:
        shape = shape + (n, n)
        dt = complex
    else:
        dt = float
    return FieldGrid(p, np.zeros(shape, dtype=dt), geom, base_only)


def scalar_to_field(geom, arr, p=0, base_only=False):
    """Wrap a raw (nx,ny,nt[,n,n]) coefficient array as a p=0 or p=3 field."""
    if p not in (0, 3):
        raise ValueError("scalar_to_field handles degrees 0 and 3")
    return FieldGrid(p, arr[None], geom, base_only)


# ---------------------------------------------------------------------------
# ghost exchange and derivatives

def _theta_roll_index(geom, sign):
    """(ny, nt) index array realizing theta -> theta + sign*d*y on the grid."""
    j = np.arange(geom.ny)[:, None]
    l = np.arange(geom.nt)[None, :]
    return (l + sign * geom.shift_per_y * j) % geom.nt


def _transport_slab(field, slab_vals, sign):
    """Transport (ncomp, w, ny, nt, ...) coefficient values across the seam.

    sign=+1: values for right ghosts (x in [1, 1+w/nx)), taken from the left
    edge of the domain; following value(1,y,t) = value(0,y,t+d*y) composed
    with the frame transition dtheta -> dtheta + d*dy, theta shifts by +d*y
    and the dy-carrying components pick up +d times their dtheta partners
    (kappa = dtheta + d*x*dy continues to d*(1+x)*dy, as it must).
    sign=-1 is the inverse (left ghosts).
    """
    geom = field.geom
    idx = _theta_roll_index(geom, sign)
    shifted = slab_vals[:, :, np.arange(geom.ny)[:, None], idx]
    d = geom.degree
    if d == 0:
        return shifted
    out = shifted.copy()
    if field.degree_p == 1:
        out[1] = shifted[1] + sign * d * shifted[2]      # dy  <- dtheta
    elif field.degree_p == 2:
        out[0] = shifted[0] + sign * d * shifted[1]      # dx^dy <- dx^dtheta
    return out


def ghost_pad_x(f, width=3):
    """Extend the x-axis by `width` twisted ghost layers on each side."""
    v = f.values
    right = _transport_slab(f, v[:, :width], +1)
    left = _transport_slab(f, v[:, -width:], -1)
    return np.concatenate([left, v, right], axis=1)


_FD6 = np.array([-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20,
                 1.0 / 60])


def _deriv_x(f, comp):
    """x-derivative of one component.

    Spectral on the d=0 torus; for d != 0 the twisted gluing obstructs a
    plain x-FFT, so a 6th-order centered stencil acts on twisted ghosts.
    """
    geom = f.geom
    if geom.degree == 0:
        return _deriv_spectral(f.values[comp], 0, geom.nx)
    pad = ghost_pad_x(f, 3)[comp]
    nx = geom.nx
    out = np.zeros_like(pad[3:3 + nx])
    for k, c in enumerate(_FD6):
        if c != 0.0:
            out += c * pad[k:k + nx]
    return out * geom.nx


def _deriv_spectral(vals, axis, size):
    modes = np.fft.fftfreq(size, d=1.0 / size)
    shape = [1] * vals.ndim
    shape[axis] = size
    hat = np.fft.fft(vals, axis=axis)
    hat *= (2j * np.pi * modes).reshape(shape)
    out = np.fft.ifft(hat, axis=axis)
    return out.real if np.isrealobj(vals) else out


def _dy(f, comp):
    return _deriv_spectral(f.values[comp], 1, f.geom.ny)


def _dt(f, comp):
    return _deriv_spectral(f.values[comp], 2, f.geom.nt)


def exterior_d(f):
    """Exterior derivative; spectral in y, theta and 6th-order FD in x."""
    p = f.degree_p
    if p >= 3:
        raise ValueError("degree overflow: d of a 3-form")
    geom = f.geom
    if p == 0:
        vals = np.stack([_deriv_x(f, 0), _dy(f, 0), _dt(f, 0)])
    elif p == 1:
        vals = np.stack([
            _deriv_x(f, 1) - _dy(f, 0),     # dx^dy
            _deriv_x(f, 2) - _dt(f, 0),     # dx^dtheta
            _dy(f, 2) - _dt(f, 1),          # dy^dtheta
        ])
    else:
        vals = np.stack([_deriv_x(f, 2) - _dy(f, 1) + _dt(f, 0)])
    return FieldGrid(p + 1, vals, geom)


def iota_R(f):
    """Contraction with the fiber generator R = d/d theta."""
    p = f.degree_p
    v = f.values
    if p == 0:
        raise ValueError("cannot contract a 0-form")
    if p == 1:
        return FieldGrid(0, v[2:3].copy(), f.geom)
    if p == 2:
        out = np.stack([-v[1], -v[2], np.zeros_like(v[0])])
        return FieldGrid(1, out, f.geom)
    return FieldGrid(2, np.stack([v[0], np.zeros_like(v[0]),
                                  np.zeros_like(v[0])]), f.geom)


def lie_R(f):
    """Lie derivative along R: plain theta-derivative of all coefficients."""
    vals = _deriv_spectral(f.values, 3, f.geom.nt)
    return FieldGrid(f.degree_p, vals, f.geom)


# ---------------------------------------------------------------------------
# wedge products

def _mul_default(a, b):
    # coefficient arrays are (nx,ny,nt) scalars or (nx,ny,nt,n,n) matrices
    if a.ndim == 5 and b.ndim == 5:
        return a @ b
    if a.ndim == 3 and b.ndim == 5:
        return a[..., None, None] * b
    if a.ndim == 5 and b.ndim == 3:
        return a * b[..., None, None]
    return a * b


def wedge(f, g, mul=None):
    """Wedge product with a pluggable coefficient multiplication.

    mul(a, b) defaults to matrix multiply for matrix-valued coefficients and
    plain multiplication otherwise (mixing real and matrix broadcasts).
    """
    if mul is None:
        mul = _mul_default
    p, q = f.degree_p, g.degree_p
    if p + q > 3:
        raise ValueError("wedge degree overflow")
    if p > q:
        # alpha ^ beta = (-1)^{pq} beta ^ alpha with coefficient order kept:
        # handle directly to preserve noncommutative products.
        a, b = f.values, g.values
        if (p, q) == (1, 0):
            vals = np.stack([mul(a[i], b[0]) for i in range(3)])
        elif (p, q) == (2, 0):
            vals = np.stack([mul(a[i], b[0]) for i in range(3)])
        elif (p, q) == (3, 0):
            vals = np.stack([mul(a[0], b[0])])
        elif (p, q) == (2, 1):
            # (dx^dy)c_yt... only dx^dy^dtheta survives
            vals = np.stack([mul(a[0], b[2]) - mul(a[1], b[1])
                             + mul(a[2], b[0])])
        else:
            raise ValueError("unsupported wedge degrees (%d,%d)" % (p, q))
        return FieldGrid(p + q, vals, f.geom)
    a, b = f.values, g.values
    if p == 0:
        vals = np.stack([mul(a[0], b[i]) for i in range(b.shape[0])])
    elif (p, q) == (1, 1):
        vals = np.stack([
            mul(a[0], b[1]) - mul(a[1], b[0]),   # dx^dy
            mul(a[0], b[2]) - mul(a[2], b[0]),   # dx^dtheta
            mul(a[1], b[2]) - mul(a[2], b[1]),   # dy^dtheta
        ])
    elif (p, q) == (1, 2):
        vals = np.stack([mul(a[0], b[2]) - mul(a[1], b[1])
                         + mul(a[2], b[0])])
    else:
        raise ValueError("unsupported wedge degrees (%d,%d)" % (p, q))
    return FieldGrid(p + q, vals, f.geom)


def pair_wedge(f, g):
    """Pairing-wedge <f ^ g> using the invariant Lie pairing per slot."""
    return wedge(f, g, mul=lie_core.pair)


def mat_wedge(f, g):
    return wedge(f, g, mul=np.matmul)


def comm_wedge(f, g):
    """Graded commutator wedge [f ^ g] of Lie-valued forms."""
    sgn = (-1.0) ** (f.degree_p * g.degree_p)
    return mat_wedge(f, g) - sgn * mat_wedge(g, f)


# ---------------------------------------------------------------------------
# fiber operations

def fiber_average_K(f):
    """T-averaging operator: zero Fourier mode along the fiber."""
    vals = np.mean(f.values, axis=3, keepdims=True)
    vals = np.broadcast_to(vals, f.values.shape).copy()
    return FieldGrid(f.degree_p, vals, f.geom, base_only=True)


def integrate_base(f):
    """Integral over the base of (the dx^dy part of) a basic 2-form."""
    if f.degree_p != 2:
        raise ValueError("integrate_base expects a 2-form")
    return np.mean(f.values[0], axis=(0, 1, 2))


def fiber_integrate(f):
    """int_M alpha = int_Sigma iota_R K alpha for a top-degree form."""
    if f.degree_p != 3:
        raise ValueError("fiber_integrate expects a 3-form")
    return integrate_base(iota_R(fiber_average_K(f)))


# ---------------------------------------------------------------------------
# the bundle connection kappa

@dataclass
class Kappa:
    """The global connection 1-form kappa = dtheta + d*x*dy."""
    form: FieldGrid
    lam: FieldGrid     # horizontal part d*x*dy (local form of kappa)
    geom: GeometrySpec

    def dkappa(self):
        geom = self.geom
        out = zeros_field(geom, 2)
        out.values[0] = float(geom.degree)
        return out


def make_kappa(geom):
    f = zeros_field(geom, 1)
    x = geom.axes()[0]
    f.values[1] = geom.degree * x[:, None, None]
    f.values[2] = 1.0
    lam = zeros_field(geom, 1)
    lam.values[1] = geom.degree * x[:, None, None]
    return Kappa(f, lam, geom)


def project_horizontal(f, kappa):
    """Horizontal projection P_kappa = 1 - kappa iota_R (degree >= 1)."""
    if f.degree_p < 1:
        raise ValueError("projection needs degree >= 1")
    return f - wedge(kappa.form, iota_R(f))


# ---------------------------------------------------------------------------
# norms

def sup_norm(f):
    return float(np.max(np.abs(f.values)))


def rel_residual(lhs, rhs, floor=1e-30):
    num = sup_norm(lhs - rhs)
    den = max(sup_norm(lhs), sup_norm(rhs), floor)
    return num / den


# ---------------------------------------------------------------------------
# random smooth fields on M_d

def _weil_brezin(rng, geom, m, x_width, j_range=None, dressing=2):
    """Random smooth section w(x,y) with w(x+1,y) = exp(-2 pi i m y) w(x,y).

    Built as the lattice sum w = sum_j psi(x+j) exp(2 pi i m j y) with a
    Gaussian-dressed profile psi; the cocycle holds exactly for the infinite
    sum and to Gaussian-tail accuracy after truncation.
    """
    if j_range is None:
        # keep the dropped tail below the 1e-12 gluing tolerance
        j_range = max(3, int(np.ceil(1.0 + 3.4 * x_width)))
    x, y, _ = geom.axes()
    xs = x[:, None]
    ys = y[None, :]
    t0 = rng.uniform(0.0, 1.0)
    coeffs = rng.standard_normal(2 * dressing + 1) \
        + 1j * rng.standard_normal(2 * dressing + 1)
    w = np.zeros((geom.nx, geom.ny), dtype=complex)
    for j in range(-j_range, j_range + 1):
        t = xs + j - t0
        psi = np.exp(-np.pi * t * t / (x_width * x_width))
        if dressing:
            # trig dressing shifts the Gaussian spectrum by +-dressing modes
            dress = np.zeros_like(psi, dtype=complex)
            for dk in range(-dressing, dressing + 1):
                dress += coeffs[dk + dressing] * np.exp(2j * np.pi * dk * t)
        else:
            dress = coeffs[0]
        w += psi * dress * np.exp(2j * np.pi * m * j * ys)
    # extra plain-periodic y modulation keeps the cocycle intact
    r = int(rng.integers(-2, 3))
    w *= np.exp(2j * np.pi * r * ys)
    return w


def _random_base_trig(rng, geom, max_mode, decay=1.0):
    """Random trig polynomial on the base; max_mode may be (mx, my).

    FD truncation error grows like (2 pi kx / nx)^6, so identity-grade
    fields on d != 0 keep the hard x-band narrow while y stays spectral.
    """
    if np.isscalar(max_mode):
        mx = my = int(max_mode)
    else:
        mx, my = max_mode
    x, y, _ = geom.axes()
    f = np.zeros((geom.nx, geom.ny))
    for kx in range(-mx, mx + 1):
        for ky in range(-my, my + 1):
            amp = decay / (1.0 + kx * kx + ky * ky)
            c = rng.standard_normal() + 1j * rng.standard_normal()
            f += amp * np.real(
                c * np.exp(2j * np.pi * (kx * x[:, None] + ky * y[None, :])))
    return f


def random_scalar_field(rng, geom, theta_modes=2, base_modes=2,
                        x_width=0.5, amp=1.0, theta_decay=0.35,
                        dressing=2):
    """Random real smooth function on M_d.

    The theta-independent sector is a trig polynomial pulled back from the
    base; each theta-mode n is a Weil-Brezin section of the degree -n*d
    line bundle so the twisted gluing is exact.
    """
    _, _, th = geom.axes()
    f3 = np.zeros((geom.nx, geom.ny, geom.nt))
    base = _random_base_trig(rng, geom, base_modes)
    f3 += base[:, :, None]
    for n in range(1, theta_modes + 1):
        # gluing f(x+1,y,t) = f(x,y,t+d*y) needs sections of degree -n*d
        m = -n * geom.degree
        scale = amp * theta_decay ** n
        if m == 0:
            w = _random_base_trig(rng, geom, base_modes) \
                + 1j * _random_base_trig(rng, geom, base_modes)
        else:
            w = _weil_brezin(rng, geom, m, x_width, dressing=dressing)
        f3 += scale * np.real(w[:, :, None]
                              * np.exp(2j * np.pi * n * th)[None, None, :])
    return amp * f3


def random_lie_field(rng, geom, **kw):
    """Random su(n)-valued smooth function on M_d."""
    n = geom.group_rank
    basis = lie_core.su_basis(n)
    out = np.zeros((geom.nx, geom.ny, geom.nt, n, n), dtype=complex)
    for a in range(len(basis)):
        out += random_scalar_field(rng, geom, **kw)[..., None, None] * basis[a]
    return out


def random_form(rng, geom, p, matrix_valued=True, kappa=None, **kw):
    """Random smooth p-form, assembled in the global frame (dx, dy, kappa).

    Writing forms in this frame with globally smooth coefficient functions
    guarantees the twisted component transport automatically.
    """
    if kappa is None:
        kappa = make_kappa(geom)
    lam_y = kappa.lam.values[1]

    def coef():
        if matrix_valued:
            return random_lie_field(rng, geom, **kw)
        return random_scalar_field(rng, geom, **kw)

    out = zeros_field(geom, p, matrix_valued)
    if p == 0:
        out.values[0] = coef()
        return out
    lam = lam_y if not matrix_valued else lam_y[..., None, None]
    if p == 1:
        f1, f2, f3 = coef(), coef(), coef()   # f1 dx + f2 dy + f3 kappa
        out.values[0] = f1
        out.values[1] = f2 + lam * f3
        out.values[2] = f3
    elif p == 2:
        f1, f2, f3 = coef(), coef(), coef()
        # f1 dx^dy + f2 dx^kappa + f3 dy^kappa
        out.values[0] = f1 + lam * f2
        out.values[1] = f2
        out.values[2] = f3
    else:
        out.values[0] = coef()
    return out


# ---------------------------------------------------------------------------
# serialization

def save_field(f, path, binary=False):
    """Write a field with a normative header; flat JSON or raw binary."""
    header = {
        "schema": 1,
        "degree_d": f.geom.degree,
        "grid": [f.geom.nx, f.geom.ny, f.geom.nt],
        "level": f.geom.level,
        "group_rank": f.geom.group_rank,
        "form_degree": f.degree_p,
        "components": _COMPONENT_LABELS[f.degree_p],
        "component_order": ["dx", "dy", "dtheta"],
        "value_shape": list(f.values.shape[4:]),
        "dtype": str(f.values.dtype),
        "base_only": f.base_only,
    }
    if binary:
        with open(path, "wb") as fh:
            fh.write((json.dumps(header) + "\n").encode())
            fh.write(np.ascontiguousarray(f.values).astype(
                f.values.dtype.newbyteorder("<")).tobytes())
    else:
        doc = dict(header)
        if np.iscomplexobj(f.values):
            doc["data_re"] = f.values.real.tolist()
            doc["data_im"] = f.values.imag.tolist()
        else:
            doc["data"] = f.values.tolist()
        with open(path, "w") as fh:
            json.dump(doc, fh)


def load_field(path, binary=False):
    if binary:
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode())
            raw = fh.read()
        dt = np.dtype(header["dtype"]).newbyteorder("<")
        vals = np.frombuffer(raw, dtype=dt)
    else:
        with open(path) as fh:
            header = json.load(fh)
        if "data" in header:
            vals = np.array(header["data"])
        else:
            vals = np.array(header["data_re"]) + 1j * np.array(header["data_im"])
    geom = GeometrySpec(header["degree_d"], *header["grid"],
                        level=header.get("level", 1),
                        group_rank=header.get("group_rank", 2))
    shape = [len(header["components"]), geom.nx, geom.ny, geom.nt] \
        + header["value_shape"]
    vals = np.asarray(vals).reshape(shape).astype(np.dtype(header["dtype"]))
    return FieldGrid(header["form_degree"], vals.copy(), geom,
                     header.get("base_only", False))
