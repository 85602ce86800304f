"""First-order geometry of parametric surfaces in the ambient spaces.

A surface is a chart (u, v) -> (x, y, z) landing in the domain F > 0.  From
one chart evaluation this module derives the full pointwise package: tangent
basis, first fundamental form, unit normal N (metric wedge of the chart
partials, optionally sign-flipped per surface), the angle function alpha
with cos(alpha) = g(E3, N), the tangential projection T of the vertical
direction (E3 = T + cos(alpha) N), the quarter-turn J = N ^ . , and the
adapted tangent frame e1 = T / sin(alpha), e2 = JT / sin(alpha) away from
the degenerate angles.

On top of the jet sit the shape operator A = -(nabla N)^T and mean curvature
f = tr A, surface gradient / Laplacian of scalar fields over the chart, and
residual evaluators for the structural identities every immersed surface
must satisfy (intrinsic-vs-extrinsic curvature, the two scalar compatibility
equations of the adapted frame, and the derivative law of T).  All surface
derivatives are finite differences along the chart; nothing requires
symbolic input from chart authors.

Sign conventions.  A X = -(nabla_X N)^T, and the Laplacian is the geometer's
one, Delta = -div grad on scalars, so Delta(u^2 + v^2) = -4 on a flat chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ambient import (
    AmbientPoint,
    BcvParams,
    TangentVector,
    christoffels,
    cross,
    from_frame,
    metric,
    norm,
    smoothing_factor,
    to_frame,
)
from .errors import DegenerateSurfaceError

__all__ = [
    "EPS_ALPHA",
    "EPS_GRAM",
    "FdConfig",
    "DEFAULT_FD",
    "ParametricSurface",
    "SurfaceJet",
    "ShapeData",
    "ScalarField",
    "surface_jet",
    "shape_operator",
    "mean_curvature",
    "mean_curvature_field",
    "alpha_field",
    "tangent_coefficients",
    "tangential_part",
    "directional_derivative",
    "covariant_along",
    "surface_gradient",
    "surface_laplacian",
    "brioschi_curvature",
    "gauss_residual",
    "codazzi_residual",
    "compatibility_residual",
    "surface_connection_residual",
]

EPS_ALPHA = 1e-7   # below this sin(alpha), the adapted frame is reported absent
EPS_GRAM = 1e-12   # regularity floor for det of the first fundamental form


@dataclass
class FdConfig:
    """Finite-difference step sizes for surface derivatives.

    chart_step       central differences of the chart itself (no analytic
                     partials supplied)
    normal_step      fourth-order differences of the normal field feeding
                     the shape operator
    directional_step first directional derivatives of fields along tangent
                     vectors
    gradient_step    chart partials of scalar fields inside the surface
                     gradient; wider than directional_step because the mean
                     curvature field carries finite-difference jitter that
                     a small step would amplify
    second_step      second partials of the fundamental form (intrinsic
                     curvature stencil)
    laplacian_step   second-difference stencil of the surface Laplacian;
                     jitter in the differentiated field grows as 1/h^2, so
                     this is the widest step of all
    """

    chart_step: float = 1e-5
    normal_step: float = 1e-4
    directional_step: float = 1e-4
    gradient_step: float = 1e-3
    second_step: float = 1e-3
    laplacian_step: float = 5e-3


DEFAULT_FD = FdConfig()


class ParametricSurface:
    """Chart (u, v) -> (x, y, z) with an optional analytic tangent map.

    Parameters
    ----------
    chart : callable (u, v) -> 3-sequence
        Coordinates of the surface point.  Must be defined on an open
        neighbourhood of `domain` (finite-difference stencils poke slightly
        outside sample points).
    domain : ((u0, u1), (v0, v1))
        Parameter rectangle used by samplers and mesh export.
    partials : callable (u, v) -> (3-seq, 3-seq), optional
        Analytic chart partials (X_u, X_v); finite differences otherwise.
    normal_sign : +1.0 or -1.0
        Per-surface orientation flag multiplying the wedge normal, so each
        constructor can fix which of the two unit normals it means.
    """

    def __init__(self, chart, domain, partials=None, normal_sign: float = 1.0, name: str = "surface"):
        self.chart = chart
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.partials = partials
        self.normal_sign = float(normal_sign)
        self.name = name

    def coords(self, u: float, v: float) -> np.ndarray:
        return np.asarray(self.chart(u, v), dtype=float)

    def point(self, params: BcvParams, u: float, v: float) -> AmbientPoint:
        c = self.coords(u, v)
        return AmbientPoint(params, c[0], c[1], c[2])

    def partials_at(self, u: float, v: float, cfg: FdConfig = DEFAULT_FD):
        if self.partials is not None:
            xu, xv = self.partials(u, v)
            return np.asarray(xu, dtype=float), np.asarray(xv, dtype=float)
        hu = cfg.chart_step * max(1.0, abs(u))
        hv = cfg.chart_step * max(1.0, abs(v))
        xu = (self.coords(u + hu, v) - self.coords(u - hu, v)) / (2.0 * hu)
        xv = (self.coords(u, v + hv) - self.coords(u, v - hv)) / (2.0 * hv)
        return xu, xv

    def grid(self, nu: int, nv: int):
        (u0, u1), (v0, v1) = self.domain
        return np.linspace(u0, u1, nu), np.linspace(v0, v1, nv)

    def __repr__(self):
        return f"ParametricSurface({self.name}, domain={self.domain})"


@dataclass
class SurfaceJet:
    """All first-order data of a surface at one parameter value."""

    params: BcvParams
    u: float
    v: float
    p: AmbientPoint
    X_u: TangentVector
    X_v: TangentVector
    I: np.ndarray              # 2x2 first fundamental form
    N: TangentVector           # unit normal (normal_sign applied)
    cos_alpha: float
    sin_alpha: float
    T: TangentVector           # tangential part of E3
    JT: TangentVector          # N ^ T
    e1: Optional[TangentVector]
    e2: Optional[TangentVector]
    adapted: bool              # e1, e2 present (sin_alpha > EPS_ALPHA)


def surface_jet(S: ParametricSurface, params: BcvParams, u: float, v: float,
                cfg: FdConfig = DEFAULT_FD) -> SurfaceJet:
    """Evaluate the full first-order jet of S at (u, v).

    Raises DegenerateSurfaceError when the chart partials are dependent
    (Gram determinant at or below EPS_GRAM).
    """
    p = S.point(params, u, v)
    xu_c, xv_c = S.partials_at(u, v, cfg)
    X_u = TangentVector(p, xu_c)
    X_v = TangentVector(p, xv_c)
    au = to_frame(params, X_u)
    av = to_frame(params, X_v)
    I = np.array([[au @ au, au @ av], [av @ au, av @ av]])
    det = I[0, 0] * I[1, 1] - I[0, 1] * I[1, 0]
    if not det > EPS_GRAM:
        raise DegenerateSurfaceError(
            f"{S.name}: chart partials dependent at (u, v) = ({u:.6g}, {v:.6g}), det I = {det:.3e}"
        )
    an = np.cross(au, av)
    nn = math.sqrt(an @ an)
    an = S.normal_sign * an / nn
    N = from_frame(params, p, an)
    cos_a = float(an[2])  # = g(E3, N): third frame component of N
    cos_a = max(-1.0, min(1.0, cos_a))
    sin_a = math.sqrt(max(0.0, 1.0 - cos_a * cos_a))
    e3 = TangentVector(p, (0.0, 0.0, 1.0))
    T = e3 - cos_a * N
    JT = cross(params, N, T)
    adapted = sin_a > EPS_ALPHA
    e1 = (1.0 / sin_a) * T if adapted else None
    e2 = (1.0 / sin_a) * JT if adapted else None
    return SurfaceJet(
        params=params, u=u, v=v, p=p, X_u=X_u, X_v=X_v, I=I, N=N,
        cos_alpha=cos_a, sin_alpha=sin_a, T=T, JT=JT, e1=e1, e2=e2,
        adapted=adapted,
    )


def tangent_coefficients(params: BcvParams, jet: SurfaceJet, W: TangentVector):
    """Coefficients (xi, eta) with W = xi X_u + eta X_v (W assumed tangent)."""
    rhs = np.array([metric(params, W, jet.X_u), metric(params, W, jet.X_v)])
    xi, eta = np.linalg.solve(jet.I, rhs)
    return float(xi), float(eta)


def tangential_part(params: BcvParams, jet: SurfaceJet, W: TangentVector) -> TangentVector:
    """Projection of W onto the tangent plane, W - g(W, N) N."""
    return W - metric(params, W, jet.N) * jet.N


def _tangent_basis(params: BcvParams, jet: SurfaceJet):
    """Orthonormal tangent basis: adapted (e1, e2) when available, else
    Gram-Schmidt of the chart partials."""
    if jet.adapted:
        return jet.e1, jet.e2, True
    b1 = (1.0 / norm(params, jet.X_u)) * jet.X_u
    w = jet.X_v - metric(params, jet.X_v, b1) * b1
    b2 = (1.0 / norm(params, w)) * w
    return b1, b2, False


@dataclass
class ShapeData:
    """Shape operator in an orthonormal tangent basis, plus invariants.

    A is the raw 2x2 matrix A[i, j] = g(A b_j, b_i); it is symmetric up to
    finite-difference noise.  `adapted` says whether the basis is the
    adapted frame (e1, e2); otherwise it is a Gram-Schmidt basis of the
    chart partials (the trace f is basis-independent either way).
    """

    A: np.ndarray
    lam: float                # A[1, 1], the (e2, e2) entry
    f: float                  # trace = mean curvature
    basis: tuple
    adapted: bool

    def apply(self, params: BcvParams, W: TangentVector) -> TangentVector:
        """A W for a tangent vector W, through the stored basis."""
        b1, b2 = self.basis
        a = np.array([metric(params, W, b1), metric(params, W, b2)])
        out = self.A @ a
        return out[0] * b1 + out[1] * b2

    @property
    def norm2(self) -> float:
        """Squared Frobenius norm |A|^2."""
        return float(np.sum(self.A * self.A))


def _normal_derivatives(S, params, u, v, cfg):
    """Fourth-order central differences of the unit-normal components along
    the chart directions."""
    out = []
    for axis, t0 in ((0, u), (1, v)):
        h = cfg.normal_step * max(1.0, abs(t0))

        def n_at(t):
            uu, vv = (t, v) if axis == 0 else (u, t)
            return surface_jet(S, params, uu, vv, cfg).N.comps

        d = (-n_at(t0 + 2 * h) + 8.0 * n_at(t0 + h) - 8.0 * n_at(t0 - h) + n_at(t0 - 2 * h)) / (12.0 * h)
        out.append(d)
    return out


def shape_operator(S: ParametricSurface, params: BcvParams, u: float, v: float,
                   cfg: FdConfig = DEFAULT_FD) -> ShapeData:
    """Shape operator A X = -(nabla_X N)^T at (u, v).

    The normal field is differentiated along the chart directions and
    corrected with the finite-difference Christoffel symbols; the matrix is
    returned in the adapted frame when sin(alpha) > EPS_ALPHA, else in a
    Gram-Schmidt basis of the chart partials.
    """
    jet = surface_jet(S, params, u, v, cfg)
    dNu, dNv = _normal_derivatives(S, params, u, v, cfg)
    gamma = christoffels(params, jet.p)
    n0 = jet.N.comps

    def nabla_N(X: TangentVector, dN_chart_u, dN_chart_v):
        xi, eta = tangent_coefficients(params, jet, X)
        d = xi * dN_chart_u + eta * dN_chart_v
        comps = d + np.einsum("kij,i,j->k", gamma, X.comps, n0)
        return TangentVector(jet.p, comps)

    A_of = {}
    for key, X in (("u", jet.X_u), ("v", jet.X_v)):
        W = nabla_N(X, dNu, dNv)
        A_of[key] = -1.0 * tangential_part(params, jet, W)

    b1, b2, adapted = _tangent_basis(params, jet)
    M = np.empty((2, 2))
    for j, bj in enumerate((b1, b2)):
        xi, eta = tangent_coefficients(params, jet, bj)
        Abj = xi * A_of["u"] + eta * A_of["v"]
        M[0, j] = metric(params, Abj, b1)
        M[1, j] = metric(params, Abj, b2)
    return ShapeData(A=M, lam=float(M[1, 1]), f=float(M[0, 0] + M[1, 1]),
                     basis=(b1, b2), adapted=adapted)


def mean_curvature(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> float:
    return shape_operator(S, params, u, v, cfg).f


class ScalarField:
    """Scalar function over the chart parameters."""

    def __init__(self, fn: Callable[[float, float], float]):
        self.fn = fn

    def __call__(self, u: float, v: float) -> float:
        return float(self.fn(u, v))


def mean_curvature_field(S, params, cfg: FdConfig = DEFAULT_FD) -> ScalarField:
    return ScalarField(lambda u, v: shape_operator(S, params, u, v, cfg).f)


def alpha_field(S, params, cfg: FdConfig = DEFAULT_FD) -> ScalarField:
    """Angle function alpha(u, v) = arccos g(E3, N)."""
    def fn(u, v):
        c = surface_jet(S, params, u, v, cfg).cos_alpha
        return math.acos(max(-1.0, min(1.0, c)))
    return ScalarField(fn)


def directional_derivative(S, params, u, v, field, W: TangentVector,
                           cfg: FdConfig = DEFAULT_FD, jet: SurfaceJet = None) -> float:
    """Derivative W(field) of a chart scalar field along tangent W.

    The chart line (u + t xi, v + t eta) with W = xi X_u + eta X_v has
    velocity W at t = 0, so a central difference along it converges to the
    directional derivative.
    """
    if jet is None:
        jet = surface_jet(S, params, u, v, cfg)
    xi, eta = tangent_coefficients(params, jet, W)
    t = cfg.directional_step / max(1.0, abs(xi), abs(eta))
    return (field(u + t * xi, v + t * eta) - field(u - t * xi, v - t * eta)) / (2.0 * t)


def covariant_along(S, params, u, v, vec_field, W: TangentVector,
                    cfg: FdConfig = DEFAULT_FD, jet: SurfaceJet = None) -> TangentVector:
    """Ambient covariant derivative nabla_W V of a chart vector field.

    vec_field maps (u, v) to coordinate components of a vector along the
    surface; the result lives at the jet base point.
    """
    if jet is None:
        jet = surface_jet(S, params, u, v, cfg)
    xi, eta = tangent_coefficients(params, jet, W)
    t = cfg.directional_step / max(1.0, abs(xi), abs(eta))
    vp = np.asarray(vec_field(u + t * xi, v + t * eta), dtype=float)
    vm = np.asarray(vec_field(u - t * xi, v - t * eta), dtype=float)
    d = (vp - vm) / (2.0 * t)
    gamma = christoffels(params, jet.p)
    v0 = np.asarray(vec_field(u, v), dtype=float)
    comps = d + np.einsum("kij,i,j->k", gamma, W.comps, v0)
    return TangentVector(jet.p, comps)


def surface_gradient(fld: ScalarField, S, params, u, v,
                     cfg: FdConfig = DEFAULT_FD, jet: SurfaceJet = None) -> TangentVector:
    """Gradient of fld on the surface: inverse fundamental form on the
    chart partial derivatives."""
    if jet is None:
        jet = surface_jet(S, params, u, v, cfg)
    hu = cfg.gradient_step * max(1.0, abs(u))
    hv = cfg.gradient_step * max(1.0, abs(v))
    du = (fld(u + hu, v) - fld(u - hu, v)) / (2.0 * hu)
    dv = (fld(u, v + hv) - fld(u, v - hv)) / (2.0 * hv)
    coef = np.linalg.solve(jet.I, np.array([du, dv]))
    return coef[0] * jet.X_u + coef[1] * jet.X_v


def surface_laplacian(fld: ScalarField, S, params, u, v,
                      cfg: FdConfig = DEFAULT_FD) -> float:
    """Surface Laplacian with the sign convention Delta = -div grad.

    Divergence form expanded as
        div grad f = I^{ij} d2_ij f + c^j d_j f,
        c^j = (1 / sqrt(det I)) d_i (sqrt(det I) I^{ij});
    second differences use cfg.laplacian_step, the metric coefficients use
    cfg.directional_step.
    """
    jet = surface_jet(S, params, u, v, cfg)

    def minv_w(uu, vv):
        J = surface_jet(S, params, uu, vv, cfg)
        det = J.I[0, 0] * J.I[1, 1] - J.I[0, 1] * J.I[1, 0]
        return math.sqrt(det) * np.linalg.inv(J.I)

    h = cfg.laplacian_step
    hu = h * max(1.0, abs(u))
    hv = h * max(1.0, abs(v))
    f0 = fld(u, v)
    fuu = (fld(u + hu, v) - 2.0 * f0 + fld(u - hu, v)) / (hu * hu)
    fvv = (fld(u, v + hv) - 2.0 * f0 + fld(u, v - hv)) / (hv * hv)
    fuv = (fld(u + hu, v + hv) - fld(u + hu, v - hv)
           - fld(u - hu, v + hv) + fld(u - hu, v - hv)) / (4.0 * hu * hv)
    du = (fld(u + hu, v) - fld(u - hu, v)) / (2.0 * hu)
    dv = (fld(u, v + hv) - fld(u, v - hv)) / (2.0 * hv)

    ku = cfg.directional_step * max(1.0, abs(u))
    kv = cfg.directional_step * max(1.0, abs(v))
    dM_u = (minv_w(u + ku, v) - minv_w(u - ku, v)) / (2.0 * ku)
    dM_v = (minv_w(u, v + kv) - minv_w(u, v - kv)) / (2.0 * kv)
    det0 = jet.I[0, 0] * jet.I[1, 1] - jet.I[0, 1] * jet.I[1, 0]
    sq0 = math.sqrt(det0)
    Iinv = np.linalg.inv(jet.I)
    c = (dM_u[0, :] + dM_v[1, :]) / sq0

    div = (Iinv[0, 0] * fuu + (Iinv[0, 1] + Iinv[1, 0]) * fuv + Iinv[1, 1] * fvv
           + c[0] * du + c[1] * dv)
    return -div


def _fundamental_entries(S, params, cfg):
    def entries(uu, vv):
        J = surface_jet(S, params, uu, vv, cfg)
        return J.I[0, 0], J.I[0, 1], J.I[1, 1]
    return entries


def brioschi_curvature(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> float:
    """Intrinsic Gauss curvature from the first fundamental form alone.

    Second central differences of (E, F, G) feed the Brioschi determinant
    formula, giving a route to K that never sees the normal or the shape
    operator.
    """
    ent = _fundamental_entries(S, params, cfg)
    h = cfg.second_step
    hu = h * max(1.0, abs(u))
    hv = h * max(1.0, abs(v))

    E0, F0, G0 = ent(u, v)
    Ep, Fp, Gp = ent(u + hu, v)
    Em, Fm_, Gm = ent(u - hu, v)
    Eq, Fq, Gq = ent(u, v + hv)
    Er, Fr, Gr = ent(u, v - hv)

    Eu = (Ep - Em) / (2 * hu)
    Ev = (Eq - Er) / (2 * hv)
    Gu = (Gp - Gm) / (2 * hu)
    Gv = (Gq - Gr) / (2 * hv)
    Fu = (Fp - Fm_) / (2 * hu)
    Fv = (Fq - Fr) / (2 * hv)
    Evv = (Eq - 2 * E0 + Er) / (hv * hv)
    Guu = (Gp - 2 * G0 + Gm) / (hu * hu)
    Fa = ent(u + hu, v + hv)[1]
    Fb = ent(u + hu, v - hv)[1]
    Fc = ent(u - hu, v + hv)[1]
    Fd = ent(u - hu, v - hv)[1]
    Fuv = (Fa - Fb - Fc + Fd) / (4 * hu * hv)

    M1 = np.array([
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E0, F0],
        [0.5 * Gv, F0, G0],
    ])
    M2 = np.array([
        [0.0, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E0, F0],
        [0.5 * Gu, F0, G0],
    ])
    den = (E0 * G0 - F0 * F0) ** 2
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / den)


def gauss_residual(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> float:
    """K - det A - tau^2 - (kappa - 4 tau^2) cos^2(alpha).

    K is the intrinsic (Brioschi) curvature, det A the extrinsic one; the
    residual vanishes on genuine immersed surfaces, making this a two-sided
    check of both curvature routes.
    """
    jet = surface_jet(S, params, u, v, cfg)
    shape = shape_operator(S, params, u, v, cfg)
    K = brioschi_curvature(S, params, u, v, cfg)
    detA = float(np.linalg.det(shape.A))
    k, t = params.kappa, params.tau
    return K - detA - t * t - (k - 4.0 * t * t) * jet.cos_alpha ** 2


def _adapted_or_raise(jet: SurfaceJet, what: str):
    if not jet.adapted:
        raise DegenerateSurfaceError(
            f"{what} needs the adapted frame, but sin(alpha) = {jet.sin_alpha:.3e}"
        )


def _alpha_derivative_fields(S, params, cfg):
    """Directional derivatives e1(alpha), e2(alpha) as chart fields."""
    afld = alpha_field(S, params, cfg)

    def e_alpha(idx):
        def fn(uu, vv):
            J = surface_jet(S, params, uu, vv, cfg)
            _adapted_or_raise(J, "alpha derivative")
            W = J.e1 if idx == 1 else J.e2
            return directional_derivative(S, params, uu, vv, afld, W, cfg, jet=J)
        return ScalarField(fn)

    return e_alpha(1), e_alpha(2)


def codazzi_residual(S, params, u, v, cfg: FdConfig = DEFAULT_FD):
    """Residuals of the two adapted-frame compatibility equations.

    First:  e1(e2(a)) + lam cot(a) e2(a) + cot(a) e1(a)(e2(a) - 2 tau)
            - e2(e1(a))
    Second: cot(a) [2 e2(a)^2 - lam e1(a) - 6 tau e2(a) + 4 tau^2 + lam^2]
            + e1(lam) - e2(e2(a)) - (4 tau^2 - kappa) cos(a) sin(a)

    Both vanish identically on immersed surfaces; the derivatives here are
    nested directional finite differences, so the residuals measure the
    whole jet/shape pipeline at once.
    """
    jet = surface_jet(S, params, u, v, cfg)
    _adapted_or_raise(jet, "compatibility residuals")
    k, t = params.kappa, params.tau

    e1a_fld, e2a_fld = _alpha_derivative_fields(S, params, cfg)
    lam_fld = ScalarField(lambda uu, vv: shape_operator(S, params, uu, vv, cfg).lam)

    e1a = e1a_fld(u, v)
    e2a = e2a_fld(u, v)
    e1_e2a = directional_derivative(S, params, u, v, e2a_fld, jet.e1, cfg, jet=jet)
    e2_e1a = directional_derivative(S, params, u, v, e1a_fld, jet.e2, cfg, jet=jet)
    e2_e2a = directional_derivative(S, params, u, v, e2a_fld, jet.e2, cfg, jet=jet)
    e1_lam = directional_derivative(S, params, u, v, lam_fld, jet.e1, cfg, jet=jet)
    lam = shape_operator(S, params, u, v, cfg).lam

    cot = jet.cos_alpha / jet.sin_alpha
    r1 = e1_e2a + lam * cot * e2a + cot * e1a * (e2a - 2.0 * t) - e2_e1a
    r2 = (cot * (2.0 * e2a * e2a - lam * e1a - 6.0 * t * e2a + 4.0 * t * t + lam * lam)
          + e1_lam - e2_e2a - (4.0 * t * t - k) * jet.cos_alpha * jet.sin_alpha)
    return r1, r2


def compatibility_residual(S, params, u, v, W: TangentVector,
                           cfg: FdConfig = DEFAULT_FD):
    """Residuals of the derivative law of T along a tangent direction W.

    Returns (vector, scalar):
        vector = (nabla_W T)^tangential - cos(a) (A W - tau J W)
        scalar = g(A W - tau J W, T) + W(cos a)
    Both vanish on immersed surfaces.
    """
    jet = surface_jet(S, params, u, v, cfg)

    def T_field(uu, vv):
        return surface_jet(S, params, uu, vv, cfg).T.comps

    nabla_T = covariant_along(S, params, u, v, T_field, W, cfg, jet=jet)
    nabla_T_tan = tangential_part(params, jet, nabla_T)

    shape = shape_operator(S, params, u, v, cfg)
    AW = shape.apply(params, W)
    JW = cross(params, jet.N, W)
    rhs = AW - params.tau * JW
    vec = nabla_T_tan - jet.cos_alpha * rhs

    cos_fld = ScalarField(lambda uu, vv: surface_jet(S, params, uu, vv, cfg).cos_alpha)
    w_cos = directional_derivative(S, params, u, v, cos_fld, W, cfg, jet=jet)
    scalar = metric(params, rhs, jet.T) + w_cos
    return vec, scalar


def surface_connection_residual(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> float:
    """Max deviation of the adapted-frame surface connection from its
    closed form:

        nabla_e1 e1 =  cot(a) (e2(a) - 2 tau) e2
        nabla_e2 e1 =  lam cot(a) e2
        nabla_e1 e2 = -cot(a) (e2(a) - 2 tau) e1
        nabla_e2 e2 = -lam cot(a) e1

    where nabla is the tangential projection of the ambient derivative,
    computed by finite differences of the adapted frame fields.
    """
    jet = surface_jet(S, params, u, v, cfg)
    _adapted_or_raise(jet, "surface connection check")
    t = params.tau

    def e_field(idx):
        def fn(uu, vv):
            J = surface_jet(S, params, uu, vv, cfg)
            _adapted_or_raise(J, "surface connection check")
            return (J.e1 if idx == 1 else J.e2).comps
        return fn

    _, e2a_fld = _alpha_derivative_fields(S, params, cfg)
    e2a = e2a_fld(u, v)
    lam = shape_operator(S, params, u, v, cfg).lam
    cot = jet.cos_alpha / jet.sin_alpha

    closed = {
        (1, 1): cot * (e2a - 2.0 * t) * jet.e2,
        (2, 1): lam * cot * jet.e2,
        (1, 2): -cot * (e2a - 2.0 * t) * jet.e1,
        (2, 2): -lam * cot * jet.e1,
    }
    worst = 0.0
    for (i, j), expect in closed.items():
        W = jet.e1 if i == 1 else jet.e2
        got = covariant_along(S, params, u, v, e_field(j), W, cfg, jet=jet)
        got_tan = tangential_part(params, jet, got)
        worst = max(worst, norm(params, got_tan - expect))
    return worst
