"""Conservation residuals of the bienergy stress for immersed surfaces.

A surface with shape operator A, mean curvature f = tr A and unit normal N
is *biconservative* when the tangential component

    2 A(grad f) + f grad f - 2 f Ric(N)^T

vanishes identically; together with the normal component

    Delta f + f |A|^2 - f Ric(N, N)

it makes up the full second-order residual pair (both zero = biharmonic).
Here Ric(N)^T is the tangential projection of the ambient Ricci operator
applied to N; in the adapted frame it collapses to the closed form
(4 tau^2 - kappa) cos(a) sin(a) e1, which is cross-checked against the
basis-expansion route valid at every angle.

The module also carries the constant-angle machinery: for a surface with
constant angle a, the biconservativity system forces lam = A(e2, e2) to
satisfy a quartic with constant coefficients,

    6 cot(a) lam^4
    + [3 sin(2a) (8 tau^2 - kappa) + 8 tau^2 cot(a) (3 cos^2(a) - 1)] lam^2
    - 8 tau^2 cos(a) (kappa sin(a) + 4 tau^2 cot(a) cos(a)) = 0,

degenerate exactly at a = pi/2 where every coefficient vanishes and lam is
instead forced constant by the system itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ambient import BcvParams, TangentVector, metric, norm, ricci, to_frame
from .errors import DegenerateSurfaceError
from .immersion import (
    DEFAULT_FD,
    FdConfig,
    ScalarField,
    SurfaceJet,
    _tangent_basis,
    alpha_field,
    directional_derivative,
    mean_curvature_field,
    shape_operator,
    surface_gradient,
    surface_jet,
    surface_laplacian,
)

__all__ = [
    "BitensionResiduals",
    "QuarticReport",
    "ricci_normal_tangential",
    "ricci_normal_tangential_generic",
    "tangential_bitension",
    "tangential_bitension_components",
    "normal_bitension",
    "frame_system_residual",
    "bitension_residuals",
    "constant_angle_quartic_coeffs",
    "constant_angle_suite",
    "constant_angle_codazzi_residual",
    "constant_angle_datum_residual",
]

QUARTIC_DEGENERATE_TOL = 1e-12
NEGATIVE_ROOT_TOL = 1e-12


@dataclass
class BitensionResiduals:
    """Pointwise conservation residuals of one surface sample."""

    tangential: TangentVector
    normal: float
    frame_pair: Optional[tuple]   # adapted-frame components, when defined


def ricci_normal_tangential_generic(params: BcvParams, jet: SurfaceJet) -> TangentVector:
    """Ric(N)^T by expanding N over an orthonormal tangent basis.

    Valid at every angle, including the degenerate ones where the adapted
    frame does not exist.
    """
    b1, b2, _ = _tangent_basis(params, jet)
    r1 = ricci(params, jet.N, b1)
    r2 = ricci(params, jet.N, b2)
    return r1 * b1 + r2 * b2


def ricci_normal_tangential(params: BcvParams, jet: SurfaceJet) -> TangentVector:
    """Ric(N)^T; closed form (4 tau^2 - kappa) cos(a) sin(a) e1 when the
    adapted frame exists, generic expansion otherwise."""
    if jet.adapted:
        coef = (4.0 * params.tau ** 2 - params.kappa) * jet.cos_alpha * jet.sin_alpha
        return coef * jet.e1
    return ricci_normal_tangential_generic(params, jet)


def tangential_bitension(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> TangentVector:
    """2 A(grad f) + f grad f - 2 f Ric(N)^T at (u, v).

    Zero (to tolerance) at every sample exactly when the surface is
    biconservative there.  The mean curvature enters as a chart field so
    its gradient is an honest finite difference, with no closed form
    assumed.
    """
    jet = surface_jet(S, params, u, v, cfg)
    f_fld = mean_curvature_field(S, params, cfg)
    shape = shape_operator(S, params, u, v, cfg)
    grad_f = surface_gradient(f_fld, S, params, u, v, cfg, jet=jet)
    ric_t = ricci_normal_tangential_generic(params, jet)
    f = shape.f
    return 2.0 * shape.apply(params, grad_f) + f * grad_f - 2.0 * f * ric_t


def tangential_bitension_components(S, params, u, v, cfg: FdConfig = DEFAULT_FD):
    """Adapted-frame components (g(., e1), g(., e2)) of the tangential
    residual; needs sin(alpha) > EPS_ALPHA."""
    jet = surface_jet(S, params, u, v, cfg)
    if not jet.adapted:
        raise DegenerateSurfaceError("adapted components need sin(alpha) > 0")
    tb = tangential_bitension(S, params, u, v, cfg)
    return metric(params, tb, jet.e1), metric(params, tb, jet.e2)


def normal_bitension(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> float:
    """Delta f + f |A|^2 - f Ric(N, N) at (u, v)."""
    jet = surface_jet(S, params, u, v, cfg)
    f_fld = mean_curvature_field(S, params, cfg)
    shape = shape_operator(S, params, u, v, cfg)
    lap = surface_laplacian(f_fld, S, params, u, v, cfg)
    ric_nn = ricci(params, jet.N, jet.N)
    return lap + shape.f * shape.norm2 - shape.f * ric_nn


def frame_system_residual(S, params, u, v, cfg: FdConfig = DEFAULT_FD):
    """The two adapted-frame biconservativity equations.

    With f = lam + e1(a):

        R1 = e1(f) (lam + 3 e1(a)) + 2 e2(f) (e2(a) - tau)
             - 2 (4 tau^2 - kappa) f cos(a) sin(a)
        R2 = 2 e1(f) (e2(a) - tau) + (3 lam + e1(a)) e2(f)

    e1(a), e2(a) are directional differences of the angle field and
    e_i(f) differences of the field lam + e1(a), so this route shares no
    intermediate values with `tangential_bitension`; the two agree
    component-by-component (factor one), which the test suite pins down.
    """
    jet = surface_jet(S, params, u, v, cfg)
    if not jet.adapted:
        raise DegenerateSurfaceError("frame system needs sin(alpha) > 0")
    k, t = params.kappa, params.tau

    afld = alpha_field(S, params, cfg)

    def e1_alpha_at(uu, vv):
        J = surface_jet(S, params, uu, vv, cfg)
        return directional_derivative(S, params, uu, vv, afld, J.e1, cfg, jet=J)

    def f_at(uu, vv):
        lam_loc = shape_operator(S, params, uu, vv, cfg).lam
        return lam_loc + e1_alpha_at(uu, vv)

    f_fld = ScalarField(f_at)
    e1a = e1_alpha_at(u, v)
    e2a = directional_derivative(S, params, u, v, afld, jet.e2, cfg, jet=jet)
    lam = shape_operator(S, params, u, v, cfg).lam
    f = lam + e1a
    e1f = directional_derivative(S, params, u, v, f_fld, jet.e1, cfg, jet=jet)
    e2f = directional_derivative(S, params, u, v, f_fld, jet.e2, cfg, jet=jet)

    r1 = (e1f * (lam + 3.0 * e1a) + 2.0 * e2f * (e2a - t)
          - 2.0 * (4.0 * t * t - k) * f * jet.cos_alpha * jet.sin_alpha)
    r2 = 2.0 * e1f * (e2a - t) + (3.0 * lam + e1a) * e2f
    return r1, r2


def bitension_residuals(S, params, u, v, cfg: FdConfig = DEFAULT_FD) -> BitensionResiduals:
    """Tangential vector, normal scalar, and (when defined) the adapted
    frame pair, bundled for reporting."""
    jet = surface_jet(S, params, u, v, cfg)
    tangential = tangential_bitension(S, params, u, v, cfg)
    nrm = normal_bitension(S, params, u, v, cfg)
    pair = frame_system_residual(S, params, u, v, cfg) if jet.adapted else None
    return BitensionResiduals(tangential=tangential, normal=nrm, frame_pair=pair)


@dataclass
class QuarticReport:
    """Constant-angle polynomial in lam: coefficients of degrees (4, 2, 0),
    its real roots, and the degeneracy flag for a = pi/2 (all coefficients
    vanish; the system then forces lam constant instead)."""

    coefficients: tuple
    real_roots: list
    degenerate: bool


def constant_angle_quartic_coeffs(params: BcvParams, alpha: float):
    """Coefficients (c4, c2, c0) of the constant-angle polynomial in lam."""
    if not 0.0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    k, t = params.kappa, params.tau
    c, s = math.cos(alpha), math.sin(alpha)
    cot = c / s
    c4 = 6.0 * cot
    c2 = 3.0 * math.sin(2.0 * alpha) * (8.0 * t * t - k) + 8.0 * t * t * cot * (3.0 * c * c - 1.0)
    c0 = -8.0 * t * t * c * (k * s + 4.0 * t * t * cot * c)
    return c4, c2, c0


def constant_angle_suite(params: BcvParams, alpha: float) -> QuarticReport:
    """Solve the constant-angle polynomial for lam.

    Roots come from the quadratic in mu = lam^2; mu below -1e-12 is
    discarded, small negatives are clamped to zero, and each surviving mu
    maps back through both square-root branches.
    """
    c4, c2, c0 = constant_angle_quartic_coeffs(params, alpha)
    if max(abs(c4), abs(c2), abs(c0)) < QUARTIC_DEGENERATE_TOL:
        return QuarticReport(coefficients=(c4, c2, c0), real_roots=[], degenerate=True)
    if abs(c4) < QUARTIC_DEGENERATE_TOL:
        mus = [] if abs(c2) < QUARTIC_DEGENERATE_TOL else [-c0 / c2]
    else:
        disc = c2 * c2 - 4.0 * c4 * c0
        if disc < 0.0:
            mus = []
        else:
            sq = math.sqrt(disc)
            mus = [(-c2 + sq) / (2.0 * c4), (-c2 - sq) / (2.0 * c4)]
    roots = set()
    for mu in mus:
        if mu < -NEGATIVE_ROOT_TOL:
            continue
        lam = math.sqrt(max(mu, 0.0))
        roots.add(lam)
        roots.add(-lam)
    return QuarticReport(
        coefficients=(c4, c2, c0),
        real_roots=sorted(roots),
        degenerate=False,
    )


def constant_angle_codazzi_residual(params: BcvParams, alpha: float, lam: float,
                                    e1_lam: float = 0.0) -> float:
    """The single compatibility equation left at constant angle:

        e1(lam) + lam^2 cot(a) + kappa cos(a) sin(a)
        + 4 tau^2 cot(a) cos^2(a).
    """
    k, t = params.kappa, params.tau
    c, s = math.cos(alpha), math.sin(alpha)
    cot = c / s
    return e1_lam + lam * lam * cot + k * c * s + 4.0 * t * t * cot * c * c


def constant_angle_datum_residual(params: BcvParams, alpha: float, lam: float):
    """Biconservativity residuals of a constant-angle datum (alpha, lam).

    The derivatives of lam are not free: e1(lam) is pinned by the
    constant-angle compatibility equation and e2(lam) by the second system
    equation 3 lam e2(lam) = 2 tau e1(lam).  With those substituted, the
    pair below vanishes exactly when lam is a root of the constant-angle
    polynomial:

        R1 = lam e1(lam) - 2 tau e2(lam)
             - 2 lam (4 tau^2 - kappa) cos(a) sin(a)
        R2 = 3 lam e2(lam) - 2 tau e1(lam)
    """
    k, t = params.kappa, params.tau
    c, s = math.cos(alpha), math.sin(alpha)
    e1_lam = -(constant_angle_codazzi_residual(params, alpha, lam, 0.0))
    if lam == 0.0:
        e2_lam = 0.0
        r2 = -2.0 * t * e1_lam
    else:
        e2_lam = 2.0 * t * e1_lam / (3.0 * lam)
        r2 = 3.0 * lam * e2_lam - 2.0 * t * e1_lam
    r1 = lam * e1_lam - 2.0 * t * e2_lam - 2.0 * lam * (4.0 * t * t - k) * c * s
    return r1, r2
