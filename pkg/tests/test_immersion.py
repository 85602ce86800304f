import math

import numpy as np
import pytest

from bcvgeo.ambient import BcvParams, TangentVector, cross, metric, norm, smoothing_factor
from bcvgeo.errors import DegenerateSurfaceError
from bcvgeo.immersion import (
    ParametricSurface,
    ScalarField,
    alpha_field,
    brioschi_curvature,
    codazzi_residual,
    compatibility_residual,
    directional_derivative,
    gauss_residual,
    shape_operator,
    surface_connection_residual,
    surface_gradient,
    surface_jet,
    surface_laplacian,
)
from bcvgeo.rotation import (
    ellipse_curve,
    generic_revolution_surface,
    hopf_cylinder,
    hopf_tube,
    revolution_surface,
    slant_profile,
)

from conftest import flat_plane, make_rng, sphere_surface

P_FLAT = BcvParams(0.0, 0.0)
P_NIL = BcvParams(0.0, 0.5)


def slant_surface(params=P_NIL, r0=1.0, sigma0=1.0, span=(-0.5, 1.5)):
    return revolution_surface(params, slant_profile(params, r0, sigma0), span)


def random_samples(surface, rng, n, sin_floor=0.0, params=P_NIL):
    (u0, u1), (v0, v1) = surface.domain
    out = []
    while len(out) < n:
        u = rng.uniform(u0, u1)
        v = rng.uniform(v0 + 0.1 * (v1 - v0), v1 - 0.1 * (v1 - v0))
        jet = surface_jet(surface, params, u, v)
        if jet.sin_alpha > sin_floor:
            out.append((u, v, jet))
    return out


class TestSurfaceJet:
    def test_horizontal_plane_degenerate(self):
        S = flat_plane()
        jet = surface_jet(S, P_FLAT, 0.2, -0.3)
        assert abs(abs(jet.cos_alpha) - 1.0) < 1e-15
        assert norm(P_FLAT, jet.T) < 1e-15
        assert not jet.adapted and jet.e1 is None and jet.e2 is None
        assert abs(abs(jet.N.comps[2]) - 1.0) < 1e-15

    def test_cylinder_vertical_tangency(self):
        P = BcvParams(0.0, 0.7)
        S = hopf_cylinder(P, 1.3)
        jet = surface_jet(S, P, 0.9, 0.3)
        assert abs(jet.cos_alpha) < 1e-14
        assert np.allclose(jet.e1.comps, [0, 0, 1], atol=1e-14)

    def test_slant_angle_formula(self):
        prof = slant_profile(P_NIL, 1.0, 1.0)
        S = slant_surface()
        for u, v in [(0.3, -0.2), (1.7, 0.4), (4.0, 1.2)]:
            jet = surface_jet(S, P_NIL, u, v)
            st = prof(v)
            F = smoothing_factor(P_NIL, st.r, 0.0)
            rp = F * math.cos(st.sigma)
            expected = rp / (F * math.sqrt(1.0 + P_NIL.tau ** 2 * st.r ** 2))
            assert jet.cos_alpha == pytest.approx(expected, abs=1e-8)

    def test_jet_identities(self, rng):
        for surface, params in [
            (slant_surface(), P_NIL),
            (generic_revolution_surface(P_NIL), P_NIL),
            (sphere_surface(), P_FLAT),
        ]:
            for u, v, jet in random_samples(surface, rng, 8, params=params):
                assert abs(metric(params, jet.T, jet.T) - jet.sin_alpha ** 2) < 1e-9
                e3 = TangentVector(jet.p, (0, 0, 1))
                resid = (e3 - jet.T - jet.cos_alpha * jet.N).comps
                assert np.abs(resid).max() < 1e-10
                assert abs(metric(params, jet.N, jet.N) - 1.0) < 1e-10
                assert abs(metric(params, jet.N, jet.X_u)) < 1e-10
                assert abs(metric(params, jet.N, jet.X_v)) < 1e-10

    def test_quarter_turn_isometry(self, rng):
        S = generic_revolution_surface(P_NIL)
        for u, v, jet in random_samples(S, rng, 10):
            a, b = rng.normal(size=2)
            X = a * jet.X_u + b * jet.X_v
            JX = cross(P_NIL, jet.N, X)
            assert abs(metric(P_NIL, JX, JX) - metric(P_NIL, X, X)) < 1e-9
            assert abs(metric(P_NIL, JX, X)) < 1e-9

    def test_degenerate_chart_rejected(self):
        S = ParametricSurface(lambda u, v: (u + v, u + v, 0.0), ((0, 1), (0, 1)))
        with pytest.raises(DegenerateSurfaceError):
            surface_jet(S, P_FLAT, 0.5, 0.5)


class TestShapeOperator:
    def test_plane_totally_geodesic(self):
        sh = shape_operator(flat_plane(), P_FLAT, 0.1, 0.2)
        assert np.abs(sh.A).max() < 1e-10
        assert abs(sh.f) < 1e-10

    @pytest.mark.parametrize("tau,r0", [(0.5, 1.0), (0.7, 1.3), (0.25, 2.0)])
    def test_cylinder_matrix(self, tau, r0):
        P = BcvParams(0.0, tau)
        S = hopf_cylinder(P, r0)
        sh = shape_operator(S, P, 0.8, 0.2)
        expected = np.array([[0.0, -tau], [-tau, 1.0 / r0]])
        assert np.abs(sh.A - expected).max() < 1e-4
        assert sh.f == pytest.approx(1.0 / r0, abs=1e-6)
        assert sh.lam == pytest.approx(1.0 / r0, abs=1e-6)

    def test_symmetry(self, rng):
        for surface, params in [
            (slant_surface(), P_NIL),
            (generic_revolution_surface(P_NIL), P_NIL),
            (hopf_tube(P_NIL, *ellipse_curve(1.6, 1.0)), P_NIL),
        ]:
            for u, v, _ in random_samples(surface, rng, 5, params=params):
                sh = shape_operator(surface, params, u, v)
                assert abs(sh.A[0, 1] - sh.A[1, 0]) < 1e-6

    def test_offdiagonal_matches_angle_derivative(self, rng):
        S = slant_surface()
        afld = alpha_field(S, P_NIL)
        for u, v, jet in random_samples(S, rng, 5, sin_floor=0.2):
            sh = shape_operator(S, P_NIL, u, v)
            e2a = directional_derivative(S, P_NIL, u, v, afld, jet.e2, jet=jet)
            assert abs(sh.A[0, 1] - (e2a - P_NIL.tau)) < 1e-4


class TestFields:
    def test_constant_field(self):
        S = flat_plane()
        c = ScalarField(lambda u, v: 3.25)
        assert norm(P_FLAT, surface_gradient(c, S, P_FLAT, 0.1, 0.4)) < 1e-12
        assert abs(surface_laplacian(c, S, P_FLAT, 0.1, 0.4)) < 1e-12

    def test_coordinate_gradient(self):
        S = flat_plane()
        fld = ScalarField(lambda u, v: u)
        g = surface_gradient(fld, S, P_FLAT, 0.2, -0.3)
        assert np.allclose(g.comps, [1.0, 0.0, 0.0], atol=1e-10)

    def test_flat_laplacian_sign(self):
        S = flat_plane()
        fld = ScalarField(lambda u, v: u * u + v * v)
        val = surface_laplacian(fld, S, P_FLAT, 0.2, -0.3)
        assert val == pytest.approx(-4.0, abs=1e-6)

    def test_sphere_eigenfunction(self):
        # cos(polar angle) is a first spherical harmonic: with the
        # Delta = -div grad convention its Laplacian is +2 cos(u) on the
        # unit sphere.
        S = sphere_surface(1.0)
        fld = ScalarField(lambda u, v: math.cos(u))
        for u in (0.8, 1.4, 2.2):
            val = surface_laplacian(fld, S, P_FLAT, u, 0.9)
            assert val == pytest.approx(2.0 * math.cos(u), abs=1e-4)


class TestCurvatureResiduals:
    def test_plane_gauss_zero(self):
        assert abs(gauss_residual(flat_plane(), P_FLAT, 0.1, 0.2)) < 1e-8

    def test_sphere_intrinsic_curvature(self):
        S = sphere_surface(1.0)
        assert brioschi_curvature(S, P_FLAT, 1.1, 0.8) == pytest.approx(1.0, abs=1e-5)
        assert abs(gauss_residual(S, P_FLAT, 1.1, 0.8)) < 1e-5

    def test_cylinder_gauss_closed_forms(self):
        P = BcvParams(0.0, 0.5)
        S = hopf_cylinder(P, 1.0)
        sh = shape_operator(S, P, 0.8, 0.2)
        assert np.linalg.det(sh.A) == pytest.approx(-P.tau ** 2, abs=1e-6)
        assert abs(brioschi_curvature(S, P, 0.8, 0.2)) < 1e-6
        assert abs(gauss_residual(S, P, 0.8, 0.2)) < 1e-4

    def test_gauss_residual_grid(self, rng):
        S = slant_surface()
        for u, v, _ in random_samples(S, rng, 12):
            assert abs(gauss_residual(S, P_NIL, u, v)) < 1e-4

    def test_codazzi_cylinder(self):
        P = BcvParams(0.0, 0.5)
        S = hopf_cylinder(P, 1.0)
        r1, r2 = codazzi_residual(S, P, 0.8, 0.2)
        assert abs(r1) < 1e-4
        assert abs(r2) < 1e-4

    def test_codazzi_random_surfaces(self, rng):
        for surface, params in [
            (slant_surface(), P_NIL),
            (generic_revolution_surface(P_NIL), P_NIL),
        ]:
            for u, v, jet in random_samples(surface, rng, 6, sin_floor=0.15, params=params):
                if abs(jet.cos_alpha / jet.sin_alpha) > 10:
                    continue
                r1, r2 = codazzi_residual(surface, params, u, v)
                assert abs(r1) < 1e-3
                assert abs(r2) < 1e-3

    def test_compatibility_plane(self):
        S = flat_plane()
        jet = surface_jet(S, P_FLAT, 0.1, 0.2)
        vec, sc = compatibility_residual(S, P_FLAT, 0.1, 0.2, jet.X_u)
        assert norm(P_FLAT, vec) < 1e-10
        assert abs(sc) < 1e-10

    def test_compatibility_cylinder_vertical(self):
        P = BcvParams(0.0, 0.5)
        S = hopf_cylinder(P, 1.0)
        jet = surface_jet(S, P, 0.8, 0.2)
        vec, sc = compatibility_residual(S, P, 0.8, 0.2, jet.e1)
        assert norm(P, vec) < 1e-5
        assert abs(sc) < 1e-5

    def test_compatibility_generic(self, rng):
        S = slant_surface()
        for u, v, jet in random_samples(S, rng, 6, sin_floor=0.15):
            vec, sc = compatibility_residual(S, P_NIL, u, v, jet.e2)
            assert norm(P_NIL, vec) < 1e-4
            assert abs(sc) < 1e-4

    def test_surface_connection_closed_forms(self, rng):
        S = slant_surface()
        for u, v, jet in random_samples(S, rng, 5, sin_floor=0.15):
            if abs(jet.cos_alpha / jet.sin_alpha) > 10:
                continue
            assert surface_connection_residual(S, P_NIL, u, v) < 1e-3
