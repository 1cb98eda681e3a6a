"""Curvature and flux-field identities for graph metrics g = I + df o df."""

from __future__ import annotations

import numpy as np
import pytest

from graphmass import (
    DomainError,
    ExprField,
    RadialField,
    RadialProfile,
    RotatedField,
    boundary_integrand,
    div_field_V,
    divergence_of_V,
    flat_mean_curvature,
    induced_mean_curvature,
    make_scenario,
    mass_flux_integrand,
    metric_jet,
    scalar_curvature,
    schwarzschild_profile,
)

GENERIC = ExprField("0.3*x1^2*x2 + sin(1.1*x2)*x3 + 0.2*exp(x3)", 3)


def curvature_by_christoffel(field, x):
    """Scalar curvature of g = I + df o df assembled from first principles.

    Builds the Levi-Civita connection of the metric componentwise and
    contracts the Riemann tensor, using nothing from the closed-form
    route: only the jet of f and dense linear algebra.
    """
    x = np.asarray(x, float)
    jet = field.jet3_many(x[None, :])
    n = len(x)
    g1, H, T = jet.grad[0], jet.hess[0], jet.third[0]
    g = np.eye(n) + np.outer(g1, g1)
    ginv = np.linalg.inv(g)
    # dg[k, i, j] = d_k g_ij, d2g[l, k, i, j] = d_l d_k g_ij
    dg = np.einsum("ki,j->kij", H, g1) + np.einsum("i,kj->kij", g1, H)
    d2g = (np.einsum("lki,j->lkij", T, g1) + np.einsum("ki,lj->lkij", H, H)
           + np.einsum("li,kj->lkij", H, H) + np.einsum("i,lkj->lkij", g1, T))
    S = dg + dg.transpose(1, 0, 2) - np.moveaxis(dg, 0, 2)
    gam = 0.5 * np.einsum("kl,ijl->kij", ginv, S)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dS = d2g + d2g.transpose(0, 2, 1, 3) - np.moveaxis(d2g, 1, 3)
    dgam = (0.5 * np.einsum("mkl,ijl->mkij", dginv, S)
            + 0.5 * np.einsum("kl,mijl->mkij", ginv, dS))
    ric = (np.einsum("kkij->ij", dgam) - np.einsum("ikkj->ij", dgam)
           + np.einsum("kkm,mij->ij", gam, gam)
           - np.einsum("kim,mkj->ij", gam, gam))
    return float(np.einsum("ij,ij->", ginv, ric))


class TestScalarCurvature:
    def test_against_christoffel_assembly(self):
        """The closed form must match the connection-based computation."""
        rng = np.random.default_rng(20260817)
        for _ in range(8):
            x = rng.uniform(-0.8, 0.8, 3)
            direct = float(scalar_curvature(GENERIC, x[None, :])[0])
            assembled = curvature_by_christoffel(GENERIC, x)
            assert abs(direct - assembled) <= 1e-11 * (1.0 + abs(direct)), x

    def test_against_christoffel_assembly_n4(self):
        fld = ExprField("0.2*x1^2*x4 + 0.1*sin(x2)*x3 + 0.05*x4^3", 4)
        rng = np.random.default_rng(5)
        for _ in range(4):
            x = rng.uniform(-0.8, 0.8, 4)
            direct = float(scalar_curvature(fld, x[None, :])[0])
            assembled = curvature_by_christoffel(fld, x)
            assert abs(direct - assembled) <= 1e-11 * (1.0 + abs(direct)), x

    def test_flat_and_linear_are_exactly_zero(self):
        pts = np.random.default_rng(1).uniform(-2, 2, (20, 3))
        assert np.all(scalar_curvature(ExprField("0", 3), pts) == 0.0)
        # constant gradient: every hessian contraction vanishes identically
        linear = ExprField("2*x1 - 0.5*x2 + x3", 3)
        assert np.all(scalar_curvature(linear, pts) == 0.0)

    def test_schwarzschild_is_scalar_flat(self):
        fld = RadialField(schwarzschild_profile(1.0, 3), 3)
        rng = np.random.default_rng(3)
        dirs = rng.standard_normal((200, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = np.concatenate([r * dirs for r in (2.5, 4.0, 10.0, 50.0)])
        assert float(np.max(np.abs(scalar_curvature(fld, pts)))) <= 1e-10

    def test_rotation_invariance(self):
        """R is a scalar: R_h(x) = R_f(Qx) for h = f o Q."""
        Q = np.linalg.qr(np.random.default_rng(8).standard_normal((3, 3)))[0]
        rot = RotatedField(GENERIC, Q)
        pts = np.random.default_rng(9).uniform(-0.7, 0.7, (25, 3))
        Ra = scalar_curvature(rot, pts)
        Rb = scalar_curvature(GENERIC, pts @ Q.T)
        assert float(np.max(np.abs(Ra - Rb))) <= 1e-12 * (
            1.0 + float(np.max(np.abs(Rb))))

    def test_perturbed_profile_curvature_formula(self):
        """f_r^2 = 2m psi/(r^{n-2} - 2m psi) with psi = 1 - b e^{-(r-a)}
        gives R = 2m (n-1) r^{1-n} psi'."""
        m, beta = 1.2, 0.25
        scn = make_scenario("schwarzschild_perturbed", m=m, beta=beta)
        a = 2.0 * m * (1.0 - beta)
        pts = np.array([[3.0, 0.4, -0.2], [5.0, 1.0, 2.0], [2.1, 0.3, 0.1],
                        [0.0, 4.0, 3.0]])
        r = np.linalg.norm(pts, axis=1)
        expected = 2.0 * m * 2.0 * r ** -2 * beta * np.exp(-(r - a))
        got = scalar_curvature(scn.field, pts)
        rel = float(np.max(np.abs(got - expected) / expected))
        assert rel <= 1e-8, rel


class TestDivergenceIdentity:
    def test_div_V_equals_R(self):
        """The uncanceled quotient-rule expansion agrees with the closed
        form pointwise; they share no simplification steps."""
        rng = np.random.default_rng(13)
        pts = rng.uniform(-0.9, 0.9, (500, 3))
        dv = divergence_of_V(GENERIC, pts)
        R = scalar_curvature(GENERIC, pts)
        sup = float(np.max(np.abs(dv - R) / (1.0 + np.abs(R))))
        assert sup <= 1e-10, sup

    def test_div_V_equals_R_radial(self):
        fld = RadialField(schwarzschild_profile(0.7, 3), 3)
        rng = np.random.default_rng(14)
        dirs = rng.standard_normal((100, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = 3.0 * dirs
        dv = divergence_of_V(fld, pts)
        R = scalar_curvature(fld, pts)
        assert float(np.max(np.abs(dv - R))) <= 1e-12

    def test_V_rotation_covariance(self):
        Q = np.linalg.qr(np.random.default_rng(21).standard_normal((3, 3)))[0]
        rot = RotatedField(GENERIC, Q)
        pts = np.random.default_rng(22).uniform(-0.7, 0.7, (10, 3))
        Va = div_field_V(rot, pts)
        Vb = div_field_V(GENERIC, pts @ Q.T) @ Q
        assert float(np.max(np.abs(Va - Vb))) <= 1e-13 * (
            1.0 + float(np.max(np.abs(Vb))))


class TestMetricJet:
    def test_metric_algebra_against_linalg(self):
        """det g = 1 + |grad f|^2 and the rank-one inverse formula."""
        pts = np.random.default_rng(17).uniform(-0.8, 0.8, (30, 3))
        mj = metric_jet(GENERIC, pts)
        W = 1.0 + mj.grad_norm_sq
        dets = np.linalg.det(mj.g)
        assert float(np.max(np.abs(dets - W))) <= 1e-13 * (
            1.0 + float(np.max(W)))
        invs = np.linalg.inv(mj.g)
        assert float(np.max(np.abs(invs - mj.ginv))) <= 1e-12
        assert float(np.max(np.abs(mj.volume_factor ** 2 - W))) <= 1e-13 * (
            1.0 + float(np.max(W)))

    def test_fields_match_standalone_routes(self):
        pts = np.random.default_rng(18).uniform(-0.8, 0.8, (12, 3))
        mj = metric_jet(GENERIC, pts)
        assert np.array_equal(mj.R, scalar_curvature(GENERIC, pts))
        assert np.array_equal(mj.V, div_field_V(GENERIC, pts))

    def test_single_point_unbatches(self):
        mj = metric_jet(GENERIC, np.array([0.1, 0.2, 0.3]))
        assert isinstance(mj.R, float)
        assert mj.g.shape == (3, 3)
        assert mj.V.shape == (3,)


class TestMeanCurvature:
    def test_sphere_anchor(self):
        """For f = -|x| the level spheres have H0 = (n-1)/a with the
        outward normal -grad f/|grad f|."""
        prof = RadialProfile(
            f=lambda r: -r,
            fr=lambda r: -np.ones_like(r),
            frr=lambda r: np.zeros_like(r),
            frrr=lambda r: np.zeros_like(r))
        for n, a in ((3, 2.0), (4, 0.5)):
            fld = RadialField(prof, n)
            dirs = np.random.default_rng(n).standard_normal((50, n))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            h0 = flat_mean_curvature(fld, a * dirs)
            expected = (n - 1) / a
            assert float(np.max(np.abs(h0 - expected))) <= 1e-12 * expected

    def test_induced_is_flat_over_sqrt_W(self):
        pts = np.random.default_rng(23).uniform(0.4, 0.9, (20, 3))
        h0 = flat_mean_curvature(GENERIC, pts)
        hg = induced_mean_curvature(GENERIC, pts)
        j = GENERIC.jet3_many(pts)
        W = 1.0 + np.einsum("ij,ij->i", j.grad, j.grad)
        assert float(np.max(np.abs(hg - h0 / np.sqrt(W)))) <= 1e-13 * (
            1.0 + float(np.max(np.abs(h0))))

    def test_degenerate_gradient_raises(self):
        fld = ExprField("x1^2 + x2^2 + x3^2", 3)
        with pytest.raises(DomainError):
            flat_mean_curvature(fld, np.zeros((1, 3)))


class TestBoundaryIntegrand:
    def test_equals_V_dot_nu(self):
        pts = np.random.default_rng(31).uniform(0.3, 0.9, (40, 3))
        nu = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        bi = boundary_integrand(GENERIC, pts, nu)
        vdot = np.einsum("ij,ij->i", div_field_V(GENERIC, pts), nu)
        assert float(np.max(np.abs(bi - vdot))) <= 1e-15 * (
            1.0 + float(np.max(np.abs(vdot))))

    def test_horizon_limit_form(self):
        """With nu = -grad f/|grad f|, V.nu = |grad f|^2 H0 / W.  This is
        the identity that turns the offset-surface flux into the mean
        curvature boundary term."""
        fld = RadialField(schwarzschild_profile(1.0, 3), 3)
        rng = np.random.default_rng(32)
        dirs = rng.standard_normal((60, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for radius in (2.0 * (1.0 + 1e-6), 2.5, 6.0):
            pts = radius * dirs
            j = fld.jet3_many(pts)
            gn = np.linalg.norm(j.grad, axis=1)
            nu = -j.grad / gn[:, None]
            W = 1.0 + gn * gn
            lhs = boundary_integrand(fld, pts, nu)
            rhs = gn * gn * flat_mean_curvature(fld, pts) / W
            rel = float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs))))
            # both sides cancel intermediates of size ~W, so the rounding
            # budget grows with the gradient blow-up near the horizon
            tol = 1e-14 * (100.0 + float(np.max(W)))
            assert rel <= tol, (radius, rel, tol)

    def test_weighted_flux_is_plain_over_W(self):
        pts = np.random.default_rng(33).uniform(0.2, 0.8, (25, 3))
        nu = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        plain = mass_flux_integrand(GENERIC, pts, nu, weighted=False)
        weighted = mass_flux_integrand(GENERIC, pts, nu, weighted=True)
        j = GENERIC.jet3_many(pts)
        W = 1.0 + np.einsum("ij,ij->i", j.grad, j.grad)
        assert float(np.max(np.abs(weighted - plain / W))) <= 1e-15 * (
            1.0 + float(np.max(np.abs(plain))))
