"""Order-3 jet propagation against finite differences and closed forms."""

from __future__ import annotations

import math

import numpy as np
import pytest

from graphmass import (
    DomainError,
    ExprField,
    RadialField,
    RadialProfile,
    RotatedField,
    SumField,
    fd_jet,
    flatness_report,
    profile_from_gradsq,
    radial_jet,
    schwarzschild_profile,
)


def sup(a):
    return float(np.max(np.abs(a)))


def jet_at(field, x):
    """Unbatched jet of a field at one point, via the batched interface."""
    j = field.jet3_many(np.asarray(x, float)[None, :])
    return j.value[0], j.grad[0], j.hess[0], j.third[0]


class TestExprJets:
    FIELD = ExprField("0.4*x1^2*x2 + sin(1.3*x2)*x3 - 0.2*exp(x3) + x1/(2+x2^2)", 3)

    def test_grad_hess_match_fd(self):
        """Value-only central differences reproduce grad and hess to ~1e-7."""
        rng = np.random.default_rng(20260817)
        for _ in range(20):
            x = rng.uniform(-0.8, 0.8, 3)
            fd = fd_jet(self.FIELD, x)
            _, g, h, _ = jet_at(self.FIELD, x)
            assert sup(fd.grad - g) <= 1e-7 * (1.0 + sup(g)), f"grad at {x}"
            assert sup(fd.hess - h) <= 1e-5 * (1.0 + sup(h)), f"hess at {x}"

    def test_third_matches_fd(self):
        """Third derivatives against a coarse step; truncation is O(h^2)."""
        rng = np.random.default_rng(7)
        for _ in range(10):
            x = rng.uniform(-0.8, 0.8, 3)
            fd = fd_jet(self.FIELD, x, h=0.02)
            _, _, _, t = jet_at(self.FIELD, x)
            assert sup(fd.third - t) <= 5e-3 * (1.0 + sup(t)), f"third at {x}"

    def test_value_matches(self):
        x = np.array([0.2, -0.4, 0.6])
        v, _, _, _ = jet_at(self.FIELD, x)
        assert v == float(self.FIELD.value(x[None, :])[0])

    def test_hessian_and_third_symmetric(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(-0.8, 0.8, (50, 3))
        j = self.FIELD.jet3_many(pts)
        assert sup(j.hess - np.swapaxes(j.hess, -1, -2)) == 0.0
        for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
            t2 = np.transpose(j.third, (0,) + tuple(p + 1 for p in perm))
            assert sup(j.third - t2) <= 1e-14 * (1.0 + sup(j.third))

    def test_fd_jet_rejects_batches(self):
        with pytest.raises(ValueError):
            fd_jet(self.FIELD, np.zeros((4, 3)))


class TestJetAlgebra:
    def test_product_rule(self):
        """Jet of u*v equals the product of the jets of u and v."""
        u = ExprField("x1^2 + sin(x2)", 3)
        v = ExprField("exp(0.3*x3) - x1", 3)
        w = ExprField("(x1^2 + sin(x2))*(exp(0.3*x3) - x1)", 3)
        pts = np.random.default_rng(5).uniform(-1, 1, (30, 3))
        ju, jv, jw = u.jet3_many(pts), v.jet3_many(pts), w.jet3_many(pts)
        jp = ju * jv
        for a, b in ((jp.value, jw.value), (jp.grad, jw.grad),
                     (jp.hess, jw.hess), (jp.third, jw.third)):
            assert sup(a - b) <= 1e-12 * (1.0 + sup(b))

    def test_sum_field(self):
        u = ExprField("x1*x2", 3)
        v = ExprField("cos(x3)", 3)
        s = SumField([u, v])
        pts = np.random.default_rng(6).uniform(-1, 1, (10, 3))
        js, ju, jv = s.jet3_many(pts), u.jet3_many(pts), v.jet3_many(pts)
        assert sup(js.grad - ju.grad - jv.grad) == 0.0
        assert sup(js.third - ju.third - jv.third) == 0.0

    def test_sum_field_rejects_mixed_dimensions(self):
        with pytest.raises(ValueError):
            SumField([ExprField("x1", 3), ExprField("x1", 4)])


class TestSchwarzschildProfile:
    def test_frozen_derivatives_n3(self):
        """Increasing branch, m=1: f_r = sqrt(2/(r-2)), so at r=4 the jet
        values are f=4, f_r=1, f_rr=-1/4, f_rrr=3/16."""
        prof = schwarzschild_profile(1.0, 3, branch=+1)
        assert float(prof.f(4.0)) == pytest.approx(4.0, abs=1e-13)
        assert float(prof.fr(4.0)) == pytest.approx(1.0, rel=1e-14)
        assert float(prof.frr(4.0)) == pytest.approx(-0.25, rel=1e-14)
        assert float(prof.frrr(4.0)) == pytest.approx(3.0 / 16.0, rel=1e-13)

    def test_decreasing_branch_flips_sign(self):
        plus = schwarzschild_profile(1.0, 3, branch=+1)
        minus = schwarzschild_profile(1.0, 3)
        for r in (2.5, 4.0, 9.0):
            assert float(minus.f(r)) == -float(plus.f(r))
            assert float(minus.fr(r)) == -float(plus.fr(r))

    def test_horizon_radius(self):
        assert schwarzschild_profile(1.0, 3).r_min == 2.0
        assert schwarzschild_profile(1.0, 4).r_min == pytest.approx(
            math.sqrt(2.0), rel=1e-15)
        assert schwarzschild_profile(0.5, 5).r_min == 1.0

    def test_closed_form_n4(self):
        """n=4 antiderivative: f = -sqrt(2m) log((r + sqrt(r^2-2m))/sqrt(2m))."""
        prof = schwarzschild_profile(0.5, 4)
        expected = -math.log(2.0 + math.sqrt(3.0))  # r=2, 2m=1
        assert float(prof.f(2.0)) == pytest.approx(expected, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            schwarzschild_profile(1.0, 2)
        with pytest.raises(ValueError):
            schwarzschild_profile(-1.0, 3)


class TestNumericAntiderivative:
    def test_matches_closed_form_n3_and_n4(self):
        """profile_from_gradsq integrates f_r numerically from the horizon;
        in n=3,4 the closed forms are available for comparison."""
        for n, m in ((3, 1.0), (4, 0.8)):
            closed = schwarzschild_profile(m, n)
            a = (2.0 * m) ** (1.0 / (n - 2))

            def u(r, m=m, n=n):
                return 2.0 * m / (np.power(r, n - 2) - 2.0 * m)

            def du(r, m=m, n=n):
                p = np.power(r, n - 2) - 2.0 * m
                return -2.0 * m * (n - 2) * np.power(r, n - 3) / (p * p)

            def d2u(r, m=m, n=n):
                p = np.power(r, n - 2) - 2.0 * m
                dp = (n - 2) * np.power(r, n - 3)
                d2p = (n - 2) * (n - 3) * np.power(r, max(n - 4, 0))
                return 2.0 * m * (2.0 * dp * dp - p * d2p) / (p * p * p)

            numeric = profile_from_gradsq(u, du, d2u, r_min=a)
            for r in (a * 1.5, a * 3.0, a * 10.0):
                c, v = float(closed.f(r)), float(numeric.f(r))
                assert abs(c - v) <= 1e-10 * (1.0 + abs(c)), (n, r, c, v)

    def test_fr_is_derivative_of_f_n5(self):
        """No closed form in n=5: check f against f_r by central difference."""
        prof = schwarzschild_profile(1.0, 5)
        h = 1e-5
        for r in (1.8, 3.0, 6.0):
            fd = (float(prof.f(r + h)) - float(prof.f(r - h))) / (2 * h)
            fr = float(prof.fr(r))
            assert abs(fd - fr) <= 1e-8 * (1.0 + abs(fr)), (r, fd, fr)

    def test_negative_slope_squared_rejected(self):
        prof = profile_from_gradsq(lambda r: 1.0 - r,
                                   lambda r: -np.ones_like(r),
                                   lambda r: np.zeros_like(r))
        with pytest.raises(DomainError):
            prof.fr(np.array([2.0]))


class TestRadialJet:
    def test_matches_expression_jet(self):
        """f(|x|) = sqrt(1+r^2) has an elementary expression form."""
        prof = RadialProfile(
            f=lambda r: np.sqrt(1.0 + r * r),
            fr=lambda r: r / np.sqrt(1.0 + r * r),
            frr=lambda r: (1.0 + r * r) ** -1.5,
            frrr=lambda r: -3.0 * r * (1.0 + r * r) ** -2.5)
        radial = RadialField(prof, 3)
        expr = ExprField("sqrt(1 + x1^2 + x2^2 + x3^2)", 3)
        pts = np.random.default_rng(9).uniform(0.3, 2.0, (40, 3))
        ja, jb = radial.jet3_many(pts), expr.jet3_many(pts)
        for a, b in ((ja.value, jb.value), (ja.grad, jb.grad),
                     (ja.hess, jb.hess), (ja.third, jb.third)):
            assert sup(a - b) <= 1e-12 * (1.0 + sup(b))

    def test_repeated_radii_batch(self):
        """Many directions at few distinct radii (the quadrature layout)."""
        prof = schwarzschild_profile(1.0, 3)
        rng = np.random.default_rng(4)
        dirs = rng.standard_normal((200, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = np.concatenate([5.0 * dirs, 8.0 * dirs])
        batch = radial_jet(prof, pts)
        single = radial_jet(prof, pts[7])
        assert sup(batch.grad[7] - single.grad) == 0.0
        assert sup(batch.third[7] - single.third) == 0.0

    def test_domain_error_inside_horizon(self):
        prof = schwarzschild_profile(1.0, 3)
        with pytest.raises(DomainError):
            radial_jet(prof, np.array([1.5, 0.0, 0.0]))

    def test_off_center(self):
        prof = schwarzschild_profile(1.0, 3)
        c = np.array([10.0, -3.0, 1.0])
        j1 = radial_jet(prof, c + np.array([4.0, 0.0, 0.0]), center=c)
        j2 = radial_jet(prof, np.array([4.0, 0.0, 0.0]))
        assert sup(j1.hess - j2.hess) == 0.0

    def test_radial_field_contains(self):
        fld = RadialField(schwarzschild_profile(1.0, 3), 3)
        pts = np.array([[3.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        assert list(fld.contains(pts)) == [True, False]


class TestRotatedField:
    def test_jets_transform_covariantly(self):
        base = ExprField("x1^2*x2 + 0.5*sin(x3)", 3)
        Q = np.linalg.qr(np.random.default_rng(12).standard_normal((3, 3)))[0]
        rot = RotatedField(base, Q)
        x = np.array([0.3, -0.5, 0.7])
        _, g_r, h_r, _ = jet_at(rot, x)
        _, g_b, h_b, _ = jet_at(base, Q @ x)
        assert sup(g_r - Q.T @ g_b) <= 1e-14 * (1.0 + sup(g_b))
        assert sup(h_r - Q.T @ h_b @ Q) <= 1e-14 * (1.0 + sup(h_b))

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            RotatedField(ExprField("x1", 3), np.diag([1.0, 2.0, 1.0]))


class TestFlatnessReport:
    def test_decaying_profile_passes(self):
        """Schwarzschild slope |f_r| ~ r^{-1/2} satisfies the p=1 decay."""
        fld = RadialField(schwarzschild_profile(1.0, 3), 3)
        rep = flatness_report(fld, p=1.0, radii=np.geomspace(10, 500, 8))
        assert rep.holds, rep.flags

    def test_growing_gradient_flagged(self):
        fld = ExprField("x1^2 + x2^2", 3)
        rep = flatness_report(fld, p=1.0, radii=np.geomspace(10, 500, 8))
        assert not rep.holds
        assert rep.flags["grad"]
