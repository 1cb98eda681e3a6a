"""Convex horizon components: curvatures, quermassintegrals, Penrose bound.

A body is a smooth closed convex hypersurface in R^n.  Curvature comes
from the Weingarten map of the defining function phi: with outward unit
normal m = grad phi/|grad phi| and any orthonormal tangent frame T, the
shape operator is T' (Hess phi) T / |grad phi|, whose eigenvalues are
the principal curvatures.  Surface integrals map a unit-sphere rule onto
the body with the exact area-element Jacobian of the parametrization.

Quermassintegrals are V_k = integral over the surface of sigma_k, the
binomially normalized elementary symmetric function of the principal
curvatures; V_0 is the area, V_1 = (integral of H_0)/(n-1), and V_{n-1}
equals the unit-sphere area by the degree of the Gauss map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BodyError, NonConvexError
from .jets import ScalarField
from .quad import SphereRule, sphere_rule, unit_sphere_area

_CONVEXITY_TOL = 1e-10


def _default_rule(n: int) -> SphereRule:
    return sphere_rule(n, seed=0)


def _tangent_frame(normals: np.ndarray) -> np.ndarray:
    """Orthonormal tangent vectors (N, n, n-1) via Householder frames."""
    m = normals
    npts, n = m.shape
    s = np.where(m[:, 0] >= 0.0, -1.0, 1.0)
    w = m.copy()
    w[:, 0] -= s
    wsq = np.einsum("...i,...i->...", w, w)
    H = (np.eye(n)[None, :, :]
         - 2.0 * w[:, :, None] * w[:, None, :] / wsq[:, None, None])
    return H[:, :, 1:]


class ConvexBody:
    """Base class; subclasses provide the surface map and curvature data."""

    n: int
    center: np.ndarray

    def surface_sample(self, rule: SphereRule
                       ) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature points on the boundary and their area weights."""
        raise NotImplementedError

    def shape_spectrum(self, points: np.ndarray) -> np.ndarray:
        """Principal curvatures (ascending) at on-surface points."""
        raise NotImplementedError

    def assert_on_surface(self, points: np.ndarray,
                          tol: float = 1e-10) -> None:
        raise NotImplementedError

    def outer_radius(self) -> float:
        """Radius of a center-based bounding sphere (for disjointness)."""
        raise NotImplementedError

    def _weingarten(self, points, grad, hess) -> np.ndarray:
        gn = np.linalg.norm(grad, axis=-1)
        if np.any(gn == 0.0):
            raise BodyError("defining function has a critical point "
                            "on the surface")
        m = grad / gn[:, None]
        T = _tangent_frame(m)
        S = np.einsum("...ia,...ij,...jb->...ab", T, hess, T)
        S = S / gn[:, None, None]
        kappas = np.linalg.eigvalsh(S)
        if np.min(kappas) < -_CONVEXITY_TOL:
            raise NonConvexError(
                f"principal curvature {np.min(kappas):.3e} < 0: "
                "surface is not convex")
        return kappas


@dataclass
class Sphere(ConvexBody):
    center: np.ndarray
    radius: float

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, float)
        self.radius = float(radius)
        self.n = len(self.center)
        if self.radius <= 0:
            raise BodyError("sphere radius must be positive")

    def surface_sample(self, rule):
        pts = self.center + self.radius * rule.nodes
        w = rule.weights * self.radius ** (self.n - 1)
        return pts, w

    def assert_on_surface(self, points, tol=1e-10):
        r = np.linalg.norm(np.asarray(points, float) - self.center, axis=-1)
        if np.any(np.abs(r - self.radius) > tol * max(1.0, self.radius)):
            raise BodyError("point is not on the sphere")

    def shape_spectrum(self, points):
        pts = np.atleast_2d(np.asarray(points, float))
        return np.full((len(pts), self.n - 1), 1.0 / self.radius)

    def outer_radius(self):
        return self.radius


@dataclass
class Ellipsoid(ConvexBody):
    center: np.ndarray
    semiaxes: np.ndarray

    def __init__(self, center, semiaxes):
        self.center = np.asarray(center, float)
        self.semiaxes = np.asarray(semiaxes, float)
        self.n = len(self.center)
        if self.semiaxes.shape != (self.n,):
            raise BodyError("semiaxes/center dimension mismatch")
        if np.any(self.semiaxes <= 0):
            raise BodyError("semiaxes must be positive")

    def surface_sample(self, rule):
        u = rule.nodes
        pts = self.center + u * self.semiaxes
        jac = np.prod(self.semiaxes) * np.linalg.norm(
            u / self.semiaxes, axis=1)
        return pts, rule.weights * jac

    def _phi_grad_hess(self, points):
        y = (np.asarray(points, float) - self.center)
        grad = 2.0 * y / self.semiaxes ** 2
        hess = np.broadcast_to(np.diag(2.0 / self.semiaxes ** 2),
                               (len(grad), self.n, self.n))
        return grad, hess

    def assert_on_surface(self, points, tol=1e-10):
        y = (np.asarray(points, float) - self.center) / self.semiaxes
        phi = np.einsum("...i,...i->...", y, y)
        if np.any(np.abs(phi - 1.0) > tol):
            raise BodyError("point is not on the ellipsoid")

    def shape_spectrum(self, points):
        pts = np.atleast_2d(np.asarray(points, float))
        grad, hess = self._phi_grad_hess(pts)
        return self._weingarten(pts, grad, hess)

    def outer_radius(self):
        return float(np.max(self.semiaxes))


class SmoothLevelSet(ConvexBody):
    """Boundary {phi = level} of a smooth convex sublevel set.

    ``phi`` is any ScalarField whose Hessian is positive semidefinite on
    the surface (validated by sampling at construction).  The center
    must be an interior point (phi(center) < level); the surface is
    parametrized radially from it.
    """

    def __init__(self, phi: ScalarField, level: float, center=None,
                 name: str = "levelset"):
        self.phi = phi
        self.level = float(level)
        self.n = phi.n
        self.center = (np.zeros(self.n) if center is None
                       else np.asarray(center, float))
        self.name = name
        if float(phi.value(self.center[None, :])[0]) >= self.level:
            raise BodyError("center is not interior to the level set")
        probe = _default_rule(self.n)
        radii = self._solve_radii(probe.nodes)
        self._outer = float(np.max(radii))
        pts = self.center + radii[:, None] * probe.nodes
        self.shape_spectrum(pts)  # raises NonConvexError if not convex

    def _solve_radii(self, dirs: np.ndarray) -> np.ndarray:
        lo = np.zeros(len(dirs))
        hi = np.full(len(dirs), 1.0)
        for _ in range(80):
            vals = self.phi.value(self.center + hi[:, None] * dirs)
            grow = vals < self.level
            if not grow.any():
                break
            hi[grow] *= 2.0
        else:
            raise BodyError("level set is unbounded along a ray")
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            inside = self.phi.value(self.center + mid[:, None] * dirs) \
                < self.level
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)

    def surface_sample(self, rule):
        rho = self._solve_radii(rule.nodes)
        pts = self.center + rho[:, None] * rule.nodes
        jet = self.phi.jet3_many(pts)
        gn = np.linalg.norm(jet.grad, axis=1)
        gu = np.einsum("ij,ij->i", jet.grad, rule.nodes)
        if np.any(gu <= 0.0):
            raise BodyError("surface is not star-shaped about the center")
        w = rule.weights * rho ** (self.n - 1) * gn / gu
        return pts, w

    def assert_on_surface(self, points, tol=1e-10):
        vals = self.phi.value(np.atleast_2d(np.asarray(points, float)))
        if np.any(np.abs(vals - self.level) > tol * max(1.0,
                                                        abs(self.level))):
            raise BodyError("point is not on the level set")

    def shape_spectrum(self, points):
        pts = np.atleast_2d(np.asarray(points, float))
        jet = self.phi.jet3_many(pts)
        return self._weingarten(pts, jet.grad, jet.hess)

    def outer_radius(self):
        return self._outer


def principal_curvatures(body: ConvexBody, points) -> np.ndarray:
    """Principal curvatures at surface points (ascending per point)."""
    pts = np.asarray(points, float)
    single = pts.ndim == 1
    body.assert_on_surface(pts)
    kappas = body.shape_spectrum(pts)
    return kappas[0] if single else kappas


def _elementary_all(kappas: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_d along the last axis."""
    d = kappas.shape[-1]
    e = np.zeros(kappas.shape[:-1] + (d + 1,))
    e[..., 0] = 1.0
    for i in range(d):
        k = kappas[..., i]
        top = min(i + 1, d)
        for j in range(top, 0, -1):
            e[..., j] += k * e[..., j - 1]
    return e


def sigma_j(kappas, j: int):
    """Normalized elementary symmetric function of the curvatures."""
    kap = np.asarray(kappas, float)
    single = kap.ndim == 1
    kap = np.atleast_2d(kap)
    d = kap.shape[-1]
    if not 0 <= j <= d:
        raise ValueError(f"sigma index {j} out of range 0..{d}")
    out = _elementary_all(kap)[..., j] / math.comb(d, j)
    return float(out[0]) if single else out


def quermassintegrals(body: ConvexBody,
                      rule: SphereRule | None = None) -> np.ndarray:
    """All V_k, k = 0..n-1, from a single surface-quadrature pass."""
    rule = rule or _default_rule(body.n)
    pts, w = body.surface_sample(rule)
    kappas = body.shape_spectrum(pts)
    e = _elementary_all(kappas)
    d = body.n - 1
    norms = np.array([math.comb(d, j) for j in range(d + 1)], float)
    return (w @ e) / norms


def quermassintegral(body: ConvexBody, k: int,
                     rule: SphereRule | None = None) -> float:
    if not 0 <= k <= body.n - 1:
        raise ValueError(f"quermassintegral index {k} out of range")
    return float(quermassintegrals(body, rule)[k])


def af_gap(body: ConvexBody, rule: SphereRule | None = None) -> float:
    """V_1^{n-1} - V_0^{n-2} V_{n-1}; nonnegative for convex bodies,
    zero exactly on spheres."""
    V = quermassintegrals(body, rule)
    n = body.n
    return float(V[1] ** (n - 1) - V[0] ** (n - 2) * V[n - 1])


def af_chain_gaps(body: ConvexBody, rule: SphereRule | None = None
                  ) -> list[tuple[tuple[int, int, int], float, float]]:
    """All chain inequalities V_j^{k-i} >= V_i^{k-j} V_k^{j-i}.

    Returns (indices, gap, relative_gap) per admissible (i, j, k); the
    relative gap divides by the right-hand side.
    """
    V = quermassintegrals(body, rule)
    out = []
    n = body.n
    for i in range(n - 2):
        for j in range(i + 1, n - 1):
            for k in range(j + 1, n):
                lhs = V[j] ** (k - i)
                rhs = V[i] ** (k - j) * V[k] ** (j - i)
                out.append(((i, j, k), float(lhs - rhs),
                            float((lhs - rhs) / rhs)))
    return out


@dataclass
class HorizonSet:
    """Pairwise-disjoint convex bodies acting as horizon components."""

    bodies: tuple[ConvexBody, ...]

    def __init__(self, bodies=()):
        self.bodies = tuple(bodies)
        dims = {b.n for b in self.bodies}
        if len(dims) > 1:
            raise BodyError(f"mixed dimensions {sorted(dims)}")
        for i, a in enumerate(self.bodies):
            for b in self.bodies[i + 1:]:
                gap = (np.linalg.norm(a.center - b.center)
                       - a.outer_radius() - b.outer_radius())
                if gap <= 0:
                    raise BodyError(
                        "bodies are not disjoint (bounding spheres "
                        f"overlap by {-gap:.3g})")

    def __len__(self):
        return len(self.bodies)

    def __iter__(self):
        return iter(self.bodies)

    @property
    def n(self) -> int:
        if not self.bodies:
            raise BodyError("empty horizon set has no dimension")
        return self.bodies[0].n


def penrose_bound(horizons: HorizonSet, rule: SphereRule | None = None,
                  n: int | None = None) -> float:
    """Sum over components of (1/2)(|Sigma_i|/omega_{n-1})^{(n-2)/(n-1)}."""
    if len(horizons) == 0:
        return 0.0
    n = horizons.n
    omega = unit_sphere_area(n)
    expo = (n - 2) / (n - 1)
    total = 0.0
    for body in horizons:
        area = quermassintegral(body, 0, rule)
        total += 0.5 * (area / omega) ** expo
    return total


def superadditivity_gap(areas, n: int) -> float:
    """Componentwise bound minus merged-area bound; >= 0, zero iff one part."""
    areas = [float(a) for a in areas]
    if not areas or any(a <= 0 for a in areas):
        raise ValueError("areas must be positive")
    omega = unit_sphere_area(n)
    expo = (n - 2) / (n - 1)
    left = sum(0.5 * (a / omega) ** expo for a in areas)
    right = 0.5 * (sum(areas) / omega) ** expo
    return left - right


def horizon_mean_curvature_term(horizons: HorizonSet,
                                rule: SphereRule | None = None) -> float:
    """Sum of integral(H_0)/(2(n-1) omega_{n-1}) = sum of V_1/(2 omega)."""
    if len(horizons) == 0:
        return 0.0
    omega = unit_sphere_area(horizons.n)
    return sum(quermassintegral(b, 1, rule) for b in horizons) / (2.0 * omega)
