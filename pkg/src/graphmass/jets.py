"""Order-3 jets of scalar fields on R^n.

A :class:`Jet3` carries the value, gradient, Hessian, and totally symmetric
third-derivative tensor of a function at one point or at a batch of points
(all arrays share an arbitrary leading batch shape).  Jets propagate through
expression trees by forward-mode rules:

* product:   (fg)''' = f''' g + 3 sym(f'' o g') + 3 sym(f' o g'') + f g'''
* scalar chain rule for phi(w):
      h_i   = phi' w_i
      h_ij  = phi'' w_i w_j + phi' w_ij
      h_ijk = phi''' w_i w_j w_k
              + phi'' (w_ij w_k + w_ik w_j + w_jk w_i) + phi' w_ijk

Symmetry of the Hessian and third tensor is enforced by construction: every
rule above produces symmetric output from symmetric input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expr as ex
from .errors import DomainError, UnboundParameterError

_EPS = np.finfo(float).eps


# ----------------------------------------------------------------------
# jet container and algebra
# ----------------------------------------------------------------------

def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...j->...ij", a, b)


def _outer3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...j,...k->...ijk", a, b, c)


def _sym_vec_mat(v: np.ndarray, m: np.ndarray) -> np.ndarray:
    """v_i m_jk + v_j m_ik + v_k m_ij (symmetric if m is)."""
    return (np.einsum("...i,...jk->...ijk", v, m)
            + np.einsum("...j,...ik->...ijk", v, m)
            + np.einsum("...k,...ij->...ijk", v, m))


@dataclass
class Jet3:
    """Value and derivatives to order 3 at a (batch of) point(s)."""

    value: np.ndarray   # shape B
    grad: np.ndarray    # shape B + (n,)
    hess: np.ndarray    # shape B + (n, n)
    third: np.ndarray   # shape B + (n, n, n)

    @property
    def n(self) -> int:
        return self.grad.shape[-1]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.value.shape

    def __add__(self, other):
        if isinstance(other, Jet3):
            return Jet3(self.value + other.value, self.grad + other.grad,
                        self.hess + other.hess, self.third + other.third)
        return Jet3(self.value + other, self.grad.copy(), self.hess.copy(),
                    self.third.copy())

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.value, -self.grad, -self.hess, -self.third)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet3) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet3):
            return Jet3(self.value * other, self.grad * other,
                        self.hess * other, self.third * other)
        a, b = self, other
        av = a.value[..., None]
        bv = b.value[..., None]
        cross = _outer(a.grad, b.grad)
        hess = (av[..., None] * b.hess + bv[..., None] * a.hess
                + cross + np.swapaxes(cross, -1, -2))
        third = (av[..., None, None] * b.third + bv[..., None, None] * a.third
                 + _sym_vec_mat(b.grad, a.hess) + _sym_vec_mat(a.grad, b.hess))
        return Jet3(a.value * b.value, av * b.grad + bv * a.grad, hess, third)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return self * jet_recip(other)
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return jet_recip(self) * other

    def __pow__(self, exponent):
        return jet_pow(self, float(exponent))

    def check_finite(self, context: str = "jet") -> "Jet3":
        for part in (self.value, self.grad, self.hess, self.third):
            if not np.all(np.isfinite(part)):
                raise DomainError(f"non-finite derivatives in {context}")
        return self


def jet_const(value, n: int, batch_shape: tuple[int, ...] = ()) -> Jet3:
    v = np.broadcast_to(np.asarray(value, float), batch_shape).copy()
    return Jet3(v, np.zeros(batch_shape + (n,)),
                np.zeros(batch_shape + (n, n)),
                np.zeros(batch_shape + (n, n, n)))


def jet_coord(points: np.ndarray, index: int) -> Jet3:
    """Jet of the coordinate function x_{index} (0-based) at ``points``."""
    pts = np.asarray(points, float)
    n = pts.shape[-1]
    batch = pts.shape[:-1]
    grad = np.zeros(batch + (n,))
    grad[..., index] = 1.0
    return Jet3(pts[..., index].copy(), grad, np.zeros(batch + (n, n)),
                np.zeros(batch + (n, n, n)))


def jet_compose(w: Jet3, d0, d1, d2, d3) -> Jet3:
    """Chain rule for phi(w) given derivative values d0..d3 of phi at w."""
    g, h = w.grad, w.hess
    d1e = np.asarray(d1)[..., None]
    d2e = np.asarray(d2)[..., None, None]
    hess = d2e * _outer(g, g) + d1e[..., None] * h
    third = (np.asarray(d3)[..., None, None, None] * _outer3(g, g, g)
             + d2e[..., None] * _sym_vec_mat(g, h)
             + d1e[..., None, None] * w.third)
    return Jet3(np.broadcast_to(np.asarray(d0, float), w.value.shape).copy(),
                d1e * g, hess, third)


def jet_recip(w: Jet3) -> Jet3:
    v = w.value
    if np.any(v == 0.0):
        raise DomainError("division by zero")
    inv = 1.0 / v
    return jet_compose(w, inv, -inv ** 2, 2 * inv ** 3, -6 * inv ** 4)


def jet_sqrt(w: Jet3) -> Jet3:
    v = w.value
    if np.any(v <= 0.0):
        raise DomainError("sqrt of a non-positive value")
    s = np.sqrt(v)
    return jet_compose(w, s, 0.5 / s, -0.25 * v ** -1.5, 0.375 * v ** -2.5)


def jet_exp(w: Jet3) -> Jet3:
    e = np.exp(w.value)
    return jet_compose(w, e, e, e, e)


def jet_log(w: Jet3) -> Jet3:
    v = w.value
    if np.any(v <= 0.0):
        raise DomainError("log of a non-positive value")
    return jet_compose(w, np.log(v), 1.0 / v, -v ** -2.0, 2 * v ** -3.0)


def jet_sin(w: Jet3) -> Jet3:
    s, c = np.sin(w.value), np.cos(w.value)
    return jet_compose(w, s, c, -s, -c)


def jet_cos(w: Jet3) -> Jet3:
    s, c = np.sin(w.value), np.cos(w.value)
    return jet_compose(w, c, -s, -c, s)


def jet_pow(w: Jet3, c: float) -> Jet3:
    """w**c for a constant exponent c."""
    if c == 0.0:
        return jet_const(1.0, w.n, w.batch_shape)
    if c == 1.0:
        return Jet3(w.value.copy(), w.grad.copy(), w.hess.copy(),
                    w.third.copy())
    v = w.value
    integral = float(c).is_integer()
    if not integral and np.any(v <= 0.0):
        raise DomainError(f"non-integer power {c} of a non-positive value")
    if integral and c < 0 and np.any(v == 0.0):
        raise DomainError(f"negative power {c} of zero")
    coef1 = c
    coef2 = c * (c - 1)
    coef3 = c * (c - 1) * (c - 2)
    d0 = np.power(v, c)
    d1 = coef1 * np.power(v, c - 1)
    d2 = coef2 * np.power(v, c - 2) if coef2 != 0 else np.zeros_like(v)
    d3 = coef3 * np.power(v, c - 3) if coef3 != 0 else np.zeros_like(v)
    return jet_compose(w, d0, d1, d2, d3)


# ----------------------------------------------------------------------
# expression evaluation
# ----------------------------------------------------------------------

def _radius_sq_jet(points: np.ndarray) -> Jet3:
    pts = np.asarray(points, float)
    batch = pts.shape[:-1]
    n = pts.shape[-1]
    hess = np.broadcast_to(2.0 * np.eye(n), batch + (n, n)).copy()
    return Jet3(np.sum(pts * pts, axis=-1), 2.0 * pts, hess,
                np.zeros(batch + (n, n, n)))


def eval_jet_many(node: ex.Expr, params: dict[str, float] | None,
                  points: np.ndarray) -> Jet3:
    """Order-3 jet of the expression at a batch of points, shape (..., n)."""
    pts = np.asarray(points, float)
    n = pts.shape[-1]
    bindings = params or {}

    def walk(e: ex.Expr) -> Jet3:
        match e:
            case ex.Num(v):
                return jet_const(v, n, pts.shape[:-1])
            case ex.Coord(i):
                return jet_coord(pts, i - 1)
            case ex.Radial():
                q = _radius_sq_jet(pts)
                if np.any(q.value <= 0.0):
                    raise DomainError("'r' is singular at the origin")
                return jet_sqrt(q)
            case ex.Param(name):
                if name not in bindings:
                    raise UnboundParameterError(
                        f"parameter {name!r} is not bound")
                return jet_const(bindings[name], n, pts.shape[:-1])
            case ex.Neg(a):
                return -walk(a)
            case ex.Add(a, b):
                return walk(a) + walk(b)
            case ex.Sub(a, b):
                return walk(a) - walk(b)
            case ex.Mul(a, b):
                return walk(a) * walk(b)
            case ex.Div(a, b):
                return _with_context(lambda: walk(a) / walk(b), e)
            case ex.Pow(a, c):
                return _with_context(lambda: jet_pow(walk(a), c), e)
            case ex.Call(fn, a):
                op = {"sqrt": jet_sqrt, "exp": jet_exp, "log": jet_log,
                      "sin": jet_sin, "cos": jet_cos}[fn]
                return _with_context(lambda: op(walk(a)), e)
        raise TypeError(f"not an expression node: {e!r}")

    return walk(node).check_finite(f"'{ex.to_text(node)}'")


def _with_context(thunk: Callable[[], Jet3], node: ex.Expr) -> Jet3:
    try:
        return thunk()
    except DomainError as err:
        raise DomainError(f"{err} in '{ex.to_text(node)}'") from None


def eval_jet(node: ex.Expr, params: dict[str, float] | None,
             point: Sequence[float]) -> Jet3:
    """Order-3 jet of the expression at a single point."""
    return eval_jet_many(node, params, np.asarray(point, float))


def eval_value_many(node: ex.Expr, params: dict[str, float] | None,
                    points: np.ndarray) -> np.ndarray:
    """Values only (used by the finite-difference oracle)."""
    pts = np.asarray(points, float)
    bindings = params or {}

    def walk(e: ex.Expr) -> np.ndarray:
        match e:
            case ex.Num(v):
                return np.broadcast_to(v, pts.shape[:-1]).astype(float)
            case ex.Coord(i):
                return pts[..., i - 1]
            case ex.Radial():
                return np.sqrt(np.sum(pts * pts, axis=-1))
            case ex.Param(name):
                if name not in bindings:
                    raise UnboundParameterError(
                        f"parameter {name!r} is not bound")
                return np.broadcast_to(bindings[name],
                                       pts.shape[:-1]).astype(float)
            case ex.Neg(a):
                return -walk(a)
            case ex.Add(a, b):
                return walk(a) + walk(b)
            case ex.Sub(a, b):
                return walk(a) - walk(b)
            case ex.Mul(a, b):
                return walk(a) * walk(b)
            case ex.Div(a, b):
                den = walk(b)
                if np.any(den == 0.0):
                    raise DomainError(f"division by zero in '{ex.to_text(e)}'")
                return walk(a) / den
            case ex.Pow(a, c):
                base = walk(a)
                if not float(c).is_integer() and np.any(base <= 0.0):
                    raise DomainError(
                        f"non-integer power of non-positive value in "
                        f"'{ex.to_text(e)}'")
                return np.power(base, c)
            case ex.Call(fn, a):
                v = walk(a)
                if fn == "sqrt":
                    if np.any(v < 0.0):
                        raise DomainError(
                            f"sqrt of negative value in '{ex.to_text(e)}'")
                    return np.sqrt(v)
                if fn == "log":
                    if np.any(v <= 0.0):
                        raise DomainError(
                            f"log of non-positive value in '{ex.to_text(e)}'")
                    return np.log(v)
                return getattr(np, fn)(v)
        raise TypeError(f"not an expression node: {e!r}")

    return walk(node)


# ----------------------------------------------------------------------
# radial profiles
# ----------------------------------------------------------------------

@dataclass
class RadialProfile:
    """1-D profile f(r) with derivatives to order 3; defined for r > r_min.

    The callables must accept numpy arrays.
    """

    f: Callable[[np.ndarray], np.ndarray]
    fr: Callable[[np.ndarray], np.ndarray]
    frr: Callable[[np.ndarray], np.ndarray]
    frrr: Callable[[np.ndarray], np.ndarray]
    r_min: float = 0.0
    label: str = "profile"


def _graded_gauss_value(fr: Callable, r_min: float,
                        order: int = 24) -> Callable:
    """Antiderivative of fr from the substitution-regularized lower end.

    With an inverse-square-root singularity of fr at r_min, substituting
    s = r_min + t^2 makes the integrand smooth, so plain Gauss panels on t
    converge fast.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)

    def value(r):
        r = np.asarray(r, float)
        out = np.zeros_like(r)
        flat = out.reshape(-1)
        for idx, ri in enumerate(np.ravel(r)):
            T = math.sqrt(max(ri - r_min, 0.0))
            if T == 0.0:
                flat[idx] = 0.0
                continue
            n_panels = max(4, int(math.ceil(T)))
            edges = np.linspace(0.0, T, n_panels + 1)
            lo, hi = edges[:-1, None], edges[1:, None]
            t = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            w = 0.5 * (hi - lo) * weights
            flat[idx] = float(np.sum(w * 2.0 * t * fr(r_min + t * t)))
        return out if out.shape else float(flat[0])

    return value


def profile_from_gradsq(u: Callable, du: Callable, d2u: Callable,
                        r_min: float = 0.0, branch: int = -1,
                        label: str = "profile") -> RadialProfile:
    """Profile with prescribed squared slope u(r) = f_r(r)^2 >= 0.

    ``branch`` selects the sign of f_r.  The value f(r) is recovered by
    integrating |f_r| from r_min with a singularity-absorbing substitution.
    """
    sign = 1.0 if branch > 0 else -1.0

    def fr(r):
        ur = np.asarray(u(r), float)
        if np.any(ur < 0.0):
            raise DomainError(f"negative squared slope in {label}")
        return sign * np.sqrt(ur)

    def frr(r):
        return sign * du(r) / (2.0 * np.sqrt(u(r)))

    def frrr(r):
        ur = u(r)
        dur = du(r)
        return sign * (d2u(r) / (2.0 * np.sqrt(ur))
                       - dur * dur / (4.0 * np.power(ur, 1.5)))

    antider = _graded_gauss_value(lambda r: np.sqrt(np.maximum(u(r), 0.0)),
                                  r_min)

    def f(r):
        return sign * antider(r)

    return RadialProfile(f, fr, frr, frrr, r_min=r_min, label=label)


def schwarzschild_profile(m: float, n: int, branch: int = -1) -> RadialProfile:
    """Profile with f_r^2 = 2m/(r^{n-2} - 2m); horizon at r = (2m)^{1/(n-2)}.

    For n = 3, 4 the antiderivative is closed-form; higher n integrates
    numerically.  ``branch=+1`` gives the increasing branch.
    """
    if n < 3:
        raise ValueError("dimension must be >= 3")
    if m <= 0:
        raise ValueError("mass must be positive")
    a = (2.0 * m) ** (1.0 / (n - 2))
    sign = 1.0 if branch > 0 else -1.0

    def u(r):
        return 2.0 * m / (np.power(r, n - 2) - 2.0 * m)

    def du(r):
        p = np.power(r, n - 2) - 2.0 * m
        return -2.0 * m * (n - 2) * np.power(r, n - 3) / (p * p)

    def d2u(r):
        p = np.power(r, n - 2) - 2.0 * m
        dp = (n - 2) * np.power(r, n - 3)
        d2p = (n - 2) * (n - 3) * np.power(r, max(n - 4, 0)) if n > 3 \
            else np.zeros_like(np.asarray(r, float))
        return 2.0 * m * (2.0 * dp * dp - p * d2p) / (p * p * p)

    prof = profile_from_gradsq(u, du, d2u, r_min=a, branch=branch,
                               label=f"schwarzschild(n={n}, m={m})")
    if n == 3:
        prof.f = lambda r: sign * np.sqrt(8.0 * m * (np.asarray(r, float)
                                                     - 2.0 * m))
    elif n == 4:
        s2m = math.sqrt(2.0 * m)

        def f4(r):
            r = np.asarray(r, float)
            return sign * s2m * np.log((r + np.sqrt(r * r - 2.0 * m)) / s2m)

        prof.f = f4
    return prof


# ----------------------------------------------------------------------
# radial jets
# ----------------------------------------------------------------------

def radial_jet(profile: RadialProfile, point, center=None,
               with_value: bool = True) -> Jet3:
    """Jet of f(|x - center|) from the 1-D profile derivatives.

    Uses the radial decomposition (u = (x-c)/r):
        grad  = f_r u
        hess  = f_rr u o u + (f_r / r)(I - u o u)
        third = f_rrr u o u o u + (f_rr/r - f_r/r^2) sym3(I, u)
    where sym3(I, u)_ijk = d_ij u_k + d_ik u_j + d_jk u_i - 3 u_i u_j u_k.
    """
    pts = np.asarray(point, float)
    n = pts.shape[-1]
    if center is not None:
        pts = pts - np.asarray(center, float)
    r = np.sqrt(np.sum(pts * pts, axis=-1))
    if np.any(r <= profile.r_min):
        raise DomainError(
            f"radius {float(np.min(r)):.6g} inside r_min={profile.r_min:.6g} "
            f"of {profile.label}")
    u = pts / r[..., None]
    # quadrature batches repeat a handful of radii over many directions,
    # so evaluate the 1-d profile once per distinct radius
    uniq, inverse = np.unique(r.reshape(-1), return_inverse=True)

    def per_radius(fn):
        return np.asarray(fn(uniq), float)[inverse].reshape(r.shape)

    fr = per_radius(profile.fr)
    frr = per_radius(profile.frr)
    frrr = per_radius(profile.frrr)
    eye = np.eye(n)
    uu = _outer(u, u)
    proj = eye - uu
    hess = frr[..., None, None] * uu + (fr / r)[..., None, None] * proj
    sym = (_sym_vec_mat(u, np.broadcast_to(eye, uu.shape))
           - 3.0 * _outer3(u, u, u))
    third = (frrr[..., None, None, None] * _outer3(u, u, u)
             + (frr / r - fr / r ** 2)[..., None, None, None] * sym)
    value = per_radius(profile.f) if with_value else np.zeros_like(r)
    return Jet3(value, fr[..., None] * u, hess, third).check_finite(
        profile.label)


# ----------------------------------------------------------------------
# scalar fields
# ----------------------------------------------------------------------

class ScalarField:
    """A scalar function on (a region of) R^n exposing order-3 jets."""

    n: int

    def value(self, points) -> np.ndarray:
        raise NotImplementedError

    def jet3_many(self, points) -> Jet3:
        raise NotImplementedError

    def jet3(self, point) -> Jet3:
        return self.jet3_many(np.asarray(point, float))

    def contains(self, points) -> np.ndarray:
        """Boolean mask of points inside the field's domain."""
        pts = np.asarray(points, float)
        return np.ones(pts.shape[:-1], dtype=bool)


class ExprField(ScalarField):
    """Field defined by a parsed expression."""

    def __init__(self, expression: ex.Expr | str, n: int,
                 params: dict[str, float] | None = None):
        if isinstance(expression, str):
            expression = ex.parse(expression, n)
        missing = [p for p in ex.param_names(expression)
                   if p not in (params or {})]
        if missing:
            raise UnboundParameterError(
                f"parameters {missing} are not bound")
        self.expression = expression
        self.n = n
        self.params = dict(params or {})

    def value(self, points):
        return eval_value_many(self.expression, self.params, points)

    def jet3_many(self, points):
        return eval_jet_many(self.expression, self.params, points)


class RadialField(ScalarField):
    """Field f(|x - center|) defined by a radial profile."""

    def __init__(self, profile: RadialProfile, n: int, center=None,
                 domain_margin: float = 1e-9):
        self.profile = profile
        self.n = n
        self.center = (np.zeros(n) if center is None
                       else np.asarray(center, float))
        # keep jets off the exact singular radius
        self.r_inner = profile.r_min * (1.0 + domain_margin) \
            if profile.r_min > 0 else 1e-12
        self._margin = domain_margin

    def _radii(self, points):
        pts = np.asarray(points, float) - self.center
        return np.sqrt(np.sum(pts * pts, axis=-1))

    def value(self, points):
        return np.asarray(self.profile.f(self._radii(points)), float)

    def jet3_many(self, points):
        return radial_jet(self.profile, points, center=self.center)

    def contains(self, points):
        return self._radii(points) > self.r_inner


class SumField(ScalarField):
    """Pointwise sum of fields on a common R^n."""

    def __init__(self, fields: Sequence[ScalarField]):
        if not fields:
            raise ValueError("need at least one field")
        dims = {f.n for f in fields}
        if len(dims) != 1:
            raise ValueError(f"mixed dimensions {sorted(dims)}")
        self.fields = list(fields)
        self.n = fields[0].n

    def value(self, points):
        return sum(f.value(points) for f in self.fields)

    def jet3_many(self, points):
        jets = [f.jet3_many(points) for f in self.fields]
        out = jets[0]
        for j in jets[1:]:
            out = out + j
        return out

    def contains(self, points):
        mask = self.fields[0].contains(points)
        for f in self.fields[1:]:
            mask = mask & f.contains(points)
        return mask


class RotatedField(ScalarField):
    """h(x) = f(Qx) for an orthogonal matrix Q."""

    def __init__(self, base: ScalarField, rotation: np.ndarray):
        Q = np.asarray(rotation, float)
        if Q.shape != (base.n, base.n):
            raise ValueError("rotation shape mismatch")
        if not np.allclose(Q @ Q.T, np.eye(base.n), atol=1e-12):
            raise ValueError("matrix is not orthogonal")
        self.base = base
        self.Q = Q
        self.n = base.n

    def _map(self, points):
        return np.asarray(points, float) @ self.Q.T

    def value(self, points):
        return self.base.value(self._map(points))

    def jet3_many(self, points):
        j = self.base.jet3_many(self._map(points))
        Q = self.Q
        return Jet3(j.value,
                    np.einsum("...a,ai->...i", j.grad, Q),
                    np.einsum("...ab,ai,bj->...ij", j.hess, Q, Q),
                    np.einsum("...abc,ai,bj,ck->...ijk", j.third, Q, Q, Q))

    def contains(self, points):
        return self.base.contains(self._map(points))


# ----------------------------------------------------------------------
# finite-difference oracle
# ----------------------------------------------------------------------

def fd_jet(field: ScalarField, point, h: float | None = None) -> Jet3:
    """Central-difference jet, O(h^2) accurate in every component.

    Only ``field.value`` is used, so this is an independent check of the
    analytic propagation rules.
    """
    x = np.asarray(point, float)
    n = x.shape[-1]
    if x.ndim != 1:
        raise ValueError("fd_jet takes a single point")
    if h is None:
        h = _EPS ** (1.0 / 3.0) * max(1.0, float(np.max(np.abs(x))))

    offsets: dict[tuple[int, ...], int] = {}
    points: list[np.ndarray] = []

    def at(*steps: tuple[int, int]) -> int:
        """Index of the evaluation point x + h * sum(step_e * e_i)."""
        key = tuple(sorted(steps))
        if key not in offsets:
            p = x.copy()
            for axis, mult in steps:
                p[axis] += mult * h
            offsets[key] = len(points)
            points.append(p)
        return offsets[key]

    center = at()
    for i in range(n):
        at((i, 1)), at((i, -1)), at((i, 2)), at((i, -2))
        for j in range(i + 1, n):
            for si in (1, -1):
                for sj in (1, -1):
                    at((i, si), (j, sj))
            for k in range(j + 1, n):
                for si in (1, -1):
                    for sj in (1, -1):
                        for sk in (1, -1):
                            at((i, si), (j, sj), (k, sk))

    vals = np.asarray(field.value(np.stack(points)), float)

    def v(*steps):
        return vals[at(*steps)]

    grad = np.zeros(n)
    hess = np.zeros((n, n))
    third = np.zeros((n, n, n))
    for i in range(n):
        grad[i] = (v((i, 1)) - v((i, -1))) / (2 * h)
        hess[i, i] = (v((i, 1)) - 2 * vals[center] + v((i, -1))) / h ** 2
        third[i, i, i] = (v((i, 2)) - 2 * v((i, 1)) + 2 * v((i, -1))
                          - v((i, -2))) / (2 * h ** 3)
        for j in range(n):
            if j == i:
                continue
            t = (v((i, 1), (j, 1)) - 2 * v((j, 1)) + v((i, -1), (j, 1))
                 - v((i, 1), (j, -1)) + 2 * v((j, -1))
                 - v((i, -1), (j, -1))) / (2 * h ** 3)
            third[i, i, j] = third[i, j, i] = third[j, i, i] = t
        for j in range(i + 1, n):
            hess[i, j] = hess[j, i] = (
                v((i, 1), (j, 1)) - v((i, 1), (j, -1))
                - v((i, -1), (j, 1)) + v((i, -1), (j, -1))) / (4 * h ** 2)
            for k in range(j + 1, n):
                acc = 0.0
                for si in (1, -1):
                    for sj in (1, -1):
                        for sk in (1, -1):
                            acc += si * sj * sk * v((i, si), (j, sj), (k, sk))
                t = acc / (8 * h ** 3)
                for perm in ((i, j, k), (i, k, j), (j, i, k), (j, k, i),
                             (k, i, j), (k, j, i)):
                    third[perm] = t
    return Jet3(np.asarray(vals[center]), grad, hess, third)


# ----------------------------------------------------------------------
# decay diagnostics
# ----------------------------------------------------------------------

@dataclass
class FlatnessReport:
    """Scaled derivative suprema by radius; bounded columns support decay.

    Column c_k(R) = sup_dirs |D^k f| * R^(k - 1 + p/2); the asymptotic
    decay hypothesis with rate p predicts each column stays bounded.
    """

    p: float
    radii: np.ndarray
    grad_sup: np.ndarray
    hess_sup: np.ndarray
    third_sup: np.ndarray
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return not any(self.flags.values())


def flatness_report(field: ScalarField, p: float, radii,
                    n_dirs: int = 64, seed: int = 7) -> FlatnessReport:
    """Probe |grad f| r^{p/2}, |hess f| r^{1+p/2}, |D^3 f| r^{2+p/2}."""
    radii = np.sort(np.asarray(radii, float))
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n_dirs, field.n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    cols = {"grad": [], "hess": [], "third": []}
    for r in radii:
        jet = field.jet3_many(r * dirs)
        cols["grad"].append(np.max(np.abs(jet.grad)) * r ** (p / 2))
        cols["hess"].append(np.max(np.abs(jet.hess)) * r ** (1 + p / 2))
        cols["third"].append(np.max(np.abs(jet.third)) * r ** (2 + p / 2))
    arrays = {k: np.asarray(v) for k, v in cols.items()}
    flags = {}
    for name, col in arrays.items():
        floor = 1e-14 * (1.0 + float(col.max(initial=0.0)))
        tail_rising = bool(len(col) >= 3 and col[-1] > col[len(col) // 2]
                           and col[-1] > col[-2])
        flags[name] = bool(col[-1] > max(2.0 * col.min(), floor)
                           and tail_rising)
    return FlatnessReport(p=p, radii=radii, grad_sup=arrays["grad"],
                          hess_sup=arrays["hess"], third_sup=arrays["third"],
                          flags=flags)
