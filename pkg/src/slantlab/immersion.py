"""Expression-defined immersions and the differential data sampled from them."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import expr as ex
from .ambient import AmbientManifold
from .errors import ImmersionDegenerate, PointOutsideChart, ValidationError

RANK_TOL = 1e-8


@dataclass
class AdaptedFrame:
    point: np.ndarray  # parameter point
    image: np.ndarray  # ambient point f(p)
    E: np.ndarray  # m x d, g-orthonormal tangent frame
    Xi: np.ndarray  # m x (m - d), g-orthonormal normal frame
    B: np.ndarray  # d x d, E = J @ B
    gram_log: dict = field(default_factory=dict)


class PointGeometry:
    """Everything needed at one parameter point: jet, ambient metric and connection, frame."""

    def __init__(self, chart: ImmersionChart, p):
        self.chart = chart
        self.p = np.asarray(p, dtype=float)
        self.f, self.J, self.H = chart.jet(self.p)
        M = chart.ambient
        self.G = M.metric_at(self.f)
        self.gamma = M.christoffel_at(self.f)
        self.F = M.F
        self.gM = self.J.T @ self.G @ self.J
        self.gM_inv = np.linalg.inv(self.gM)
        self._frame = None

    # --------------------------------------------------------------- splitting

    def tangent_coeffs(self, V):
        """Parameter-basis coefficients of the tangential part of ambient vector V."""
        return self.gM_inv @ (self.J.T @ (self.G @ V))

    def normal_part(self, V):
        return V - self.J @ self.tangent_coeffs(V)

    def push(self, v):
        return self.J @ v

    def gamma_term(self, a, b):
        """Gamma^k_ij a^i b^j for ambient vectors a, b."""
        return np.einsum("kij,i,j->k", self.gamma, a, b)

    def second_order(self, v, w):
        """Point-local part of nabla-bar_v (J w): Hessian term plus ambient Christoffel term."""
        return np.einsum("kij,i,j->k", self.H, v, w) + self.gamma_term(self.J @ v, self.J @ w)

    def h(self, v, w):
        """Second fundamental form on parameter vectors, as an ambient normal vector."""
        return self.normal_part(self.second_order(v, w))

    def h_coords(self):
        """h(d_i, d_j) for the coordinate fields, shape (d, d, m)."""
        d = self.J.shape[1]
        eye = np.eye(d)
        out = np.empty((d, d, self.J.shape[0]))
        for i in range(d):
            for j in range(i, d):
                out[i, j] = out[j, i] = self.h(eye[i], eye[j])
        return out

    # ------------------------------------------------------------- inner products

    def g(self, a, b):
        return float(a @ self.G @ b)

    def norm(self, a):
        return float(np.sqrt(max(a @ self.G @ a, 0.0)))

    def gt(self, v, w):
        return float(v @ self.gM @ w)

    def tnorm(self, v):
        return float(np.sqrt(max(v @ self.gM @ v, 0.0)))

    # ------------------------------------------------------ structure operators

    def T(self, v):
        return self.tangent_coeffs(self.F @ (self.J @ v))

    def N(self, v):
        return self.normal_part(self.F @ (self.J @ v))

    def t(self, xi):
        return self.tangent_coeffs(self.F @ xi)

    def omega(self, xi):
        return self.normal_part(self.F @ xi)

    def A(self, xi, v):
        """Shape operator A_xi v from g(A_xi U, V) = g(h(U, V), xi)."""
        d = self.J.shape[1]
        hc = self._hc()
        form = np.array([[hc[i, j] @ self.G @ xi for j in range(d)] for i in range(d)])
        return self.gM_inv @ (form @ v)

    def _hc(self):
        if not hasattr(self, "_hcache"):
            self._hcache = self.h_coords()
        return self._hcache

    def h_fast(self, v, w):
        return np.einsum("ijk,i,j->k", self._hc(), v, w)

    @property
    def frame(self) -> AdaptedFrame:
        if self._frame is None:
            self._frame = _build_frame(self)
        return self._frame


def _build_frame(geo: PointGeometry) -> AdaptedFrame:
    J, G = geo.J, geo.G
    m, d = J.shape
    E = np.zeros((m, d))
    B = np.zeros((d, d))
    for j in range(d):
        v = J[:, j].copy()
        coeff = np.zeros(d)
        coeff[j] = 1.0
        for k in range(j):
            c = E[:, k] @ G @ v
            v -= c * E[:, k]
            coeff -= c * B[:, k]
        nrm = np.sqrt(max(v @ G @ v, 0.0))
        if nrm < RANK_TOL * max(1.0, np.sqrt(J[:, j] @ G @ J[:, j])):
            raise ImmersionDegenerate(f"Jacobian column {j} is dependent at {geo.p.tolist()}")
        E[:, j] = v / nrm
        B[:, j] = coeff / nrm
    basis = [E[:, j] for j in range(d)]
    normals = []
    used = []
    for k in range(m):
        cand = np.zeros(m)
        cand[k] = 1.0 / np.sqrt(G[k, k])
        for b in basis + normals:
            cand = cand - (b @ G @ cand) * b
        for b in basis + normals:  # second pass keeps orthogonality at roundoff level
            cand = cand - (b @ G @ cand) * b
        nrm = np.sqrt(max(cand @ G @ cand, 0.0))
        if nrm < RANK_TOL:
            continue
        normals.append(cand / nrm)
        used.append(k)
        if len(normals) == m - d:
            break
    Xi = np.array(normals).T if normals else np.zeros((m, 0))
    return AdaptedFrame(geo.p, geo.f, E, Xi, B, {"tangent_order": list(range(d)), "normal_candidates": used})


class ImmersionChart:
    """A map from a parameter box into the ambient chart, given by one expression per coordinate."""

    def __init__(
        self,
        ambient: AmbientManifold,
        params: Sequence[str],
        components: Sequence,
        domain: Sequence[Sequence[float]],
        *,
        step: float | None = None,
        name: str = "",
    ):
        self.ambient = ambient
        self.params = tuple(params)
        self.d = len(self.params)
        if self.d < 1:
            raise ValidationError("immersion.params", "need at least one parameter")
        if len(components) != ambient.dim:
            raise ValidationError(
                "immersion.components", f"{len(components)} components for a {ambient.dim}-dimensional ambient"
            )
        if self.d >= ambient.dim:
            raise ValidationError("immersion.params", "submanifold dimension must be below the ambient dimension")
        self.sources = [c if isinstance(c, str) else ex.to_source(c) for c in components]
        self.components = [ex.parse(c, self.params) if isinstance(c, str) else c for c in components]
        self.domain = np.array(domain, dtype=float)
        if self.domain.shape != (self.d, 2) or np.any(self.domain[:, 0] >= self.domain[:, 1]):
            raise ValidationError("immersion.domain", "need one [lo, hi] interval per parameter with lo < hi")
        self.name = name
        diameter = float(np.linalg.norm(self.domain[:, 1] - self.domain[:, 0]))
        self.step = step if step is not None else 1e-4 * diameter
        self._geometry = lru_cache(maxsize=8192)(self._make_geometry)

    def __repr__(self):
        return f"ImmersionChart({self.name or '?'}, d={self.d}, m={self.ambient.dim})"

    @property
    def m(self):
        return self.ambient.dim

    def jet(self, p):
        """(f(p), Jacobian m x d, Hessian stack m x d x d)."""
        p = np.asarray(p, dtype=float)
        jets = [ex.eval_jet2(c, p) for c in self.components]
        f = np.array([j.value for j in jets])
        J = np.array([j.gradient for j in jets])
        H = np.array([j.hessian for j in jets])
        if not self.ambient.contains(f):
            raise PointOutsideChart(f"image of {p.tolist()} leaves the ambient chart")
        sv = np.linalg.svd(J, compute_uv=False)
        if sv[-1] < RANK_TOL:
            raise ImmersionDegenerate(f"rank(J) < {self.d} at {p.tolist()} (smallest singular value {sv[-1]:.2e})")
        return f, J, H

    def _make_geometry(self, key):
        return PointGeometry(self, np.array(key))

    def geometry(self, p) -> PointGeometry:
        return self._geometry(tuple(float(v) for v in np.asarray(p, dtype=float)))

    def clear_cache(self):
        self._geometry.cache_clear()

    def adapted_frame(self, p) -> AdaptedFrame:
        return self.geometry(p).frame

    def interior_box(self, margin: float = 0.05):
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        w = hi - lo
        return lo + margin * w, hi - margin * w

    def sample_points(self, count: int, seed: int = 0, mode: str = "random", margin: float = 0.05) -> np.ndarray:
        lo, hi = self.interior_box(margin)
        if mode == "grid":
            axes = [np.linspace(a, b, count) for a, b in zip(lo, hi)]
            mesh = np.meshgrid(*axes, indexing="ij")
            return np.stack([m.ravel() for m in mesh], axis=1)
        rng = np.random.default_rng(seed)
        return lo + (hi - lo) * rng.random((count, self.d))


# ------------------------------------------------------------------------ fields


class Field:
    """A smooth vector-valued function on the parameter domain."""

    def value(self, p) -> np.ndarray:
        raise NotImplementedError

    def deriv(self, p, v) -> np.ndarray:
        """Directional derivative of the coefficients along parameter vector v."""
        raise NotImplementedError

    def __call__(self, p):
        return self.value(p)


class CoordinateField(Field):
    def __init__(self, index: int, dim: int):
        self.vec = np.zeros(dim)
        self.vec[index] = 1.0

    def value(self, p):
        return self.vec.copy()

    def deriv(self, p, v):
        return np.zeros_like(self.vec)


class ExprField(Field):
    """Tangent field with expression coefficients in the parameter basis d/du_i."""

    def __init__(self, coefficients: Sequence, params: Sequence[str]):
        self.params = tuple(params)
        self.sources = [c if isinstance(c, str) else ex.to_source(c) for c in coefficients]
        self.exprs = [ex.parse(c, self.params) if isinstance(c, str) else c for c in coefficients]

    def value(self, p):
        return np.array([ex.evaluate(e, p) for e in self.exprs])

    def jacobian(self, p):
        return np.array([ex.eval_jet2(e, p).gradient for e in self.exprs])

    def deriv(self, p, v):
        return self.jacobian(p) @ v


class NumericField(Field):
    """Field given by a callable; derivatives by central differences."""

    def __init__(self, func: Callable, step: float):
        self.func = func
        self.step = step

    def value(self, p):
        return np.asarray(self.func(np.asarray(p, dtype=float)), dtype=float)

    def deriv(self, p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        scale = float(np.max(np.abs(v)))
        if scale == 0.0:
            return np.zeros_like(self.value(p))
        s = self.step / scale
        return (self.value(p + s * v) - self.value(p - s * v)) / (2 * s)


def coordinate_fields(chart: ImmersionChart) -> list[CoordinateField]:
    return [CoordinateField(i, chart.d) for i in range(chart.d)]


def induced_connection(chart: ImmersionChart, X: Field, Y: Field, p):
    """Gauss split of nabla-bar_X Y: (tangent part as parameter coefficients, normal part h(X, Y))."""
    geo = chart.geometry(p)
    x, y = X.value(p), Y.value(p)
    second = geo.second_order(x, y)
    nabla = Y.deriv(p, x) + geo.tangent_coeffs(second)
    return nabla, geo.normal_part(second)


def ambient_derivative(chart: ImmersionChart, X: Field, Y: Field, p):
    """nabla-bar_X (f_* Y) computed directly as an ambient vector."""
    geo = chart.geometry(p)
    x, y = X.value(p), Y.value(p)
    return geo.J @ Y.deriv(p, x) + geo.second_order(x, y)


def ambient_field_derivative(chart: ImmersionChart, xi: Field, p, v):
    """nabla-bar_v xi for an ambient-vector-valued field xi along the immersion."""
    geo = chart.geometry(p)
    return xi.deriv(p, v) + geo.gamma_term(geo.J @ v, xi.value(p))


def lie_bracket(X: Field, Y: Field, p):
    p = np.asarray(p, dtype=float)
    return Y.deriv(p, X.value(p)) - X.deriv(p, Y.value(p))
