"""Locally product Riemannian ambient spaces: flat models and products of space forms.

Every model lives in a single chart. Space-form factors use the conformal chart
``g = delta / (1 + c/4 |x|^2)^2`` so that positive, zero and negative curvature
share one closed-form metric and Christoffel formula. The structure tensor F is
constant in the chart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotLocallyProduct, PointOutsideChart, ValidationError, WrongMetricModel

ALGEBRAIC_TOL = 1e-9
FD_TOL = 1e-5


@dataclass(frozen=True)
class ProductStructure:
    """An almost product structure F (F^2 = I, F != +-I), constant in the chart."""

    kind: str
    dims: tuple
    matrix: np.ndarray = field(compare=False, repr=False)

    @classmethod
    def swap(cls, n: int) -> ProductStructure:
        """Exchange coordinate i with coordinate i + n."""
        m = np.zeros((2 * n, 2 * n))
        m[:n, n:] = np.eye(n)
        m[n:, :n] = np.eye(n)
        return cls("swap", (n,), m)

    @classmethod
    def sign(cls, m1: int, m2: int) -> ProductStructure:
        return cls("sign", (m1, m2), np.diag([1.0] * m1 + [-1.0] * m2))

    @classmethod
    def custom(cls, matrix, tol: float = ALGEBRAIC_TOL) -> ProductStructure:
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError("structure.matrix", "must be a square matrix")
        n = matrix.shape[0]
        if np.max(np.abs(matrix @ matrix - np.eye(n))) > tol:
            raise ValidationError("structure.matrix", "F^2 = I violated")
        for s in (1.0, -1.0):
            if np.max(np.abs(matrix - s * np.eye(n))) <= tol:
                raise ValidationError("structure.matrix", "F = +-I forbidden")
        return cls("custom", (n,), matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MetricModel:
    kind: str  # "flat" | "space_form_product"
    dim: int
    m1: int = 0
    c1: float = 0.0
    m2: int = 0
    c2: float = 0.0

    @classmethod
    def flat(cls, m: int) -> MetricModel:
        return cls("flat", m)

    @classmethod
    def space_form_product(cls, m1: int, c1: float, m2: int, c2: float) -> MetricModel:
        return cls("space_form_product", m1 + m2, m1, float(c1), m2, float(c2))

    @property
    def curvatures(self) -> tuple[float, float]:
        """(c1, c2); a flat model counts as the product with c1 = c2 = 0."""
        if self.kind == "flat":
            return 0.0, 0.0
        return self.c1, self.c2

    def blocks(self):
        if self.kind == "flat":
            return [(slice(0, self.dim), 0.0)]
        return [(slice(0, self.m1), self.c1), (slice(self.m1, self.dim), self.c2)]


class AmbientManifold:
    """Metric model plus almost product structure, validated as a locally product space."""

    def __init__(self, metric: MetricModel, structure: ProductStructure, *, validate: bool = True):
        if metric.dim < 2:
            raise ValidationError("ambient.dim", "must be at least 2")
        if structure.dim != metric.dim:
            raise ValidationError("ambient.structure", f"dimension {structure.dim} != ambient dimension {metric.dim}")
        self.metric = metric
        self.structure = structure
        self.F = structure.matrix
        self.dim = metric.dim
        if validate:
            self.validate()

    def __repr__(self):
        return f"AmbientManifold({self.metric!r}, {self.structure.kind}{self.structure.dims})"

    # ------------------------------------------------------------------ geometry

    def _conformal(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise PointOutsideChart(f"point has shape {x.shape}, expected ({self.dim},)")
        if not np.all(np.isfinite(x)):
            raise PointOutsideChart("non-finite coordinates")
        out = []
        for sl, c in self.metric.blocks():
            denom = 1.0 + 0.25 * c * float(x[sl] @ x[sl])
            if denom <= 0.0:
                raise PointOutsideChart(f"conformal factor undefined at {x.tolist()} (c={c})")
            out.append((sl, c, 1.0 / denom))
        return x, out

    def contains(self, x) -> bool:
        try:
            self._conformal(x)
        except PointOutsideChart:
            return False
        return True

    def chart_radius(self):
        """Per-factor radius of the admissible ball (inf for c >= 0)."""
        return [np.inf if c >= 0 else 2.0 / np.sqrt(-c) for _, c in self.metric.blocks()]

    def metric_at(self, x) -> np.ndarray:
        _, blocks = self._conformal(x)
        diag = np.empty(self.dim)
        for sl, _, lam in blocks:
            diag[sl] = lam * lam
        return np.diag(diag)

    def structure_at(self, x) -> np.ndarray:
        self._conformal(x)
        return self.F

    def christoffel_at(self, x) -> np.ndarray:
        """Gamma[k, i, j] = Gamma^k_{ij} of the Levi-Civita connection (closed form)."""
        x, blocks = self._conformal(x)
        m = self.dim
        gam = np.zeros((m, m, m))
        for sl, c, lam in blocks:
            if c == 0.0:
                continue
            # Gamma^k_ij = delta^k_i s_j + delta^k_j s_i - delta_ij s_k, s = d log(lam)
            idx = np.arange(m)[sl]
            s = np.zeros(m)
            s[idx] = -0.5 * c * lam * x[sl]
            for k in idx:
                gam[k, k, idx] += s[idx]
                gam[k, idx, k] += s[idx]
                gam[k, idx, idx] -= s[k]
        return gam

    def christoffel_fd(self, x, step: float = 1e-5) -> np.ndarray:
        """Christoffel symbols from central differences of metric_at (cross-check path)."""
        x = np.asarray(x, dtype=float)
        m = self.dim
        dg = np.zeros((m, m, m))  # dg[l, i, j] = d_l g_ij
        for l in range(m):
            e = np.zeros(m)
            e[l] = step
            dg[l] = (self.metric_at(x + e) - self.metric_at(x - e)) / (2 * step)
        ginv = np.linalg.inv(self.metric_at(x))
        # Gamma_{l i j} (first kind, lowered on l) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
        first = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
        return np.einsum("kl,lij->kij", ginv, first)

    def christoffel_derivative(self, x, step: float = 1e-4) -> np.ndarray:
        """dGamma[a, k, i, j] = d_a Gamma^k_{ij}, by central differences of the closed form."""
        x = np.asarray(x, dtype=float)
        m = self.dim
        out = np.zeros((m, m, m, m))
        for a in range(m):
            e = np.zeros(m)
            e[a] = step
            out[a] = (self.christoffel_at(x + e) - self.christoffel_at(x - e)) / (2 * step)
        return out

    def riemann_numeric(self, x, step: float = 1e-4) -> np.ndarray:
        """R[l, k, i, j] with R(d_i, d_j) d_k = R^l_{kij} d_l, built from Gamma and its derivatives."""
        gam = self.christoffel_at(x)
        dgam = self.christoffel_derivative(x, step)
        return (
            np.einsum("iljk->lkij", dgam)
            - np.einsum("jlik->lkij", dgam)
            + np.einsum("lip,pjk->lkij", gam, gam)
            - np.einsum("ljp,pik->lkij", gam, gam)
        )

    def curvature_numeric(self, x, u, v, w, step: float = 1e-4) -> np.ndarray:
        """R(u, v) w from the coordinate formula."""
        riem = self.riemann_numeric(x, step)
        return np.einsum("lkij,k,i,j->l", riem, w, u, v)

    def curvature_closed_form(self, x, u, v, w) -> np.ndarray:
        """R(u, v) w of a product of space forms, written with g and F only."""
        c1, c2 = self.metric.curvatures
        if self.metric.kind != "space_form_product" and (c1, c2) != (0.0, 0.0):
            raise WrongMetricModel("closed-form curvature needs a product of space forms")
        g = self.metric_at(x)
        F = self.F
        u, v, w = (np.asarray(a, dtype=float) for a in (u, v, w))
        fu, fv = F @ u, F @ v
        gvw, guw = v @ g @ w, u @ g @ w
        gfvw, gfuw = fv @ g @ w, fu @ g @ w
        plus = gvw * u - guw * v + gfvw * fu - gfuw * fv
        minus = gfvw * u - gfuw * v + gvw * fu - guw * fv
        return 0.25 * (c1 + c2) * plus + 0.25 * (c1 - c2) * minus

    def sectional_curvature(self, x, u, v) -> float:
        """K(u, v) = g(R(u, v) v, u) / (|u|^2 |v|^2 - g(u, v)^2)."""
        g = self.metric_at(x)
        num = self.curvature_closed_form(x, u, v, v) @ g @ u
        den = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
        return float(num / den)

    # ------------------------------------------------------------------- gates

    def gate_points(self, count: int = 8, seed: int = 0) -> np.ndarray:
        """Deterministic admissible points used by the load-time gates."""
        rng = np.random.default_rng(seed)
        pts = [np.zeros(self.dim)]
        radii = self.chart_radius()
        while len(pts) < count:
            x = np.empty(self.dim)
            for (sl, _), r in zip(self.metric.blocks(), radii):
                n = sl.stop - sl.start
                scale = 1.0 if not np.isfinite(r) else 0.6 * r / np.sqrt(n)
                x[sl] = rng.uniform(-scale, scale, n)
            pts.append(x)
        return np.array(pts)

    def compatibility_residual(self, points=None) -> float:
        """max |g(FU, FV) - g(U, V)| in matrix form, max |F^T G F - G|."""
        points = self.gate_points() if points is None else points
        F = self.F
        return max(float(np.max(np.abs(F.T @ self.metric_at(x) @ F - self.metric_at(x)))) for x in points)

    def symmetry_residual(self, points=None) -> float:
        """max |G F - (G F)^T|, i.e. g(FU, V) = g(U, FV)."""
        points = self.gate_points() if points is None else points
        return max(float(np.max(np.abs(self.metric_at(x) @ self.F - (self.metric_at(x) @ self.F).T))) for x in points)

    def validate(self, tol: float = ALGEBRAIC_TOL, fd_tol: float = FD_TOL) -> None:
        F = self.F
        if np.max(np.abs(F @ F - np.eye(self.dim))) > tol:
            raise ValidationError("structure", "F^2 = I violated")
        for s in (1.0, -1.0):
            if np.max(np.abs(F - s * np.eye(self.dim))) <= tol:
                raise ValidationError("structure", "F = +-I forbidden")
        pts = self.gate_points()
        if self.compatibility_residual(pts) > tol:
            raise NotLocallyProduct("metric compatibility g(FU, FV) = g(U, V) fails")
        if self.symmetry_residual(pts) > tol:
            raise NotLocallyProduct("F is not g-symmetric")
        report = check_structure_parallel(self, pts)
        if not report["ok"]:
            raise NotLocallyProduct(f"nabla F != 0 (residual {report['max_residual']:.3e})")


def check_structure_parallel(M: AmbientManifold, points, tol: float = FD_TOL) -> dict:
    """Residual of nabla F = 0; with constant F this is max |Gamma_k F - F Gamma_k|."""
    worst = 0.0
    for x in points:
        gam = M.christoffel_at(x)
        for k in range(M.dim):
            gk = gam[:, k, :]
            worst = max(worst, float(np.max(np.abs(gk @ M.F - M.F @ gk))))
    ok = worst <= tol
    return {
        "max_residual": worst,
        "tolerance": tol,
        "samples": len(points),
        "ok": ok,
        "flag": None if ok else "NotLocallyProduct",
    }


def is_trace_free_structure(M: AmbientManifold, points=None, tol: float = ALGEBRAIC_TOL) -> bool:
    """True iff g(F e_j, e_j) = 0 for the normalised chart basis e_j at every sampled point."""
    points = M.gate_points() if points is None else points
    for x in points:
        g = M.metric_at(x)
        gf = g @ M.F
        if np.max(np.abs(np.diag(gf) / np.diag(g))) > tol:
            return False
    return True


def flat(m: int, structure: ProductStructure) -> AmbientManifold:
    return AmbientManifold(MetricModel.flat(m), structure)


def space_form_product(m1: int, c1: float, m2: int, c2: float) -> AmbientManifold:
    return AmbientManifold(MetricModel.space_form_product(m1, c1, m2, c2), ProductStructure.sign(m1, m2))
