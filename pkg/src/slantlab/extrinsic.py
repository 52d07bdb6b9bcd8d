"""Second fundamental form, shape operators, umbilicity, and the Codazzi identity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WrongMetricModel
from .immersion import Field, ImmersionChart, NumericField, ambient_field_derivative, induced_connection

ALGEBRAIC_TOL = 1e-9


@dataclass
class SecondFundamentalData:
    point: np.ndarray
    h: np.ndarray  # (m-d, d, d): h^a_ij = g(h(E_i, E_j), Xi_a)
    A: np.ndarray  # (m-d, d, d): matrix of A_{Xi_a} in the tangent frame
    H: np.ndarray  # (m-d,): mean curvature in the normal frame
    h_ambient: np.ndarray  # (d, d, m)

    @property
    def mean_curvature_norm(self) -> float:
        return float(np.linalg.norm(self.H))


def second_fundamental_form(chart: ImmersionChart, p) -> SecondFundamentalData:
    geo = chart.geometry(p)
    fr = geo.frame
    hc = geo._hc()  # coordinate fields, (d, d, m)
    B = fr.B
    h_amb = np.einsum("ai,bj,abk->ijk", B, B, hc)  # h(E_i, E_j) as ambient vectors
    h = np.einsum("ak,ijk->aij", fr.Xi.T @ geo.G, h_amb)
    h = 0.5 * (h + h.transpose(0, 2, 1))
    d = B.shape[0]
    H = np.trace(h, axis1=1, axis2=2) / d
    return SecondFundamentalData(geo.p, h, h.copy(), H, h_amb)


def normal_frame_field(chart: ImmersionChart, index: int) -> NumericField:
    return NumericField(lambda q: chart.geometry(q).frame.Xi[:, index], chart.step)


def weingarten_shape_operator(chart: ImmersionChart, p, index: int, step: float | None = None) -> np.ndarray:
    """Matrix of A_{Xi_a} in the tangent frame from A_xi U = -(nabla-bar_U xi)^T, by differencing the normal frame."""
    geo = chart.geometry(p)
    fr = geo.frame
    xi = NumericField(lambda q: chart.geometry(q).frame.Xi[:, index], step or chart.step)
    d = chart.d
    out = np.empty((d, d))
    for j in range(d):
        u = fr.B[:, j]
        dxi = ambient_field_derivative(chart, xi, p, u)
        out[:, j] = -(fr.E.T @ geo.G @ dxi)  # tangent part already in frame coordinates
    return out


def duality_residual(chart: ImmersionChart, p, step: float | None = None) -> float:
    data = second_fundamental_form(chart, p)
    worst = 0.0
    for a in range(data.h.shape[0]):
        A = weingarten_shape_operator(chart, p, a, step)
        worst = max(worst, float(np.abs(A - data.h[a]).max()))
    return worst


@dataclass
class UmbilicityReport:
    residual: float
    mean_curvature_norm: float
    verdict: str


def umbilicity_residual(datas: list[SecondFundamentalData], tol: float = ALGEBRAIC_TOL) -> UmbilicityReport:
    res, hn = 0.0, 0.0
    for data in datas:
        d = data.h.shape[1]
        diff = data.h - np.einsum("a,ij->aij", data.H, np.eye(d))
        res = max(res, float(np.linalg.norm(diff, axis=0).max(initial=0.0)))
        hn = max(hn, data.mean_curvature_norm)
    if res > tol:
        verdict = "NotUmbilical"
    elif hn <= tol:
        verdict = "TotallyGeodesic"
    else:
        verdict = "TotallyUmbilical"
    return UmbilicityReport(res, hn, verdict)


def mixed_totally_geodesic(data: SecondFundamentalData, split) -> float:
    X, Z = split.Dperp, split.Dtheta
    if X.shape[1] == 0 or Z.shape[1] == 0:
        return 0.0
    mixed = np.einsum("aij,ip,jq->apq", data.h, X, Z)
    return float(np.linalg.norm(mixed, axis=0).max())


def _h_field(chart: ImmersionChart, V: Field, W: Field, step: float) -> NumericField:
    return NumericField(lambda q: chart.geometry(q).h(V.value(q), W.value(q)), step)


def nabla_h(chart: ImmersionChart, U: Field, V: Field, W: Field, p, step: float | None = None) -> np.ndarray:
    """(nabla-bar_U h)(V, W) as an ambient normal vector at p."""
    step = step or chart.step
    geo = chart.geometry(p)
    u = U.value(p)
    hvw = _h_field(chart, V, W, step)
    perp = geo.normal_part(ambient_field_derivative(chart, hvw, p, u))
    nuv, _ = induced_connection(chart, U, V, p)
    nuw, _ = induced_connection(chart, U, W, p)
    return perp - geo.h(nuv, W.value(p)) - geo.h(V.value(p), nuw)


def codazzi_residual(chart: ImmersionChart, p, U: Field, V: Field, W: Field, step: float | None = None) -> float:
    M = chart.ambient
    if M.metric.kind not in ("flat", "space_form_product"):
        raise WrongMetricModel("closed-form curvature needs a flat or space-form product metric")
    geo = chart.geometry(p)
    u, v, w = (geo.J @ X.value(p) for X in (U, V, W))
    lhs = geo.normal_part(M.curvature_closed_form(geo.f, u, v, w))
    rhs = nabla_h(chart, U, V, W, p, step) - nabla_h(chart, V, U, W, p, step)
    return geo.norm(lhs - rhs)
