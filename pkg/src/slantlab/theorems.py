"""Residual checks for the integrability, product, parallelism, umbilicity and curvature results.

Every check samples interior points of a chart, gates on its hypotheses, and returns a
CheckResult whose verdict is Pass only when the hypotheses hold and the residual is in tolerance.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import extrinsic
from .errors import ClusterAmbiguity, NotWellDefined, SlantlabError
from .immersion import (
    Field,
    ImmersionChart,
    NumericField,
    ambient_field_derivative,
    coordinate_fields,
    induced_connection,
    lie_bracket,
)
from .slant import (
    ANGLE_TOL,
    CLUSTER_TOL,
    Classification,
    check_slant_identities,
    classify,
    distribution_split,
    slant_spectrum,
    split_operators,
    split_residuals,
)

HEMI_FAMILY = ("Invariant", "AntiInvariant", "ProperSlant", "SemiInvariant", "HemiSlant")
SLANT_LABELS = ("Invariant", "AntiInvariant", "ProperSlant")


@dataclass
class Tolerances:
    tol: float = 1e-9  # algebraic identities
    fd_tol: float = 1e-5  # identities involving one finite-difference derivative
    bracket_tol: float = 1e-6  # closure and foliation measurements on projected fields
    codazzi_tol: float = 1e-4
    ricci_tol: float = 1e-8
    consistency_tol: float = 1e-6
    cluster_tol: float = CLUSTER_TOL
    angle_tol: float = ANGLE_TOL
    step: float | None = None


@dataclass
class RunOptions:
    tolerances: Tolerances = field(default_factory=Tolerances)
    samples: int = 6
    seed: int = 0
    mode: str = "random"  # or "grid": `samples` points per axis
    ricci_vectors: int = 10  # random unit vectors per sample, on top of the frame vectors
    threads: int | None = None


@dataclass
class CheckResult:
    check_id: str
    hypothesis: str  # Satisfied | NotSatisfied | Unverifiable
    reason: str
    max_residual: float | None
    tolerance: float | None
    samples: int
    verdict: str  # Pass | Fail | Skipped
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "hypothesis": self.hypothesis,
            "reason": self.reason,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "verdict": self.verdict,
            "details": self.details,
        }


def _skip(check_id, reason, hypothesis="NotSatisfied", details=None) -> CheckResult:
    return CheckResult(check_id, hypothesis, reason, None, None, 0, "Skipped", details or {})


def _judge(check_id, residual, tol, samples, details=None, extra_ok=True, reason="") -> CheckResult:
    ok = residual <= tol and extra_ok
    return CheckResult(
        check_id, "Satisfied", reason, float(residual), tol, samples, "Pass" if ok else "Fail", details or {}
    )


# ---------------------------------------------------------------------------- per-point data


@dataclass
class PointData:
    p: np.ndarray
    ops: object
    spectrum: object
    split: object
    sff: extrinsic.SecondFundamentalData


class Analysis:
    """Samples a chart once and shares the per-point operators among all checks."""

    def __init__(self, chart: ImmersionChart, options: RunOptions | None = None):
        self.chart = chart
        self.options = options or RunOptions()
        self.tols = self.options.tolerances
        if self.tols.step is not None:
            chart.step = self.tols.step
        self.M = chart.ambient
        self.points = chart.sample_points(self.options.samples, self.options.seed, mode=self.options.mode)
        self.data: list[PointData] = []
        self.classification: Classification | None = None
        self.classification_error: str | None = None
        for p in self.points:
            geo = chart.geometry(p)
            ops = split_operators(geo.frame, self.M)
            try:
                spec = slant_spectrum(ops, self.tols.cluster_tol)
                split = distribution_split(ops, spec, geo.frame)
            except ClusterAmbiguity as exc:
                self.classification_error = f"ClusterAmbiguity: {exc}"
                spec = split = None
            self.data.append(PointData(p, ops, spec, split, extrinsic.second_fundamental_form(chart, p)))
        if self.classification_error is None:
            try:
                self.classification = classify([d.spectrum for d in self.data], self.tols.angle_tol)
            except NotWellDefined as exc:
                self.classification_error = f"NotWellDefined: {exc}"

    @property
    def label(self) -> str:
        return self.classification.label if self.classification else "NotWellDefined"

    @property
    def theta(self):
        return self.classification.theta if self.classification else None

    # ----------------------------------------------------------- projected fields

    def projectors(self, q):
        geo = self.chart.geometry(q)
        cache = geo.__dict__.setdefault("_projectors", {})
        key = self.tols.cluster_tol
        if key not in cache:
            fr = geo.frame
            ops = split_operators(fr, self.M)
            spec = slant_spectrum(ops, self.tols.cluster_tol)
            split = distribution_split(ops, spec, fr)
            Binv = np.linalg.inv(fr.B)
            P = fr.B @ split.Dperp @ split.Dperp.T @ Binv
            cache[key] = (P, np.eye(len(P)) - P)
        return cache[key]

    def distribution_fields(self, k: int, which: str) -> list[Field]:
        """Fields spanning D^perp or D^theta near sample k, equal to an orthonormal basis at the sample."""
        d = self.data[k]
        basis = d.split.Dperp if which == "perp" else d.split.Dtheta
        vectors = self.chart.geometry(d.p).frame.B @ basis
        slot = 0 if which == "perp" else 1
        return [self._projected_field(slot, col.copy()) for col in vectors.T]

    def _projected_field(self, slot: int, v: np.ndarray) -> NumericField:
        return NumericField(lambda q: self.projectors(q)[slot] @ v, self.chart.step)

    # ---------------------------------------------------------- operator helpers

    def T_field(self, V: Field) -> NumericField:
        return NumericField(lambda q: self.chart.geometry(q).T(V.value(q)), self.chart.step)

    def N_field(self, V: Field) -> NumericField:
        return NumericField(lambda q: self.chart.geometry(q).N(V.value(q)), self.chart.step)

    def nabla(self, U: Field, V: Field, p):
        return induced_connection(self.chart, U, V, p)[0]

    def nabla_perp(self, xi: Field, p, u):
        geo = self.chart.geometry(p)
        return geo.normal_part(ambient_field_derivative(self.chart, xi, p, u))

    def random_normal_fields(self, count: int = 2) -> list[NumericField]:
        rng = np.random.default_rng(self.options.seed + 7919)
        m, dd = self.chart.m, self.chart.d
        out = []
        for _ in range(count):
            a, K = rng.standard_normal(m), rng.standard_normal((m, dd))
            out.append(NumericField(lambda q, a=a, K=K: self.chart.geometry(q).normal_part(a + K @ q), self.chart.step))
        return out


def _frame_vectors(an: Analysis, k: int, basis: np.ndarray) -> list[np.ndarray]:
    """Parameter vectors of frame-coordinate columns at sample k."""
    B = an.chart.geometry(an.data[k].p).frame.B
    return list((B @ basis).T)


def _hemi_gate(an: Analysis, check_id: str, proper: bool):
    if an.classification is None:
        return _skip(check_id, f"classification unavailable ({an.classification_error})", "Unverifiable")
    if proper and an.label != "HemiSlant":
        return _skip(check_id, f"requires a proper hemi-slant submanifold, got {an.label}")
    if not proper and an.label not in HEMI_FAMILY:
        return _skip(check_id, f"requires a hemi-slant type submanifold, got {an.label}")
    return None


# ------------------------------------------------------------------------- algebraic checks


def check_operator_identities(an: Analysis) -> CheckResult:
    cid = "operator_identities"
    worst: dict[str, float] = {}
    lo, hi = np.inf, -np.inf
    for d in an.data:
        for key, val in d.ops.identity_residuals().items():
            worst[key] = max(worst.get(key, 0.0), val)
        T = 0.5 * (d.ops.T + d.ops.T.T)
        ev = np.linalg.eigvalsh(T @ T)
        lo, hi = min(lo, ev.min()), max(hi, ev.max())
        if d.split is not None:
            for key, val in split_residuals(d.ops, d.split).items():
                worst[key] = max(worst.get(key, 0.0), val)
    spectrum_excess = max(0.0, -lo, hi - 1.0)
    worst["spectrum_outside_unit_interval"] = float(spectrum_excess)
    return _judge(
        cid,
        max(worst.values()),
        an.tols.tol,
        len(an.data),
        {"residuals": worst, "spectrum_range": [float(lo), float(hi)]},
    )


def check_slant_identities_all(an: Analysis) -> CheckResult:
    cid = "slant_identities"
    gate = _hemi_gate(an, cid, proper=False)
    if gate:
        return gate
    theta = an.theta
    worst = {"T2_eigen": 0.0, "T_inner": 0.0, "N_inner": 0.0}
    for d in an.data:
        for key, val in check_slant_identities(d.ops, d.split, theta).items():
            worst[key] = max(worst[key], val)
    return _judge(cid, max(worst.values()), an.tols.tol, len(an.data), {"residuals": worst, "theta": theta})


# ------------------------------------------------------------ Gauss-Weingarten identities


def gauss_weingarten_residuals(an: Analysis, p, U: Field, V: Field, xi: Field) -> dict:
    geo = an.chart.geometry(p)
    u, v = U.value(p), V.value(p)
    nab_uv = an.nabla(U, V, p)
    huv = geo.h(u, v)
    TV, NV = an.T_field(V), an.N_field(V)
    r41 = an.nabla(U, TV, p) - geo.A(geo.N(v), u) - geo.T(nab_uv) - geo.t(huv)
    r42 = geo.h(u, geo.T(v)) + an.nabla_perp(NV, p, u) - geo.N(nab_uv) - geo.omega(huv)
    x = xi.value(p)
    tx = NumericField(lambda q: an.chart.geometry(q).t(xi.value(q)), an.chart.step)
    wx = NumericField(lambda q: an.chart.geometry(q).omega(xi.value(q)), an.chart.step)
    dperp_x = an.nabla_perp(xi, p, u)
    Ax = geo.A(x, u)
    r43 = an.nabla(U, tx, p) - geo.A(geo.omega(x), u) + geo.T(Ax) - geo.t(dperp_x)
    r44 = geo.h(u, geo.t(x)) + an.nabla_perp(wx, p, u) + geo.N(Ax) - geo.omega(dperp_x)
    # derivatives of T and N: defining difference against the closed forms
    dT_def = an.nabla(U, TV, p) - geo.T(nab_uv)
    dT_closed = geo.A(geo.N(v), u) + geo.t(huv)
    dN_def = an.nabla_perp(NV, p, u) - geo.N(nab_uv)
    dN_closed = geo.omega(huv) - geo.h(u, geo.T(v))
    return {
        "tangent_T": geo.tnorm(r41),
        "normal_T": geo.norm(r42),
        "tangent_t": geo.tnorm(r43),
        "normal_t": geo.norm(r44),
        "nabla_T_two_paths": geo.tnorm(dT_def - dT_closed),
        "nabla_N_two_paths": geo.norm(dN_def - dN_closed),
        "nabla_T_norm": geo.tnorm(dT_closed),
        "nabla_N_norm": geo.norm(dN_closed),
    }


def check_gauss_weingarten(an: Analysis) -> CheckResult:
    cid = "gauss_weingarten_identities"
    coords = coordinate_fields(an.chart)
    normals = an.random_normal_fields(2)
    worst: dict[str, float] = {}
    for d in an.data:
        for i, U in enumerate(coords):
            for j, V in enumerate(coords):
                xi = normals[(i + j) % len(normals)]
                for key, val in gauss_weingarten_residuals(an, d.p, U, V, xi).items():
                    worst[key] = max(worst.get(key, 0.0), val)
    identity_keys = ("tangent_T", "normal_T", "tangent_t", "normal_t", "nabla_T_two_paths", "nabla_N_two_paths")
    res = max(worst[k] for k in identity_keys)
    return _judge(cid, res, an.tols.fd_tol, len(an.data), {"residuals": worst})


def parallel_norms(an: Analysis, k: int) -> tuple[float, float]:
    """max over frame pairs of |(nabla T)| and |(nabla N)| from the closed forms."""
    geo = an.chart.geometry(an.data[k].p)
    vecs = list(geo.frame.B.T)
    t_max = n_max = 0.0
    for u in vecs:
        for v in vecs:
            huv = geo.h(u, v)
            t_max = max(t_max, geo.tnorm(geo.A(geo.N(v), u) + geo.t(huv)))
            n_max = max(n_max, geo.norm(geo.omega(huv) - geo.h(u, geo.T(v))))
    return t_max, n_max


# ---------------------------------------------------------------------------- integrability


def bracket_identity_terms(an: Analysis, p, Z: Field, W: Field):
    """(A_NZ W - A_NW Z + nabla_Z TW - nabla_W TZ, [Z, W]); the first equals T[Z, W] for any tangent fields."""
    geo = an.chart.geometry(p)
    z, w = Z.value(p), W.value(p)
    lhs = geo.A(geo.N(z), w) - geo.A(geo.N(w), z) + an.nabla(Z, an.T_field(W), p) - an.nabla(W, an.T_field(Z), p)
    return lhs, lie_bracket(Z, W, p)


def bracket_identity_residual(an: Analysis, p, Z: Field, W: Field) -> float:
    lhs, br = bracket_identity_terms(an, p, Z, W)
    geo = an.chart.geometry(p)
    return geo.tnorm(lhs - geo.T(br))


def check_slant_integrability(an: Analysis) -> CheckResult:
    """Identity A_NZ W - A_NW Z + nabla_Z TW - nabla_W TZ = T[Z, W] and the D^theta criterion."""
    cid = "slant_integrability"
    gate = _hemi_gate(an, cid, proper=False)
    if gate:
        return gate
    q = an.classification.q
    if q < 2:
        return CheckResult(
            cid,
            "Satisfied",
            "D^theta has dimension <= 1, trivially integrable",
            0.0,
            an.tols.fd_tol,
            len(an.data),
            "Pass",
            {"dim_Dtheta": q},
        )
    identity = criterion = closure = dtheta_h = 0.0
    iff_ok = True
    for k, d in enumerate(an.data):
        geo = an.chart.geometry(d.p)
        Pperp, _ = an.projectors(d.p)
        fields = an.distribution_fields(k, "theta")
        for a in range(len(fields)):
            for b in range(a + 1, len(fields)):
                Z, W = fields[a], fields[b]
                lhs, br = bracket_identity_terms(an, d.p, Z, W)
                identity = max(identity, geo.tnorm(lhs - geo.T(br)))
                c_res = geo.tnorm(Pperp @ lhs)
                n_res = geo.tnorm(Pperp @ br)
                criterion = max(criterion, c_res)
                closure = max(closure, n_res)
                iff_ok &= (c_res <= an.tols.bracket_tol) == (n_res <= an.tols.bracket_tol)
        for z in _frame_vectors(an, k, d.split.Dtheta):
            for w in _frame_vectors(an, k, d.split.Dtheta):
                dtheta_h = max(dtheta_h, geo.norm(geo.h(z, w)))
    details = {
        "identity_residual": identity,
        "criterion_residual": criterion,
        "nonclosure": closure,
        "equivalence_consistent": bool(iff_ok),
        "dtheta_totally_geodesic": dtheta_h <= an.tols.tol,
        "max_h_on_dtheta": dtheta_h,
        "note": "integrability is sampled as bracket closure of projected frame fields",
    }
    reason = "" if iff_ok else "criterion holds while D^theta brackets leave D^theta"
    return _judge(cid, identity, an.tols.fd_tol, len(an.data), details, extra_ok=iff_ok, reason=reason)


def check_anti_invariant_integrability(an: Analysis) -> CheckResult:
    cid = "anti_invariant_integrability"
    gate = _hemi_gate(an, cid, proper=False)
    if gate:
        return gate
    p = an.classification.p
    if p < 2:
        return _skip(cid, f"bracket needs two independent fields (dim D^perp = {p})")
    closure = lemma = shape = mixed = normal = 0.0
    for k, d in enumerate(an.data):
        geo = an.chart.geometry(d.p)
        fields = an.distribution_fields(k, "perp")
        for a in range(len(fields)):
            for b in range(a + 1, len(fields)):
                br = lie_bracket(fields[a], fields[b], d.p)
                closure = max(closure, geo.tnorm(geo.T(br)))
        X = _frame_vectors(an, k, d.split.Dperp)
        Zs = _frame_vectors(an, k, d.split.Dtheta)
        Pperp, Ptheta = an.projectors(d.p)
        for x in X:
            for y in X:
                lemma = max(lemma, geo.tnorm(geo.A(geo.N(x), y) + geo.A(geo.N(y), x)))
                shape = max(shape, geo.tnorm(geo.A(geo.N(x), y)))
            for z in Zs:
                mixed = max(mixed, geo.tnorm(Pperp @ geo.A(geo.N(x), z)))
            for u in geo.frame.B.T:
                for y in X:
                    normal = max(normal, abs(geo.g(geo.h(u, x), geo.N(y))))
    details = {
        "bracket_closure": closure,
        "skew_shape_operator": lemma,
        "shape_operator_on_dperp": shape,
        "shape_operator_dperp_to_dtheta_leak": mixed,
        "h_against_N_dperp": normal,
    }
    res = max(closure, shape, mixed, normal)
    return _judge(cid, res, an.tols.bracket_tol, len(an.data), details, extra_ok=lemma <= an.tols.bracket_tol)


# ------------------------------------------------------------------ foliations and products


def _foliation_data(an: Analysis, k: int) -> dict:
    d = an.data[k]
    geo = an.chart.geometry(d.p)
    Pperp, Ptheta = an.projectors(d.p)
    X = _frame_vectors(an, k, d.split.Dperp)
    Z = _frame_vectors(an, k, d.split.Dtheta)
    A, N = geo.A, geo.N
    out = {
        "normal_criterion": 0.0,
        "shape_criterion": 0.0,
        "slant_criterion": 0.0,
        "product": 0.0,
        "dperp_leaves": 0.0,
        "dtheta_leaves": 0.0,
    }
    for x in X:
        for y in X:
            for z in Z:
                out["normal_criterion"] = max(out["normal_criterion"], abs(geo.g(geo.h(x, y), N(z))))
                out["shape_criterion"] = max(out["shape_criterion"], abs(geo.gt(A(N(y), z), x) + geo.gt(A(N(z), y), x)))
    for x in X:
        for w in Z:
            for z in Z:
                out["slant_criterion"] = max(out["slant_criterion"], abs(geo.gt(A(N(x), w), z) + geo.gt(A(N(w), x), z)))
            out["product"] = max(out["product"], geo.tnorm(A(N(x), w) + A(N(w), x)))
    perp_fields = an.distribution_fields(k, "perp")
    theta_fields = an.distribution_fields(k, "theta")
    for F1 in perp_fields:
        for F2 in perp_fields:
            out["dperp_leaves"] = max(out["dperp_leaves"], geo.tnorm(Ptheta @ an.nabla(F1, F2, d.p)))
    for F1 in theta_fields:
        for F2 in theta_fields:
            out["dtheta_leaves"] = max(out["dtheta_leaves"], geo.tnorm(Pperp @ an.nabla(F1, F2, d.p)))
    return out


def _foliation_summary(an: Analysis) -> dict:
    cache = an.__dict__.setdefault("_foliation", None)
    if cache is None:
        rows = [_foliation_data(an, k) for k in range(len(an.data))]
        cache = {key: max(r[key] for r in rows) for key in rows[0]}
        an._foliation = cache
    return cache


def _criterion_check(an: Analysis, cid: str, criterion: str, leaves: str | None) -> CheckResult:
    gate = _hemi_gate(an, cid, proper=True)
    if gate:
        return gate
    s = _foliation_summary(an)
    crit = s[criterion]
    details = {"criterion_residual": crit}
    consistent = True
    if leaves is not None:
        fol = s[leaves]
        consistent = (crit <= an.tols.tol) == (fol <= an.tols.bracket_tol)
        details.update({"leaf_geodesic_residual": fol, "equivalence_consistent": bool(consistent)})
    reason = "" if consistent else "criterion and measured foliation disagree"
    return _judge(cid, crit, an.tols.tol, len(an.data), details, extra_ok=consistent, reason=reason)


def check_dperp_normal_criterion(an):
    return _criterion_check(an, "dperp_foliation_normal_criterion", "normal_criterion", "dperp_leaves")


def check_dperp_shape_criterion(an):
    return _criterion_check(an, "dperp_foliation_shape_criterion", "shape_criterion", "dperp_leaves")


def check_dtheta_criterion(an):
    return _criterion_check(an, "dtheta_foliation_criterion", "slant_criterion", "dtheta_leaves")


def check_product(an):
    res = _criterion_check(an, "hemi_slant_product", "product", None)
    if res.verdict != "Skipped":
        s = _foliation_summary(an)
        both = s["dperp_leaves"] <= an.tols.bracket_tol and s["dtheta_leaves"] <= an.tols.bracket_tol
        res.details.update({"both_foliations_geodesic": bool(both), "product": res.verdict == "Pass"})
    return res


# ---------------------------------------------------------------------- parallel structures


def check_parallel_structures(an: Analysis) -> CheckResult:
    cid = "parallel_structures"
    gate = _hemi_gate(an, cid, proper=True)
    if gate:
        return gate
    tol = an.tols.tol
    s = _foliation_summary(an)
    t_norm = n_norm = 0.0
    parts = {
        "mu_shape_on_dperp": 0.0,
        "shape_N_dtheta_on_dperp": 0.0,
        "shape_N_dperp_on_dtheta": 0.0,
        "mixed_h": 0.0,
        "h_dtheta_against_N_dtheta": 0.0,
    }
    for k, d in enumerate(an.data):
        tn, nn = parallel_norms(an, k)
        t_norm, n_norm = max(t_norm, tn), max(n_norm, nn)
        geo = an.chart.geometry(d.p)
        X = _frame_vectors(an, k, d.split.Dperp)
        Z = _frame_vectors(an, k, d.split.Dtheta)
        mus = list(d.split.mu_ambient.T)
        for x in X:
            for xi in mus:
                parts["mu_shape_on_dperp"] = max(parts["mu_shape_on_dperp"], geo.tnorm(geo.A(xi, x)))
            for z in Z:
                parts["shape_N_dtheta_on_dperp"] = max(parts["shape_N_dtheta_on_dperp"], geo.tnorm(geo.A(geo.N(z), x)))
                parts["shape_N_dperp_on_dtheta"] = max(parts["shape_N_dperp_on_dtheta"], geo.tnorm(geo.A(geo.N(x), z)))
        parts["mixed_h"] = max(parts["mixed_h"], extrinsic.mixed_totally_geodesic(d.sff, d.split))
        for z in Z:
            for w in Z:
                for v in Z:
                    parts["h_dtheta_against_N_dtheta"] = max(
                        parts["h_dtheta_against_N_dtheta"], abs(geo.g(geo.h(z, w), geo.N(v)))
                    )
    t_par, n_par = t_norm <= tol, n_norm <= tol
    product_ok = s["product"] <= tol
    details = {"nabla_T": t_norm, "nabla_N": n_norm, "product_residual": s["product"], **parts}
    residuals = []
    if t_par:
        residuals.append(s["product"])
    if n_par:
        residuals += [
            parts["mu_shape_on_dperp"],
            parts["shape_N_dtheta_on_dperp"],
            parts["shape_N_dperp_on_dtheta"],
            s["product"],
            parts["mixed_h"],
        ]
    converse_ok = True
    if product_ok and parts["h_dtheta_against_N_dtheta"] <= tol:
        converse_ok = t_par
        details["converse_tested"] = True
    else:
        details["converse_tested"] = False
    if not residuals and not details["converse_tested"]:
        return _skip(cid, "antecedent false: neither T nor N is parallel", details=details)
    res = max(residuals) if residuals else 0.0
    return _judge(
        cid,
        res,
        tol,
        len(an.data),
        details,
        extra_ok=converse_ok,
        reason="" if converse_ok else "product with h(D^theta,D^theta) orthogonal to N D^theta but T not parallel",
    )


# ---------------------------------------------------------------------------------- umbilical


def check_umbilical(an: Analysis) -> CheckResult:
    cid = "umbilical_mean_curvature"
    gate = _hemi_gate(an, cid, proper=True)
    if gate:
        return gate
    umb = extrinsic.umbilicity_residual([d.sff for d in an.data], an.tols.tol)
    if umb.verdict == "NotUmbilical":
        return _skip(cid, f"not totally umbilical (residual {umb.residual:.3e})", details={"umbilicity": umb.residual})
    p = an.classification.p
    hfx = hnz = 0.0
    for k, d in enumerate(an.data):
        geo = an.chart.geometry(d.p)
        H = geo.frame.Xi @ d.sff.H
        for x in _frame_vectors(an, k, d.split.Dperp):
            hfx = max(hfx, abs(geo.g(H, geo.F @ (geo.J @ x))))
        for z in _frame_vectors(an, k, d.split.Dtheta):
            hnz = max(hnz, abs(geo.g(H, geo.N(z))))
    s = _foliation_summary(an)
    details = {"umbilicity": umb.verdict, "dim_Dperp": p, "H_against_F_Dperp": hfx, "H_against_N_Dtheta": hnz}
    if p == 1:
        return CheckResult(cid, "Satisfied", "p=1", 0.0, an.tols.tol, len(an.data), "Pass", details)
    res = hfx
    if s["product"] <= an.tols.tol:
        res = max(res, hnz)
        details["H_in_mu_tested"] = True
    return _judge(cid, res, an.tols.tol, len(an.data), details)


# ------------------------------------------------------------------------------ curvature


def obstruction_residual(M, x, rng) -> float:
    """Normal part of R(X,Z)X against -(c1-c2)/4 NZ on a synthetic tangent plane with FX normal."""
    c1, c2 = M.metric.curvatures
    G = M.metric_at(x)
    F = M.F
    m = M.dim

    def unit(v):
        return v / np.sqrt(v @ G @ v)

    # X with g(FX, X) = 0: balance the two eigenspaces of F
    plus = [v for v in np.eye(m).T if abs(v @ F @ v - 1) < 1e-12]
    minus = [v for v in np.eye(m).T if abs(v @ F @ v + 1) < 1e-12]
    a = sum(rng.standard_normal() * v for v in plus)
    b = sum(rng.standard_normal() * v for v in minus)
    X = unit(unit(a) + unit(b))
    FX = F @ X
    Z = rng.standard_normal(m)
    for v in (X, unit(FX)):
        Z = Z - (v @ G @ Z) * v
    Z = unit(Z)
    plane = np.stack([X, Z], axis=1)
    proj = plane @ np.linalg.inv(plane.T @ G @ plane) @ plane.T @ G

    def perp(v):
        return v - proj @ v

    lhs = perp(M.curvature_closed_form(x, X, Z, X))
    rhs = -0.25 * (c1 - c2) * perp(F @ Z)
    return float(np.sqrt(max((lhs - rhs) @ G @ (lhs - rhs), 0.0)))


def check_curvature_obstruction(an: Analysis) -> CheckResult:
    cid = "curvature_obstruction"
    M = an.M
    if M.metric.kind != "space_form_product":
        return _skip(cid, "wrong metric model: needs a space-form product")
    c1, c2 = M.metric.curvatures
    if c1 == c2:
        return _skip(cid, "c1=c2: the obstruction term vanishes")
    rng = np.random.default_rng(an.options.seed)
    res = 0.0
    for d in an.data:
        res = max(res, obstruction_residual(M, an.chart.geometry(d.p).f, rng))
    umb = extrinsic.umbilicity_residual([d.sff for d in an.data], an.tols.tol)
    parallel_h = _parallel_mean_curvature(an)
    counterexample = umb.verdict != "NotUmbilical" and parallel_h <= an.tols.fd_tol and an.label == "HemiSlant"
    details = {
        "mechanism_residual": res,
        "umbilicity": umb.verdict,
        "parallel_H_residual": parallel_h,
        "counterexample_found": bool(counterexample),
        "status": "mechanism-verified",
    }
    return _judge(cid, res, an.tols.consistency_tol, len(an.data), details, extra_ok=not counterexample)


def _parallel_mean_curvature(an: Analysis) -> float:
    chart = an.chart

    def H_amb(q):
        sff = extrinsic.second_fundamental_form(chart, q)
        return chart.geometry(q).frame.Xi @ sff.H

    Hf = NumericField(H_amb, chart.step)
    worst = 0.0
    for d in an.data:
        geo = chart.geometry(d.p)
        for u in geo.frame.B.T:
            worst = max(worst, geo.norm(an.nabla_perp(Hf, d.p, u)))
    return worst


def check_codazzi(an: Analysis) -> CheckResult:
    cid = "codazzi"
    if an.M.metric.kind not in ("flat", "space_form_product"):
        return _skip(cid, "closed-form curvature unavailable")
    X = coordinate_fields(an.chart)
    dd = an.chart.d
    triples = [(i, j, k) for i in range(dd) for j in range(i + 1, dd) for k in range(dd)]
    res = 0.0
    for d in an.data:
        for i, j, k in triples:
            res = max(res, extrinsic.codazzi_residual(an.chart, d.p, X[i], X[j], X[k]))
    return _judge(cid, res, an.tols.codazzi_tol, len(an.data), {"triples": len(triples)})


def codazzi_convergence(chart: ImmersionChart, p, coarse: float) -> dict:
    """Codazzi residual at step h and h/2; second-order differencing gives a ratio near 4."""
    X = coordinate_fields(chart)
    dd = chart.d
    triples = [(i, j, k) for i in range(dd) for j in range(i + 1, dd) for k in range(dd)]
    if not triples:
        # a curve has no antisymmetric pair, so the equation is vacuous
        return {"coarse": 0.0, "fine": 0.0, "ratio": float("nan")}

    def worst(step):
        return max(extrinsic.codazzi_residual(chart, p, X[i], X[j], X[k], step=step) for i, j, k in triples)

    r1, r2 = worst(coarse), worst(coarse / 2)
    return {"coarse": r1, "fine": r2, "ratio": r1 / r2 if r2 > 0 else float("inf")}


# ---------------------------------------------------------------------------------- Ricci


@dataclass
class RicciSample:
    point: list
    vector: list
    ricci: float
    ambient_k_ricci: float
    chen_slack: float
    bound_slack: float
    printed_bound_slack: float
    consistency: float
    printed_consistency: float
    cor_antiinvariant_slack: float | None
    cor_slant_slack: float | None


@dataclass
class RicciReport:
    samples: list[RicciSample]

    @property
    def min_bound_slack(self):
        return min(s.bound_slack for s in self.samples)

    def summary(self) -> dict:
        def mn(key):
            vals = [getattr(s, key) for s in self.samples if getattr(s, key) is not None]
            return min(vals) if vals else None

        return {
            "pairs": len(self.samples),
            "min_chen_slack": mn("chen_slack"),
            "min_bound_slack": mn("bound_slack"),
            "min_printed_bound_slack": mn("printed_bound_slack"),
            "max_consistency_residual": max(s.consistency for s in self.samples),
            "max_printed_consistency_residual": max(s.printed_consistency for s in self.samples),
            "min_antiinvariant_corollary_slack": mn("cor_antiinvariant_slack"),
            "min_slant_corollary_slack": mn("cor_slant_slack"),
        }


def ricci_intrinsic(geo, sff: extrinsic.SecondFundamentalData, V: np.ndarray, basis: np.ndarray) -> tuple[float, float]:
    """(Ric(V), ambient k-Ricci of T_pM at V); V and basis columns in frame coordinates, basis[:, 0] = V."""
    M = geo.chart.ambient
    E = geo.frame.E
    v = E @ V
    hvv = np.einsum("aij,i,j->a", sff.h, V, V)
    ric = amb = 0.0
    for col in basis.T[1:]:
        e = E @ col
        K = geo.g(M.curvature_closed_form(geo.f, e, v, v), e)
        hee = np.einsum("aij,i,j->a", sff.h, col, col)
        hev = np.einsum("aij,i,j->a", sff.h, col, V)
        amb += K
        ric += K + hee @ hvv - hev @ hev
    return float(ric), float(amb)


def ricci_pairs(an: Analysis, vectors_per_point: int | None = None) -> RicciReport:
    count = an.options.ricci_vectors if vectors_per_point is None else vectors_per_point
    c1, c2 = an.M.metric.curvatures
    a, b = c1 + c2, c1 - c2
    m = an.chart.d
    trace_free = getattr(an, "_trace_free", None)
    if trace_free is None:
        from .ambient import is_trace_free_structure

        trace_free = an._trace_free = is_trace_free_structure(an.M)
    rng = np.random.default_rng(an.options.seed + 104729)
    label = an.label
    out = []
    for d in an.data:
        geo = an.chart.geometry(d.p)
        T = d.ops.T
        H2 = float(d.sff.H @ d.sff.H)
        candidates = list(np.eye(m)) + [v / np.linalg.norm(v) for v in rng.standard_normal((count, m))]
        for V in candidates:
            basis, _ = np.linalg.qr(np.column_stack([V, np.eye(m)]))
            basis = basis[:, :m]
            basis[:, 0] = V  # QR may flip the sign of the first column
            ric, amb = ricci_intrinsic(geo, d.sff, V, basis)
            tvv = float(V @ T @ V)
            tv2 = float((T @ V) @ (T @ V))
            trace_rest = float(sum(c @ T @ c for c in basis.T[1:]))
            bracket = a * ((m - 1) + trace_rest * tvv - tv2 + tvv**2) + b * (trace_rest + (m - 1) * tvv)
            printed = a * ((m - 1) + trace_rest * tvv - tv2 + tvv) + b * (trace_rest + (m - 1) * tvv)
            rhs = m * m * H2 + bracket
            cor_ai = cor_sl = None
            if label == "AntiInvariant":
                cor_ai = m * m * H2 + a * (m - 1) - 4 * ric
            if trace_free and label in SLANT_LABELS and an.theta is not None:
                cor_sl = m * m * H2 + a * ((m - 1) - np.cos(an.theta) ** 2) - 4 * ric
            out.append(
                RicciSample(
                    point=d.p.tolist(),
                    vector=V.tolist(),
                    ricci=ric,
                    ambient_k_ricci=amb,
                    chen_slack=m * m * H2 / 4 + amb - ric,
                    bound_slack=rhs - 4 * ric,
                    printed_bound_slack=m * m * H2 + printed - 4 * ric,
                    consistency=abs(bracket - 4 * amb),
                    printed_consistency=abs(printed - 4 * amb),
                    cor_antiinvariant_slack=cor_ai,
                    cor_slant_slack=cor_sl,
                )
            )
    return RicciReport(out)


def check_ricci(an: Analysis) -> CheckResult:
    cid = "ricci_inequality"
    if an.M.metric.kind not in ("flat", "space_form_product"):
        return _skip(cid, "wrong metric model: needs a space-form product")
    rep = ricci_pairs(an)
    s = rep.summary()
    tol = an.tols.ricci_tol
    ok = s["min_chen_slack"] >= -tol and s["min_bound_slack"] >= -tol
    ok &= s["max_consistency_residual"] <= an.tols.consistency_tol
    for key in ("min_antiinvariant_corollary_slack", "min_slant_corollary_slack"):
        if s[key] is not None:
            ok &= s[key] >= -tol
    violation = max(0.0, -s["min_bound_slack"], -s["min_chen_slack"])
    res = max(violation, s["max_consistency_residual"])
    return CheckResult(cid, "Satisfied", "", float(res), tol, len(an.data), "Pass" if ok else "Fail", s)


# ---------------------------------------------------------------------------------- registry


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    func: Callable[[Analysis], CheckResult]
    anchor: str


CHECKS: tuple[CheckSpec, ...] = (
    CheckSpec("operator_identities", check_operator_identities, "T^2 + tN = I, omega^2 + Nt = I, t = N^T"),
    CheckSpec("slant_identities", check_slant_identities_all, "T^2 Z = cos^2(theta) Z on D^theta"),
    CheckSpec("gauss_weingarten_identities", check_gauss_weingarten, "nabla_U TV - A_NV U = T nabla_U V + t h(U,V)"),
    CheckSpec("slant_integrability", check_slant_integrability, "A_NZ W - A_NW Z + nabla_Z TW - nabla_W TZ = T[Z,W]"),
    CheckSpec("anti_invariant_integrability", check_anti_invariant_integrability, "T[X,Y] = 0, A_NX Y = 0 on D^perp"),
    CheckSpec(
        "dperp_foliation_normal_criterion", check_dperp_normal_criterion, "h(D^perp, D^perp) orthogonal to N D^theta"
    ),
    CheckSpec("dperp_foliation_shape_criterion", check_dperp_shape_criterion, "g(A_NY Z, X) = -g(A_NZ Y, X)"),
    CheckSpec("dtheta_foliation_criterion", check_dtheta_criterion, "g(A_NX W, Z) = -g(A_NW X, Z)"),
    CheckSpec("hemi_slant_product", check_product, "A_NX Z = -A_NZ X"),
    CheckSpec("parallel_structures", check_parallel_structures, "(nabla_U T)V = A_NV U + t h(U,V)"),
    CheckSpec("umbilical_mean_curvature", check_umbilical, "H orthogonal to F(D^perp); H in mu for products"),
    CheckSpec("curvature_obstruction", check_curvature_obstruction, "(R(X,Z)X)^perp = -(c1-c2)/4 NZ"),
    CheckSpec("codazzi", check_codazzi, "(R(U,V)W)^perp = (nabla_U h)(V,W) - (nabla_V h)(U,W)"),
    CheckSpec("ricci_inequality", check_ricci, "4 Ric(V) <= m^2 |H|^2 + k-Ricci bracket"),
)

CHECK_IDS = tuple(c.check_id for c in CHECKS)


def run_check(an: Analysis, spec: CheckSpec) -> CheckResult:
    try:
        return spec.func(an)
    except SlantlabError as exc:
        return CheckResult(spec.check_id, "Unverifiable", f"{type(exc).__name__}: {exc}", None, None, 0, "Skipped", {})
