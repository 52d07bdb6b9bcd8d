"""Structure operators T, N, t, omega, the T^2 spectrum, and slant classification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientManifold
from .errors import ClusterAmbiguity, NotWellDefined
from .immersion import AdaptedFrame

CLUSTER_TOL = 1e-6
ANGLE_TOL = 1e-6
SNAP_TOL = 1e-10
AMBIGUITY_FACTOR = 10.0

LABELS = ("Invariant", "AntiInvariant", "ProperSlant", "SemiInvariant", "HemiSlant", "SemiSlant", "Generic")


@dataclass
class SplitOperators:
    T: np.ndarray
    N: np.ndarray
    t: np.ndarray
    omega: np.ndarray

    @property
    def d(self):
        return self.T.shape[0]

    def identity_residuals(self) -> dict:
        d, k = self.T.shape[0], self.omega.shape[0]
        T, N, t, w = self.T, self.N, self.t, self.omega
        res = {
            "T2_plus_tN": np.abs(T @ T + t @ N - np.eye(d)).max(initial=0.0),
            "omega2_plus_Nt": np.abs(w @ w + N @ t - np.eye(k)).max(initial=0.0),
            "NT_plus_omegaN": np.abs(N @ T + w @ N).max(initial=0.0),
            "Tt_plus_tomega": np.abs(T @ t + t @ w).max(initial=0.0),
            "t_minus_Ntranspose": np.abs(t - N.T).max(initial=0.0),
            "T_asymmetry": np.abs(T - T.T).max(initial=0.0),
            "omega_asymmetry": np.abs(w - w.T).max(initial=0.0),
        }
        return {key: float(v) for key, v in res.items()}


def split_operators(frame: AdaptedFrame, M: AmbientManifold) -> SplitOperators:
    G = M.metric_at(frame.image)
    GF = G @ M.F
    E, Xi = frame.E, frame.Xi
    # entry (i, j) is g(F X_j, Y_i)
    return SplitOperators(T=E.T @ GF @ E, N=Xi.T @ GF @ E, t=E.T @ GF @ Xi, omega=Xi.T @ GF @ Xi)


@dataclass
class Cluster:
    value: float
    multiplicity: int
    spread: float

    @property
    def kind(self) -> str:
        if self.value == 0.0:
            return "zero"
        if self.value == 1.0:
            return "one"
        return "slant"

    @property
    def theta(self) -> float:
        return float(np.arccos(np.sqrt(self.value)))


@dataclass
class SlantSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, in the adapted tangent frame
    clusters: list[Cluster]
    labels: np.ndarray  # cluster index per eigenvalue

    def signature(self) -> tuple:
        return tuple((c.kind, c.multiplicity) for c in self.clusters)


def _snap(lam: np.ndarray) -> np.ndarray:
    lam = lam.copy()
    lam[np.abs(lam) <= SNAP_TOL] = 0.0
    lam[np.abs(lam - 1.0) <= SNAP_TOL] = 1.0
    return lam


def slant_spectrum(ops: SplitOperators, cluster_tol: float = CLUSTER_TOL) -> SlantSpectrum:
    """Eigen-decompose T^2 and group eigenvalues whose gaps are within cluster_tol.

    Gaps between cluster_tol and AMBIGUITY_FACTOR * cluster_tol are neither clearly
    equal nor clearly distinct and raise ClusterAmbiguity.
    """
    T = 0.5 * (ops.T + ops.T.T)
    lam, vecs = np.linalg.eigh(T @ T)
    lam = _snap(lam)
    clusters: list[Cluster] = []
    labels = np.zeros(len(lam), dtype=int)
    groups: list[list[int]] = []
    for i, v in enumerate(lam):
        if groups:
            gap = v - lam[groups[-1][-1]]
            if gap <= cluster_tol:
                groups[-1].append(i)
                continue
            if gap <= AMBIGUITY_FACTOR * cluster_tol:
                raise ClusterAmbiguity(f"eigenvalues {lam[i - 1]:.3e} and {v:.3e} are {gap:.2e} apart")
        groups.append([i])
    for ci, grp in enumerate(groups):
        vals = lam[grp]
        spread = float(vals.max() - vals.min())
        if spread > AMBIGUITY_FACTOR * cluster_tol:
            raise ClusterAmbiguity(f"cluster spans {spread:.2e}, wider than the clustering tolerance allows")
        mean = float(vals.mean())
        if mean <= cluster_tol:
            mean = 0.0
        elif mean >= 1.0 - cluster_tol:
            mean = 1.0
        clusters.append(Cluster(mean, len(grp), spread))
        labels[grp] = ci
    return SlantSpectrum(lam, vecs, clusters, labels)


@dataclass
class Classification:
    label: str
    theta: float | None
    theta_deviation: float
    p: int  # dim D^perp
    q: int  # dim of the complementary distribution
    clusters: list[tuple[float, int]]
    samples: int
    per_point: list[tuple] = field(default_factory=list)

    def describe(self) -> str:
        if self.theta is None or self.label in ("Invariant", "AntiInvariant", "SemiInvariant", "Generic"):
            return self.label
        return f"{self.label}(theta={self.theta:.12g})"


def _label(kinds: set[str]) -> str:
    table = {
        frozenset({"one"}): "Invariant",
        frozenset({"zero"}): "AntiInvariant",
        frozenset({"slant"}): "ProperSlant",
        frozenset({"zero", "one"}): "SemiInvariant",
        frozenset({"zero", "slant"}): "HemiSlant",
        frozenset({"one", "slant"}): "SemiSlant",
    }
    return table.get(frozenset(kinds), "Generic")


def classify(spectra: list[SlantSpectrum], angle_tol: float = ANGLE_TOL) -> Classification:
    if not spectra:
        raise NotWellDefined("no samples to classify")
    sig = spectra[0].signature()
    for s in spectra[1:]:
        if s.signature() != sig:
            raise NotWellDefined(f"cluster structure varies across samples: {sig} vs {s.signature()}")
    kinds = [k for k, _ in sig]
    slant_count = kinds.count("slant")
    label = _label(set(kinds)) if slant_count <= 1 else "Generic"
    n = len(spectra[0].clusters)
    values = np.array([[c.value for c in s.clusters] for s in spectra])
    mean_vals = values.mean(axis=0)
    theta, dev = None, 0.0
    if slant_count == 1:
        idx = kinds.index("slant")
        angles = np.array([s.clusters[idx].theta for s in spectra])
        theta = float(angles.mean())
        dev = float(np.abs(angles - theta).max())
        if dev > angle_tol:
            raise NotWellDefined(f"slant angle varies by {dev:.2e} rad across samples")
    elif label in ("Invariant", "SemiInvariant"):
        theta = 0.0
    elif label == "AntiInvariant":
        theta = float(np.pi / 2)
    p = dict(sig).get("zero", 0)
    d = sum(mult for _, mult in sig)
    return Classification(
        label=label,
        theta=theta,
        theta_deviation=dev,
        p=p,
        q=d - p,
        clusters=[(float(mean_vals[i]), sig[i][1]) for i in range(n)],
        samples=len(spectra),
    )


@dataclass
class DistributionSplit:
    Dperp: np.ndarray  # d x p, frame coordinates
    Dtheta: np.ndarray  # d x q, frame coordinates
    mu: np.ndarray  # (m-d) x k, normal frame coordinates
    frame: AdaptedFrame

    @property
    def Dperp_ambient(self):
        return self.frame.E @ self.Dperp

    @property
    def Dtheta_ambient(self):
        return self.frame.E @ self.Dtheta

    @property
    def mu_ambient(self):
        return self.frame.Xi @ self.mu

    def dims(self) -> tuple[int, int, int]:
        return self.Dperp.shape[1], self.Dtheta.shape[1], self.mu.shape[1]


def distribution_split(ops: SplitOperators, spectrum: SlantSpectrum, frame: AdaptedFrame) -> DistributionSplit:
    zero = [i for i, c in enumerate(spectrum.clusters) if c.kind == "zero"]
    mask = np.isin(spectrum.labels, zero)
    V0 = spectrum.eigenvectors[:, mask]
    Vt = spectrum.eigenvectors[:, ~mask]
    # normal frame coordinates of F(D^perp) and N(D^theta); T vanishes on D^perp so both are N images
    image = ops.N @ np.hstack([V0, Vt])
    k = ops.N.shape[0]
    if image.shape[1] == 0 or k == 0:
        mu = np.eye(k)
    else:
        U, s, _ = np.linalg.svd(image, full_matrices=True)
        rank = int(np.sum(s > 1e-8))
        mu = U[:, rank:]
    return DistributionSplit(V0, Vt, mu, frame)


def split_residuals(ops: SplitOperators, split: DistributionSplit) -> dict:
    """F(D^perp) orthogonal to N(D^theta); T kills D^perp; T preserves D^theta."""
    V0, Vt = split.Dperp, split.Dtheta
    orth = np.abs((ops.N @ V0).T @ (ops.N @ Vt)).max(initial=0.0)
    kill = np.abs(ops.T @ V0).max(initial=0.0)
    leak = np.abs(V0.T @ ops.T @ Vt).max(initial=0.0)
    return {"F_Dperp_orthogonal_N_Dtheta": float(orth), "T_on_Dperp": float(kill), "T_Dtheta_leak": float(leak)}


def check_slant_identities(ops: SplitOperators, split: DistributionSplit, theta: float) -> dict:
    """Residuals of T^2 Z = cos^2 Z, g(TZ, TW) = cos^2 g(Z, W), g(NZ, NW) = sin^2 g(Z, W) on D^theta."""
    Z = split.Dtheta
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    q = Z.shape[1]
    if q == 0:
        return {"T2_eigen": 0.0, "T_inner": 0.0, "N_inner": 0.0}
    TZ, NZ = ops.T @ Z, ops.N @ Z
    gram = Z.T @ Z
    return {
        "T2_eigen": float(np.abs(ops.T @ TZ - c2 * Z).max()),
        "T_inner": float(np.abs(TZ.T @ TZ - c2 * gram).max()),
        "N_inner": float(np.abs(NZ.T @ NZ - s2 * gram).max()),
    }


def rotated_frame(frame: AdaptedFrame, seed: int = 0) -> AdaptedFrame:
    """Same point, tangent frame rotated by a random orthogonal matrix."""
    d = frame.E.shape[1]
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((d, d)))
    return AdaptedFrame(frame.point, frame.image, frame.E @ Q, frame.Xi, frame.B @ Q, dict(frame.gram_log))


# ---------------------------------------------------------- projectors in parameter coordinates


def distribution_projectors(geo, M: AmbientManifold, cluster_tol: float = CLUSTER_TOL):
    """g-orthogonal projectors onto D^perp and its complement, acting on parameter vectors."""
    frame = geo.frame
    ops = split_operators(frame, M)
    spec = slant_spectrum(ops, cluster_tol)
    split = distribution_split(ops, spec, frame)
    Binv = np.linalg.inv(frame.B)
    Pperp = frame.B @ split.Dperp @ split.Dperp.T @ Binv
    return Pperp, np.eye(len(Pperp)) - Pperp
