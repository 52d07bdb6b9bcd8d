"""Shipped example charts with known classifications and expected check outcomes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .manifest import Manifest, parse_manifest
from .theorems import CHECK_IDS

PUBLISHED_NOTE = (
    "The published claim for this chart is a proper hemi-slant submanifold with slant angle pi/3 and "
    "D^theta = span{Z, W}. That span is not orthogonal to D^perp = span{X} (g(Z, X) = 1), and the T^2 "
    "spectrum is {0, 1, 1}, so the chart is semi-invariant."
)


@dataclass(frozen=True)
class Expected:
    label: str
    theta: float | None
    p: int
    q: int
    mu: int
    spectrum: tuple[tuple[float, int], ...]
    umbilicity: str | None = None
    verdicts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    manifest: dict
    expected: Expected
    provenance: str
    note: str = ""
    validate_ambient: bool = True

    def load(self) -> Manifest:
        return parse_manifest(self.manifest, validate_ambient=self.validate_ambient)


HEMI_ONLY = (
    "anti_invariant_integrability",
    "dperp_foliation_normal_criterion",
    "dperp_foliation_shape_criterion",
    "dtheta_foliation_criterion",
    "hemi_slant_product",
    "parallel_structures",
    "umbilical_mean_curvature",
    "curvature_obstruction",
)


def verdicts(skipped=(), failed=()) -> dict:
    """Expected verdict per check; anything not listed is expected to pass."""
    out = {cid: "Pass" for cid in CHECK_IDS}
    out.update({cid: "Skipped" for cid in skipped})
    out.update({cid: "Fail" for cid in failed})
    return out


def _flat(dim, structure):
    return {"metric": "flat", "dim": dim, "structure": {"kind": structure}}


def _sfp(m1, c1, m2, c2):
    return {"metric": "space_form_product", "m1": m1, "c1": c1, "m2": m2, "c2": c2, "structure": {"kind": "sign"}}


def _manifest(name, ambient, params, components, domain, notes=(), count=6):
    return {
        "name": name,
        "ambient": ambient,
        "immersion": {"params": list(params), "components": list(components), "domain": [list(d) for d in domain]},
        "sampling": {"mode": "random", "count": count, "seed": 0},
        "checks": "all",
        "notes": list(notes),
    }


_K = "(z+sqrt(x*x-y*y))/sqrt(2)"
_C, _S = "(sqrt(3)/2)", "(1/2)"
CONTROL_PARAMS = ["x", "y", "z", "a", "b", "t"]
CONTROL_COMPONENTS = [
    # first factor R^8
    "sqrt(3)*x",
    "sqrt(3)*z",
    "y",
    _K,
    f"{_C}*a*cos(t)",
    f"{_C}*b",
    f"{_C}*a*sin(t)",
    "t",
    # second factor R^8
    "x",
    "z",
    "sqrt(3)*y",
    f"sqrt(3)*{_K}",
    f"{_S}*a*cos(sqrt(3)*t)",
    f"{_S}*b",
    f"{_S}*a*sin(sqrt(3)*t)",
    "t",
]
CONTROL_DOMAIN = [(2, 3), (0.5, 1), (-1, 1), (0.5, 1.5), (-1, 1), (0, 1.5)]


def slant_line_r4(alpha_src: str, alpha: float, name: str) -> CatalogEntry:
    comps = [f"u*cos({alpha_src})", "0", f"u*sin({alpha_src})", "0"]
    c = abs(math.sin(2 * alpha))
    if c == 1.0 or abs(c - 1.0) < 1e-15:
        exp = Expected("Invariant", 0.0, 0, 1, 3, ((1.0, 1),), "TotallyGeodesic", verdicts(HEMI_ONLY))
    elif c == 0.0:
        exp = Expected("AntiInvariant", math.pi / 2, 1, 0, 2, ((0.0, 1),), "TotallyGeodesic", verdicts(HEMI_ONLY))
    else:
        exp = Expected("ProperSlant", math.acos(c), 0, 1, 2, ((c * c, 1),), "TotallyGeodesic", verdicts(HEMI_ONLY))
    return CatalogEntry(
        name,
        f"straight line at angle {alpha_src} in the (x1, y1) plane of R^4 with the swap structure",
        _manifest(name, _flat(4, "swap"), ["u"], comps, [(0.5, 1.5)]),
        exp,
        "cos(theta) = |g(FE, E)| = sin(2 alpha) for the unit direction E = (cos a, 0, sin a, 0)",
    )


def catalog_entries() -> list[CatalogEntry]:
    s12, c12 = "sin(pi/12)", "cos(pi/12)"
    entries = [
        CatalogEntry(
            "published_example_r6",
            "published hemi-slant example in R^6 with the swap structure",
            _manifest(
                "published_example_r6",
                _flat(6, "swap"),
                ["u", "v", "w"],
                ["u/sqrt(2)", "u/sqrt(2)", "u+v", "w/sqrt(2)", "w/sqrt(2)", "0"],
                [(0.5, 1.5), (-1, 1), (-1, 1)],
                notes=[PUBLISHED_NOTE],
            ),
            Expected("SemiInvariant", 0.0, 1, 2, 2, ((0.0, 1), (1.0, 2)), "TotallyGeodesic", verdicts(HEMI_ONLY)),
            "exact Gram-Schmidt on the constant Jacobian (oracle/exact_catalog.py)",
            note=PUBLISHED_NOTE,
        ),
        CatalogEntry(
            "hemi_slant_pi3",
            "linear proper hemi-slant 3-plane in R^6, D^perp = d/du, D^theta tilted by pi/12 into y-space",
            _manifest(
                "hemi_slant_pi3",
                _flat(6, "swap"),
                ["u", "v", "w"],
                [f"v*{c12}", f"w*{c12}", "u", f"v*{s12}", f"w*{s12}", "0"],
                [(-1, 1), (-1, 1), (-1, 1)],
            ),
            Expected(
                "HemiSlant",
                math.pi / 3,
                1,
                2,
                0,
                ((0.0, 1), (0.25, 2)),
                "TotallyGeodesic",
                verdicts(["anti_invariant_integrability", "curvature_obstruction"]),
            ),
            "T = diag(0, sin(pi/6), sin(pi/6)) exactly (oracle/exact_catalog.py)",
        ),
        slant_line_r4("pi/8", math.pi / 8, "slant_line_r4_pi8"),
        slant_line_r4("pi/4", math.pi / 4, "slant_line_r4_pi4"),
        slant_line_r4("0", 0.0, "slant_line_r4_0"),
        CatalogEntry(
            "invariant_plane",
            "the F-invariant plane {x = y} in R^4 with the swap structure",
            _manifest("invariant_plane", _flat(4, "swap"), ["u", "v"], ["u", "v", "u", "v"], [(-1, 1), (-1, 1)]),
            Expected("Invariant", 0.0, 0, 2, 2, ((1.0, 2),), "TotallyGeodesic", verdicts(HEMI_ONLY)),
            "F fixes both tangent directions",
        ),
        CatalogEntry(
            "sign_torus_s2h2",
            "product of circles of chart radius 1/2 in S^2(1) x H^2(-1)",
            _manifest(
                "sign_torus_s2h2",
                _sfp(2, 1.0, 2, -1.0),
                ["u", "v"],
                ["0.5*cos(u)", "0.5*sin(u)", "0.5*cos(v)", "0.5*sin(v)"],
                [(0, 6), (0, 6)],
            ),
            Expected("Invariant", 0.0, 0, 2, 2, ((1.0, 2),), "NotUmbilical", verdicts(HEMI_ONLY[:-1])),
            "each tangent direction lies in one factor, so F fixes it",
        ),
        CatalogEntry(
            "sign_torus_s2s2",
            "product of circles of chart radius 2 (great circles) in S^2(1) x S^2(1)",
            _manifest(
                "sign_torus_s2s2",
                _sfp(2, 1.0, 2, 1.0),
                ["u", "v"],
                ["2*cos(u)", "2*sin(u)", "2*cos(v)", "2*sin(v)"],
                [(0, 6), (0, 6)],
            ),
            Expected("Invariant", 0.0, 0, 2, 2, ((1.0, 2),), "TotallyGeodesic", verdicts(HEMI_ONLY)),
            "great circles of both factors; a flat totally geodesic torus",
        ),
        CatalogEntry(
            "diagonal_slant_curve",
            "circle with speeds sqrt(3) and 1 in the two factors of flat R^2 x R^2 with the sign structure",
            _manifest(
                "diagonal_slant_curve",
                _flat(4, "sign"),
                ["u"],
                ["sqrt(3)*cos(u)", "sqrt(3)*sin(u)", "cos(u)", "sin(u)"],
                [(0, 6)],
            ),
            Expected("ProperSlant", math.pi / 3, 0, 1, 2, ((0.25, 1),), "TotallyUmbilical", verdicts(HEMI_ONLY)),
            "cos(theta) = |a - b| / (a + b) with a = 3, b = 1",
        ),
        CatalogEntry(
            "sphere_x_space",
            "round sphere of radius 2 inside the x-space of R^6 with the swap structure",
            _manifest(
                "sphere_x_space",
                _flat(6, "swap"),
                ["u", "v"],
                ["2*sin(u)*cos(v)", "2*sin(u)*sin(v)", "2*cos(u)", "0", "0", "0"],
                [(0.6, 2.5), (0, 6)],
            ),
            Expected("AntiInvariant", math.pi / 2, 2, 0, 2, ((0.0, 2),), "TotallyUmbilical", verdicts(HEMI_ONLY[1:])),
            "F maps x-space to y-space, which is normal",
        ),
        CatalogEntry(
            "anti_invariant_diagonal_s2s2",
            "the diagonal {x = y} of S^2(1) x S^2(1)",
            _manifest(
                "anti_invariant_diagonal_s2s2",
                _sfp(2, 1.0, 2, 1.0),
                ["u", "v"],
                ["u", "v", "u", "v"],
                [(-1, 1), (-1, 1)],
            ),
            Expected("AntiInvariant", math.pi / 2, 2, 0, 0, ((0.0, 2),), "TotallyGeodesic", verdicts(HEMI_ONLY[1:])),
            "fixed set of the factor swap isometry; F(a, a) = (a, -a) is normal",
        ),
        CatalogEntry(
            "hemi_slant_product_sphere",
            "sphere in x-space times a slant line in R^8 with the swap structure",
            _manifest(
                "hemi_slant_product_sphere",
                _flat(8, "swap"),
                ["u", "v", "w"],
                [
                    "2*sin(u)*cos(v)",
                    "2*sin(u)*sin(v)",
                    "2*cos(u)",
                    f"w*{c12}",
                    "0",
                    "0",
                    "0",
                    f"w*{s12}",
                ],
                [(0.6, 2.5), (0, 6), (-1, 1)],
            ),
            Expected(
                "HemiSlant",
                math.pi / 3,
                2,
                1,
                2,
                ((0.0, 2), (0.25, 1)),
                "NotUmbilical",
                verdicts(["umbilical_mean_curvature", "curvature_obstruction"]),
            ),
            "Riemannian product of an anti-invariant sphere and a pi/3 slant line",
        ),
        CatalogEntry(
            "mixed_curvature_control",
            "curved proper hemi-slant 6-fold in flat R^8 x R^8 (sign structure) that is not a local product",
            _manifest("mixed_curvature_control", _flat(16, "sign"), CONTROL_PARAMS, CONTROL_COMPONENTS, CONTROL_DOMAIN),
            Expected(
                "HemiSlant",
                math.pi / 3,
                2,
                4,
                4,
                ((0.0, 2), (0.25, 4)),
                "NotUmbilical",
                verdicts(
                    ["parallel_structures", "umbilical_mean_curvature", "curvature_obstruction"],
                    [
                        "slant_integrability",
                        "dperp_foliation_normal_criterion",
                        "dperp_foliation_shape_criterion",
                        "dtheta_foliation_criterion",
                        "hemi_slant_product",
                    ],
                ),
            ),
            "product of two pieces: a scaled-pair 3-fold with non-closing slant distribution and a ruled "
            "3-fold whose rulings turn at rates 1 and sqrt(3) in the two factors; T^2 spectrum {0, 0, 1/4 x 4} "
            "exactly (oracle/exact_catalog.py)",
        ),
    ]
    return entries


def get_entry(entry_id: str) -> CatalogEntry:
    for e in catalog_entries():
        if e.id == entry_id:
            return e
    raise KeyError(entry_id)


def export_manifests(directory) -> list[Path]:
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for e in catalog_entries():
        path = out_dir / f"{e.id}.json"
        path.write_text(json.dumps(e.manifest, indent=2, sort_keys=True) + "\n")
        paths.append(path)
    return paths
