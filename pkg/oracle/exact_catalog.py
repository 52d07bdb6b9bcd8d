"""Exact-arithmetic oracle for the shipped catalog.

For each catalog entry and a few exact sample points, build the Jacobian, metric and
structure symbolically, form the tangential part T of F in parameter coordinates, and
factor the characteristic polynomial of T^2. The eigenvalues, the slant angle, the
distribution dimensions and the semi-invariant frame matrix are written to expected.json,
which the test suite compares against the floating-point pipeline.

    python oracle/exact_catalog.py            # rewrite oracle/expected.json
    python oracle/exact_catalog.py --check    # exit 1 if the frozen file is stale
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import sympy as sp

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT.parent / "src"))

from slantlab.catalog import catalog_entries  # noqa: E402

OUT = ROOT / "expected.json"

# exact sample points inside each domain; trig arguments are chosen so values stay algebraic
POINTS = {
    "published_example_r6": [("1", "0", "0"), ("3/4", "1/2", "-1/3")],
    "hemi_slant_pi3": [("0", "0", "0"), ("1/2", "-1/3", "1/5")],
    "slant_line_r4_pi8": [("1",)],
    "slant_line_r4_pi4": [("1",)],
    "slant_line_r4_0": [("1",)],
    "invariant_plane": [("0", "0"), ("1/3", "-1/2")],
    "sign_torus_s2h2": [("pi/3", "pi/4"), ("pi/2", "pi/6")],
    "sign_torus_s2s2": [("pi/3", "pi/4")],
    "diagonal_slant_curve": [("pi/4",), ("pi/3",)],
    "sphere_x_space": [("pi/3", "pi/4"), ("pi/2", "pi/6")],
    "anti_invariant_diagonal_s2s2": [("0", "0"), ("1/2", "-1/3")],
    "hemi_slant_product_sphere": [("pi/3", "pi/4", "1/2")],
    "mixed_curvature_control": [("5/2", "3/4", "0", "1", "0", "0"), ("2", "1/2", "1/2", "3/2", "1/3", "0")],
}


def structure_matrix(ambient: dict, m: int) -> sp.Matrix:
    kind = ambient["structure"]["kind"]
    if kind == "swap":
        n = m // 2
        return sp.Matrix(sp.BlockMatrix([[sp.zeros(n), sp.eye(n)], [sp.eye(n), sp.zeros(n)]]))
    if kind == "sign":
        m1 = ambient.get("m1", m // 2)
        return sp.diag(*([1] * m1 + [-1] * (m - m1)))
    return sp.Matrix(ambient["structure"]["matrix"])


def metric_matrix(ambient: dict, x: list) -> sp.Matrix:
    if ambient["metric"] == "flat":
        return sp.eye(len(x))
    diag = []
    start = 0
    for dim, c in ((ambient["m1"], ambient["c1"]), (ambient["m2"], ambient["c2"])):
        c = sp.nsimplify(c)
        block = x[start : start + dim]
        lam = 1 / (1 + c * sum(v**2 for v in block) / 4)
        diag += [lam**2] * dim
        start += dim
    return sp.diag(*diag)


def gram_schmidt(J: sp.Matrix, G: sp.Matrix) -> sp.Matrix:
    cols = []
    for k in range(J.shape[1]):
        v = J[:, k]
        for e in cols:
            v = v - (e.T * G * v)[0] * e
        n = sp.sqrt(sp.simplify((v.T * G * v)[0]))
        cols.append(sp.simplify(v / n))
    return sp.Matrix.hstack(*cols)


def label_for(values: list) -> str:
    kinds = set()
    for v in values:
        kinds.add("zero" if v == 0 else "one" if v == 1 else "slant")
    slant = {v for v in values if v not in (0, 1)}
    if len(slant) > 1:
        return "Generic"
    table = {
        frozenset({"one"}): "Invariant",
        frozenset({"zero"}): "AntiInvariant",
        frozenset({"slant"}): "ProperSlant",
        frozenset({"zero", "one"}): "SemiInvariant",
        frozenset({"zero", "slant"}): "HemiSlant",
        frozenset({"one", "slant"}): "SemiSlant",
    }
    return table.get(frozenset(kinds), "Generic")


def exact_point(entry, point: tuple) -> dict:
    man = entry.manifest
    imm, amb = man["immersion"], man["ambient"]
    syms = sp.symbols(imm["params"])
    local = dict(zip(imm["params"], syms))
    local["abs"] = sp.Abs
    f = sp.Matrix([sp.sympify(c, locals=local) for c in imm["components"]])
    J = f.jacobian(sp.Matrix(syms))
    sub = dict(zip(syms, [sp.sympify(v) for v in point]))
    Jp = sp.simplify(J.subs(sub))
    fp = [sp.simplify(v) for v in f.subs(sub)]
    m, d = Jp.shape
    G = metric_matrix(amb, fp)
    F = structure_matrix(amb, m)
    gM = sp.simplify(Jp.T * G * Jp)
    T = sp.simplify(gM.inv() * Jp.T * G * F * Jp)  # T in parameter coordinates
    lam = sp.Symbol("lam")
    poly = sp.Poly(sp.expand(sp.simplify((T * T).charpoly(lam).as_expr())), lam)
    roots = sp.roots(poly)
    if sum(roots.values()) != d:
        raise RuntimeError(f"{entry.id}: characteristic polynomial did not split over radicals")
    spectrum = sorted(((sp.nsimplify(sp.simplify(r)), k) for r, k in roots.items()), key=lambda t: float(t[0]))
    values = [v for v, k in spectrum for _ in range(k)]
    p = sum(1 for v in values if v == 0)
    below_one = sum(1 for v in values if v != 1)
    out = {
        "point": list(point),
        "spectrum": [[str(v), float(v), k] for v, k in spectrum],
        "label": label_for(values),
        "p": p,
        "q": d - p,
        "mu": m - d - below_one,
    }
    slant = [v for v in values if v not in (0, 1)]
    if slant:
        out["cos2_theta"] = str(slant[0])
        out["theta"] = float(sp.acos(sp.sqrt(slant[0])))
    if entry.id == "published_example_r6":
        E = gram_schmidt(Jp, G)
        Tf = sp.simplify(E.T * G * F * E)
        out["frame"] = [[str(v) for v in E.T.row(i)] for i in range(d)]
        out["frame_T"] = [[str(Tf[i, j]) for j in range(d)] for i in range(d)]
    return out


def build() -> dict:
    result = {}
    for entry in catalog_entries():
        pts = [exact_point(entry, pt) for pt in POINTS[entry.id]]
        labels = {pt["label"] for pt in pts}
        if len(labels) != 1:
            raise RuntimeError(f"{entry.id}: label varies across exact points {labels}")
        result[entry.id] = {"label": pts[0]["label"], "points": pts}
    return result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare against the frozen file instead of writing it")
    args = ap.parse_args(argv)
    text = json.dumps(build(), indent=1, sort_keys=True) + "\n"
    if args.check:
        same = OUT.exists() and OUT.read_text() == text
        print("oracle up to date" if same else "oracle output differs from expected.json")
        return 0 if same else 1
    OUT.write_text(text)
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
