"""Acceptance criteria 1-10. Each test records one PASS/FAIL line, printed in the terminal summary."""

import json
import math

import numpy as np
import pytest

from slantlab import cli
from slantlab.ambient import is_trace_free_structure, space_form_product
from slantlab.catalog import catalog_entries, export_manifests, get_entry
from slantlab.immersion import ImmersionChart, coordinate_fields
from slantlab.report import run
from slantlab.theorems import (
    CHECKS,
    Analysis,
    RunOptions,
    bracket_identity_residual,
    codazzi_convergence,
    obstruction_residual,
    ricci_pairs,
    run_check,
)

from conftest import ENTRY_IDS
from test_oracle import ORACLE

LINES: dict[str, str] = {}
SPEC = {s.check_id: s for s in CHECKS}
SFP_ENTRIES = [e.id for e in catalog_entries() if e.manifest["ambient"]["metric"] == "space_form_product"]


def record(n, ok: bool, text: str, label: str = ""):
    LINES[str(n) + label] = f"criterion {n:>2}{label}: {'PASS' if ok else 'FAIL'}  {text}"
    return ok


def check(an, cid):
    return run_check(an, SPEC[cid])


def test_criterion_01_operator_identities(get_analysis):
    worst, lo, hi = 0.0, np.inf, -np.inf
    for eid in ENTRY_IDS:
        res = check(get_analysis(eid, 20), "operator_identities")
        worst = max(worst, res.max_residual)
        lo, hi = min(lo, res.details["spectrum_range"][0]), max(hi, res.details["spectrum_range"][1])
    ok = worst <= 1e-9 and lo >= -1e-9 and hi <= 1 + 1e-9
    record(
        1,
        ok,
        f"max identity residual {worst:.1e} over {len(ENTRY_IDS)} entries x 20 samples; "
        f"T^2 spectrum in [{lo:.1e}, {hi:.12g}]",
    )
    assert ok


def test_criterion_02_classification_matches_oracle(get_analysis):
    mismatches = []
    for eid in ENTRY_IDS:
        c = get_analysis(eid).classification
        frozen = ORACLE[eid]
        pt = frozen["points"][0]
        same = c.label == frozen["label"] and (c.p, c.q) == (pt["p"], pt["q"])
        same &= [k for _, k in c.clusters] == [k for _, _, k in pt["spectrum"]]
        same &= np.allclose([v for v, _ in c.clusters], [v for _, v, _ in pt["spectrum"]], atol=1e-9)
        if "theta" in pt:
            same &= abs(c.theta - pt["theta"]) <= 1e-9
        if not same:
            mismatches.append(eid)
    pi3 = get_analysis("hemi_slant_pi3").classification
    line = get_analysis("slant_line_r4_pi8").classification
    published = get_entry("published_example_r6").load()
    rep = run(published, published.run_options(samples=2))
    ok = not mismatches
    ok &= pi3.label == "HemiSlant" and abs(pi3.theta - math.pi / 3) <= 1e-9
    ok &= line.label == "ProperSlant" and abs(line.theta - math.pi / 4) <= 1e-9
    ok &= rep.classification["label"] == "SemiInvariant" and any("published claim" in n for n in rep.notes)
    record(
        2,
        ok,
        f"{len(ENTRY_IDS) - len(mismatches)}/{len(ENTRY_IDS)} entries match the exact oracle; "
        f"hemi_slant_pi3 theta-pi/3 = {pi3.theta - math.pi / 3:.1e}; published example SemiInvariant with note",
    )
    assert ok, mismatches


def test_criterion_03_slant_identities(get_analysis):
    worst, used = 0.0, 0
    for eid in ENTRY_IDS:
        res = check(get_analysis(eid), "slant_identities")
        if res.verdict != "Skipped":
            worst, used = max(worst, res.max_residual), used + 1
    ok = worst <= 1e-9 and used >= 1
    record(3, ok, f"max residual {worst:.1e} over {used} slant-family entries")
    assert ok


def test_criterion_04_unconditional_lemmas(get_analysis):
    worst_gw = worst_br = 0.0
    for eid in ENTRY_IDS:
        an = get_analysis(eid)
        worst_gw = max(worst_gw, check(an, "gauss_weingarten_identities").max_residual)
        X = coordinate_fields(an.chart)
        for d in an.data[:3]:
            for i in range(len(X)):
                for j in range(i + 1, len(X)):
                    worst_br = max(worst_br, bracket_identity_residual(an, d.p, X[i], X[j]))
    ok = worst_gw <= 1e-5 and worst_br <= 1e-5
    record(4, ok, f"Gauss-Weingarten and two-path derivative residuals {worst_gw:.1e}; bracket identity {worst_br:.1e}")
    assert ok


def test_criterion_05a_dperp_always_integrable(get_analysis):
    worst_t = worst_a = 0.0
    used = []
    for eid in ENTRY_IDS:
        an = get_analysis(eid)
        if an.classification.p < 2:
            continue
        res = check(an, "anti_invariant_integrability")
        used.append(eid)
        worst_t = max(worst_t, res.details["bracket_closure"])
        worst_a = max(worst_a, res.details["shape_operator_on_dperp"])
    ok = worst_t <= 1e-6 and worst_a <= 1e-6 and len(used) >= 2
    record(
        5,
        ok,
        f"|T[X,Y]| {worst_t:.1e}, |A_NX Y| {worst_a:.1e} on {len(used)} entries with dim D^perp >= 2",
        " (D^perp)",
    )
    assert ok


@pytest.mark.xfail(strict=True, reason="the slant criterion equals T[Z,W], which always lies in D^theta (see README)")
def test_criterion_05b_control_criterion_and_nonclosure(get_analysis):
    res = check(get_analysis("mixed_curvature_control"), "slant_integrability")
    crit, gap = res.details["criterion_residual"], res.details["nonclosure"]
    ok = crit > 1e-6 and gap > 1e-6
    record(
        5,
        ok,
        f"control: slant criterion residual {crit:.1e}, D^theta non-closure {gap:.1e} (expected red, see README)",
        " (control)",
    )
    assert ok


def test_criterion_06_product_criteria(get_analysis):
    ids = [
        "dperp_foliation_normal_criterion",
        "dperp_foliation_shape_criterion",
        "dtheta_foliation_criterion",
        "hemi_slant_product",
    ]
    good = [check(get_analysis("hemi_slant_pi3"), c) for c in ids]
    bad = [check(get_analysis("mixed_curvature_control"), c) for c in ids]
    ok = all(r.verdict == "Pass" and r.max_residual <= 1e-9 for r in good)
    ok &= all(r.verdict == "Fail" and r.max_residual > 1e-3 for r in bad)
    record(
        6,
        ok,
        f"hemi_slant_pi3 max {max(r.max_residual for r in good):.1e}; "
        f"control min {min(r.max_residual for r in bad):.2e}",
    )
    assert ok


def test_criterion_07_curvature_cross_validation():
    rng = np.random.default_rng(7)
    worst_r = worst_k = worst_78 = 0.0
    for m1, c1, m2, c2 in [(2, 1.0, 2, -1.0), (2, 1.0, 2, 1.0), (3, 0.5, 2, -2.0)]:
        M = space_form_product(m1, c1, m2, c2)
        e = np.eye(M.dim)
        for _ in range(5):
            x = np.concatenate([rng.uniform(-0.4, 0.4, m1), rng.uniform(-0.3, 0.3, m2)])
            u, v, w = rng.standard_normal((3, M.dim))
            worst_r = max(worst_r, np.abs(M.curvature_numeric(x, u, v, w) - M.curvature_closed_form(x, u, v, w)).max())
            worst_k = max(worst_k, abs(M.sectional_curvature(x, e[0], e[1]) - c1))
            worst_k = max(worst_k, abs(M.sectional_curvature(x, e[m1], e[m1 + 1]) - c2))
    M = space_form_product(2, 1.0, 2, -1.0)
    for _ in range(20):
        worst_78 = max(worst_78, obstruction_residual(M, rng.uniform(-0.4, 0.4, 4), rng))
    ok = worst_r <= 1e-5 and worst_k <= 1e-8 and worst_78 <= 1e-6
    record(
        7,
        ok,
        f"numeric vs closed-form curvature {worst_r:.1e}; factor sectional curvature {worst_k:.1e}; "
        f"obstruction identity {worst_78:.1e}",
    )
    assert ok


def test_criterion_08_codazzi(get_analysis):
    worst = 0.0
    for eid in ENTRY_IDS:
        worst = max(worst, check(get_analysis(eid), "codazzi").max_residual)
    surface = ImmersionChart(
        space_form_product(2, 1.0, 2, -1.0),
        ["u", "v"],
        ["0.3*cos(u) + 0.1*v", "0.4*sin(v)", "0.2*u*v", "0.5*sin(u + v)"],
        [(-1, 1), (-1, 1)],
    )
    charts = [
        get_entry(e).load().chart for e in ("sphere_x_space", "hemi_slant_product_sphere", "mixed_curvature_control")
    ]
    ratios = []
    for chart in charts + [surface]:
        p = chart.sample_points(1, seed=1)[0]
        ratios.append(codazzi_convergence(chart, p, 0.02)["ratio"])
    ok = worst <= 1e-4 and all(3.2 <= r <= 4.8 for r in ratios)
    record(8, ok, f"max residual {worst:.1e}; step-halving ratios {', '.join(f'{r:.2f}' for r in ratios)}")
    assert ok


def test_criterion_09_ricci_inequality():
    pairs, slack, cons, cor = [], [], [], []
    for eid in SFP_ENTRIES:
        chart = get_entry(eid).load().chart
        an = Analysis(chart, RunOptions(samples=5, seed=11))
        s = ricci_pairs(an, 10 - chart.d).summary()
        pairs.append(s["pairs"])
        slack += [s["min_bound_slack"], s["min_chen_slack"]]
        cons.append(s["max_consistency_residual"])
        cor += [v for v in (s["min_antiinvariant_corollary_slack"], s["min_slant_corollary_slack"]) if v is not None]
    for eid in ENTRY_IDS:
        an = Analysis(get_entry(eid).load().chart, RunOptions(samples=5, seed=11))
        if is_trace_free_structure(an.M):
            s = ricci_pairs(an, 8).summary()
            cor += [
                v for v in (s["min_antiinvariant_corollary_slack"], s["min_slant_corollary_slack"]) if v is not None
            ]
    ok = min(pairs) >= 50 and min(slack) >= -1e-8 and max(cons) <= 1e-6 and bool(cor) and min(cor) >= -1e-8
    record(
        9,
        ok,
        f">= {min(pairs)} pairs on each of {len(SFP_ENTRIES)} space-form entries, min slack {min(slack):.1e}, "
        f"two-path consistency {max(cons):.1e}; {len(cor)} corollary bounds, min slack {min(cor):.1e}",
    )
    assert ok


def test_criterion_10_determinism(tmp_path, capsys):
    paths = export_manifests(tmp_path)
    identical = True
    codes = {}
    for path in paths:
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        codes[path.stem] = cli.main(["report", str(path), "--seed", "4", "-o", str(a)])
        cli.main(["report", str(path), "--seed", "4", "-o", str(b)])
        identical &= a.read_bytes() == b.read_bytes()
        d = json.loads(a.read_text())
        identical &= d["seed"] == 4 and d["summary"]["exit_code"] == codes[path.stem]
    expected = {e.id: int("Fail" in e.expected.verdicts.values()) for e in catalog_entries()}
    (tmp_path / "broken.json").write_text("{")
    load_code = cli.main(["report", str(tmp_path / "broken.json")])
    capsys.readouterr()
    ok = identical and codes == expected and load_code == 2
    record(
        10,
        ok,
        f"{len(paths)} manifests give byte-identical reports; "
        "exit codes 0/1 match expected failures; load error exits 2",
    )
    assert ok
