import json

import pytest

from slantlab import cli
from slantlab.catalog import catalog_entries, export_manifests, get_entry
from slantlab.errors import NotLocallyProduct, UnknownIdentifier, ValidationError
from slantlab.manifest import load_manifest, parse_manifest
from slantlab.report import canonical_json, render, run
from slantlab.theorems import CHECK_IDS


@pytest.fixture(scope="module")
def manifests(tmp_path_factory):
    out = tmp_path_factory.mktemp("manifests")
    export_manifests(out)
    return out


def base_manifest():
    return json.loads(json.dumps(get_entry("hemi_slant_pi3").manifest))


def write(tmp_path, data, name="m.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


# ---------------------------------------------------------------- manifests


def test_exported_manifests_round_trip(manifests):
    for e in catalog_entries():
        m = load_manifest(manifests / f"{e.id}.json")
        assert m.echo() == e.manifest
        assert m.chart.d == len(e.manifest["immersion"]["params"])


def test_identity_structure_is_rejected():
    data = base_manifest()
    data["ambient"]["structure"] = {
        "kind": "custom",
        "matrix": [[1.0 if i == j else 0.0 for j in range(6)] for i in range(6)],
    }
    with pytest.raises(ValidationError, match="F = \\+-I forbidden"):
        parse_manifest(data)


def test_undeclared_parameter():
    data = base_manifest()
    data["immersion"]["components"][0] = "q*2"
    with pytest.raises(UnknownIdentifier):
        parse_manifest(data)


def test_non_parallel_structure_is_rejected():
    data = {
        "ambient": {
            "metric": "space_form_product",
            "m1": 2,
            "c1": 1.0,
            "m2": 2,
            "c2": 1.0,
            "structure": {"kind": "custom", "matrix": [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]]},
        },
        "immersion": {"params": ["u"], "components": ["u", "0", "0", "0"], "domain": [[0, 1]]},
    }
    with pytest.raises(NotLocallyProduct):
        parse_manifest(data)


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.update(extra=1), "manifest.extra"),
        (lambda d: d["ambient"].pop("metric"), "ambient.metric"),
        (lambda d: d["ambient"].update(metric="hyperbolic"), "ambient.metric"),
        (lambda d: d["ambient"].update(dim=5), "ambient.structure.kind"),
        (lambda d: d["immersion"].update(domain=[[0, 1]]), "immersion.domain"),
        (lambda d: d.update(sampling={"mode": "sobol"}), "sampling.mode"),
        (lambda d: d.update(tolerances={"tol": -1}), "tolerances.tol"),
        (lambda d: d.update(checks=["nope"]), "checks"),
    ],
)
def test_validation_errors_name_the_field(mutate, field):
    data = base_manifest()
    mutate(data)
    with pytest.raises(ValidationError) as info:
        parse_manifest(data)
    assert info.value.field == field


def test_invalid_json(tmp_path):
    with pytest.raises(ValidationError, match="invalid JSON"):
        load_manifest(write(tmp_path, "{not json"))


def test_checks_subset_and_overrides():
    data = base_manifest()
    data["checks"] = ["codazzi", "operator_identities"]
    data["tolerances"] = {"tol": 1e-8}
    m = parse_manifest(data)
    assert m.checks == ("operator_identities", "codazzi")
    opts = m.run_options(seed=7, cluster_tol=1e-7)
    assert (opts.seed, opts.tolerances.tol, opts.tolerances.cluster_tol) == (7, 1e-8, 1e-7)


# ---------------------------------------------------------------- reports


def test_canonical_json_formatting():
    text = canonical_json({"b": 0.1, "a": [1, True, None, float("nan")], "c": {}})
    assert (
        text
        == '{\n  "a": [\n    1,\n    true,\n    null,\n    "NaN"\n  ],\n  "b": 0.10000000000000001,\n  "c": {}\n}\n'
    )


def test_report_echoes_run_setup():
    m = get_entry("hemi_slant_pi3").load()
    rep = run(m, m.run_options(seed=3, samples=2))
    d = json.loads(render(rep, "json"))
    assert d["seed"] == 3 and d["samples"] == 2
    assert d["tolerances"]["tol"] == 1e-9
    assert d["manifest"] == m.echo()
    assert d["classification"]["label"] == "HemiSlant"
    assert [c["check_id"] for c in d["checks"]] == list(CHECK_IDS)


def test_markdown_has_one_row_per_check():
    m = get_entry("published_example_r6").load()
    md = render(run(m, m.run_options(samples=2)), "markdown")
    rows = [line for line in md.splitlines() if line.startswith("| ") and not line.startswith("| check")]
    assert [r.split(" | ")[0][2:] for r in rows] == list(CHECK_IDS)
    assert "published claim" in md


def test_thread_count_does_not_change_bytes(monkeypatch):
    m = get_entry("sphere_x_space").load()
    monkeypatch.setenv("SLANTLAB_THREADS", "1")
    a = render(run(m), "json")
    monkeypatch.setenv("SLANTLAB_THREADS", "4")
    b = render(run(m), "json")
    assert a == b


# ---------------------------------------------------------------- command line


def test_exit_codes(manifests, tmp_path, capsys):
    assert cli.main(["check", str(manifests / "hemi_slant_pi3.json"), "--samples", "2"]) == 0
    assert cli.main(["check", str(manifests / "mixed_curvature_control.json"), "--samples", "2"]) == 1
    assert cli.main(["classify", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["report", str(write(tmp_path, "{"))]) == 2
    assert cli.main(["check", str(manifests / "hemi_slant_pi3.json"), "--only", "bogus"]) == 2
    assert "cannot load" in capsys.readouterr().err


def test_classify_prints_note(manifests, capsys):
    assert cli.main(["classify", str(manifests / "published_example_r6.json")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("SemiInvariant\n")
    assert "published claim" in out


def test_only_restricts_checks(manifests, capsys):
    cli.main(["check", str(manifests / "hemi_slant_pi3.json"), "--only", "codazzi,slant_identities"])
    lines = capsys.readouterr().out.splitlines()[1:]
    assert [line.split()[1] for line in lines] == ["slant_identities", "codazzi"]


def test_global_flags_before_and_after_subcommand(manifests, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["--seed", "5", "report", str(manifests / "invariant_plane.json"), "-o", str(a)])
    cli.main(["report", str(manifests / "invariant_plane.json"), "--seed", "5", "-o", str(b)])
    assert json.loads(a.read_text())["seed"] == 5
    assert a.read_bytes() == b.read_bytes()


def test_catalog_listing_and_export(tmp_path, capsys):
    assert cli.main(["catalog"]) == 0
    assert "hemi_slant_pi3" in capsys.readouterr().out
    assert cli.main(["catalog", "--export", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.json"))) == len(catalog_entries())
