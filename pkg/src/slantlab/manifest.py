"""Manifest files: a strict JSON schema describing one ambient, one immersion and a run setup.

Schema (all keys lower-case; unknown keys are rejected)::

    {
      "name": "hemi_slant_pi3",
      "ambient": {
        "metric": "flat" | "space_form_product",
        "dim": 6,                                   # flat only
        "m1": 2, "c1": 1.0, "m2": 2, "c2": -1.0,    # space_form_product only
        "structure": {"kind": "swap"} | {"kind": "sign"} | {"kind": "custom", "matrix": [[...], ...]}
      },
      "immersion": {
        "params": ["u", "v"],
        "components": ["cos(u)", ...],              # one expression per ambient coordinate
        "domain": [[lo, hi], ...]                   # one interval per parameter
      },
      "sampling": {"mode": "random" | "grid", "count": 6, "seed": 0},
      "tolerances": {"tol": 1e-9, "cluster_tol": 1e-6, "angle_tol": 1e-6, "step": null},
      "checks": "all" | ["codazzi", ...],
      "notes": ["free text"]
    }

"sampling", "tolerances", "checks" and "notes" are optional. For swap the ambient
dimension must be even; for sign the split is (m1, m2) of a space-form product or
dim/2 + dim/2 in the flat case unless "m1" is given.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import expr as ex
from .ambient import AmbientManifold, MetricModel, ProductStructure
from .errors import ValidationError
from .immersion import ImmersionChart
from .theorems import CHECK_IDS, RunOptions, Tolerances

TOP_KEYS = {"name", "ambient", "immersion", "sampling", "tolerances", "checks", "notes"}
AMBIENT_KEYS = {"metric", "dim", "m1", "c1", "m2", "c2", "structure"}
IMMERSION_KEYS = {"params", "components", "domain"}
SAMPLING_KEYS = {"mode", "count", "seed"}
TOLERANCE_KEYS = {"tol", "cluster_tol", "angle_tol", "step"}


@dataclass
class Manifest:
    name: str
    ambient: AmbientManifold
    chart: ImmersionChart
    sampling: dict
    tolerances: dict
    checks: tuple[str, ...]
    notes: list[str] = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    def run_options(self, **overrides) -> RunOptions:
        tol = {k: v for k, v in self.tolerances.items() if v is not None}
        for key in TOLERANCE_KEYS & set(overrides):
            value = overrides.pop(key)
            if value is not None:
                tol[key] = value
        samples = overrides.pop("samples", None) or self.sampling["count"]
        seed = overrides.pop("seed", None)
        seed = self.sampling["seed"] if seed is None else seed
        return RunOptions(Tolerances(**tol), samples=samples, seed=seed, mode=self.sampling["mode"], **overrides)

    def echo(self) -> dict:
        return self.raw


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ValidationError(f"{where}.{key}", "missing")
    return block[key]


def _no_extra(block: dict, allowed: set, where: str):
    if not isinstance(block, dict):
        raise ValidationError(where, "must be an object")
    extra = set(block) - allowed
    if extra:
        raise ValidationError(f"{where}.{sorted(extra)[0]}", "unknown key")


def _int(value, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(where, f"must be an integer >= {minimum}")
    return value


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(where, "must be a number")
    return float(value)


def build_ambient(block: dict, *, validate: bool = True) -> AmbientManifold:
    _no_extra(block, AMBIENT_KEYS, "ambient")
    kind = _require(block, "metric", "ambient")
    if kind == "flat":
        metric = MetricModel.flat(_int(_require(block, "dim", "ambient"), "ambient.dim", 2))
    elif kind == "space_form_product":
        metric = MetricModel.space_form_product(
            _int(_require(block, "m1", "ambient"), "ambient.m1", 1),
            _num(_require(block, "c1", "ambient"), "ambient.c1"),
            _int(_require(block, "m2", "ambient"), "ambient.m2", 1),
            _num(_require(block, "c2", "ambient"), "ambient.c2"),
        )
    else:
        raise ValidationError("ambient.metric", f"unknown metric model {kind!r}")
    sblock = _require(block, "structure", "ambient")
    _no_extra(sblock, {"kind", "matrix"}, "ambient.structure")
    skind = _require(sblock, "kind", "ambient.structure")
    m = metric.dim
    if skind == "swap":
        if m % 2:
            raise ValidationError("ambient.structure.kind", "swap needs an even dimension")
        structure = ProductStructure.swap(m // 2)
    elif skind == "sign":
        m1 = metric.m1 if metric.kind == "space_form_product" else block.get("m1", m // 2)
        structure = ProductStructure.sign(m1, m - m1)
    elif skind == "custom":
        structure = ProductStructure.custom(_require(sblock, "matrix", "ambient.structure"))
    else:
        raise ValidationError("ambient.structure.kind", f"unknown structure {skind!r}")
    return AmbientManifold(metric, structure, validate=validate)


def build_chart(block: dict, ambient: AmbientManifold, name: str = "") -> ImmersionChart:
    _no_extra(block, IMMERSION_KEYS, "immersion")
    params = _require(block, "params", "immersion")
    if not isinstance(params, list) or not all(isinstance(p, str) for p in params):
        raise ValidationError("immersion.params", "must be a list of names")
    if len(set(params)) != len(params):
        raise ValidationError("immersion.params", "duplicate parameter name")
    comps = _require(block, "components", "immersion")
    if not isinstance(comps, list) or not all(isinstance(c, str) for c in comps):
        raise ValidationError("immersion.components", "must be a list of expression strings")
    parsed = [ex.parse(c, params) for c in comps]
    return ImmersionChart(ambient, params, parsed, _require(block, "domain", "immersion"), name=name)


def parse_manifest(data: dict, *, validate_ambient: bool = True) -> Manifest:
    _no_extra(data, TOP_KEYS, "manifest")
    name = data.get("name", "")
    ambient = build_ambient(_require(data, "ambient", "manifest"), validate=validate_ambient)
    chart = build_chart(_require(data, "immersion", "manifest"), ambient, name)
    sampling = {"mode": "random", "count": 6, "seed": 0}
    if "sampling" in data:
        _no_extra(data["sampling"], SAMPLING_KEYS, "sampling")
        sampling.update(data["sampling"])
    if sampling["mode"] not in ("random", "grid"):
        raise ValidationError("sampling.mode", "must be random or grid")
    _int(sampling["count"], "sampling.count", 1)
    _int(sampling["seed"], "sampling.seed", 0)
    tolerances = dict(data.get("tolerances", {}))
    _no_extra(tolerances, TOLERANCE_KEYS, "tolerances")
    for key, value in tolerances.items():
        if value is not None and (_num(value, f"tolerances.{key}") <= 0):
            raise ValidationError(f"tolerances.{key}", "must be positive")
    checks = data.get("checks", "all")
    if checks == "all":
        checks = CHECK_IDS
    elif isinstance(checks, list):
        for c in checks:
            if c not in CHECK_IDS:
                raise ValidationError("checks", f"unknown check id {c!r}")
        checks = tuple(c for c in CHECK_IDS if c in checks)
    else:
        raise ValidationError("checks", 'must be "all" or a list of check ids')
    return Manifest(name, ambient, chart, sampling, tolerances, checks, list(data.get("notes", [])), data)


def load_manifest(path) -> Manifest:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("manifest", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_manifest(data)
