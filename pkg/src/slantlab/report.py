"""Run a manifest through classification and the check registry, then render the result.

Serialization is canonical: keys sorted, two-space indentation, floats printed with 17
significant digits, and no timestamps, so two runs with the same manifest and seed give
identical bytes.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, extrinsic
from .manifest import Manifest
from .theorems import CHECKS, Analysis, CheckResult, RunOptions, run_check

ANCHORS = {spec.check_id: spec.anchor for spec in CHECKS}


@dataclass
class CheckReport:
    manifest: dict
    classification: dict
    checks: list[CheckResult]
    ricci: dict | None
    seed: int
    samples: int
    tolerances: dict
    notes: list[str] = field(default_factory=list)
    version: str = __version__

    @property
    def counts(self) -> dict:
        out = {"Pass": 0, "Fail": 0, "Skipped": 0}
        for c in self.checks:
            out[c.verdict] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if any(c.verdict == "Fail" for c in self.checks) else 0

    def to_dict(self) -> dict:
        return {
            "tool": {"name": "slantlab", "version": self.version},
            "manifest": self.manifest,
            "seed": self.seed,
            "samples": self.samples,
            "tolerances": self.tolerances,
            "classification": self.classification,
            "notes": list(self.notes),
            "checks": [dict(c.to_dict(), anchor=ANCHORS.get(c.check_id, "")) for c in self.checks],
            "ricci": self.ricci,
            "summary": dict(self.counts, exit_code=self.exit_code),
        }


def classification_summary(an: Analysis) -> dict:
    umb = extrinsic.umbilicity_residual([d.sff for d in an.data], an.tols.tol)
    base = {
        "umbilicity": umb.verdict,
        "umbilicity_residual": umb.residual,
        "mean_curvature_norm": umb.mean_curvature_norm,
    }
    c = an.classification
    if c is None:
        return dict(base, label="NotWellDefined", error=an.classification_error)
    return dict(
        base,
        label=c.label,
        description=c.describe(),
        theta=c.theta,
        theta_deviation=c.theta_deviation,
        p=c.p,
        q=c.q,
        mu=int(an.data[0].split.mu.shape[1]),
        clusters=[{"value": v, "multiplicity": k} for v, k in c.clusters],
        samples=c.samples,
    )


def _thread_cap(options: RunOptions) -> int:
    if options.threads:
        return max(1, options.threads)
    env = os.environ.get("SLANTLAB_THREADS", "")
    if env.strip().isdigit() and int(env) > 0:
        return int(env)
    return min(4, os.cpu_count() or 1)


def analyze(manifest: Manifest, options: RunOptions | None = None) -> Analysis:
    return Analysis(manifest.chart, options or manifest.run_options())


def run(manifest: Manifest, options: RunOptions | None = None, only=None) -> CheckReport:
    options = options or manifest.run_options()
    an = analyze(manifest, options)
    wanted = manifest.checks if only is None else tuple(only)
    specs = [s for s in CHECKS if s.check_id in wanted]
    threads = _thread_cap(options)
    if threads == 1:
        results = [run_check(an, s) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda s: run_check(an, s), specs))
    ricci = next((r.details for r in results if r.check_id == "ricci_inequality" and r.verdict != "Skipped"), None)
    return CheckReport(
        manifest=manifest.echo(),
        classification=classification_summary(an),
        checks=results,
        ricci=ricci,
        seed=options.seed,
        samples=len(an.points),
        tolerances=asdict(options.tolerances),
        notes=list(manifest.notes),
    )


# ------------------------------------------------------------------ canonical JSON


def _float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def _encode(obj, indent: int, out: list[str]) -> None:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, key in enumerate(sorted(obj, key=str)):
            out.append(f"{inner}{json.dumps(str(key), ensure_ascii=False)}: ")
            _encode(obj[key], indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(items):
            out.append(inner)
            _encode(item, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    out: list[str] = []
    _encode(obj, 0, out)
    return "".join(out) + "\n"


# ------------------------------------------------------------------ markdown


def _num(x) -> str:
    if x is None:
        return "-"
    return format(float(x), ".3e")


def render_markdown(report: CheckReport) -> str:
    d = report.to_dict()
    c = d["classification"]
    lines = [f"# slantlab report: {report.manifest.get('name', '') or 'unnamed'}", ""]
    if c["label"] == "NotWellDefined":
        lines.append(f"- classification: NotWellDefined ({c['error']})")
    else:
        theta = "-" if c["theta"] is None else format(c["theta"], ".12g")
        lines += [
            f"- classification: {c['description']}",
            f"- slant angle: {theta} (max deviation {_num(c['theta_deviation'])})",
            f"- dim D^perp = {c['p']}, dim D^theta = {c['q']}, dim mu = {c['mu']}",
            "- T^2 clusters: " + ", ".join(f"{k['value']:.12g} x{k['multiplicity']}" for k in c["clusters"]),
        ]
    lines.append(f"- umbilicity: {c['umbilicity']} (residual {_num(c['umbilicity_residual'])})")
    lines.append("")
    if report.notes:
        lines.append("## Notes")
        lines.append("")
        lines += [f"- {n}" for n in report.notes]
        lines.append("")
    lines += ["## Checks", "", "| check | anchor | max residual | tolerance | verdict |", "|---|---|---|---|---|"]
    for row in d["checks"]:
        verdict = row["verdict"] if row["verdict"] != "Skipped" else f"Skipped: {row['reason']}"
        anchor = row["anchor"].replace("|", "\\|")
        lines.append(
            f"| {row['check_id']} | {anchor} | {_num(row['max_residual'])} | {_num(row['tolerance'])} | {verdict} |"
        )
    lines.append("")
    if report.ricci:
        lines += ["## Ricci inequality", ""]
        for key in sorted(report.ricci):
            val = report.ricci[key]
            lines.append(f"- {key}: {val if isinstance(val, int) else _num(val)}")
        lines.append("")
    s = d["summary"]
    lines += [
        "## Run",
        "",
        f"- seed: {report.seed}, samples: {report.samples}",
        "- tolerances: " + ", ".join(f"{k}={v}" for k, v in sorted(report.tolerances.items())),
        f"- slantlab {report.version}",
        f"- pass {s['Pass']}, fail {s['Fail']}, skipped {s['Skipped']}; exit code {s['exit_code']}",
        "",
    ]
    return "\n".join(lines)


def render(report: CheckReport, fmt: str = "json") -> str:
    if fmt == "json":
        return canonical_json(report.to_dict())
    if fmt == "markdown":
        return render_markdown(report)
    raise ValueError(f"unknown format {fmt!r}")
