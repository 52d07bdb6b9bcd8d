"""Command line entry point.

Exit codes: 0 when every non-skipped check passes (or the command has nothing to judge),
1 when a check fails or a classification is not well defined, 2 when the manifest cannot be loaded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .catalog import catalog_entries, export_manifests
from .errors import SlantlabError
from .manifest import load_manifest
from .report import analyze, classification_summary, render, run
from .theorems import CHECK_IDS

EXIT_OK, EXIT_FAIL, EXIT_LOAD = 0, 1, 2


def _global_flags(default=None) -> argparse.ArgumentParser:
    # subcommands get SUPPRESS so flags given before the subcommand are not reset
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--tol", type=float, default=default, help="tolerance for algebraic identities")
    g.add_argument("--cluster-tol", type=float, default=default, help="T^2 eigenvalue clustering tolerance")
    g.add_argument("--angle-tol", type=float, default=default, help="allowed slant angle variation across samples")
    g.add_argument("--step", type=float, default=default, help="finite-difference step in parameter units")
    g.add_argument("--samples", type=int, default=default, help="number of sample points (per axis in grid mode)")
    g.add_argument("--seed", type=int, default=default, help="sampling seed")
    return common


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slantlab", description=__doc__.splitlines()[0], parents=[_global_flags()])
    common = _global_flags(argparse.SUPPRESS)
    ap.add_argument("--version", action="version", version=f"slantlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify the immersion in a manifest")
    p.add_argument("manifest")

    p = sub.add_parser("check", parents=[common], help="run checks and print one verdict line per check")
    p.add_argument("manifest")
    p.add_argument("--only", default=None, help="comma-separated check ids")

    p = sub.add_parser("catalog", parents=[common], help="list shipped example charts")
    p.add_argument("--export", metavar="DIR", default=None, help="write every entry as a manifest file")

    p = sub.add_parser("report", parents=[common], help="run all requested checks and emit a full report")
    p.add_argument("manifest")
    p.add_argument("--format", choices=("json", "markdown"), default="json")
    p.add_argument("--output", "-o", default=None, help="write to a file instead of stdout")
    return ap


def _options(manifest, args):
    return manifest.run_options(
        tol=args.tol,
        cluster_tol=args.cluster_tol,
        angle_tol=args.angle_tol,
        step=args.step,
        samples=args.samples,
        seed=args.seed,
    )


def _load(path):
    try:
        return load_manifest(path), None
    except (OSError, SlantlabError) as exc:
        return None, f"slantlab: cannot load {path}: {exc}"


def _cmd_classify(args) -> int:
    manifest, err = _load(args.manifest)
    if err:
        print(err, file=sys.stderr)
        return EXIT_LOAD
    an = analyze(manifest, _options(manifest, args))
    c = classification_summary(an)
    if c["label"] == "NotWellDefined":
        print(f"NotWellDefined: {c['error']}")
        return EXIT_FAIL
    clusters = ", ".join(f"{k['value']:.12g} x{k['multiplicity']}" for k in c["clusters"])
    print(c["description"])
    print(f"p={c['p']} q={c['q']} mu={c['mu']} T^2 clusters: {clusters}")
    for note in manifest.notes:
        print(f"note: {note}")
    return EXIT_OK


def _cmd_check(args) -> int:
    manifest, err = _load(args.manifest)
    if err:
        print(err, file=sys.stderr)
        return EXIT_LOAD
    only = None
    if args.only:
        only = [s.strip() for s in args.only.split(",") if s.strip()]
        unknown = [s for s in only if s not in CHECK_IDS]
        if unknown:
            print(f"slantlab: unknown check id {unknown[0]!r}", file=sys.stderr)
            return EXIT_LOAD
    rep = run(manifest, _options(manifest, args), only=only)
    print(f"classification: {rep.classification.get('description', rep.classification['label'])}")
    for c in rep.checks:
        res = "-" if c.max_residual is None else f"{c.max_residual:.3e}"
        tail = f" ({c.reason})" if c.verdict == "Skipped" and c.reason else ""
        print(f"{c.verdict:<8} {c.check_id:<34} residual {res}{tail}")
    return rep.exit_code


def _cmd_catalog(args) -> int:
    if args.export:
        for path in export_manifests(args.export):
            print(path)
        return EXIT_OK
    for e in catalog_entries():
        theta = "" if e.expected.theta is None else f" theta={e.expected.theta:.12g}"
        print(f"{e.id:<30} {e.expected.label}{theta}  {e.description}")
    return EXIT_OK


def _cmd_report(args) -> int:
    manifest, err = _load(args.manifest)
    if err:
        print(err, file=sys.stderr)
        return EXIT_LOAD
    rep = run(manifest, _options(manifest, args))
    text = render(rep, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return rep.exit_code


COMMANDS = {"classify": _cmd_classify, "check": _cmd_check, "catalog": _cmd_catalog, "report": _cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
