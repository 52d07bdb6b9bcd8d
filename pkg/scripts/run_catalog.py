"""Run every catalog entry and print its classification and per-check verdicts next to the expected ones."""

import argparse

from slantlab.catalog import catalog_entries
from slantlab.report import run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    mismatches = 0
    for entry in catalog_entries():
        manifest = entry.load()
        rep = run(manifest, manifest.run_options(samples=args.samples, seed=args.seed))
        got = {c.check_id: c.verdict for c in rep.checks}
        diff = {k: (v, got.get(k)) for k, v in entry.expected.verdicts.items() if got.get(k) != v}
        mismatches += bool(diff)
        counts = rep.counts
        print(
            f"{entry.id:<34} {rep.classification['label']:<14} "
            f"pass {counts['Pass']:>2} fail {counts['Fail']:>2} skip {counts['Skipped']:>2}"
            + (f"  UNEXPECTED {diff}" if diff else "")
        )
    print(f"{mismatches} entries deviate from their expected verdicts")
    return int(mismatches > 0)


if __name__ == "__main__":
    raise SystemExit(main())
