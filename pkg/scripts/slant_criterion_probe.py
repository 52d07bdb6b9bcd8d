"""Compare the tensorial integrability criterion for the slant distribution with its actual
non-closure under brackets, on every catalog entry that has a two-dimensional or larger slant part.

The criterion term coincides with T[Z,W], which always lies in the slant distribution, so the
first column stays at rounding level even where the second column shows D^theta is not involutive.
"""

import argparse

from slantlab.catalog import catalog_entries
from slantlab.theorems import CHECKS, Analysis, RunOptions, run_check

SPEC = next(s for s in CHECKS if s.check_id == "slant_integrability")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=4)
    args = ap.parse_args()
    print(f"{'entry':<34} {'criterion':>10} {'non-closure':>12}  verdict")
    for entry in catalog_entries():
        an = Analysis(entry.load().chart, RunOptions(samples=args.samples, seed=3))
        res = run_check(an, SPEC)
        if res.verdict == "Skipped":
            continue
        d = res.details
        if "criterion_residual" not in d:
            print(f"{entry.id:<34} {'-':>10} {'-':>12}  dim D^theta = {d['dim_Dtheta']}")
            continue
        print(f"{entry.id:<34} {d['criterion_residual']:>10.1e} {d['nonclosure']:>12.1e}  {res.verdict}")


if __name__ == "__main__":
    main()
