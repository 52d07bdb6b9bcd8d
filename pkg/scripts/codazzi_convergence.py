"""Step-halving study of the Codazzi residual: second-order differencing should shrink it by about 4."""

import argparse

from slantlab.ambient import space_form_product
from slantlab.catalog import catalog_entries
from slantlab.immersion import ImmersionChart
from slantlab.theorems import codazzi_convergence


def charts():
    for entry in catalog_entries():
        yield entry.id, entry.load().chart
    yield (
        "generic_surface_s2h2",
        ImmersionChart(
            space_form_product(2, 1.0, 2, -1.0),
            ["u", "v"],
            ["0.3*cos(u) + 0.1*v", "0.4*sin(v)", "0.2*u*v", "0.5*sin(u + v)"],
            [(-1, 1), (-1, 1)],
        ),
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.04, help="coarsest step")
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()
    for name, chart in charts():
        p = chart.sample_points(1, seed=1)[0]
        h, cells = args.step, []
        for _ in range(args.levels):
            r = codazzi_convergence(chart, p, h)
            ratio = "exact" if r["coarse"] < 1e-13 else f"{r['ratio']:.2f}"
            cells.append(f"h={h:.4g}: {r['coarse']:.2e} ratio {ratio}")
            h /= 2
        print(f"{name:<34} " + " | ".join(cells))


if __name__ == "__main__":
    main()
