"""Tabulate A1 constants, hole doubling and packing across depths.

    python3 scripts/resolution_sweep.py cantor --depths 4 5 6 7
    python3 scripts/resolution_sweep.py lacunary --depths 4 7 10 --csv lacunary.csv
    python3 scripts/resolution_sweep.py grid --depths 3 4 5 6 7 8 --alphas 0.5
"""

import argparse
import json

from porosity_lab.generators import GeneratorSpec, parse_number
from porosity_lab.muckenhoupt import resolution_sweep
from porosity_lab.pipeline import write_trend_csv

DEFAULTS = {
    "cantor": GeneratorSpec(kind="cantor", mesh_factor=4),
    "lacunary": GeneratorSpec(kind="lacunary"),
    "grid": GeneratorSpec(kind="grid", obstacles=((0.0,),)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("kind", choices=sorted(DEFAULTS))
    ap.add_argument("--depths", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.1, 0.5])
    ap.add_argument("--gamma", type=parse_number, default=1 / 12)
    ap.add_argument("--csv")
    args = ap.parse_args()

    rows = resolution_sweep(DEFAULTS[args.kind], args.alphas, args.depths, gamma=args.gamma)
    for row in rows:
        print(json.dumps(row))
    if args.csv:
        write_trend_csv(rows, args.csv)


if __name__ == "__main__":
    main()
