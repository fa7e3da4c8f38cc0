"""Run the porosity-to-decay chain on the Macias-Segovia distance of a Cantor set.

Prints the derived constants (p, q, alpha*), whether the measured
neighborhood decay stays below q**k, and the A1 constant at alpha*/2.

    python3 scripts/decay_chain.py --depths 5 6
"""

import argparse
import json
from fractions import Fraction
from pathlib import Path

from porosity_lab import gen_cantor
from porosity_lab.pipeline import decay_chain

PIN = Path(__file__).resolve().parents[1] / "tests/fixtures/cantor_pin.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", type=int, nargs="+", default=[5, 6])
    ap.add_argument("--k-max", type=int, default=8)
    args = ap.parse_args()

    pin = json.loads(PIN.read_text())
    sigma, gamma = float(pin["sigma"]), float(Fraction(pin["gamma"]))
    for depth in args.depths:
        out = decay_chain(gen_cantor(1 / 3, depth, 1), sigma, gamma, k_max=args.k_max)
        out.pop("profile")
        print(json.dumps({"depth": depth, **out}))


if __name__ == "__main__":
    main()
