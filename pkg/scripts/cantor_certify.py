"""Certify weak porosity of the middle-third Cantor set at increasing depth.

Uses the (sigma, gamma) pair pinned in tests/fixtures/cantor_pin.json and
reports the smallest packed fraction, hole doubling constant and runtime.

    python3 scripts/cantor_certify.py --depths 4 5 6 7
"""

import argparse
import json
import time
from fractions import Fraction
from pathlib import Path

from porosity_lab import certify_porosity, gen_cantor
from porosity_lab.holes import hole_sweep

PIN = Path(__file__).resolve().parents[1] / "tests/fixtures/cantor_pin.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", type=int, nargs="+", default=[4, 5, 6, 7])
    ap.add_argument("--mesh-factor", type=int, default=4)
    args = ap.parse_args()

    pin = json.loads(PIN.read_text())
    sigma, gamma = float(pin["sigma"]), float(Fraction(pin["gamma"]))
    for depth in args.depths:
        t0 = time.perf_counter()
        space = gen_cantor(1 / 3, depth, args.mesh_factor)
        cert = certify_porosity(space, sigma, gamma, materialize=False)
        hs = hole_sweep(space)
        print(json.dumps({
            "depth": depth,
            "n_sample": space.n_sample,
            "certified": cert.certified,
            "min_packed_fraction": cert.min_packed_fraction,
            "hole_C": hs.C,
            "hole_violations": hs.n_violations,
            "seconds": round(time.perf_counter() - t0, 2),
        }))


if __name__ == "__main__":
    main()
