"""Pin the (sigma, gamma) pair used by the Cantor end-to-end checks.

At depth 4 (ratio 1/3, mesh factor 4) every canonical ball is packed
greedily at gamma = 1/12.  Every ball small enough for the exhaustive
search is re-packed there and must do at least as well.  sigma is the
largest multiple of 0.05 not exceeding half the smallest greedy fraction,
which leaves room for the deeper levels.

    python3 scripts/pin_cantor_fixture.py [--out tests/fixtures/cantor_pin.json]
"""

import argparse
import json
import math
from fractions import Fraction
from pathlib import Path

from porosity_lab import exact_packing_oracle, gen_cantor
from porosity_lab.porosity import ORACLE_LIMIT, packed_fractions
from porosity_lab.qspace import ball_members, canonical_ball_arrays

GAMMA = Fraction(1, 12)
DEPTH = 4
MESH_FACTOR = 4
STEP = 0.05


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/fixtures/cantor_pin.json"))
    args = ap.parse_args()

    space = gen_cantor(1 / 3, DEPTH, MESH_FACTOR)
    gamma = float(GAMMA)
    greedy = packed_fractions(space, gamma)
    centers, radii, _ = canonical_ball_arrays(space)
    checked = 0
    oracle_min = math.inf
    for k, (c, r) in enumerate(zip(centers.tolist(), radii.tolist())):
        if ball_members(space, c, r).size > ORACLE_LIMIT:
            continue
        o = exact_packing_oracle(space, int(space.sample_ids[c]), gamma, radius=r)
        if o.achieved_sigma < greedy[k]:
            raise SystemExit(f"oracle below greedy at ball ({c}, {r})")
        oracle_min = min(oracle_min, o.achieved_sigma)
        checked += 1
    g_min = float(greedy.min())
    sigma = math.floor(g_min / 2 / STEP + 1e-9) * STEP
    rec = {
        "ratio": "1/3",
        "depth": DEPTH,
        "mesh_factor": MESH_FACTOR,
        "gamma": str(GAMMA),
        "sigma": round(sigma, 10),
        "greedy_min_fraction": g_min,
        "oracle_min_fraction_small_balls": oracle_min,
        "oracle_checked_balls": checked,
        "n_balls": int(greedy.size),
    }
    Path(args.out).write_text(json.dumps(rec, indent=2) + "\n")
    print(json.dumps(rec, indent=2))


if __name__ == "__main__":
    main()
