"""Regenerate tests/fixtures/network_oracle_cases.json.

Draws 25 small synthetic instances (<= 4 DMUs, <= 2 measures per role,
integer data in [1, 9]) and solves the two-stage system models and the
chain scale-size model by exhaustive active-set enumeration.  Each
instance carries five measure groups (a..e) read as either network shape:

  general two-stage:  a -> (b, c) in stage 1;  (d, b) -> e in stage 2
  series-parallel:    a -> b and c -> d in parallel, then (b, d) -> e

Instance 0 is the single-DMU case and instance 1 the identical-DMU case;
the rest are random with dimensions capped so enumeration stays tractable.
Expect a few minutes of runtime; results are deterministic for the seed.
"""

import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

TESTS = Path(__file__).resolve().parent.parent / "tests"
sys.path.insert(0, str(TESTS))

import net_oracle  # noqa: E402

SEED = 46_115
N_INSTANCES = 25
BASES_CAP = 5_000_000
GROUPS = ("a", "b", "c", "d", "e")


def enumeration_costs(n, sizes):
    ga, gb, gc, gd, ge = sizes
    ineq = ga + 2 * gb + gc + gd + ge
    nv_var = 2 * n + 4 + gb
    nv_rad = 2 * n + 4
    cost_var = math.comb(ineq + nv_var, nv_var - 2)
    cost_rad = math.comb(ineq + nv_rad, nv_rad - 2)
    chain_ineq = ga + 2 * gb + gc + 2 * gd + ge
    nv_chain = 3 * n + 3 + gb + gd
    cost_chain = math.comb(chain_ineq + nv_chain, nv_chain - 3)
    return cost_var, cost_rad, cost_chain


def draw_sizes(rng, n):
    # stratified by n so the suite actually covers 2-4 DMUs; only the
    # measure-role sizes are resampled against the enumeration cost cap
    while True:
        sizes = tuple(int(rng.integers(1, 3)) for _ in GROUPS)
        if max(enumeration_costs(n, sizes)) <= BASES_CAP:
            return sizes


def make_instance(rng, index):
    if index == 0:
        n, sizes = 1, (1, 1, 1, 1, 1)
        data = rng.integers(1, 10, (1, 5)).astype(float)
    elif index == 1:
        n, sizes = 3, (1, 1, 1, 1, 1)
        row = rng.integers(1, 10, (1, 5)).astype(float)
        data = np.repeat(row, 3, axis=0)
    else:
        n = (2, 3, 4)[index % 3]
        sizes = draw_sizes(rng, n)
        data = rng.integers(1, 10, (n, sum(sizes))).astype(float)
    splits = np.cumsum(sizes)[:-1]
    blocks = dict(zip(GROUPS, np.hsplit(data, splits)))
    return n, sizes, blocks


def main():
    rng = np.random.default_rng(SEED)
    cases = []
    t_start = time.time()
    for index in range(N_INSTANCES):
        n, sizes, blocks = make_instance(rng, index)
        oracle_dmu = int(rng.integers(n))
        t0 = time.time()
        general = net_oracle.general_scores(
            blocks["a"], blocks["b"], blocks["c"], blocks["d"], blocks["e"], oracle_dmu
        )
        chain_unit, chain_half = net_oracle.chain_mpss_scores(
            blocks["a"], blocks["b"], blocks["c"], blocks["d"], blocks["e"],
            oracle_dmu, [(1.0, 1.0, 1.0), (1.0, 0.5, 0.5)],
        )
        kind = {0: "single_dmu", 1: "identical_dmus"}.get(index, "random")
        cases.append({
            "name": f"case{index:02d}",
            "kind": kind,
            "n_dmus": n,
            "group_sizes": list(sizes),
            "groups": {g: blocks[g].tolist() for g in GROUPS},
            "oracle_dmu": oracle_dmu,
            "oracle": {
                "general_variable": general["variable"],
                "general_radial": general["radial"],
                "chain_unit": chain_unit,
                "chain_half": chain_half,
            },
        })
        print(f"{cases[-1]['name']} kind={kind} n={n} sizes={sizes} "
              f"dmu={oracle_dmu} done in {time.time() - t0:.1f}s", flush=True)
    out = TESTS / "fixtures" / "network_oracle_cases.json"
    payload = {"seed": SEED, "bases_cap": BASES_CAP, "cases": cases}
    out.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    print(f"wrote {out} in {time.time() - t_start:.0f}s total")


if __name__ == "__main__":
    main()
