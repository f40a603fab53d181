"""Cut search: numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_cuts.py [--repeat N]

Each back end runs in its own interpreter (the choice is made at import time from
NEGASM_DISABLE_NUMBA).  Both must report identical minimum cuts.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def random_assembly(rng, n: int):
    """Connected polyomino of ``n`` tiles with mostly weak or negative glues."""
    from fractions import Fraction

    from negasm.model import Assembly, Glue, Tile

    cells = {(0, 0)}
    while len(cells) < n:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
        cells.add((x + dx, y + dy))
    strengths = [Fraction(k, 8) for k in range(-8, 6)]
    ids = {f"g{i}": rng.choice(strengths) for i in range(6)}
    tiles = {}
    for i, c in enumerate(sorted(cells)):
        glues = {}
        for face in "nesw":
            gid = rng.choice(sorted(ids))
            glues[face] = Glue(gid, ids[gid])
        tiles[c] = Tile(name=f"t{i}", **glues)
    return Assembly(tiles)


def workload():
    import random

    from negasm import graphwalk, tm
    from negasm.cuts import enumerate_breaks, min_cut_weight

    stages = graphwalk.transition_stages("0", "1")
    m = tm.bouncer(3)
    st = tm.reference_tm_run(m, 3)[-1]
    stages += [a for _, a in tm.transition_stages(m, st)]
    rng = random.Random(7)
    randoms = [random_assembly(rng, rng.randint(24, 40)) for _ in range(40)]
    return stages, randoms, min_cut_weight, enumerate_breaks


def child(repeat: int) -> None:
    from negasm import _kernels

    stages, randoms, min_cut_weight, enumerate_breaks = workload()
    # warm up (numba compiles on first call)
    min_cut_weight(stages[0])
    t = time.perf_counter()
    out = []
    for _ in range(repeat):
        out = [(str(min_cut_weight(a)), len(enumerate_breaks(a))) for a in stages]
        # random assemblies are mostly unstable with many breaks, so only the minimum
        out += [str(min_cut_weight(a)) for a in randoms]
    dt = time.perf_counter() - t
    print(json.dumps({"numba": _kernels.USE_NUMBA, "seconds": dt, "results": out}))


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        child(args.repeat)
        return 0
    rows = {}
    for name, flag in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ, NEGASM_DISABLE_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        rows[name] = json.loads(proc.stdout.strip().splitlines()[-1])
    same = rows["numba"]["results"] == rows["numpy"]["results"]
    n = len(rows["numba"]["results"])
    print(f"{n} assemblies x {args.repeat} repeats")
    for name, r in rows.items():
        print(f"  {name:6s} numba={r['numba']!s:5s} {r['seconds']:8.3f} s")
    print(f"  speedup {rows['numpy']['seconds'] / max(rows['numba']['seconds'], 1e-9):.1f}x, results identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
