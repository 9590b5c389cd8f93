"""Compare the compiled and pure-Python permutation kernels.

Each backend runs in its own interpreter, since the backend is chosen at
import time.  Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, random, sys, time
from nikmon import e8, f2, kernels
from nikmon.bsgs import BSGSGroup

repeat = int(sys.argv[1])


def best(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


gens = [(k, f2.to_perm(f2.root_transvection(r))) for k, r in enumerate(e8.positive_roots())]
base = list(range(1, 256))
out = {"backend": kernels.BACKEND}
out["e8_mod2_bsgs"] = best(lambda: BSGSGroup(gens, base_points=base))

rng = random.Random(0)
pairs = [(gens[rng.randrange(120)][1], gens[rng.randrange(120)][1]) for _ in range(20)]
out["two_generator_bsgs_x20"] = best(lambda: [BSGSGroup([("a", a), ("b", b)], base_points=base) for a, b in pairs])

perms = []
for _ in range(200):
    p = kernels.identity()
    for _ in range(5):
        p = kernels.compose(p, gens[rng.randrange(120)][1])
    perms.append(p)
out["compose_x10000"] = best(lambda: [kernels.compose(a, b) for a in perms[:100] for b in perms[100:]])
out["invert_x10000"] = best(lambda: [kernels.invert(a) for a in perms * 50])

group = f2.e8_mod2_group()
inv = [lvl.inv_reps for lvl in group.levels]
out["sift_x2000"] = best(lambda: [kernels.sift(p, group.base, inv) for p in perms * 10])
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("NIKMON_PURE_PYTHON", None)
    if pure:
        env["NIKMON_PURE_PYTHON"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    if args.json:
        print(json.dumps({"default": fast, "python": slow}, indent=2))
        return
    if fast["backend"] != "cython":
        print("compiled kernels not built; both columns use the pure-Python backend")
    print(f"{'benchmark':<26}{fast['backend']:>12}{'python':>12}{'speedup':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<26}{fast[key]:>11.4f}s{slow[key]:>11.4f}s{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
