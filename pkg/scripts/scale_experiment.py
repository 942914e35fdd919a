#!/usr/bin/env python3
"""TE of MCEETS vs MaxUtil over seeded synthetic instances, one block per size class.

    python scripts/scale_experiment.py --sizes 100x20 500x100 1000x200 --seed 1
"""
from __future__ import annotations

import argparse
import json
import time
from concurrent.futures import ProcessPoolExecutor

from energysched.energy import PowerModel, compute_metrics, savings_percent
from energysched.schedulers import SchedulerConfig
from energysched.simkernel import run
from energysched.workload import GenSpec, generate_dataset


def one(args):
    n, m, k, seed, lam = args
    ds = generate_dataset(GenSpec(task_count=n, vm_count=m, instance_count=10, seed=seed), k)
    t0 = time.perf_counter()
    res = {p: compute_metrics(run(ds, SchedulerConfig(p, lam)), PowerModel()) for p in ("mceets", "maxutil")}
    return {
        "size": f"{n}x{m}", "instance": k,
        "te_mceets": res["mceets"].total_energy, "te_maxutil": res["maxutil"].total_energy,
        "vms_mceets": res["mceets"].vms_used, "vms_maxutil": res["maxutil"].vms_used,
        "seconds": time.perf_counter() - t0,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["100x20", "500x100", "1000x200", "5000x1000", "10000x2000"])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.5)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--json", action="store_true", help="dump rows as JSON instead of a table")
    args = ap.parse_args()

    work = []
    for size in args.sizes:
        n, m = map(int, size.lower().split("x"))
        work += [(n, m, k, args.seed, args.lam) for k in range(1, args.instances + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(one, work))
    else:
        rows = [one(w) for w in work]

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'size':<12}{'inst':>5}{'MCEETS':>13}{'MaxUtil':>13}{'sav%':>8}{'VMs':>11}{'sec':>7}")
    for r in rows:
        sav = savings_percent(r["te_mceets"], r["te_maxutil"])
        vms = f"{r['vms_mceets']}/{r['vms_maxutil']}"
        print(f"{r['size']:<12}{'i' + str(r['instance']):>5}{r['te_mceets']:13.0f}{r['te_maxutil']:13.0f}"
              f"{sav:8.2f}{vms:>11}{r['seconds']:7.2f}")
    for size in dict.fromkeys(r["size"] for r in rows):
        block = [r for r in rows if r["size"] == size]
        wins = sum(r["te_mceets"] <= r["te_maxutil"] for r in block)
        print(f"{size}: MCEETS <= MaxUtil on {wins}/{len(block)}")


if __name__ == "__main__":
    main()
