#!/usr/bin/env python3
"""Mean TE and win count of MCEETS against MaxUtil as the fitness weight varies."""
import argparse

import numpy as np

from energysched.energy import compute_metrics
from energysched.schedulers import SchedulerConfig
from energysched.simkernel import run
from energysched.workload import GenSpec, generate_dataset

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--tasks", type=int, default=1000)
ap.add_argument("--vms", type=int, default=200)
ap.add_argument("--seed", type=int, default=1)
ap.add_argument("--steps", type=int, default=11)
args = ap.parse_args()

spec = GenSpec(task_count=args.tasks, vm_count=args.vms, seed=args.seed)
datasets = [generate_dataset(spec, k) for k in range(1, spec.instance_count + 1)]
base = np.array([compute_metrics(run(ds, SchedulerConfig("maxutil"))).total_energy for ds in datasets])
print(f"MaxUtil mean TE {base.mean():.1f}")
for lam in np.linspace(0, 1, args.steps):
    te = np.array([compute_metrics(run(ds, SchedulerConfig("mceets", float(lam)))).total_energy for ds in datasets])
    print(f"lambda={lam:.2f}  mean TE {te.mean():10.1f}  wins {(te <= base).sum()}/{len(te)}")
