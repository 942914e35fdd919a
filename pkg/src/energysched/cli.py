"""Command-line entry point.

Exit codes: 0 success, 2 usage, 3 I/O failure, 4 infeasible schedule,
5 worked-example reproduction failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .energy import EnergyMetrics, PowerModel, compare, compute_metrics
from .errors import InvalidSpec, ParseError, PoolExhausted, TaskError
from .example import example_dataset, render_report, reproduce
from .schedulers import POLICIES, SchedulerConfig
from .simkernel import gantt_csv, run, trace_json
from .workload import Dataset, GenSpec, generate_dataset, read_dataset, write_dataset

log = logging.getLogger("energysched")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INFEASIBLE, EXIT_REPRO = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*[:,-]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _lambda(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"lambda must be in [0, 1], got {v}")
    return v


def _add_gen_flags(p: argparse.ArgumentParser, instances: bool = True) -> None:
    d = GenSpec()
    p.add_argument("--tasks", type=int, help=f"task count (default {d.task_count})")
    p.add_argument("--vms", type=int, help=f"VM pool size (default {d.vm_count})")
    if instances:
        p.add_argument("--instances", type=int, default=d.instance_count)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--arrival", type=_range, default=d.arrival, metavar="LO:HI")
    p.add_argument("--duration", type=_range, default=d.duration, metavar="LO:HI")
    p.add_argument("--cpu", type=_range, default=d.cpu, metavar="LO:HI")
    p.add_argument("--disk", type=_range, default=d.disk, metavar="LO:HI")
    p.add_argument("--io", type=_range, default=d.io, metavar="LO:HI")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=_lambda, default=0.5, help="fitness weight in [0, 1]")
    p.add_argument("--pmax", type=float, default=30.0)
    p.add_argument("--pmin", type=float, default=20.0)
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")


def _gen_spec(args, instance_count: int | None = None) -> GenSpec:
    d = GenSpec()
    spec = GenSpec(
        task_count=d.task_count if args.tasks is None else args.tasks,
        vm_count=d.vm_count if args.vms is None else args.vms,
        instance_count=instance_count or getattr(args, "instances", d.instance_count),
        seed=args.seed,
        arrival=args.arrival, duration=args.duration, cpu=args.cpu, disk=args.disk, io=args.io,
    )
    spec.validate()
    return spec


def _power(args) -> PowerModel:
    return PowerModel(args.pmax, args.pmin)


def _load(path: Path) -> Dataset:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    return read_dataset(data)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def instance_key(label: str) -> tuple:
    """Sort key ordering labels like ``1000_200_i3`` by size class, then instance."""
    m = re.fullmatch(r"(.*)_i(\d+)", label)
    if not m:
        return ((), label, 0)
    sizes = tuple(int(x) if x.isdigit() else x for x in m.group(1).split("_"))
    return (sizes, m.group(1), int(m.group(2)))


# -- gen ---------------------------------------------------------------------

def cmd_gen(args) -> int:
    out: Path = args.out
    try:
        if args.paper_example:
            target = out if out.suffix == ".csv" else out / "paper_example.csv"
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(write_dataset(example_dataset(args.vms or 10)))
            print(target)
            return EXIT_OK
        spec = _gen_spec(args)
        out.mkdir(parents=True, exist_ok=True)
        for k in range(1, spec.instance_count + 1):
            ds = generate_dataset(spec, k)
            path = out / f"{ds.label}.csv"
            path.write_bytes(write_dataset(ds))
            print(f"{path}\t{len(ds)} tasks\t{ds.vm_count} vms\tseed={spec.seed}")
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    return EXIT_OK


# -- run ---------------------------------------------------------------------

def _dataset_for_run(args) -> Dataset:
    gen_given = args.tasks is not None or args.vms is not None
    if (args.dataset is None) == (not gen_given):
        raise UsageError("supply exactly one dataset source: --dataset PATH or --tasks/--vms")
    if args.dataset is not None:
        return _load(args.dataset)
    spec = _gen_spec(args, instance_count=max(args.instance, 1))
    return generate_dataset(spec, args.instance)


def metrics_table(m: EnergyMetrics) -> str:
    lines = [f"policy {m.policy}  dataset {m.dataset}",
             f"{'VM':>5}{'UC':>9}{'UD':>9}{'UI':>9}{'UV':>9}{'E':>10}"]
    for v in m.per_vm:
        s = v.summary
        lines.append(f"{v.vm_id:>5}{s.uc:9.2f}{s.ud:9.2f}{s.ui:9.2f}{s.uv:9.2f}{v.energy:10.2f}")
    lines.append(f"TE {m.total_energy:.2f}  VMs used {m.vms_used}")
    return "\n".join(lines) + "\n"


def metrics_csv(m: EnergyMetrics) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["policy", "dataset", "vm", "uc", "ud", "ui", "uv", "energy"])
    for v in m.per_vm:
        s = v.summary
        w.writerow([m.policy, m.dataset, v.vm_id, repr(s.uc), repr(s.ud), repr(s.ui), repr(s.uv), repr(v.energy)])
    return buf.getvalue()


def render_metrics(m: EnergyMetrics, fmt: str) -> str:
    if fmt == "json":
        return m.to_json()
    if fmt == "csv":
        return metrics_csv(m)
    return metrics_table(m)


def cmd_run(args) -> int:
    ds = _dataset_for_run(args)
    trace = run(ds, SchedulerConfig(args.policy, args.lam))
    metrics = compute_metrics(trace, _power(args))
    _emit(render_metrics(metrics, args.format), args.out)
    if args.gantt:
        _emit(gantt_csv(trace), args.gantt)
    if args.trace:
        _emit(trace_json(trace), args.trace)
    return EXIT_OK


# -- compare -------------------------------------------------------------------

def _compare_one(ds: Dataset, policies: tuple[str, str], lam: float, model: PowerModel) -> dict:
    cand, base = (compute_metrics(run(ds, SchedulerConfig(p, lam)), model) for p in policies)
    rep = compare(cand, base)
    return rep.to_dict() | {"instance": instance_key(ds.label)[2]}


def _datasets_for_compare(args) -> list[Dataset]:
    gen_given = args.tasks is not None or args.vms is not None
    if bool(args.dataset) == gen_given:
        raise UsageError("supply exactly one dataset source: --dataset PATH... or --tasks/--vms")
    if gen_given:
        spec = _gen_spec(args)
        return [generate_dataset(spec, k) for k in range(1, spec.instance_count + 1)]
    paths: list[Path] = []
    for p in args.dataset:
        paths.extend(sorted(p.glob("*.csv")) if p.is_dir() else [p])
    if not paths:
        raise UsageError("no dataset files found")
    return [_load(p) for p in paths]


def comparison_table(rows: list[dict], policies: tuple[str, str]) -> str:
    names = [SchedulerConfig(p).display_name for p in policies]
    lines = [f"{'dataset':<16}{'instance':>9}{names[0]:>14}{names[1]:>14}{'savings%':>10}{'vm_delta':>9}"]
    for r in rows:
        lines.append(f"{r['dataset']:<16}{r['instance']:>9}{r['candidate']['te']:14.2f}{r['baseline']['te']:14.2f}"
                     f"{r['savings_percent']:10.2f}{r['vm_delta']:>9}")
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    policies = tuple(args.policies)
    datasets = _datasets_for_compare(args)
    model = _power(args)
    if args.jobs > 1 and len(datasets) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_compare_one, datasets, [policies] * len(datasets),
                                 [args.lam] * len(datasets), [model] * len(datasets)))
    else:
        rows = [_compare_one(ds, policies, args.lam, model) for ds in datasets]
    rows.sort(key=lambda r: instance_key(r["dataset"]))
    wins = sum(r["candidate"]["te"] <= r["baseline"]["te"] for r in rows)
    mean_savings = sum(r["savings_percent"] for r in rows) / len(rows)
    aggregate = {"rows": len(rows), "wins": wins, "mean_savings_percent": mean_savings}

    if args.format == "json":
        text = json.dumps({"policies": list(policies), "comparisons": rows, "aggregate": aggregate}, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", "instance", f"te_{policies[0]}", f"te_{policies[1]}", "savings_percent", "vm_delta"])
        for r in rows:
            w.writerow([r["dataset"], r["instance"], repr(r["candidate"]["te"]), repr(r["baseline"]["te"]),
                        repr(r["savings_percent"]), r["vm_delta"]])
        text = buf.getvalue()
    else:
        text = comparison_table(rows, policies)
        text += f"{policies[0]} TE <= {policies[1]} TE on {wins}/{len(rows)}; mean savings {mean_savings:.2f}%\n"
    _emit(text, args.out)
    return EXIT_OK


# -- reproduce ---------------------------------------------------------------

def cmd_reproduce(args) -> int:
    rep = reproduce(_power(args), args.lam)
    if args.format == "json":
        text = json.dumps({
            "assignments": {p: {str(k): v for k, v in tr.vm_tasks().items()} for p, tr in rep.traces.items()},
            "metrics": {p: m.to_dict() for p, m in rep.metrics.items()},
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in rep.checks],
            "passed": rep.ok,
        }, indent=2) + "\n"
    else:
        text = render_report(rep)
    _emit(text, args.out)
    return EXIT_OK if rep.ok else EXIT_REPRO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="energysched", description="Energy-aware task consolidation simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate synthetic datasets")
    _add_gen_flags(g)
    g.add_argument("--out", type=Path, default=Path("."), help="output directory")
    g.add_argument("--paper-example", action="store_true", help="write the built-in ten-task example instead")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="schedule one dataset and report energy")
    r.add_argument("--dataset", type=Path)
    _add_gen_flags(r, instances=False)
    r.add_argument("--instance", type=int, default=1)
    r.add_argument("--policy", choices=POLICIES, default="mceets")
    _add_model_flags(r)
    r.add_argument("--gantt", type=Path, help="write per-task placement rows as CSV")
    r.add_argument("--trace", type=Path, help="write the full schedule trace as JSON")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="compare two policies over one or more datasets")
    c.add_argument("--dataset", type=Path, nargs="+", help="dataset files or directories")
    _add_gen_flags(c)
    c.add_argument("--policies", nargs=2, choices=POLICIES, default=["mceets", "maxutil"],
                   metavar=("CANDIDATE", "BASELINE"))
    _add_model_flags(c)
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_compare)

    p = sub.add_parser("reproduce", help="rerun the built-in ten-task example and check it")
    _add_model_flags(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidSpec) as exc:
        parser.print_usage(sys.stderr)
        print(f"energysched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PoolExhausted as exc:
        print(f"energysched: infeasible schedule: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParseError, TaskError) as exc:
        print(f"energysched: invalid dataset: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"energysched: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
