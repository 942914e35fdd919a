import json
import subprocess
import sys

import pytest

from energysched.cli import instance_key, main
from energysched.workload import read_dataset


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def example_csv(tmp_path, capsys):
    assert main(["gen", "--paper-example", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    return tmp_path / "paper_example.csv"


def test_gen_files(tmp_path, capsys):
    code, out, _ = _run(["gen", "--tasks", "100", "--vms", "20", "--instances", "10", "--seed", "7",
                         "--out", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(f"100_20_i{k}.csv" for k in range(1, 11))
    assert len(out.strip().splitlines()) == 10
    ds = read_dataset((tmp_path / "100_20_i4.csv").read_bytes())
    assert ds.vm_count == 20 and ds.seed == 7 and len(ds) == 100
    for t in ds.tasks:
        assert 1 <= t.arrival <= 50 and 20 <= t.duration <= 100
        assert all(5 <= v <= 20 for v in t.demand.as_tuple())


def test_gen_repeatable(tmp_path, capsys):
    for d in ("a", "b"):
        assert main(["gen", "--tasks", "50", "--vms", "10", "--instances", "2", "--seed", "3",
                     "--out", str(tmp_path / d)]) == 0
    for k in (1, 2):
        f = f"50_10_i{k}.csv"
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_gen_invalid_flags(tmp_path, capsys):
    assert main(["gen", "--cpu", "30:10", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as err:
        main(["gen", "--cpu", "abc"])
    assert err.value.code == 2


def test_gen_io_failure(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["gen", "--tasks", "5", "--vms", "2", "--instances", "1", "--out", str(blocker / "sub")]) == 3


@pytest.mark.parametrize("policy, vms", [("mceets", 3), ("maxutil", 4)])
def test_run_example(example_csv, capsys, policy, vms):
    code, out, _ = _run(["run", "--dataset", str(example_csv), "--policy", policy, "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["vms_used"] == vms


def test_run_table_and_csv(example_csv, capsys):
    code, out, _ = _run(["run", "--dataset", str(example_csv)], capsys)
    assert code == 0 and "TE 2388.95" in out
    code, out, _ = _run(["run", "--dataset", str(example_csv), "--format", "csv"], capsys)
    assert out.splitlines()[0] == "policy,dataset,vm,uc,ud,ui,uv,energy"
    assert len(out.splitlines()) == 4


def test_run_lambda_out_of_range(example_csv, capsys):
    with pytest.raises(SystemExit) as err:
        main(["run", "--dataset", str(example_csv), "--policy", "mceets", "--lambda", "1.5"])
    assert err.value.code == 2
    assert "[0, 1]" in capsys.readouterr().err


def test_run_gantt_and_trace(example_csv, tmp_path, capsys):
    g, t = tmp_path / "g.csv", tmp_path / "t.json"
    assert main(["run", "--dataset", str(example_csv), "--gantt", str(g), "--trace", str(t)]) == 0
    lines = g.read_text().splitlines()
    assert lines[0] == "vm,task,start,end,cpu,disk,io" and len(lines) == 11
    assert "2,8,3,37,21.0,24.0,21.0" in lines
    assert len(json.loads(t.read_text())["assignments"]) == 10


def test_run_pool_exhausted(example_csv, tmp_path, capsys):
    small = tmp_path / "small.csv"
    small.write_text(example_csv.read_text().replace("vm_count=10", "vm_count=3", 1))
    code, _, err = _run(["run", "--dataset", str(small), "--policy", "maxutil"], capsys)
    assert code == 4 and "task 10" in err


def test_run_source_rules(example_csv, capsys):
    assert main(["run"]) == 2
    assert main(["run", "--dataset", str(example_csv), "--tasks", "5"]) == 2
    assert main(["run", "--dataset", "/nonexistent/x.csv"]) == 3
    code, out, _ = _run(["run", "--tasks", "30", "--vms", "10", "--seed", "2", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["dataset"] == "30_10_i1"


def test_run_json_byte_identical(example_csv, capsys):
    outs = [_run(["run", "--dataset", str(example_csv), "--format", "json"], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_compare_example(example_csv, capsys):
    code, out, _ = _run(["compare", "--dataset", str(example_csv), "--format", "json"], capsys)
    doc = json.loads(out)
    (row,) = doc["comparisons"]
    assert row["candidate"]["te"] < row["baseline"]["te"]
    assert row["savings_percent"] == pytest.approx(5.689, abs=1e-3)
    assert row["vm_delta"] == -1


def test_compare_self(tmp_path, capsys):
    main(["gen", "--tasks", "60", "--vms", "15", "--instances", "3", "--out", str(tmp_path)])
    capsys.readouterr()
    code, out, _ = _run(["compare", "--dataset", str(tmp_path), "--policies", "maxutil", "maxutil",
                         "--format", "csv"], capsys)
    rows = out.splitlines()[1:]
    assert code == 0 and len(rows) == 3
    assert all(r.split(",")[4] == "0.0" for r in rows)


def test_compare_generated_shape_and_jobs(capsys):
    args = ["compare", "--tasks", "100", "--vms", "20", "--instances", "10", "--seed", "5", "--format", "json"]
    _, serial, _ = _run(args, capsys)
    _, parallel, _ = _run(args + ["--jobs", "3"], capsys)
    assert serial == parallel
    doc = json.loads(serial)
    assert [r["instance"] for r in doc["comparisons"]] == list(range(1, 11))
    assert doc["aggregate"]["rows"] == 10
    code, table, _ = _run(args[:-2], capsys)
    assert len(table.splitlines()) == 12


def test_instance_key_orders_numerically():
    labels = ["1000_200_i2", "100_20_i10", "100_20_i2", "500_100_i1"]
    assert sorted(labels, key=instance_key) == ["100_20_i2", "100_20_i10", "500_100_i1", "1000_200_i2"]


def test_reproduce_report(capsys):
    code, out, _ = _run(["reproduce"], capsys)
    assert "VM1={T1,T2,T3}  VM2={T7,T4,T5,T8}  VM3={T6,T10,T9}" in out
    assert "2379.5" in out and "2557.69" in out
    assert "2388.95" in out and "2533.06" in out
    assert code == (0 if "RESULT: PASS" in out else 5)


def test_reproduce_json(capsys):
    code, out, _ = _run(["reproduce", "--format", "json"], capsys)
    doc = json.loads(out)
    assert doc["assignments"]["mceets"] == {"1": [1, 2, 3], "2": [7, 4, 5, 8], "3": [6, 10, 9]}
    assert code == (0 if doc["passed"] else 5)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "energysched", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("gen", "run", "compare", "reproduce"):
        assert cmd in res.stdout
