import csv
import io
import json
import os

import pytest

from semiramsey import cli
from semiramsey.cutting import parse_surfaces
from semiramsey.harness import (
    CSV_COLUMNS,
    VERDICTS,
    Row,
    generate_instance,
    row_sort_key,
    rows_to_csv,
    run_suite,
    worker_cap,
)
from semiramsey.multicolor import check_partition, parse_partition
from semiramsey.relations import find_mono_triangle_bruteforce, parse_points, parse_relation


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_grid_instance():
    inst = generate_instance("grid 5x5")
    assert len(inst.points) == 25 and inst.points.dim == 2


def test_random_instance_is_byte_identical(tmp_path):
    a = generate_instance("random d=1 N=64 seed=7").write(str(tmp_path / "a"))
    b = generate_instance("random d=1 N=64 seed=7").write(str(tmp_path / "b"))
    assert [os.path.basename(p) for p in a] == [os.path.basename(p) for p in b]
    for pa, pb in zip(a, b):
        with open(pa, "rb") as fa, open(pb, "rb") as fb:
            assert fa.read() == fb.read()
    assert generate_instance("random d=1 N=64 seed=8").files() != generate_instance("random d=1 N=64 seed=7").files()


def test_schur_instance_round_trips():
    inst = generate_instance("schur m=3")
    assert len(inst.points) == 14 and len(inst.relations) == 3
    files = inst.files()
    assert parse_points(files["points.txt"]) == inst.points
    part = parse_partition(files["partition.txt"])
    assert part.n_max == 13 and not check_partition(part)
    rels = [parse_relation(files["relation_%d.txt" % i]) for i in range(3)]
    from semiramsey.relations import RelationSystem

    assert find_mono_triangle_bruteforce(RelationSystem(inst.points, tuple(rels))) is None


@pytest.mark.parametrize("spec", ["lines N=12", "polys N=10 deg=3", "symmetric N=20", "parabola N=6",
                                  "gpset N=8", "es s=3 n=4", "intervals N=15 m=3", "random d=2 N=10"])
def test_generators_round_trip(spec):
    inst = generate_instance(spec, 3)
    files = inst.files()
    if inst.points is not None:
        assert parse_points(files["points.txt"]) == inst.points
    if inst.surfaces:
        assert [s.poly for s in parse_surfaces(files["surfaces.txt"])] == list(inst.surfaces)
    for i, R in enumerate(inst.relations):
        assert parse_relation(files["relation_%d.txt" % i]).polys == R.polys


def test_invalid_spec():
    with pytest.raises(ValueError):
        generate_instance("banana N=3")
    with pytest.raises(ValueError):
        generate_instance("")


def test_es_sweep(tmp_path):
    out = tmp_path / "es.csv"
    rows, code = run_suite({"task": "es", "seed": 0}, str(out))
    assert code == 0 and len(rows) == 25
    assert all(r.verdict == "verified-exhaustive" for r in rows)
    data = read_csv(out)
    assert tuple(data[0].keys()) == CSV_COLUMNS and len(data) == 25
    assert data[-1]["key"] == "s=6 n=6"


def test_cutting_sweep_respects_bound():
    rows, code = run_suite({"task": "cutting", "params": {"N": 100, "r": [2, 5, 10]}, "seed": 1})
    assert code == 0 and [r.key for r in rows] == ["lines r=2", "lines r=5", "lines r=10"]
    for r in rows:
        assert r.size <= r.target == 100 / int(r.key.split("=")[1])


def test_empty_sweep(tmp_path):
    out = tmp_path / "empty.csv"
    rows, code = run_suite({"runs": []}, str(out))
    assert rows == [] and code == 0
    assert out.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_reports_reproducible_without_timing():
    cfg = {"runs": [{"task": "schur", "params": {"m": [1, 2, 3]}, "seeds": [0]},
                    {"task": "osh", "seeds": [2, 1]}, {"task": "milnor", "seeds": [4]}]}
    a, _ = run_suite(dict(cfg))
    b, _ = run_suite(dict(cfg))
    assert rows_to_csv(a, timing=False) == rows_to_csv(b, timing=False)
    assert a == sorted(a, key=row_sort_key)
    assert {r.verdict for r in a} <= set(VERDICTS)


def test_failed_row_sets_exit_code():
    rows, code = run_suite({"task": "cutting", "params": {"N": 5, "backend": "nonsense"}})
    assert code == 1 and rows[0].verdict == "failed" and rows[0].key == "error"


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("SEMIRAMSEY_WORKERS", "3")
    assert worker_cap() == 3
    monkeypatch.setenv("SEMIRAMSEY_WORKERS", "zero")
    assert worker_cap() == 1
    monkeypatch.delenv("SEMIRAMSEY_WORKERS")
    assert worker_cap() == 1


def test_parallel_matches_serial():
    cfg = {"task": "es", "seeds": [0, 1], "params": {"s_max": 3, "n_max": 3, "random": 5}}
    a, _ = run_suite(dict(cfg), workers=1)
    b, _ = run_suite(dict(cfg), workers=2)
    assert rows_to_csv(a, timing=False) == rows_to_csv(b, timing=False)


def test_natural_sort():
    rows = [Row("t", k, 0, "desk", "failed") for k in ("r=10", "r=2", "r=5")]
    assert [r.key for r in sorted(rows, key=row_sort_key)] == ["r=2", "r=5", "r=10"]


def test_unknown_task_and_preset():
    with pytest.raises(ValueError):
        run_suite({"task": "nope"})
    with pytest.raises(ValueError):
        run_suite({"task": "es", "preset": "huge"})


# ---------------------------------------------------------------------------
# command line


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_cli_generate_and_es(tmp_path, capsys):
    code, rep = run_cli(capsys, "generate", "grid 4x4", "--out", str(tmp_path / "g"))
    assert code == 0 and os.path.exists(tmp_path / "g" / "points.txt")
    code, rep = run_cli(capsys, "es", "construct", "--s", "3", "--n", "4")
    assert code == 0


def test_cli_schur_and_suite(tmp_path, capsys):
    part = tmp_path / "p.txt"
    code, rep = run_cli(capsys, "schur", "search", "--m", "2", "--out", str(part))
    assert code == 0 and part.exists()
    code, rep = run_cli(capsys, "schur", "verify", str(part), "--ramsey")
    assert code == 0
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"runs": []}))
    code, rep = run_cli(capsys, "suite", "run", str(cfg), "--out", str(tmp_path / "o.csv"))
    assert code == 0 and rep["rows"] == 0


def test_cli_user_error(tmp_path, capsys):
    code, rep = run_cli(capsys, "schur", "verify", str(tmp_path / "missing.txt"))
    assert code == 2 and "error" in rep
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n3\n")
    code, rep = run_cli(capsys, "schur", "verify", str(bad))
    assert code in (1, 2)
