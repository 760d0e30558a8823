"""Instance generators, parameter presets and batch sweeps with CSV reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import re
import shlex
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import Poly, milnor_thom_bound, random_poly, sign_vector
from .cutting import build_cutting, format_surfaces, partition_low_crossing, verify_cutting, crosses
from .geometry import (
    GeneralPositionError,
    HyperplaneFamily,
    check_general_position,
    check_hyperplane_position,
    cupcap_extremal,
    es_extremal_sequence,
    family_from_sequence,
    find_cup_cap,
    longest_monotone,
    one_sided,
    osh_extract,
)
from .multicolor import (
    MonoConfig,
    find_mono_triangle,
    format_partition,
    schur_coloring,
    schur_search,
)
from .relations import (
    PointSet,
    RelationSystem,
    brute_force_clique,
    clique_number,
    collinearity,
    distance_at_least,
    distance_at_most,
    distance_in_intervals,
    find_mono_triangle_bruteforce,
    format_points,
    format_relation,
    pair_matrix,
    sum_at_least,
)
from .transitive import empty_in_all, is_transitive, ordered_matrix, base_order_matrix, transitive_subset
from .triple import ExtractConfig, extract_independent, homogeneous_parts, classify_triples

SCHEMA_VERSION = 1
CSV_COLUMNS = ("schema_version", "task", "key", "seed", "preset", "verdict", "size", "target",
               "measured", "detail", "wall_time")
VERDICTS = ("verified-exhaustive", "verified-sampled", "failed", "refused-budget")
WORKERS_ENV = "SEMIRAMSEY_WORKERS"

#: Parameter schedules.  ``paper`` mirrors the asymptotic formulas, ``desk`` the testable sizes.
PRESETS = {
    "paper": {
        "transitive_r": lambda m, t: (m * t) ** 2,
        "mono_r": lambda m, t: 2 * t * m,
        "partition_ell": lambda N: max(1, math.isqrt(N)),
        "extract_r": lambda N, d, t, c2=4.0: N ** (1.0 / (30 * d)) / (t * c2),
    },
    "desk": {
        "transitive_r": lambda m, t: (m * t) ** 2,
        "mono_r": lambda m, t: 2 * t * m,
        "partition_ell": lambda N: max(1, math.ceil(math.sqrt(N))),
        "extract_r": lambda N, d, t, c2=4.0: 12,
    },
}


# ---------------------------------------------------------------------------
# instances


@dataclass
class Instance:
    kind: str
    seed: int
    points: PointSet | None = None
    relations: list = field(default_factory=list)
    surfaces: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def files(self) -> dict:
        out = {}
        if self.points is not None:
            out["points.txt"] = format_points(self.points)
        for i, R in enumerate(self.relations):
            out["relation_%d.txt" % i] = format_relation(R)
        if self.surfaces:
            out["surfaces.txt"] = format_surfaces(self.surfaces)
        if "partition" in self.extra:
            out["partition.txt"] = format_partition(self.extra["partition"])
        return out

    def write(self, directory: str) -> list:
        os.makedirs(directory, exist_ok=True)
        paths = []
        for name, text in sorted(self.files().items()):
            path = os.path.join(directory, name)
            with open(path, "w") as fh:
                fh.write(text)
            paths.append(path)
        return paths


def _parse_spec(spec) -> tuple:
    if isinstance(spec, dict):
        spec = dict(spec)
        return spec.pop("kind"), spec
    tokens = shlex.split(spec)
    if not tokens:
        raise ValueError("empty instance spec")
    kind, opts = tokens[0], {}
    for tok in tokens[1:]:
        if "=" in tok:
            k, v = tok.split("=", 1)
            opts[k] = v
        elif "x" in tok and kind == "grid":
            w, h = tok.split("x")
            opts["w"], opts["h"] = w, h
        else:
            raise ValueError("cannot read spec token %r" % tok)
    return kind, opts


def _rand_rational(rng: random.Random, span: int, den: int) -> Fraction:
    q = rng.randint(1, den)
    return Fraction(rng.randint(-span * q, span * q), q)


def _distinct(rng, count, make):
    seen, out = set(), []
    while len(out) < count:
        v = make()
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def generate_instance(spec, seed: int | None = None) -> Instance:
    """Deterministic instances from a spec such as ``"random d=1 N=64"`` or ``"grid 5x5"``."""
    kind, opts = _parse_spec(spec)
    seed = int(opts.pop("seed", seed if seed is not None else 0))
    rng = random.Random(seed)
    geti = lambda k, default: int(opts.get(k, default))
    if kind == "grid":
        w, h = geti("w", 5), geti("h", 5)
        return Instance(kind, seed, PointSet(2, tuple((i, j) for i in range(w) for j in range(h))), [collinearity()])
    if kind == "random":
        d, N, den, span = geti("d", 1), geti("N", 32), geti("den", 8), geti("span", 10)
        pts = _distinct(rng, N, lambda: tuple(_rand_rational(rng, span, den) for _ in range(d)))
        if d == 1:
            pts.sort()
        return Instance(kind, seed, PointSet(d, tuple(pts)))
    if kind == "symmetric":
        N = geti("N", 60)
        vals = _distinct(rng, N // 2, lambda: Fraction(rng.randint(1, 1000), 10))
        return Instance(kind, seed, PointSet.from_values(sorted([-v for v in vals] + vals)), [sum_at_least(0)])
    if kind == "parabola":
        N = geti("N", 8)
        return Instance(kind, seed, PointSet(2, tuple((x, x * x) for x in range(-(N // 2), N - N // 2))))
    if kind == "gpset":
        N, box = geti("N", 10), geti("box", 10 ** 4)
        while True:
            xs = rng.sample(range(box), N)
            P = PointSet(2, tuple((x, rng.randrange(box)) for x in xs))
            try:
                check_general_position(P)
                return Instance(kind, seed, P)
            except GeneralPositionError:
                continue
    if kind == "es":
        s, n = geti("s", 3), geti("n", 3)
        seq = es_extremal_sequence(s, n)
        return Instance(kind, seed, PointSet.from_values(seq), extra={"sequence": seq})
    if kind == "lines":
        N, span = geti("N", 100), geti("span", 20)
        polys = []
        while len(polys) < N:
            a, b, c = (rng.randint(-span, span) for _ in range(3))
            if a or b:
                polys.append(Poly(2, {(1, 0): a, (0, 1): b, (0, 0): c}))
        return Instance(kind, seed, surfaces=polys)
    if kind == "polys":
        N, deg = geti("N", 100), geti("deg", 4)
        polys = [random_poly(rng, 1, rng.randint(1, deg), 20) for _ in range(N)]
        return Instance(kind, seed, surfaces=[p for p in polys if p.degree >= 1])
    if kind == "schur":
        m = geti("m", 3)
        res = schur_search(m, mode="maximize")
        system = schur_coloring(res.partition)
        return Instance(kind, seed, system.base, list(system.relations), extra={"partition": res.partition})
    if kind == "intervals":
        N, m = geti("N", 30), geti("m", 3)
        return _interval_system(rng, seed, N, m)
    raise ValueError("unknown instance kind %r" % kind)


def _interval_system(rng: random.Random, seed: int, N: int, m: int) -> Instance:
    """m colors of |x - y| by interval membership of integer distances, covering all pairs."""
    pts = sorted(rng.sample(range(1, 4 * N), N))
    D = max(pts) - min(pts)
    cuts = sorted(rng.sample(range(1, D), min(m - 1, D - 1))) if m > 1 else []
    bounds = [0] + cuts + [D]
    colors = [[] for _ in range(m)]
    for k in range(len(bounds) - 1):
        colors[k % m].append((Fraction(bounds[k]) + Fraction(1, 2) if k else Fraction(1, 2),
                              Fraction(bounds[k + 1]) + Fraction(1, 2)))
    rels = [distance_in_intervals(iv, "c%d" % c) for c, iv in enumerate(colors) if iv]
    return Instance("intervals", seed, PointSet.from_values(pts), rels)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class Row:
    task: str
    key: str
    seed: int
    preset: str
    verdict: str
    size: object = ""
    target: object = ""
    measured: object = ""
    detail: str = ""
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        d = {"schema_version": SCHEMA_VERSION}
        for k in CSV_COLUMNS[1:]:
            v = getattr(self, k)
            d[k] = ("%.6g" % v) if isinstance(v, float) and k != "wall_time" else v
        d["wall_time"] = "%.3f" % self.wall_time
        return d


def _ok(flag: bool, exhaustive: bool = True) -> str:
    if not flag:
        return "failed"
    return "verified-exhaustive" if exhaustive else "verified-sampled"


def task_es(p: dict, seed: int, preset: str) -> list:
    rows = []
    for s in range(p.get("s_min", 2), p.get("s_max", 6) + 1):
        for n in range(p.get("n_min", 2), p.get("n_max", 6) + 1):
            seq = es_extremal_sequence(s, n)
            mono = longest_monotone(seq)
            ok = len(seq) == (s - 1) * (n - 1) and mono.inc < s and mono.dec < n
            rng = random.Random(seed * 7919 + s * 31 + n)
            L = (s - 1) * (n - 1) + 1
            for _ in range(p.get("random", 40)):
                m = longest_monotone(rng.sample(range(10 * L), L))
                ok = ok and (m.inc >= s or m.dec >= n)
            rows.append(Row("es", "s=%d n=%d" % (s, n), seed, preset, _ok(ok), len(seq), (s - 1) * (n - 1)))
    return rows


def task_cupcap(p: dict, seed: int, preset: str) -> list:
    rows = []
    for s in range(p.get("s_min", 3), p.get("s_max", 5) + 1):
        for n in range(p.get("n_min", 3), p.get("n_max", 5) + 1):
            cfg = cupcap_extremal(s, n)
            size = math.comb(n + s - 4, s - 2)
            ok = len(cfg.points) == size and not find_cup_cap(cfg, s, n)
            for k in range(p.get("random", 10)):
                inst = generate_instance("gpset N=%d" % (size + 1), seed * 1000 + k)
                ok = ok and bool(find_cup_cap(inst.points, s, n))
            rows.append(Row("cupcap", "s=%d n=%d" % (s, n), seed, preset, _ok(ok), len(cfg.points), size))
    return rows


def task_schur(p: dict, seed: int, preset: str) -> list:
    rows = []
    for m in p.get("m", [1, 2, 3]):
        res = schur_search(m, mode="maximize", interval_cap=p.get("interval_cap"))
        if res.status == "UNKNOWN":
            rows.append(Row("schur", "m=%d" % m, seed, preset, "refused-budget", res.n, detail="node budget"))
            continue
        from .multicolor import check_partition

        ok = not check_partition(res.partition)
        rows.append(Row("schur", "m=%d" % m, seed, preset, _ok(ok), res.n, "", res.nodes))
    return rows


def task_cutting(p: dict, seed: int, preset: str) -> list:
    rows = []
    kind = p.get("ensemble", "lines")
    N = p.get("N", 100)
    spec = "lines N=%d" % N if kind == "lines" else "polys N=%d deg=%d" % (N, p.get("deg", 4))
    inst = generate_instance(spec, seed)
    for r in p.get("r", [2, 5, 10]):
        K = build_cutting(inst.surfaces, r, p.get("backend", "auto"), seed, c1=p.get("c1", 8))
        rep = verify_cutting(inst.surfaces, K, r=r)
        rows.append(Row("cutting", "%s r=%d" % (kind, r), seed, preset, _ok(rep["ok"]), rep["max_weighted"],
                        rep["bound"], rep["c1_min"], "cells=%d" % len(K.cells)))
    return rows


def task_partition(p: dict, seed: int, preset: str) -> list:
    N, lines, ell = p.get("N", 2000), p.get("lines", 200), p.get("ell")
    ell = ell or PRESETS[preset]["partition_ell"](N)
    pts = generate_instance("random d=2 N=%d den=16 span=20" % N, seed).points
    surf = generate_instance("lines N=%d" % lines, seed + 1).surfaces
    res = partition_low_crossing(pts, surf, ell, p.get("backend", "auto"), seed, c2=p.get("c2", 8))
    floor = N // (4 * ell)
    cell_ok = all(c.contains(pts.points[i]) for part, c in zip(res.parts, res.cells) for i in part)
    profile = {j: 0 for j in range(len(surf))}
    for c in res.cells:
        for j, g in enumerate(surf):
            profile[j] += crosses(g, c)
    ok = (min(map(len, res.parts)) >= floor and cell_ok and profile == res.crossing_profile
          and len({i for part in res.parts for i in part}) == sum(map(len, res.parts)))
    return [Row("partition", "N=%d ell=%d" % (N, ell), seed, preset, _ok(ok), min(map(len, res.parts)), floor,
                res.params["c2_min"], "c2_ok=%s" % res.params["c2_ok"])]


def _transitive_instance(seed: int, N: int = 64):
    P = generate_instance("random d=1 N=%d den=1000 span=2" % N, seed).points
    return P, [distance_at_least(1), distance_at_most(Fraction(1, 2))]


def task_transitive(p: dict, seed: int, preset: str) -> list:
    P, rels = _transitive_instance(seed, p.get("N", 64))
    reps: list = []
    V = transitive_subset(P, rels, p.get("c3", 2.0), seed=seed, report=reps)
    mats = [base_order_matrix(ordered_matrix(R, P)) for R in rels]
    ok = all(is_transitive(A, V.order) for A in mats)
    rows = [Row("transitive", "N=%d" % len(P), seed, preset, _ok(ok), len(V), reps[0].target, reps[0].c3_measured)]
    if p.get("empty", True):
        omegas = [clique_number(R, P) for R in rels]
        out = empty_in_all(P, rels, omegas, p.get("c3", 2.0), seed=seed)
        ok = all(not A[i, j] for A in mats for i in out for j in out if i < j)
        rows.append(Row("empty", "N=%d" % len(P), seed, preset, _ok(ok and len(out) > 0), len(out), "", "",
                        "omega=%s" % omegas))
    return rows


def task_homogeneous(p: dict, seed: int, preset: str) -> list:
    inst = generate_instance("symmetric N=%d" % p.get("N", 60), seed)
    H = homogeneous_parts(inst.points, inst.relations[0], p.get("r", 3), p.get("part_size", 3),
                          seed=seed, max_retries=p.get("retries", 64))
    if not H.ok:
        return [Row("homogeneous", "N=%d" % len(inst.points), seed, preset, "refused-budget", 0, "", H.best_bad,
                    H.report.get("reason", ""))]
    census = classify_triples(H.parts, inst.relations[0], inst.points)
    ok = not census["bad"] and not census["mixed"]
    return [Row("homogeneous", "N=%d" % len(inst.points), seed, preset, _ok(ok), len(H.parts), "", H.attempts)]


def task_extract(p: dict, seed: int, preset: str) -> list:
    spec = p.get("instance", "grid 5x5")
    inst = generate_instance(spec, seed)
    cfg = ExtractConfig.paper() if preset == "paper" else ExtractConfig()
    rep: dict = {}
    out = extract_independent(inst.points, inst.relations[0], p.get("s", 4), cfg, seed, report=rep)
    from .relations import Membership

    mem = Membership(inst.relations[0], inst.points)
    import itertools

    ok = not any(mem(t) for t in itertools.combinations(out, 3))
    return [Row("extract", spec, seed, preset, _ok(ok), len(out), "", rep["structured_size"],
                "premise=%s" % rep["premise"])]


def task_mono(p: dict, seed: int, preset: str) -> list:
    rng = random.Random(seed)
    N = p.get("N") or rng.randint(4, 60)
    m = p.get("m") or rng.randint(1, 3)
    inst = generate_instance({"kind": "intervals", "N": N, "m": m}, seed)
    S = RelationSystem(inst.points, tuple(inst.relations))
    fast = find_mono_triangle(S, MonoConfig(), seed)
    slow = find_mono_triangle_bruteforce(S)
    ok = (fast is None) == (slow is None)
    if fast is not None:
        (i, j, k), c = fast
        A = pair_matrix(inst.relations[c], inst.points)
        ok = ok and bool(A[i, j] and A[i, k] and A[j, k])
    return [Row("mono", "N=%d m=%d" % (N, len(inst.relations)), seed, preset, _ok(ok),
                "found" if fast else "none", "found" if slow else "none")]


def task_osh(p: dict, seed: int, preset: str) -> list:
    rng = random.Random(seed)
    s, n = p.get("s") or rng.randint(2, 4), p.get("n") or rng.randint(2, 4)
    size = (s - 1) * (n - 1) + 1
    while True:
        H = HyperplaneFamily(2, [((rng.randint(-50, 50), rng.randint(-50, 50)), rng.randint(-50, 50)) for _ in range(size)])
        try:
            check_hyperplane_position(H)
            break
        except GeneralPositionError:
            continue
    res = osh_extract(H, s, n)
    ok = bool(res) and one_sided(H, res.indices, res.side)
    ext = family_from_sequence(es_extremal_sequence(s, n))
    ok = ok and not osh_extract(ext, s, n)
    return [Row("osh", "s=%d n=%d" % (s, n), seed, preset, _ok(ok), len(res.indices) if res else 0, size - 1)]


def task_milnor(p: dict, seed: int, preset: str) -> list:
    rng = random.Random(seed)
    d = p.get("d") or rng.randint(1, 2)
    m = p.get("m") or rng.randint(d, 12)
    t = p.get("t") or rng.randint(1, 3)
    polys = [random_poly(rng, d, t, 5) for _ in range(m)]
    grid = p.get("grid", 40 if d == 2 else 2000)
    pts = [tuple(Fraction(rng.randint(-4000, 4000), 1000) for _ in range(d)) for _ in range(grid * (grid if d == 2 else 1) // (1 if d == 1 else 4))]
    patterns = {sign_vector(polys, x) for x in pts}
    bound = milnor_thom_bound(m, d, t)
    return [Row("milnor", "d=%d m=%d t=%d" % (d, m, t), seed, preset, _ok(len(patterns) <= bound, False),
                len(patterns), bound)]


TASKS: dict = {
    "es": task_es,
    "cupcap": task_cupcap,
    "schur": task_schur,
    "cutting": task_cutting,
    "partition": task_partition,
    "transitive": task_transitive,
    "homogeneous": task_homogeneous,
    "extract": task_extract,
    "mono": task_mono,
    "osh": task_osh,
    "milnor": task_milnor,
}


def _run_job(job: tuple) -> list:
    task, params, seed, preset = job
    t0 = time.perf_counter()
    try:
        rows = TASKS[task](params, seed, preset)
    except Exception as exc:  # tie the error to its row
        rows = [Row(task, "error", seed, preset, "failed", detail="%s: %s" % (type(exc).__name__, exc))]
    wall = time.perf_counter() - t0
    for r in rows:
        r.wall_time = wall / max(len(rows), 1)
        if r.verdict not in VERDICTS:
            raise AssertionError("unknown verdict %r" % r.verdict)
    return rows


def worker_cap() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _jobs(config: dict) -> list:
    runs = config.get("runs")
    if runs is None:
        runs = [config] if "task" in config else []
    jobs = []
    for run in runs:
        task = run["task"]
        if task not in TASKS:
            raise ValueError("unknown task %r" % task)
        preset = run.get("preset", config.get("preset", "desk"))
        if preset not in PRESETS:
            raise ValueError("unknown preset %r" % preset)
        seeds = run.get("seeds", [run.get("seed", 0)])
        for sd in seeds:
            if not isinstance(sd, int):
                raise ValueError("seeds must be integers")
            jobs.append((task, dict(run.get("params", {})), sd, preset))
    return jobs


def rows_to_csv(rows: list, timing: bool = True) -> str:
    buf = io.StringIO()
    cols = CSV_COLUMNS if timing else CSV_COLUMNS[:-1]
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.as_dict())
    return buf.getvalue()


def _natural(text: str) -> tuple:
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", text))


def row_sort_key(r: Row) -> tuple:
    return (r.task, _natural(r.key), r.seed, r.preset)


def run_suite(config, output: str | None = None, workers: int | None = None) -> tuple:
    """Run every (task, seed) job; returns (rows, exit_code).  Exit code is 1 iff a row failed."""
    if isinstance(config, str):
        with open(config) as fh:
            config = json.load(fh)
    jobs = _jobs(config)
    workers = workers or worker_cap()
    rows: list = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for chunk in ex.map(_run_job, jobs):
                rows.extend(chunk)
    else:
        for job in jobs:
            rows.extend(_run_job(job))
    rows.sort(key=row_sort_key)
    output = output or config.get("output")
    config["resolved_output"] = output
    if output:
        with open(output, "w") as fh:
            fh.write(rows_to_csv(rows))
    code = 1 if any(r.verdict == "failed" for r in rows) else 0
    return rows, code
