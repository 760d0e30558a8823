"""Command line entry point: ``semiramsey <group> <action> ...``, JSON on stdout."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import harness
from .algebra import AlgebraError
from .cutting import (
    CuttingFailure,
    UnsupportedBackend,
    build_cutting,
    cutting_from_json,
    cutting_to_json,
    parse_surfaces,
    partition_low_crossing,
    verify_cutting,
)
from .geometry import (
    GeneralPositionError,
    HyperplaneFamily,
    NotFound,
    PlanarConfig,
    cupcap_extremal,
    dualize_hyperplanes,
    es_extremal_sequence,
    find_cup_cap,
    longest_monotone,
    osh_extract,
)
from .multicolor import (
    MonoConfig,
    PartitionError,
    blowup,
    check_partition,
    find_mono_triangle,
    format_partition,
    parse_partition,
    schur_coloring,
    schur_search,
    verify_blowup,
    verify_translation_invariance,
)
from .relations import (
    BudgetExceeded,
    PointSet,
    RelationError,
    RelationSystem,
    find_mono_triangle_bruteforce,
    format_points,
    format_relation,
    parse_points,
    parse_relation,
)
from .transitive import empty_in_all, transitive_subset
from .triple import ExtractConfig, extract_independent

MONO_PRESETS = {"desk": MonoConfig(), "paper": MonoConfig(small_n=3)}


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    if hasattr(o, "__dataclass_fields__"):
        return {k: getattr(o, k) for k in o.__dataclass_fields__ if not k.startswith("_")}
    return repr(o)


def emit(obj) -> None:
    json.dump(obj, sys.stdout, default=_default, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)


def _points(path: str) -> PointSet:
    return parse_points(_read(path))


def _relation(path: str):
    return parse_relation(_read(path), path)


# ---------------------------------------------------------------------------
# handlers return (report, exit code)


def cmd_generate(a):
    inst = harness.generate_instance(a.spec, a.seed)
    paths = inst.write(a.out) if a.out else []
    return {"spec": a.spec, "seed": inst.seed, "kind": inst.kind, "files": paths or sorted(inst.files())}, 0


def cmd_schur_search(a):
    res = schur_search(a.m, a.N, "maximize" if a.N is None else "decide", a.interval_cap, a.node_budget)
    if res.partition is not None and res.status == "SAT":
        _write(a.out, format_partition(res.partition))
    rep = {"status": res.status, "n": res.n, "m": res.m, "nodes": res.nodes, "preset": a.preset,
           "interval_cap": res.interval_cap, "bound": res.bound, "bound_holds": res.bound_holds,
           "partition": res.partition.classes if res.partition else None}
    return rep, 0


def cmd_schur_verify(a):
    p = parse_partition(_read(a.partition))
    problems = check_partition(p)
    rep = {"n": p.n_max, "m": len(p.classes), "problems": problems, "ok": not problems}
    if a.ramsey:
        S = schur_coloring(p, validate=False)
        tri = find_mono_triangle_bruteforce(S)
        rep["points"] = len(S.base)
        rep["mono_triangle"] = tri
        rep["ok"] = rep["ok"] and tri is None
    return rep, 0 if rep["ok"] else 1


def cmd_blowup_build(a):
    p = parse_partition(_read(a.partition))
    B = blowup(p, a.ell)
    _write(a.out, format_points(B.points))
    if a.relations_prefix:
        for i, R in enumerate(B.relations):
            _write("%s%d.txt" % (a.relations_prefix, i), format_relation(R))
    return {"points": len(B.points), "relations": len(B.relations), "C_schedule": B.C_schedule,
            "window": B.window, "slack": B.slack, "preset": a.preset}, 0


def cmd_blowup_verify(a):
    p = parse_partition(_read(a.partition))
    B = blowup(p, a.ell)
    rep = verify_blowup(B, seed=a.seed)
    shifts = [1, 7] + list(B.C_schedule)
    rep["translation"] = verify_translation_invariance(B, None, shifts, seed=a.seed)
    rep["preset"] = a.preset
    ok = rep["ok"] and rep["translation"]["invariant"]
    return rep, 0 if ok else 1


def cmd_mono_find(a):
    P = _points(a.points)
    S = RelationSystem(P, [_relation(f) for f in a.relations])
    trace: list = []
    found = find_mono_triangle(S, MONO_PRESETS[a.preset], a.seed, trace)
    rep = {"found": found is not None, "preset": a.preset, "seed": a.seed, "trace": trace}
    if found is not None:
        rep["triple"], rep["color"] = list(found[0]), found[1]
    return rep, 0


def cmd_es_construct(a):
    seq = es_extremal_sequence(a.s, a.n)
    _write(a.out, format_points(PointSet.from_values(seq)))
    mono = longest_monotone(seq)
    return {"s": a.s, "n": a.n, "sequence": seq, "length": len(seq), "inc": mono.inc, "dec": mono.dec}, 0


def cmd_es_detect(a):
    P = _points(a.points)
    seq = [p[0] for p in P.points]
    mono = longest_monotone(seq)
    rep = {"length": len(seq), "inc": mono.inc, "dec": mono.dec}
    if mono.inc >= a.s:
        rep.update(kind="increasing", indices=list(mono.inc_witness[: a.s]))
    elif mono.dec >= a.n:
        rep.update(kind="decreasing", indices=list(mono.dec_witness[: a.n]))
    else:
        rep.update(kind="none", exhaustive=True)
    return rep, 0


def cmd_cupcap_construct(a):
    cfg = cupcap_extremal(a.s, a.n)
    _write(a.out, format_points(cfg.points))
    return {"s": a.s, "n": a.n, "points": len(cfg.points), "general_position": cfg.general_position}, 0


def cmd_cupcap_detect(a):
    w = find_cup_cap(PlanarConfig.checked(_points(a.points)), a.s, a.n)
    if isinstance(w, NotFound):
        return {"kind": "none", "exhaustive": w.exhaustive, "detail": dict(w.detail)}, 0
    return {"kind": w.kind, "indices": list(w.indices)}, 0


def _hyperplanes(path: str) -> HyperplaneFamily:
    return HyperplaneFamily.from_points(_points(path))


def cmd_osh_dualize(a):
    P, R = dualize_hyperplanes(_hyperplanes(a.hyperplanes))
    _write(a.out, format_points(P))
    _write(a.relation_out, format_relation(R))
    return {"points": len(P), "dim": P.dim, "relation": R.name}, 0


def cmd_osh_extract(a):
    res = osh_extract(_hyperplanes(a.hyperplanes), a.s, a.n)
    if isinstance(res, NotFound):
        return {"side": "none", "exhaustive": res.exhaustive, "detail": dict(res.detail)}, 0
    return {"side": res.side, "indices": list(res.indices)}, 0


def cmd_cutting_build(a):
    surf = parse_surfaces(_read(a.surfaces))
    pts = list(_points(a.points).points) if a.points else None
    K = build_cutting(surf, Fraction(a.r), a.backend, a.seed, c1=a.c1, points=pts)
    _write(a.out, cutting_to_json(K))
    rep = dict(K.params)
    rep["c2"] = a.c2
    return rep, 0


def cmd_cutting_verify(a):
    surf = parse_surfaces(_read(a.surfaces))
    K = cutting_from_json(_read(a.cutting))
    P = _points(a.points) if a.points else None
    rep = verify_cutting(surf, K, P, Fraction(a.r) if a.r is not None else None)
    return rep, 0 if rep["ok"] else 1


def cmd_cutting_partition(a):
    P = _points(a.points)
    surf = parse_surfaces(_read(a.surfaces))
    res = partition_low_crossing(P, surf, a.ell, a.backend, a.seed, c1=a.c1, c2=a.c2)
    return {"parts": res.parts, "crossing_profile": {str(k): v for k, v in res.crossing_profile.items()},
            "params": res.params}, 0


def cmd_transitive_extract(a):
    P = _points(a.points)
    rels = [_relation(f) for f in a.relations]
    reps: list = []
    V = transitive_subset(P, rels, a.c3, a.backend, a.seed, report=reps)
    rep = {"order": list(V.order), "points": V.points(), "seed": a.seed, "report": reps[0] if reps else None}
    if a.empty:
        erep: dict = {}
        rep["empty_in_all"] = empty_in_all(P, rels, None, a.c3, a.backend, a.seed, report=erep)
        rep["empty_report"] = erep
    return rep, 0


def cmd_ramsey3_extract(a):
    P = _points(a.points)
    E = _relation(a.relation)
    cfg = ExtractConfig.paper() if a.preset == "paper" else ExtractConfig()
    rep: dict = {}
    out = extract_independent(P, E, a.s, cfg, a.seed, report=rep, strict=a.strict)
    rep.update({"indices": out, "seed": a.seed})
    return rep, 0 if rep.get("verification") in (None, "verified-exhaustive") else 1


def cmd_suite_run(a):
    with open(a.config) as fh:
        config = json.load(fh)
    rows, code = harness.run_suite(config, output=a.out, workers=a.workers)
    counts: dict = {}
    for r in rows:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    return {"rows": len(rows), "verdicts": counts, "output": config.get("resolved_output"), "schema_version": harness.SCHEMA_VERSION}, code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semiramsey", description=__doc__)
    groups = ap.add_subparsers(dest="group", required=True)

    def action(group, name, fn, help_=None):
        p = group.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        return p

    def sub(name, help_):
        return groups.add_parser(name, help=help_).add_subparsers(dest="action", required=True)

    def preset(p):
        p.add_argument("--preset", choices=sorted(harness.PRESETS), default="desk")

    g = groups.add_parser("generate", help="write a seeded instance")
    g.add_argument("spec")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", help="output directory")
    g.set_defaults(fn=cmd_generate)

    sc = sub("schur", "sum-free partitions")
    p = action(sc, "search", cmd_schur_search)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, default=None, help="decide this N instead of maximizing")
    p.add_argument("--interval-cap", type=int, default=None)
    p.add_argument("--node-budget", type=int, default=5 * 10 ** 7)
    p.add_argument("--out")
    preset(p)
    p = action(sc, "verify", cmd_schur_verify)
    p.add_argument("partition")
    p.add_argument("--ramsey", action="store_true", help="also check the |x-y| coloring for triangles")
    preset(p)

    bl = sub("blowup", "multi-level translated constructions")
    for name, fn in (("build", cmd_blowup_build), ("verify", cmd_blowup_verify)):
        p = action(bl, name, fn)
        p.add_argument("--partition", required=True)
        p.add_argument("--ell", type=int, default=2)
        p.add_argument("--seed", type=int, default=0)
        preset(p)
        if name == "build":
            p.add_argument("--out")
            p.add_argument("--relations-prefix")

    mo = sub("mono", "monochromatic triangles")
    p = action(mo, "find", cmd_mono_find)
    p.add_argument("--points", required=True)
    p.add_argument("--relations", nargs="+", required=True)
    p.add_argument("--seed", type=int, default=0)
    preset(p)

    es = sub("es", "monotone subsequences")
    p = action(es, "construct", cmd_es_construct)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p = action(es, "detect", cmd_es_detect)
    p.add_argument("--points", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    cc = sub("cupcap", "cups and caps")
    p = action(cc, "construct", cmd_cupcap_construct)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p = action(cc, "detect", cmd_cupcap_detect)
    p.add_argument("--points", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    osh = sub("osh", "one-sided hyperplane families")
    p = action(osh, "dualize", cmd_osh_dualize)
    p.add_argument("--hyperplanes", required=True)
    p.add_argument("--out")
    p.add_argument("--relation-out")
    p = action(osh, "extract", cmd_osh_extract)
    p.add_argument("--hyperplanes", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    cu = sub("cutting", "cuttings and low-crossing partitions")
    for name, fn in (("build", cmd_cutting_build), ("verify", cmd_cutting_verify), ("partition", cmd_cutting_partition)):
        p = action(cu, name, fn)
        p.add_argument("--surfaces", required=True)
        p.add_argument("--points", required=(name == "partition"))
        p.add_argument("--r", default=None if name != "build" else "2")
        p.add_argument("--backend", default="auto")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--c1", type=float, default=8.0)
        p.add_argument("--c2", type=float, default=8.0)
        if name == "build":
            p.add_argument("--out")
        elif name == "verify":
            p.add_argument("--cutting", required=True)
        else:
            p.add_argument("--ell", type=int, required=True)

    tr = sub("transitive", "transitive ordered subsets")
    p = action(tr, "extract", cmd_transitive_extract)
    p.add_argument("--relations", nargs="+", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--c3", type=float, default=2.0)
    p.add_argument("--backend", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--empty", action="store_true", help="also extract a set empty in every relation")

    r3 = sub("ramsey3", "independent sets of ternary relations")
    p = action(r3, "extract", cmd_ramsey3_extract)
    p.add_argument("--points", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true", help="fail when the freeness premise is violated")
    preset(p)

    su = sub("suite", "batch sweeps")
    p = action(su, "run", cmd_suite_run)
    p.add_argument("config")
    p.add_argument("--out", default=None, help="CSV path (overrides the config)")
    p.add_argument("--workers", type=int, default=None)
    return ap


USER_ERRORS = (RelationError, AlgebraError, PartitionError, GeneralPositionError, UnsupportedBackend,
               CuttingFailure, BudgetExceeded, ValueError, OSError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = args.fn(args)
    except USER_ERRORS as exc:
        emit({"error": type(exc).__name__, "message": str(exc)})
        return 2
    emit(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
