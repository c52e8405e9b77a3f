"""Command-line front end.

Subcommands: chr (subdivisions), adv (adversaries), affine (task
construction and lemma sweeps), leader (query-map properties), simulate
(protocol model checking), repro (deterministic artifact bundle).

Exit codes: 0 success, 1 a verification reported violations, 2 bad input or
resource budget exceeded. AFFINE_STATE_CAP overrides the state cap.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Iterable

from .adversary import (Adversary, AdversaryError, adversary_from_dict,
                        adversary_to_dict, agreement_function, check_fairness,
                        classify, enumerate_adversaries, make_k_of, setcon,
                        verify_fair_subtraction)
from .affine import (AffineTask, build_r_a, concurrency_levels, task_to_dict,
                     variant_divergence_report, verify_cs_distribution,
                     verify_single_carrier)
from .complexes import (ChromaticComplex, ComplexError, complex_from_dict,
                        complex_to_dict)
from .leader import LeaderError, verify_leader
from .render import HIGHLIGHT_COLORS, render_complex_svg, render_off
from .simulate import (DONE, ProtocolModel, SimulationError, StateCapExceeded,
                       check_liveness, check_model, check_safety,
                       events_from_jsonable, events_to_jsonable, replay,
                       state_cap_from_env, valid_participations)
from .subdivision import chr2_complex, chr_complex

INPUT_ERRORS = (AdversaryError, ComplexError, SimulationError, LeaderError,
                StateCapExceeded, OSError, json.JSONDecodeError, KeyError,
                ValueError)


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_adversary(path: str) -> Adversary:
    return adversary_from_dict(_load_json(path))


def _dump(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    _emit(text, out)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_colors(raw: str) -> frozenset[int]:
    try:
        return frozenset(int(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise AdversaryError(f"expected comma-separated integers, got {raw!r}")


def _subdivision(n: int, rounds: int) -> ChromaticComplex:
    if rounds == 1:
        return chr_complex(n)
    if rounds == 2:
        return chr2_complex(n)
    raise ComplexError(f"rounds must be 1 or 2, got {rounds}")


# --- chr ---------------------------------------------------------------------


def cmd_chr(args) -> int:
    K = _subdivision(args.n, args.rounds)
    if args.format == "json":
        _dump(complex_to_dict(K), args.out)
        return 0
    if args.n == 4:
        _emit(render_off(K), args.out)
        return 0
    highlights = []
    if args.highlight:
        sub = complex_from_dict(_load_json(args.highlight))
        missing = sub.vertices - K.vertices
        if missing:
            raise ComplexError(
                f"highlight vertices not in the complex: "
                f"{sorted(v.uid for v in missing)}")
        highlights.append((sub.sorted_facets(), HIGHLIGHT_COLORS[0]))
    _emit(render_complex_svg(K, highlights, labels=args.labels), args.out)
    return 0


# --- adv ---------------------------------------------------------------------


def cmd_adv(args) -> int:
    if args.action == "classify":
        rows = [classify(a) for a in enumerate_adversaries(args.n)]
        _dump({"n": args.n, "count": len(rows), "rows": rows}, args.out)
        return 0
    if not args.adversary:
        raise AdversaryError(f"adv {args.action} needs --adversary")
    adv = _load_adversary(args.adversary)
    if args.action == "setcon":
        _dump({"setcon": setcon(adv)}, args.out)
        return 0
    if args.action == "alpha":
        alpha = agreement_function(adv)
        table = {",".join(map(str, sorted(P))): a
                 for P, a in sorted(alpha.values().items(),
                                    key=lambda kv: (len(kv[0]), sorted(kv[0])))}
        _dump({"n": adv.n, "alpha": table}, args.out)
        return 0
    if args.action == "fair":
        verdict = check_fairness(adv)
        doc = {"fair": verdict.fair}
        if not verdict.fair:
            P, Q = verdict.witness
            doc["witness"] = {"P": sorted(P), "Q": sorted(Q)}
        _dump(doc, args.out)
        return 0 if verdict.fair else 1
    raise AdversaryError(f"unknown adv action {args.action!r}")


# --- affine --------------------------------------------------------------------


def cmd_affine_build(args) -> int:
    adv = _load_adversary(args.adversary)
    task = build_r_a(adv, combine=args.combine)
    _dump(task_to_dict(task), args.out)
    if args.svg:
        base = chr2_complex(adv.n)
        svg = render_complex_svg(
            base, [(task.complex.sorted_facets(), HIGHLIGHT_COLORS[0])])
        _emit(svg, args.svg)
    return 0


def cmd_affine_verify(args) -> int:
    adv = _load_adversary(args.adversary)
    if args.property == "distribution":
        report = verify_cs_distribution(adv)
    elif args.property == "single-carrier":
        report = verify_single_carrier(adv)
    elif args.property == "subtraction":
        report = verify_fair_subtraction(adv)
    else:
        raise AdversaryError(f"unknown property {args.property!r}")
    _dump(report.to_dict(), args.out)
    return 0 if report.ok else 1


# --- leader --------------------------------------------------------------------


def cmd_leader(args) -> int:
    adv = _load_adversary(args.adversary)
    queries = [_parse_colors(args.Q)] if args.Q else None
    reports = verify_leader(adv, queries=queries)
    doc = {r.kind: r.to_dict() for r in reports}
    _dump(doc, args.out)
    return 0 if all(r.ok for r in reports) else 1


# --- simulate ------------------------------------------------------------------


def cmd_simulate_check(args) -> int:
    adv = _load_adversary(args.adversary)
    if args.n is not None and args.n != adv.n:
        raise SimulationError(f"--n {args.n} disagrees with adversary n={adv.n}")
    task = build_r_a(adv, combine=args.combine)
    cap = state_cap_from_env()
    parts = ([_parse_colors(args.participation)]
             if args.participation else valid_participations(adv))
    doc = {"adversary": adversary_to_dict(adv), "participations": []}
    ok = True
    want_safety = args.safety or not args.liveness
    want_liveness = args.liveness or not args.safety
    trace_dir = Path(args.trace_out) if args.trace_out else None
    if trace_dir is not None:
        trace_dir.mkdir(parents=True, exist_ok=True)
    for P in parts:
        model = ProtocolModel(adv, participation=P,
                              fault_budget=args.fault_budget, max_states=cap)
        exploration = model.explore(track_parents=trace_dir is not None)
        row = {"participation": sorted(P),
               "fault_budget": model.fault_budget,
               "states": exploration.state_count,
               "terminals": len(exploration.terminals)}
        if want_safety:
            rep = check_safety(model, exploration, task)
            row["safety"] = rep.to_dict()
            ok = ok and rep.ok
        if want_liveness:
            rep = check_liveness(model, exploration)
            row["liveness"] = rep.to_dict()
            ok = ok and rep.ok
        doc["participations"].append(row)
        if trace_dir is not None:
            for k, term in enumerate(exploration.terminals):
                crashed = model._crashed_mask(term)
                stuck = [i + 1 for i in range(model.n)
                         if (model.pmask >> i) & 1 and not (crashed >> i) & 1
                         and model._prog(term, i) != DONE]
                sigma = model.output_simplex(term)
                bad = (want_liveness and stuck) or (
                    want_safety and sigma is not None
                    and sigma not in task.complex)
                if bad:
                    events = model.trace_to(term, exploration.parents)
                    name = "trace_" + "".join(map(str, sorted(P))) + f"_{k}.json"
                    _dump({"participation": sorted(P),
                           "events": events_to_jsonable(events)},
                          str(trace_dir / name))
    _dump(doc, args.out)
    return 0 if ok else 1


def cmd_simulate_replay(args) -> int:
    adv = _load_adversary(args.adversary)
    payload = _load_json(args.trace)
    part = ([int(x) for x in payload["participation"]]
            if "participation" in payload else None)
    if args.participation:
        part = sorted(_parse_colors(args.participation))
    model = ProtocolModel(adv, participation=part,
                          fault_budget=args.fault_budget,
                          max_states=state_cap_from_env())
    state = replay(model, events_from_jsonable(payload["events"]))
    _dump(model.decode(state), args.out)
    return 0


# --- repro ---------------------------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_repro(args) -> int:
    from .affine import contention_simplices, critical_simplices

    n = args.n
    if n != 3:
        raise ComplexError("the artifact bundle is defined at n=3")
    adv = (_load_adversary(args.adversary) if args.adversary
           else make_k_of(n, 1))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cap = state_cap_from_env()
    chr1 = chr_complex(n)
    chr2 = chr2_complex(n)
    ok = True

    files: dict[str, str] = {}

    def put(name: str, text: str) -> None:
        (out_dir / name).write_text(text, encoding="utf-8")
        files[name] = _sha256(out_dir / name)

    # six drawings
    put("subdivision_one_round.svg", render_complex_svg(chr1, labels=True))

    from .affine import build_r_tres
    tres = build_r_tres(n, 1)
    put("task_resilient_1.svg", render_complex_svg(
        chr2, [(tres.complex.sorted_facets(), HIGHLIGHT_COLORS[0])]))

    contending = contention_simplices(chr2, min_dim=1)
    put("contention_two_rounds.svg",
        render_complex_svg(chr2, [(contending, HIGHLIGHT_COLORS[1])]))

    crits = critical_simplices(adv)
    put("critical_simplices.svg",
        render_complex_svg(chr1, [(crits, HIGHLIGHT_COLORS[2])]))

    levels = concurrency_levels(adv)
    by_level: dict[int, list] = {}
    for s, c in levels.items():
        by_level.setdefault(c, []).append(s)
    layers = [(by_level[c], HIGHLIGHT_COLORS[i % len(HIGHLIGHT_COLORS)])
              for i, c in enumerate(sorted(by_level))]
    put("concurrency_map.svg", render_complex_svg(chr1, layers))

    union_task = build_r_a(adv, combine="union")
    put("task_affine.svg", render_complex_svg(
        chr2, [(union_task.complex.sorted_facets(), HIGHLIGHT_COLORS[0])]))

    # four reports
    rows = [classify(a) for a in enumerate_adversaries(n)]
    put("classification.json",
        json.dumps({"n": n, "count": len(rows), "rows": rows}, indent=2) + "\n")

    inter_task = build_r_a(adv, combine="intersection")
    dist = verify_cs_distribution(adv)
    single = verify_single_carrier(adv)
    subtract = verify_fair_subtraction(adv)
    ok = ok and dist.ok and single.ok and subtract.ok
    put("affine_report.json", json.dumps({
        "adversary": adversary_to_dict(adv),
        "facet_counts": {"union": union_task.facet_count(),
                         "intersection": inter_task.facet_count()},
        "divergence": variant_divergence_report([("selected", adv)]),
        "distribution": dist.to_dict(),
        "single_carrier": single.to_dict(),
        "subtraction": subtract.to_dict(),
    }, indent=2) + "\n")

    reports = verify_leader(adv, task=union_task)
    ok = ok and all(r.ok for r in reports)
    put("leader_report.json",
        json.dumps({r.kind: r.to_dict() for r in reports}, indent=2) + "\n")

    safety, liveness, mc_rows = check_model(adv, union_task, max_states=cap)
    ok = ok and safety.ok and liveness.ok
    put("model_check.json", json.dumps({
        "adversary": adversary_to_dict(adv),
        "safety": safety.to_dict(),
        "liveness": liveness.to_dict(),
        "participations": mc_rows,
    }, indent=2) + "\n")

    manifest = {"files": {k: files[k] for k in sorted(files)}}
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0 if ok else 1


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affinetask",
        description="Chromatic subdivisions, fair adversaries, affine tasks, "
                    "and an exhaustive protocol checker.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chr", help="build or draw iterated subdivisions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rounds", type=int, default=1, choices=(1, 2))
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.add_argument("--highlight", help="complex JSON to overlay (svg only)")
    p.add_argument("--labels", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_chr)

    p = sub.add_parser("adv", help="adversary queries")
    p.add_argument("action", choices=("setcon", "alpha", "fair", "classify"))
    p.add_argument("--adversary", help="adversary JSON file")
    p.add_argument("--n", type=int, default=3, help="classify sweep size")
    p.add_argument("--out")
    p.set_defaults(func=cmd_adv)

    p = sub.add_parser("affine", help="build tasks, run lemma sweeps")
    asub = p.add_subparsers(dest="affine_cmd", required=True)
    b = asub.add_parser("build")
    b.add_argument("--adversary", required=True)
    b.add_argument("--combine", choices=("union", "intersection"), default="union")
    b.add_argument("--out")
    b.add_argument("--svg")
    b.set_defaults(func=cmd_affine_build)
    v = asub.add_parser("verify")
    v.add_argument("property",
                   choices=("distribution", "single-carrier", "subtraction"))
    v.add_argument("--adversary", required=True)
    v.add_argument("--out")
    v.set_defaults(func=cmd_affine_verify)

    p = sub.add_parser("leader", help="verify the query-leader map")
    lsub = p.add_subparsers(dest="leader_cmd", required=True)
    lv = lsub.add_parser("verify")
    lv.add_argument("--adversary", required=True)
    lv.add_argument("--Q", help="restrict to one query, e.g. 1,3")
    lv.add_argument("--out")
    lv.set_defaults(func=cmd_leader)

    p = sub.add_parser("simulate", help="model-check the two-round protocol")
    ssub = p.add_subparsers(dest="simulate_cmd", required=True)
    sc = ssub.add_parser("check")
    sc.add_argument("--adversary", required=True)
    sc.add_argument("--n", type=int)
    sc.add_argument("--safety", action="store_true")
    sc.add_argument("--liveness", action="store_true")
    sc.add_argument("--participation", help="fix one participation, e.g. 1,2")
    sc.add_argument("--fault-budget", type=int, default=None)
    sc.add_argument("--combine", choices=("union", "intersection"),
                    default="union")
    sc.add_argument("--trace-out", help="directory for violation traces")
    sc.add_argument("--out")
    sc.set_defaults(func=cmd_simulate_check)
    sr = ssub.add_parser("replay")
    sr.add_argument("--adversary", required=True)
    sr.add_argument("--trace", required=True)
    sr.add_argument("--participation")
    sr.add_argument("--fault-budget", type=int, default=None)
    sr.add_argument("--out")
    sr.set_defaults(func=cmd_simulate_replay)

    p = sub.add_parser("repro", help="emit the deterministic artifact bundle")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--adversary", help="adversary JSON driving the task drawings")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_repro)

    return parser


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
