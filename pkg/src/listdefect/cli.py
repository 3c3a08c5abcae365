"""Batch front-end: generate instances, run algorithms, sweep configs.

Exit codes: 0 = validator-passing output on disk (or a proven UNSAT
verdict from the oracle), 2 = fail-fast abort (scaled parameters could
not support the run; nothing invalid was emitted), 1 = genuine error
(bad schema, I/O, unknown arguments).
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from typing import Optional

from .errors import FailFast, ListDefectError
from .generate import FAMILIES, LIST_MODELS, TARGETS, make_graph, make_instance
from .graphs import (
    ColoredGraph,
    ColoringOutput,
    LdcInstance,
    check_existence_condition,
    instance_from_json,
    instance_to_json,
    validate_ldc,
)
from .linial import linial_coloring, linial_palette
from .oldc_basic import OldcConfig, multi_defect_oldc
from .oldc_main import MainConfig, main_oldc
from .oracle import exhaustive_solve, sequential_arbdefective, sequential_ldc
from .reductions import (
    BasicInner,
    FrameworkConfig,
    OracleInner,
    PipelineConfig,
    StageRow,
    congest_pipeline,
    degree_halving_framework,
    message_preset_p,
    space_reduced_oldc,
)
from .runtime import RoundTrace

ALGORITHMS = (
    "seq",
    "seq-arb",
    "oracle",
    "linial",
    "oldc-basic",
    "oldc-main",
    "space-reduced",
    "framework",
    "congest-pipeline",
)


def _parse_pair(text: Optional[str]) -> Optional[tuple[int, int]]:
    if not text:
        return None
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 2:
        raise ValueError("override must be 'tau,tau_prime'")
    return parts[0], parts[1]


def run_algorithm(
    graph: ColoredGraph,
    inst: LdcInstance,
    algorithm: str,
    args: argparse.Namespace,
) -> tuple[ColoringOutput | None, RoundTrace, dict, list[StageRow]]:
    """Dispatch one algorithm; returns (output or None, trace, report, rows)."""
    report: dict = {"algorithm": algorithm}
    rows: list[StageRow] = []
    trace = RoundTrace()
    scale = _parse_pair(args.tau_override)
    scale_bar = _parse_pair(args.taubar_override)
    basic_cfg = OldcConfig(
        alpha=args.alpha,
        scale_override=scale,
        bits_per_message=args.bits_budget,
        max_rounds=args.max_rounds,
        record_messages=args.verbose,
    )

    if algorithm == "seq":
        out, stats = sequential_ldc(graph, inst)
        report["recolorings"] = stats.recolorings
        report["phi_initial"] = stats.phi_initial
    elif algorithm == "seq-arb":
        out, stats = sequential_arbdefective(graph, inst)
        report["recolorings"] = stats.recolorings
    elif algorithm == "oracle":
        report["existence_condition"] = check_existence_condition(graph, inst) \
            if inst.flavor in ("defective", "arbdefective") else None
        out = exhaustive_solve(graph, inst)
        report["verdict"] = "SAT" if out is not None else "UNSAT"
    elif algorithm == "linial":
        out, trace = linial_coloring(graph)
        report["palette"] = linial_palette(graph)
    elif algorithm == "oldc-basic":
        out, trace = multi_defect_oldc(graph, inst, config=basic_cfg)
    elif algorithm == "oldc-main":
        cfg = MainConfig(
            alpha=args.alpha,
            tau_override=scale[0] if scale else None,
            taubar_override=(scale_bar or scale)[0] if (scale_bar or scale) else None,
            stage1_scale=scale_bar or scale,
            stage2_scale=scale,
            bits_per_message=args.bits_budget,
            record_messages=args.verbose,
        )
        out, trace = main_oldc(graph, inst, cfg)
    elif algorithm == "space-reduced":
        inner = BasicInner(config=basic_cfg) if args.inner == "basic" else OracleInner()
        p = args.p or message_preset_p(len(inst.color_space), args.r or 1)
        if p >= len(inst.color_space):
            out, trace = inner.solve(graph, inst)
        else:
            out, trace = space_reduced_oldc(graph, inst, p, inner)
        report["p"] = p
    elif algorithm == "framework":
        inner = BasicInner(config=basic_cfg) if args.inner == "basic" else OracleInner()
        out, trace, rows = degree_halving_framework(
            graph, inst, FrameworkConfig(inner=inner)
        )
    elif algorithm == "congest-pipeline":
        cfg = PipelineConfig(
            r=args.r,
            bits_budget=args.bits_budget,
            inner_scale=scale,
            alpha=args.alpha,
        )
        out, trace, rows = congest_pipeline(graph, inst, cfg)
    else:
        raise ListDefectError(f"unknown algorithm {algorithm!r}")
    return out, trace, report, rows


def cmd_run(args: argparse.Namespace) -> int:
    with open(args.instance) as fh:
        graph, inst = instance_from_json(fh.read())
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        out, trace, report, rows = run_algorithm(graph, inst, args.algorithm, args)
    except FailFast as exc:
        report = {
            "algorithm": args.algorithm,
            "outcome": "fail-fast",
            "error": type(exc).__name__,
            "detail": str(exc),
        }
        with open(os.path.join(args.out_dir, "report.json"), "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=1)
        print(f"fail-fast: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    if out is not None and args.algorithm != "linial":
        validity = validate_ldc(graph, inst, out)
        report["valid"] = validity.valid
        report["conflicts"] = list(validity.conflicts)
        if not validity.valid:
            # defensive: no algorithm path should reach here
            print("invalid output produced", file=sys.stderr)
            return 1
    elif args.algorithm == "linial" and out is not None:
        proper = all(out.colors[u] != out.colors[v] for u, v in graph.edges())
        report["valid"] = proper
        if not proper:
            return 1

    with open(os.path.join(args.out_dir, "coloring.json"), "w") as fh:
        json.dump(
            {
                "colors": list(out.colors) if out is not None else None,
                "orientation": [list(e) for e in out.orientation_out]
                if out is not None and out.orientation_out
                else None,
            },
            fh,
            sort_keys=True,
        )
    with open(os.path.join(args.out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
    with open(os.path.join(args.out_dir, "trace.csv"), "w") as fh:
        fh.write(trace.to_csv())
    if args.verbose:
        with open(os.path.join(args.out_dir, "trace.json"), "w") as fh:
            fh.write(trace.to_json(verbose=True))
    if rows:
        with open(os.path.join(args.out_dir, "stages.csv"), "w") as fh:
            fh.write(StageRow.header() + "\n")
            for row in rows:
                fh.write(row.csv() + "\n")
    verdict = report.get("verdict")
    print(f"ok: {args.algorithm} " + (f"verdict={verdict}" if verdict else "valid"))
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    graph = make_graph(
        args.family, args.n, args.degree, args.seed, oriented=not args.undirected
    )
    inst = make_instance(
        graph,
        args.list_model,
        args.seed,
        space_size=args.space,
        k=args.k,
        flavor=args.flavor,
        g=args.g,
        target=args.target,
        alpha=args.alpha,
    )
    text = instance_to_json(graph, inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    with open(args.config) as fh:
        matrix = json.load(fh)
    rows = ["family,n,list_model,algorithm,seed,rounds,max_bits,valid,failure"]
    combos = itertools.product(
        matrix.get("families", ["ring"]),
        matrix.get("ns", [8]),
        matrix.get("list_models", ["degree-plus-one"]),
        matrix.get("algorithms", ["seq"]),
        matrix.get("seeds", [0]),
    )
    base = argparse.Namespace(
        alpha=matrix.get("alpha", 1.0),
        tau_override=matrix.get("tau_override"),
        taubar_override=matrix.get("taubar_override"),
        bits_budget=matrix.get("bits_budget"),
        max_rounds=matrix.get("max_rounds", 10_000),
        verbose=False,
        inner=matrix.get("inner", "oracle"),
        p=matrix.get("p"),
        r=matrix.get("r"),
    )
    for family, n, list_model, algorithm, seed in combos:
        try:
            graph = make_graph(family, n, matrix.get("degree", 4), seed)
            inst = make_instance(
                graph,
                list_model,
                seed,
                space_size=matrix.get("space", 32),
                k=matrix.get("k", 4),
                flavor=matrix.get("flavor", "defective"),
                g=matrix.get("g", 0),
                target=matrix.get("target", "eq1"),
            )
            out, trace, report, _ = run_algorithm(graph, inst, algorithm, base)
            valid = report.get("valid", True) if out is not None else True
            rows.append(
                f"{family},{n},{list_model},{algorithm},{seed},"
                f"{trace.rounds_elapsed},{trace.max_bits()},{valid},"
            )
        except FailFast as exc:
            rows.append(
                f"{family},{n},{list_model},{algorithm},{seed},,,False,{type(exc).__name__}"
            )
        except ListDefectError as exc:
            rows.append(
                f"{family},{n},{list_model},{algorithm},{seed},,,False,error:{type(exc).__name__}"
            )
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    args.algorithm = "oracle"
    return cmd_run(args)


def _add_run_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--instance", required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--tau-override", dest="tau_override", default=None,
                    help="scaled 'tau,tau_prime' pair")
    sp.add_argument("--taubar-override", dest="taubar_override", default=None)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--bits-budget", dest="bits_budget", type=int, default=None)
    sp.add_argument("--max-rounds", dest="max_rounds", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", dest="out_dir", default="out")
    sp.add_argument("--inner", choices=["oracle", "basic"], default="oracle")
    sp.add_argument("--verbose", action="store_true")


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="listdefect",
        description="list defective coloring simulator and algorithm library",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="emit a JSON instance")
    sp.add_argument("--family", choices=FAMILIES, default="random-gnp")
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--degree", type=int, default=4)
    sp.add_argument("--list-model", dest="list_model", choices=LIST_MODELS,
                    default="degree-plus-one")
    sp.add_argument("--space", type=int, default=32)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--flavor", choices=["defective", "oriented", "arbdefective"],
                    default="defective")
    sp.add_argument("--g", type=int, default=0)
    sp.add_argument("--target", choices=TARGETS, default="eq1")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--undirected", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("run", help="run one algorithm on an instance")
    sp.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    _add_run_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("oracle", help="exhaustive solve (shorthand)")
    _add_run_flags(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("sweep", help="run a config matrix, one CSV row per cell")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FailFast as exc:
        print(f"fail-fast: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ListDefectError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
