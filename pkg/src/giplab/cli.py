"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 infeasible, 3 undecided
(budget exhausted), 4 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import secrets
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import classical, qsim
from .arith import is_odd_prime
from .instances import (
    PromiseViolation,
    dump_instances,
    enumerate_instances,
    gip_closed_form,
    gip_eval,
    load_instances,
    random_instance,
)
from .lowerbound import confusion as conf
from .lowerbound import model as lpmodel
from .lowerbound import solver

EXIT_OK, EXIT_MISMATCH, EXIT_INFEASIBLE, EXIT_UNDECIDED, EXIT_USAGE = 0, 1, 2, 3, 4

log = logging.getLogger("giplab")


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    m: int | None = None
    seed: int | None = None
    backend: str | None = None
    budgets: list[int] = field(default_factory=list)
    input: str | None = None
    output: str | None = None
    shots: int | None = None
    budget_nodes: int | None = None


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed}", file=sys.stderr)
    return seed


def _require_prime(n: int) -> None:
    if not is_odd_prime(n):
        raise UsageError(f"--n must be an odd prime >= 3, got {n}")


def _write_jsonl(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r.get(h, "") for h in header])


# -- gen / verify ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    _require_prime(args.n)
    if args.m < 1:
        raise UsageError("--m must be positive")
    if args.exhaustive:
        insts = enumerate_instances(args.n, args.m)
        seed = None
    else:
        seed = _resolve_seed(args.seed)
        insts = (random_instance(args.n, args.m, seed + k) for k in range(args.count))
    written = dump_instances(insts, args.out)
    print(f"wrote {written} instances to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        insts = load_instances(args.input)
    except PromiseViolation as exc:
        print(f"promise violation: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    bad = sum(gip_eval(i) != gip_closed_form(i) for i in insts)
    print(f"{len(insts)} instances satisfy the promise; {bad} closed-form mismatches")
    return EXIT_MISMATCH if bad else EXIT_OK


# -- run ---------------------------------------------------------------------------------


def _load_or_generate(args):
    if args.input:
        try:
            return load_instances(args.input)
        except (OSError, ValueError) as exc:
            raise UsageError(f"{args.input}: {exc}") from exc
    if args.n is None or args.m is None:
        raise UsageError("give --in, or --n and --m to draw random instances")
    _require_prime(args.n)
    seed = _resolve_seed(args.seed)
    args.seed = seed
    return [random_instance(args.n, args.m, seed + k) for k in range(args.count)]


def cmd_run(args) -> int:
    insts = _load_or_generate(args)
    seed = _resolve_seed(args.seed)
    cfg = RunConfig(
        "run", args.n, args.m, seed, args.backend if args.protocol == "quantum" else None,
        input=args.input, output=args.out, shots=args.shots,
    )
    rows = []
    runs = matches = 0
    for idx, inst in enumerate(insts):
        oracle = gip_eval(inst).value
        if args.protocol == "quantum":
            if args.backend == "dense":
                try:
                    qsim.dense_budget_check(inst.n)
                except qsim.MemoryBudgetError as exc:
                    raise UsageError(str(exc)) from exc
            shots = []
            for trial in range(args.shots):
                t, rec = qsim.run_quantum_protocol(inst, args.backend, seed, trial + idx * args.shots)
                shots.append({"trial": trial, "symbols": list(t.symbols), "recovered": rec.value})
            ok = sum(s["recovered"] == oracle for s in shots)
            row = {
                "index": idx,
                "n": inst.n,
                "m": inst.m,
                "shots": shots,
                "oracle": oracle,
                "match": ok == len(shots),
                "bit_cost": (inst.n - 1) * math.log2(inst.n),
                "bit_cost_rounded": (inst.n - 1) * math.ceil(math.log2(inst.n)),
            }
            runs += len(shots)
            matches += ok
        else:
            row = classical.classical_report(inst)
            row["index"] = idx
            runs += 1
            matches += row["match"]
        row["config"] = asdict(cfg)
        rows.append(row)
    if args.out:
        _write_jsonl(args.out, rows)
    summary = {
        "protocol": args.protocol,
        "n": insts[0].n if insts else "",
        "instances": len(insts),
        "runs": runs,
        "matches": matches,
        "mismatches": runs - matches,
        "bit_cost": rows[0]["bit_cost"] if rows else "",
    }
    if args.csv:
        _write_csv(args.csv, list(summary), [summary])
    print(
        f"{args.protocol}: {matches}/{runs} runs recovered the oracle value"
        + (f"; bit cost {summary['bit_cost']:.4f}" if rows else "")
    )
    return EXIT_OK if matches == runs else EXIT_MISMATCH


# -- lowerbound ----------------------------------------------------------------------------


def _config_from_args(args) -> solver.FeasibilityConfig:
    _require_prime(args.n)
    if args.budgets:
        budgets = args.budgets
    elif args.n == 3 and args.lb is not None and args.lc is not None:
        budgets = [args.lb, args.lc]
    else:
        raise UsageError("give --lb/--lc (n=3) or --budgets l2 ... ln")
    try:
        return solver.FeasibilityConfig(args.n, args.m, tuple(budgets))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_lowerbound(args) -> int:
    budget = args.budget_nodes if args.budget_nodes is not None else solver.budget_from_env()
    if args.action == "solve":
        cfg = _config_from_args(args)
        try:
            res = solver.solve_feasibility(cfg, budget)
        except solver.UndecidedError as exc:
            print(f"UNDECIDED: {exc}")
            return EXIT_UNDECIDED
        row = res.row(with_witness=args.witness)
        if not args.timings:
            row.pop("seconds")
        print(f"{res.status.upper()} n={cfg.n} m={cfg.m} budgets={list(cfg.budgets)} "
              f"nodes={res.nodes} seconds={res.seconds:.2f} stats={res.stats}")
        if args.out:
            row["config"] = asdict(RunConfig("lowerbound solve", cfg.n, cfg.m, budgets=list(cfg.budgets),
                                             output=args.out, budget_nodes=budget))
            _write_jsonl(args.out, [row])
        return EXIT_OK if res.feasible else EXIT_INFEASIBLE
    if args.action == "export-lp":
        cfg = _config_from_args(args)
        if not args.out:
            raise UsageError("export-lp needs --out")
        model = lpmodel.linearize(lpmodel.build_ilp(cfg))
        lpmodel.export_lp(model, args.out)
        print(f"wrote {len(model.variables)} binaries and {len(model.constraints)} rows to {args.out}")
        return EXIT_OK
    if args.action == "table1":
        try:
            rows = solver.reproduce_table1(budget)
        except solver.UndecidedError as exc:
            print(f"UNDECIDED: {exc}")
            return EXIT_UNDECIDED
        for r in rows:
            print(f"m={r['m']} lb={r['lb']} lc={r['lc']}: {r['status']:<10} "
                  f"(expected {r['expected']}) nodes={r['nodes']} {r['seconds']:.2f}s "
                  f"{'OK' if r['agrees'] else 'MISMATCH'}")
        if not args.timings:
            for r in rows:
                r.pop("seconds")
        if args.out:
            _write_jsonl(args.out, rows)
        if args.csv:
            _write_csv(args.csv, ["m", "lb", "lc", "status", "expected", "agrees", "nodes"], rows)
        return EXIT_OK if all(r["agrees"] for r in rows) else EXIT_MISMATCH
    if args.action == "separation":
        try:
            rep = solver.separation_report(solver.reproduce_table1(budget))
        except solver.UndecidedError as exc:
            print(f"UNDECIDED: {exc}")
            return EXIT_UNDECIDED
        lb, lc = rep["lower_bound_budgets"]
        print(f"quantum protocol:        {rep['quantum_bits']:.4f} bits (2 log2 3)")
        print(f"classical lower bound:   {rep['lower_bound_bits']:.4f} bits (log2 {lb} + log2 {lc})")
        print(f"classical protocol:      {rep['classical_protocol_bits']:.4f} bits (4 log2 9)")
        verdict = "holds" if rep["strict_separation"] else "FAILS"
        print(f"strict separation {verdict}: "
              f"{rep['quantum_bits']:.4f} < {rep['lower_bound_bits']:.4f} <= {rep['classical_protocol_bits']:.4f}")
        if args.out:
            Path(args.out).write_text(json.dumps(rep, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return EXIT_OK if rep["strict_separation"] else EXIT_MISMATCH
    raise UsageError(f"unknown action {args.action}")


# -- confusion ----------------------------------------------------------------------------------


def _labeling(source: str, m: int) -> list[int]:
    if source == "const":
        return conf.constant_labeling(m)
    if source == "identity":
        return list(range(1, 3**m + 1))
    path = Path(source)
    if not path.exists():
        raise UsageError(f"labeling must be 'const', 'identity' or a file, got {source!r}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        labels = [int(v) for v in data]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed labeling file {source}: {exc}") from exc
    if len(labels) != 3**m:
        raise UsageError(f"malformed labeling file {source}: expected {3 ** m} labels, got {len(labels)}")
    return labels


def cmd_confusion(args) -> int:
    if args.m < 1:
        raise UsageError("--m must be positive")
    labels = _labeling(args.labeling, args.m)
    graph = conf.build_confusion_graph(args.m, labels)
    print(f"G_B: {graph.num_vertices} vertices, {len(graph.edges)} edges")
    if args.edges:
        Path(args.edges).write_text(graph.edge_list(), encoding="ascii")
    if args.m >= 2:
        tri = conf.triangle_for_labeling(args.m, labels)
        if tri is not None:
            a, b, c = tri.bob_indices
            adjacent = graph.has_edge(a, b) and graph.has_edge(a, c) and graph.has_edge(b, c)
            print(f"triangle: alice={tri.alice} bob={list(tri.bob)} carol={list(tri.carol)} "
                  f"gip={tri.values} adjacent={adjacent}")
        else:
            print("triangle: no shattered coordinate pair in the largest Carol label class")
    try:
        chi = conf.chromatic_number_exact(graph, budget_nodes=args.budget_nodes or 2_000_000)
        print(f"chromatic number: {chi}")
    except solver.UndecidedError as exc:
        print(f"chromatic number: undecided ({exc})")
        return EXIT_UNDECIDED
    return EXIT_OK


# -- parser --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="giplab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write promise instances as JSON lines")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int)
    g.add_argument("--exhaustive", action="store_true", help="all (n^2)^m instances")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="check an instance file against the promise")
    v.add_argument("--in", dest="input", required=True)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="run a protocol and compare with the brute-force value")
    r.add_argument("protocol", choices=["quantum", "classical"])
    r.add_argument("--in", dest="input")
    r.add_argument("--n", type=int)
    r.add_argument("--m", type=int)
    r.add_argument("--count", type=int, default=1)
    r.add_argument("--backend", choices=["dense", "analytic"], default="dense")
    r.add_argument("--seed", type=int)
    r.add_argument("--shots", type=int, default=1)
    r.add_argument("--out", help="JSON-lines report, one object per instance")
    r.add_argument("--csv", help="summary CSV")
    r.set_defaults(func=cmd_run)

    lb = sub.add_parser("lowerbound", help="label-budget feasibility, the reference budget table and the separation report")
    lb.add_argument("action", choices=["solve", "export-lp", "table1", "separation"])
    lb.add_argument("--n", type=int, default=3)
    lb.add_argument("--m", type=int, default=1)
    lb.add_argument("--lb", type=int)
    lb.add_argument("--lc", type=int)
    lb.add_argument("--budgets", type=int, nargs="+")
    lb.add_argument("--budget-nodes", type=int)
    lb.add_argument("--witness", action="store_true")
    lb.add_argument("--timings", action="store_true", help="include wall-clock seconds in artifacts")
    lb.add_argument("--out")
    lb.add_argument("--csv")
    lb.set_defaults(func=cmd_lowerbound)

    c = sub.add_parser("confusion", help="Bob's confusion graph for n = 3")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--labeling", default="const", help="'const', 'identity' or a JSON list file")
    c.add_argument("--edges", help="write the edge list here")
    c.add_argument("--budget-nodes", type=int)
    c.set_defaults(func=cmd_confusion)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"giplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
