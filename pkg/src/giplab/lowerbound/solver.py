"""Exact decision of label-budget feasibility.

A deterministic protocol with budgets ``l^2..l^n`` exists iff every player can
label its vectors so that any two confusable inputs get different label
tuples. That condition is encoded as CNF over one-hot label indicators plus
"same label" auxiliaries and decided by the CDCL search in :mod:`.cdcl`.
Labels are interchangeable within a player, so vector ``v`` is restricted to
labels ``<= v`` (first-appearance order), which removes relabelled copies.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

from ..arith import FieldElem, check_modulus
from ..instances import PromiseInstance, gip_eval
from .cdcl import CDCL
from .pairs import alice_group, confusable_remote_pairs, vector_index

DEFAULT_BUDGET_NODES = 5_000_000
BUDGET_ENV = "GIPLAB_BUDGET_NODES"

TABLE1 = (
    (1, 1, 3, "feasible"),
    (3, 1, 17, "infeasible"),
    (2, 2, 4, "infeasible"),
    (3, 3, 3, "infeasible"),
    (2, 3, 4, "feasible"),
    (3, 5, 5, "feasible"),
)


class UndecidedError(RuntimeError):
    """The search budget ran out before a proof either way was found."""

    def __init__(self, message: str, nodes: int = 0, seconds: float = 0.0):
        super().__init__(message)
        self.nodes = nodes
        self.seconds = seconds


class UnrealizableTranscript(ValueError):
    pass


@dataclass(frozen=True)
class FeasibilityConfig:
    n: int
    m: int
    budgets: tuple[int, ...]  # l^p for p = 2..n

    def __post_init__(self):
        check_modulus(self.n)
        if self.m < 1:
            raise ValueError("m must be positive")
        object.__setattr__(self, "budgets", tuple(int(b) for b in self.budgets))
        if len(self.budgets) != self.n - 1:
            raise ValueError(f"need {self.n - 1} label budgets, got {len(self.budgets)}")
        if any(b < 1 for b in self.budgets):
            raise ValueError("label budgets must be >= 1")

    @classmethod
    def three_party(cls, m: int, lb: int, lc: int) -> FeasibilityConfig:
        return cls(3, m, (lb, lc))

    @property
    def num_vectors(self) -> int:
        return self.n**self.m


@dataclass(frozen=True)
class LabelAssignment:
    """``labels[p-2][v]`` in ``1..l^p`` is player p's label for vector index ``v``."""

    n: int
    m: int
    labels: tuple[tuple[int, ...], ...]

    def label(self, p: int, vector) -> int:
        v = vector if isinstance(vector, int) else vector_index(vector, self.n)
        return self.labels[p - 2][v]

    def encode(self, instance: PromiseInstance) -> tuple[int, ...]:
        return tuple(self.label(p, instance.vector(p)) for p in range(2, self.n + 1))

    def to_dict(self) -> dict:
        return {f"p{p}": list(row) for p, row in zip(range(2, self.n + 1), self.labels)}


@dataclass
class FeasibilityResult:
    config: FeasibilityConfig
    status: str  # "feasible" | "infeasible"
    assignment: LabelAssignment | None
    nodes: int
    seconds: float
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def row(self, with_witness: bool = False) -> dict:
        out = {"n": self.config.n, "m": self.config.m}
        if self.config.n == 3:
            out["lb"], out["lc"] = self.config.budgets
        else:
            out["budgets"] = list(self.config.budgets)
        out.update(status=self.status, nodes=self.nodes, seconds=round(self.seconds, 3))
        if with_witness and self.assignment is not None:
            out["witness"] = self.assignment.to_dict()
        return out


def budget_from_env(default: int = DEFAULT_BUDGET_NODES) -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else default


class _Encoding:
    def __init__(self, config: FeasibilityConfig, symmetry: bool = True):
        self.config = config
        self.sat = CDCL()
        n, nv = config.n, config.num_vectors
        self.x: dict[tuple[int, int, int], int] = {}
        for p, lp in zip(range(2, n + 1), config.budgets):
            for v in range(nv):
                lits = []
                for c in range(lp):
                    var = self.sat.new_var()
                    self.x[p, v, c] = var
                    lits.append(var)
                self.sat.add_clause(lits)
                for c1 in range(lp):
                    for c2 in range(c1 + 1, lp):
                        self.sat.add_clause([-lits[c1], -lits[c2]])
                if symmetry:
                    for c in range(v + 1, lp):
                        self.sat.add_clause([-lits[c]])
        self.eq: dict[tuple[int, int, int], int] = {}
        seen = set()
        for _, rx, rz in confusable_remote_pairs(n, config.m):
            clause = tuple(
                sorted(
                    -self.same(p, u, w)
                    for p, u, w in zip(range(2, n + 1), rx, rz)
                    if u != w
                )
            )
            if clause not in seen:
                seen.add(clause)
                self.sat.add_clause(list(clause))
        self.num_pair_clauses = len(seen)

    def same(self, p: int, u: int, w: int) -> int:
        key = (p, min(u, w), max(u, w))
        var = self.eq.get(key)
        if var is None:
            var = self.sat.new_var()
            self.eq[key] = var
            lp = self.config.budgets[p - 2]
            for c in range(lp):
                self.sat.add_clause([-self.x[p, u, c], -self.x[p, w, c], var])
        return var

    def assignment(self) -> LabelAssignment:
        model = self.sat.model
        cfg = self.config
        rows = []
        for p, lp in zip(range(2, cfg.n + 1), cfg.budgets):
            rows.append(
                tuple(
                    next(c + 1 for c in range(lp) if model[self.x[p, v, c]])
                    for v in range(cfg.num_vectors)
                )
            )
        return LabelAssignment(cfg.n, cfg.m, tuple(rows))


def _swap_bob_carol(a: LabelAssignment) -> LabelAssignment:
    return LabelAssignment(a.n, a.m, (a.labels[1], a.labels[0]))


def solve_feasibility(
    config: FeasibilityConfig,
    budget_nodes: int | None = None,
    symmetry: bool = True,
) -> FeasibilityResult:
    """Decide whether a zero-error protocol with these label budgets exists.

    Raises :class:`UndecidedError` when ``budget_nodes`` search nodes (decisions
    plus conflicts) are spent without a proof.
    """
    if budget_nodes is None:
        budget_nodes = budget_from_env()
    swapped = symmetry and config.n == 3 and config.budgets[0] > config.budgets[1]
    work = FeasibilityConfig(3, config.m, config.budgets[::-1]) if swapped else config
    start = time.perf_counter()
    enc = _Encoding(work, symmetry=symmetry)
    verdict = enc.sat.solve(max_nodes=budget_nodes)
    seconds = time.perf_counter() - start
    st = enc.sat.stats
    nodes = st.decisions + st.conflicts
    if verdict is None:
        raise UndecidedError(
            f"undecided after {nodes} nodes for m={config.m} budgets={config.budgets}",
            nodes,
            seconds,
        )
    assignment = None
    if verdict:
        assignment = enc.assignment()
        if swapped:
            assignment = _swap_bob_carol(assignment)
        if not verify_assignment(config, assignment):
            raise AssertionError("solver returned a witness that fails verification")
    stats = {
        "decisions": st.decisions,
        "conflicts": st.conflicts,
        "propagations": st.propagations,
        "pair_clauses": enc.num_pair_clauses,
        "variables": enc.sat.num_vars,
    }
    return FeasibilityResult(
        config, "feasible" if verdict else "infeasible", assignment, nodes, seconds, stats
    )


def verify_assignment(config: FeasibilityConfig, assignment: LabelAssignment) -> bool:
    """True iff every confusable pair is separated by some player's label."""
    n = config.n
    for p, lp in zip(range(2, n + 1), config.budgets):
        row = assignment.labels[p - 2]
        if len(row) != config.num_vectors or any(not 1 <= c <= lp for c in row):
            return False
    for _, rx, rz in confusable_remote_pairs(n, config.m):
        if all(assignment.labels[k][u] == assignment.labels[k][w] for k, (u, w) in enumerate(zip(rx, rz))):
            return False
    return True


def decode(alice_vector, received_labels, assignment: LabelAssignment) -> FieldElem:
    """Alice's output: the GIP value of any promise completion matching the labels."""
    n, m = assignment.n, assignment.m
    alice = vector_index(alice_vector, n)
    remote, gip = alice_group(n, m, alice)
    want = tuple(received_labels)
    for t in range(remote.shape[0]):
        if tuple(assignment.labels[k][int(v)] for k, v in enumerate(remote[t])) == want:
            return FieldElem(int(gip[t]), n)
    raise UnrealizableTranscript(f"unrealizable transcript: no completion has labels {want}")


def decoding_errors(assignment: LabelAssignment, instances) -> list[PromiseInstance]:
    """Instances on which encode-then-decode disagrees with the function value."""
    bad = []
    for inst in instances:
        got = decode(inst.vector(1), assignment.encode(inst), assignment)
        if got != gip_eval(inst):
            bad.append(inst)
    return bad


def reproduce_table1(budget_nodes: int | None = None) -> list[dict]:
    rows = []
    for m, lb, lc, expected in TABLE1:
        res = solve_feasibility(FeasibilityConfig.three_party(m, lb, lc), budget_nodes)
        row = res.row()
        row["expected"] = expected
        row["agrees"] = res.status == expected
        rows.append(row)
    return rows


def separation_report(rows: list[dict] | None = None) -> dict:
    """Quantum cost against the classical lower bound implied by infeasible (lb, lc) rows.

    A row (m, lb, lc) infeasible rules out every lb' <= lb, lc' <= lc at that m
    and above. With lb <= lc by the Bob/Carol symmetry, the cheapest budgets
    left for Bob label count ``b`` are ``max(b, 1 + largest infeasible lc for
    some lb >= b)`` Carol labels.
    """
    if rows is None:
        rows = reproduce_table1()
    infeasible = [(r["lb"], r["lc"]) for r in rows if r["status"] == "infeasible"]
    top = max((lb for lb, _ in infeasible), default=0) + 1
    candidates = []
    for b in range(1, top + 1):
        blocked = [lc for lb, lc in infeasible if lb >= b]
        c = max(b, max(blocked, default=0) + 1)
        candidates.append({"lb": b, "lc": c, "bits": math.log2(b) + math.log2(c)})
    best = min(candidates, key=lambda d: d["bits"])
    quantum = 2 * math.log2(3)
    classical = 4 * math.log2(9)
    report = {
        "quantum_bits": quantum,
        "classical_protocol_bits": classical,
        "lower_bound_bits": best["bits"],
        "lower_bound_budgets": [best["lb"], best["lc"]],
        "candidates": candidates,
        "strict_separation": quantum < best["bits"] <= classical,
    }
    return report
