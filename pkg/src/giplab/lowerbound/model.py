"""0-1 feasibility model for label budgets, its linearization and LP text I/O."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .pairs import confusable_remote_pairs


@dataclass(frozen=True)
class Product:
    factors: tuple[str, ...]


@dataclass(frozen=True)
class AbsDiff:
    left: "Term"
    right: "Term"


Term = Union[str, Product, AbsDiff]


@dataclass
class Constraint:
    name: str
    terms: list[tuple[int, Term]]
    sense: str  # "=", "<=", ">="
    rhs: int

    def variables(self) -> set[str]:
        out: set[str] = set()
        for _, t in self.terms:
            out |= _term_vars(t)
        return out

    def is_linear(self) -> bool:
        return all(isinstance(t, str) for _, t in self.terms)


@dataclass
class LinearModel:
    variables: list[str]
    constraints: list[Constraint]
    comment: str = ""
    aux_of: dict[str, Term] = field(default_factory=dict)

    def is_linear(self) -> bool:
        return all(c.is_linear() for c in self.constraints)

    def check(self) -> None:
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("duplicate variable declaration")
        for c in self.constraints:
            missing = c.variables() - declared
            if missing:
                raise ValueError(f"row {c.name} uses undeclared variables {sorted(missing)[:3]}")

    def evaluate(self, assignment: dict[str, int]) -> bool:
        """True iff the 0-1 assignment satisfies every row (products and |.| evaluated directly)."""
        return all(_row_ok(c, assignment) for c in self.constraints)


def _term_vars(t: Term) -> set[str]:
    if isinstance(t, str):
        return {t}
    if isinstance(t, Product):
        return set(t.factors)
    return _term_vars(t.left) | _term_vars(t.right)


def term_value(t: Term, a: dict[str, int]) -> int:
    if isinstance(t, str):
        return a[t]
    if isinstance(t, Product):
        v = 1
        for f in t.factors:
            v *= a[f]
        return v
    return abs(term_value(t.left, a) - term_value(t.right, a))


def _row_ok(c: Constraint, a: dict[str, int]) -> bool:
    lhs = sum(coef * term_value(t, a) for coef, t in c.terms)
    if c.sense == "=":
        return lhs == c.rhs
    if c.sense == "<=":
        return lhs <= c.rhs
    return lhs >= c.rhs


# -- building --------------------------------------------------------------------


def indicator_name(p: int, vector: int, label: int) -> str:
    return f"I_p{p}_v{vector}_c{label}"


def build_ilp(config) -> LinearModel:
    """Symbolic model: one-hot label indicators plus one |.|-sum row per confusable pair."""
    n, m = config.n, config.m
    budgets = config.budgets
    variables = []
    constraints = []
    for p, lp in zip(range(2, n + 1), budgets):
        for v in range(n**m):
            names = [indicator_name(p, v, c) for c in range(1, lp + 1)]
            variables.extend(names)
            constraints.append(Constraint(f"one_p{p}_v{v}", [(1, x) for x in names], "=", 1))
    label_tuples = list(itertools.product(*(range(1, lp + 1) for lp in budgets)))
    for k, (_, rx, rz) in enumerate(confusable_remote_pairs(n, m)):
        terms = []
        for labels in label_tuples:
            px = Product(tuple(indicator_name(p, v, c) for p, v, c in zip(range(2, n + 1), rx, labels)))
            pz = Product(tuple(indicator_name(p, v, c) for p, v, c in zip(range(2, n + 1), rz, labels)))
            terms.append((1, AbsDiff(px, pz)))
        constraints.append(Constraint(f"pair{k}", terms, "=", 2))
    comment = f"label-budget feasibility n={n} m={m} budgets={tuple(budgets)}"
    return LinearModel(variables, constraints, comment)


# -- linearization ----------------------------------------------------------------


class _Linearizer:
    def __init__(self, model: LinearModel):
        self.binary = set(model.variables)
        self.variables = list(model.variables)
        self.rows: list[Constraint] = []
        self.aux_of: dict[str, Term] = {}
        self.cache: dict[tuple[str, ...], str] = {}

    def product(self, factors) -> str:
        key = tuple(sorted(set(factors)))
        for f in key:
            if f not in self.binary:
                raise ValueError(f"product operand {f!r} is not a declared binary variable")
        if len(key) == 1:
            return key[0]
        if key in self.cache:
            return self.cache[key]
        name = f"aux{len(self.aux_of)}"
        self.cache[key] = name
        self.aux_of[name] = Product(key)
        self.variables.append(name)
        self.binary.add(name)
        for i, f in enumerate(key, start=1):
            self.rows.append(Constraint(f"{name}_ub{i}", [(1, name), (-1, f)], "<=", 0))
        self.rows.append(
            Constraint(f"{name}_lb", [(1, name)] + [(-1, f) for f in key], ">=", -(len(key) - 1))
        )
        return name

    def expand(self, coef: int, t: Term) -> list[tuple[int, str]]:
        if isinstance(t, str):
            if t not in self.binary:
                raise ValueError(f"operand {t!r} is not a declared binary variable")
            return [(coef, t)]
        if isinstance(t, Product):
            return [(coef, self.product(t.factors))]
        # |x - y| = x + y - 2xy for binaries
        x = self._as_var(t.left)
        y = self._as_var(t.right)
        return [(coef, x), (coef, y), (-2 * coef, self.product((x, y)))]

    def _as_var(self, t: Term) -> str:
        if isinstance(t, str):
            return self.expand(1, t)[0][1]
        if isinstance(t, Product):
            return self.product(t.factors)
        raise ValueError("nested absolute values are not supported")


def _merge(terms: list[tuple[int, str]]) -> list[tuple[int, str]]:
    acc: dict[str, int] = {}
    for coef, v in terms:
        acc[v] = acc.get(v, 0) + coef
    return [(c, v) for v, c in acc.items() if c != 0]


def linearize(model: LinearModel) -> LinearModel:
    """Replace products by auxiliary binaries and |x - y| by x + y - 2*aux(xy)."""
    lin = _Linearizer(model)
    out_rows = []
    for c in model.constraints:
        terms = []
        for coef, t in c.terms:
            terms.extend(lin.expand(coef, t))
        out_rows.append(Constraint(c.name, _merge(terms), c.sense, c.rhs))
    result = LinearModel(lin.variables, out_rows + lin.rows, model.comment + " (linearized)", lin.aux_of)
    result.check()
    return result


# -- exhaustive evaluation -----------------------------------------------------------


def brute_force_feasible(model: LinearModel) -> dict[str, int] | None:
    """Exhaustive search over all 0-1 assignments of a linear model.

    Variables are fixed in declaration order and each row is tested as soon as
    its last variable is fixed, which skips only subtrees that already violate
    a fully assigned row.
    """
    if not model.is_linear():
        raise ValueError("brute_force_feasible expects a linear model")
    order = {v: i for i, v in enumerate(model.variables)}
    rows_at: list[list[tuple[list[tuple[int, int]], str, int]]] = [[] for _ in model.variables]
    for c in model.constraints:
        idx_terms = [(coef, order[v]) for coef, v in c.terms]
        last = max((i for _, i in idx_terms), default=-1)
        if last < 0:
            if not _row_ok(c, {}):
                return None
            continue
        rows_at[last].append((idx_terms, c.sense, c.rhs))
    values = [0] * len(model.variables)
    num = len(values)

    def ok(depth: int) -> bool:
        for terms, sense, rhs in rows_at[depth]:
            lhs = sum(coef * values[i] for coef, i in terms)
            if (sense == "=" and lhs != rhs) or (sense == "<=" and lhs > rhs) or (sense == ">=" and lhs < rhs):
                return False
        return True

    # iterative DFS
    depth = 0
    choice = [-1] * num
    while depth >= 0:
        if depth == num:
            return {v: values[i] for v, i in order.items()}
        choice[depth] += 1
        if choice[depth] > 1:
            choice[depth] = -1
            depth -= 1
            continue
        values[depth] = choice[depth]
        if ok(depth):
            depth += 1
    return None


def solve_with_milp(model: LinearModel) -> dict[str, int] | None:
    """Independent check through scipy's HiGHS MILP interface."""
    from scipy.optimize import LinearConstraint, milp
    from scipy.sparse import lil_matrix

    if not model.is_linear():
        raise ValueError("solve_with_milp expects a linear model")
    order = {v: i for i, v in enumerate(model.variables)}
    A = lil_matrix((len(model.constraints), len(order)))
    lo = np.full(len(model.constraints), -np.inf)
    hi = np.full(len(model.constraints), np.inf)
    for r, c in enumerate(model.constraints):
        for coef, v in c.terms:
            A[r, order[v]] += coef
        if c.sense in ("=", "<="):
            hi[r] = c.rhs
        if c.sense in ("=", ">="):
            lo[r] = c.rhs
    res = milp(
        np.zeros(len(order)),
        constraints=LinearConstraint(A.tocsr(), lo, hi),
        integrality=np.ones(len(order)),
        bounds=(0, 1),
    )
    if res.status == 0:
        return {v: int(round(res.x[i])) for v, i in order.items()}
    if res.status == 2:
        return None
    raise RuntimeError(f"MILP solver did not finish: {res.message}")


# -- LP text format ---------------------------------------------------------------------


def _fmt_terms(terms: list[tuple[int, str]], per_line: int = 8) -> str:
    parts = []
    for coef, v in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        parts.append(f"{sign} {v}" if mag == 1 else f"{sign} {mag} {v}")
    lines = [" ".join(parts[i : i + per_line]) for i in range(0, len(parts), per_line)]
    return "\n   ".join(lines)


def format_lp(model: LinearModel) -> str:
    if not model.is_linear():
        raise ValueError("only linear models can be written as LP text")
    out = []
    if model.comment:
        out.append(f"\\ {model.comment}")
    out += ["Minimize", " obj: 0", "Subject To"]
    for c in model.constraints:
        out.append(f" {c.name}: {_fmt_terms(c.terms)} {c.sense} {c.rhs}")
    out.append("Binary")
    out += [f" {v}" for v in model.variables]
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(model: LinearModel, destination) -> str:
    text = format_lp(model)
    path = Path(destination)
    try:
        path.write_text(text, encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write LP file {path}: {exc}") from exc
    return text


_SECTION = {"minimize": "obj", "maximize": "obj", "subject": "st", "binary": "bin", "binaries": "bin", "end": "end"}


def parse_lp(text: str) -> LinearModel:
    """Read back the dialect produced by :func:`format_lp`."""
    comment = ""
    section = None
    tokens: list[str] = []
    binaries: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("\\"):
            if not comment:
                comment = line[1:].strip()
            continue
        if not line:
            continue
        key = line.split()[0].lower()
        if key in _SECTION and (key != "subject" or line.lower().startswith("subject to")):
            section = _SECTION[key]
            continue
        if section == "st":
            tokens.extend(line.split())
        elif section == "bin":
            binaries.extend(line.split())
    constraints = []
    i = 0
    while i < len(tokens):
        name = tokens[i]
        if not name.endswith(":"):
            raise ValueError(f"expected a row name, got {name!r}")
        i += 1
        terms = []
        while tokens[i] not in ("=", "<=", ">=", "=<", "=>"):
            sign = -1 if tokens[i] == "-" else 1
            if tokens[i] in "+-":
                i += 1
            if re.fullmatch(r"\d+", tokens[i]):
                coef = int(tokens[i])
                i += 1
            else:
                coef = 1
            terms.append((sign * coef, tokens[i]))
            i += 1
        sense = {"=<": "<=", "=>": ">="}.get(tokens[i], tokens[i])
        rhs = int(tokens[i + 1])
        i += 2
        constraints.append(Constraint(name[:-1], terms, sense, rhs))
    model = LinearModel(binaries, constraints, comment)
    model.check()
    return model
