"""A compact conflict-driven clause-learning SAT solver.

Literals use the DIMACS convention (``v`` / ``-v`` for ``v >= 1``). The solver
is complete: :meth:`CDCL.solve` returns ``True``/``False`` only when it has a
model or a refutation, and ``None`` when the conflict budget runs out.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass


@dataclass
class SearchStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0


def _luby(i: int) -> int:
    # i is 1-based
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CDCL:
    """Two-watched-literal CDCL with 1UIP learning, VSIDS and Luby restarts."""

    def __init__(self, num_vars: int = 0):
        self.num_vars = 0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[], []]
        self.value: list[int] = [0]  # per var: 0 unassigned, 1 true, -1 false
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [-1]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.unsat = False
        self.stats = SearchStats()
        self.model: list[int] | None = None
        self.ensure_vars(num_vars)

    # -- construction -----------------------------------------------------

    def new_var(self) -> int:
        self.ensure_vars(self.num_vars + 1)
        return self.num_vars

    def ensure_vars(self, n: int) -> None:
        while self.num_vars < n:
            self.num_vars += 1
            self.value.append(0)
            self.level.append(0)
            self.reason.append(-1)
            self.activity.append(0.0)
            self.phase.append(-1)
            self.watches.append([])
            self.watches.append([])
            heapq.heappush(self.heap, (0.0, self.num_vars))

    @staticmethod
    def _idx(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits) -> bool:
        """Add a clause at decision level 0. Returns False once the formula is UNSAT."""
        if self.unsat:
            return False
        if self.trail_lim:
            raise RuntimeError("clauses may only be added at decision level 0")
        seen = set()
        clause = []
        for lit in lits:
            if lit == 0:
                raise ValueError("literal 0 is not allowed")
            self.ensure_vars(abs(lit))
            if -lit in seen:
                return True  # tautology
            val = self._lit_value(lit)
            if val == 1:
                return True
            if val == -1 or lit in seen:
                continue
            seen.add(lit)
            clause.append(lit)
        if not clause:
            self.unsat = True
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], -1)
            if self._propagate() != -1:
                self.unsat = True
                return False
            return True
        self._attach(clause)
        return True

    def _attach(self, clause: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(clause)
        self.watches[self._idx(-clause[0])].append(ci)
        self.watches[self._idx(-clause[1])].append(ci)
        return ci

    # -- core loop --------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns the index of a conflicting clause or -1."""
        value = self.value
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            false_lit = -p
            ws = watches[2 * p if p > 0 else -2 * p + 1]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = value[first] if first > 0 else -value[-first]
                if fv == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    lv = value[lk] if lk > 0 else -value[-lk]
                    if lv != -1:
                        c[1], c[k] = lk, false_lit
                        watches[2 * -lk if lk < 0 else 2 * lk + 1].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if fv == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return ci
                    self._enqueue(first, ci)
            del ws[j:]
        return -1

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.num_vars + 1) if self.value[u] == 0]
            heapq.heapify(self.heap)
        elif self.value[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = [False] * (self.num_vars + 1)
        learnt = [0]
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        while True:
            for q in self.clauses[confl]:
                if p != 0 and q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[abs(p)]
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for k in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[k]
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.value[v] = 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.value[v] == 0:
                return v
        return 0

    def solve(self, max_nodes: int | None = None) -> bool | None:
        """Decide satisfiability; ``None`` means ``max_nodes`` decisions plus conflicts ran out."""
        if self.unsat:
            return False
        if self._propagate() != -1:
            self.unsat = True
            return False
        restart_no = 1
        until_restart = 100 * _luby(restart_no)
        while True:
            confl = self._propagate()
            if confl != -1:
                self.stats.conflicts += 1
                if not self.trail_lim:
                    self.unsat = True
                    return False
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self.stats.learned += 1
                    self._enqueue(learnt[0], ci)
                self.var_inc /= 0.95
                until_restart -= 1
                if max_nodes is not None and self.stats.conflicts + self.stats.decisions >= max_nodes:
                    self._backtrack(0)
                    return None
                continue
            if until_restart <= 0:
                self.stats.restarts += 1
                restart_no += 1
                until_restart = 100 * _luby(restart_no)
                self._backtrack(0)
                continue
            v = self._pick()
            if v == 0:
                self.model = [0] + [self.value[u] == 1 for u in range(1, self.num_vars + 1)]
                self._backtrack(0)
                return True
            if max_nodes is not None and self.stats.conflicts + self.stats.decisions >= max_nodes:
                self._backtrack(0)
                return None
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(v if self.phase[v] > 0 else -v, -1)
