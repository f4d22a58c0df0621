"""Bob's confusion graph for three players and the triangle argument.

With three players the promise reads ``x + y + z = 0`` coordinatewise, so
Alice's vector and Bob's vector determine Carol's. Two Bob vectors are
adjacent when, for some Alice vector, their completions have Carol vectors
with the same Carol label but different GIP values. Adjacent vectors need
different Bob labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .pairs import all_vectors, index_vector, vector_index
from .solver import UndecidedError


def gip3(x, y, z) -> int:
    return sum(a * b * c for a, b, c in zip(x, y, z)) % 3


def promise3(x, y, z) -> bool:
    return all((a + b + c) % 3 == 0 for a, b, c in zip(x, y, z))


@dataclass(frozen=True)
class ConfusionGraph:
    m: int
    num_vertices: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not 0 <= u < v < self.num_vertices:
                raise ValueError(f"edge {(u, v)} is not an ordered pair of distinct vertices")

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def edge_list(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in sorted(self.edges))

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[tuple[int, int]], m: int = 0) -> ConfusionGraph:
        return cls(m, num_vertices, frozenset((min(u, v), max(u, v)) for u, v in edges))


def constant_labeling(m: int, label: int = 1) -> list[int]:
    return [label] * 3**m


def build_confusion_graph(m: int, carol_labeling: Sequence[int]) -> ConfusionGraph:
    """Edges via bucketing: per Alice vector, group Bob vectors by their Carol label."""
    if len(carol_labeling) != 3**m:
        raise ValueError(f"labeling must cover all {3 ** m} Carol vectors")
    vecs = all_vectors(3, m)
    weights = 3 ** np.arange(m - 1, -1, -1, dtype=np.int64)
    labels = np.asarray(carol_labeling)
    edges = set()
    for x in vecs:
        z = (-x[None, :] - vecs) % 3
        zi = z @ weights
        g = (x[None, :] * vecs * z).sum(axis=1) % 3
        buckets: dict[int, list[int]] = {}
        for y, lab in enumerate(labels[zi]):
            buckets.setdefault(int(lab), []).append(y)
        for ys in buckets.values():
            for i, j in itertools.combinations(ys, 2):
                if g[i] != g[j]:
                    edges.add((i, j))
    return ConfusionGraph(m, 3**m, frozenset(edges))


def confusion_edge_brute(m: int, carol_labeling: Sequence[int], i: int, j: int) -> bool:
    """Direct reading of the adjacency definition, restricted to promise inputs."""
    if i == j:
        return False
    vecs = [index_vector(k, 3, m) for k in range(3**m)]
    yi, yj = vecs[i], vecs[j]
    for x in vecs:
        for a, za in enumerate(vecs):
            if not promise3(x, yi, za):
                continue
            for b, zb in enumerate(vecs):
                if carol_labeling[a] != carol_labeling[b] or not promise3(x, yj, zb):
                    continue
                if gip3(x, yi, za) != gip3(x, yj, zb):
                    return True
    return False


@dataclass(frozen=True)
class ShatteredPair:
    coords: tuple[int, int]  # 0-based coordinate indices
    representatives: dict[tuple[int, int], tuple[int, ...]]


def find_shattered_coordinate_pair(sequences: Iterable[Sequence[int]]) -> ShatteredPair | None:
    """Two coordinates on which the sequences realize all nine patterns of {0,1,2}^2."""
    seqs = [tuple(int(v) for v in s) for s in sequences]
    if not seqs:
        return None
    m = len(seqs[0])
    for i, j in itertools.combinations(range(m), 2):
        reps: dict[tuple[int, int], tuple[int, ...]] = {}
        for s in seqs:
            reps.setdefault((s[i], s[j]), s)
        if len(reps) == 9:
            return ShatteredPair((i, j), dict(sorted(reps.items())))
    return None


@dataclass(frozen=True)
class Triangle:
    alice: tuple[int, ...]
    bob: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    carol: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    values: tuple[int, int, int]

    @property
    def bob_indices(self) -> tuple[int, int, int]:
        return tuple(vector_index(y, 3) for y in self.bob)

    def is_certificate(self) -> bool:
        return (
            all(promise3(self.alice, y, z) for y, z in zip(self.bob, self.carol))
            and tuple(gip3(self.alice, y, z) for y, z in zip(self.bob, self.carol)) == self.values
            and len(set(self.values)) == 3
            and len(set(self.bob)) == 3
        )


def construct_triangle(shattered: ShatteredPair) -> Triangle:
    """Alice holds 1 on the shattered coordinates and 0 elsewhere; Bob's vectors follow
    from the Carol representatives for patterns 00, 01 and 11."""
    if shattered is None or len(shattered.representatives) != 9:
        raise ValueError("need a coordinate pair with all nine patterns")
    i, j = shattered.coords
    m = len(next(iter(shattered.representatives.values())))
    alice = tuple(1 if k in (i, j) else 0 for k in range(m))
    carol = tuple(shattered.representatives[p] for p in ((0, 0), (0, 1), (1, 1)))
    bob = tuple(tuple((-a - c) % 3 for a, c in zip(alice, z)) for z in carol)
    values = tuple(gip3(alice, y, z) for y, z in zip(bob, carol))
    tri = Triangle(alice, bob, carol, values)
    if not tri.is_certificate():
        raise AssertionError(f"triangle values {values} are not pairwise distinct")
    return tri


def largest_label_class(m: int, carol_labeling: Sequence[int]) -> list[tuple[int, ...]]:
    classes: dict[int, list[int]] = {}
    for v, lab in enumerate(carol_labeling):
        classes.setdefault(lab, []).append(v)
    best = max(classes.values(), key=len)
    return [index_vector(v, 3, m) for v in best]


def triangle_for_labeling(m: int, carol_labeling: Sequence[int]) -> Triangle | None:
    shattered = find_shattered_coordinate_pair(largest_label_class(m, carol_labeling))
    return None if shattered is None else construct_triangle(shattered)


# -- exact coloring ------------------------------------------------------------------


def greedy_clique(adj: list[set[int]]) -> list[int]:
    best: list[int] = []
    for start in range(len(adj)):
        clique = [start]
        cand = set(adj[start])
        while cand:
            v = max(cand, key=lambda u: len(adj[u] & cand))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def chromatic_number_exact(
    graph: ConfusionGraph, budget_nodes: int = 2_000_000, max_vertices: int = 27
) -> int:
    """Exact chromatic number by DSATUR branch and bound."""
    nv = graph.num_vertices
    if nv > max_vertices:
        raise UndecidedError(f"{nv} vertices exceeds the exact-search limit of {max_vertices}")
    if nv == 0:
        return 0
    adj = graph.adjacency()
    clique = greedy_clique(adj)
    lower = len(clique)

    # DSATUR greedy for the initial upper bound
    colors = [-1] * nv
    order = _dsatur_greedy(adj, colors)
    best = max(colors) + 1
    if best == lower:
        return best

    colors = [-1] * nv
    for k, v in enumerate(clique):
        colors[v] = k
    nodes = 0

    def search(num_colored: int, used: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget_nodes:
            raise UndecidedError(f"chromatic search exceeded {budget_nodes} nodes", nodes)
        if num_colored == nv:
            best = used
            return
        v = _most_saturated(adj, colors)
        forbidden = {colors[u] for u in adj[v] if colors[u] >= 0}
        for c in range(min(used + 1, best - 1)):
            if c in forbidden:
                continue
            colors[v] = c
            search(num_colored + 1, max(used, c + 1))
            colors[v] = -1
            if best == lower:
                return

    search(len(clique), len(clique))
    del order
    return best


def _most_saturated(adj: list[set[int]], colors: list[int]) -> int:
    best_v, best_key = -1, None
    for v, c in enumerate(colors):
        if c >= 0:
            continue
        sat = len({colors[u] for u in adj[v] if colors[u] >= 0})
        key = (sat, len(adj[v]))
        if best_key is None or key > best_key:
            best_v, best_key = v, key
    return best_v


def _dsatur_greedy(adj: list[set[int]], colors: list[int]) -> list[int]:
    order = []
    for _ in range(len(adj)):
        v = _most_saturated(adj, colors)
        forbidden = {colors[u] for u in adj[v] if colors[u] >= 0}
        colors[v] = next(c for c in range(len(adj)) if c not in forbidden)
        order.append(v)
    return order


def is_proper_coloring(graph: ConfusionGraph, colors: Sequence[int]) -> bool:
    return all(colors[u] != colors[v] for u, v in graph.edges)
