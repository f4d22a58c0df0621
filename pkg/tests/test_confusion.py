import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giplab.instances import enumerate_instances, gip_eval
from giplab.lowerbound.confusion import (
    ConfusionGraph,
    build_confusion_graph,
    chromatic_number_exact,
    confusion_edge_brute,
    constant_labeling,
    construct_triangle,
    find_shattered_coordinate_pair,
    gip3,
    greedy_clique,
    is_proper_coloring,
    promise3,
    triangle_for_labeling,
)
from giplab.lowerbound.pairs import all_vectors
from giplab.lowerbound.solver import UndecidedError


def test_gip3_and_promise():
    assert promise3((1, 0, 2), (1, 1, 2), (1, 2, 2))
    assert gip3((1, 0, 2), (1, 1, 2), (1, 2, 2)) == 0
    for inst in enumerate_instances(3, 2):
        assert gip3(*(inst.vector(p) for p in (1, 2, 3))) == gip_eval(inst).value
    assert not promise3((1,), (1,), (0,))


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("kind", ["const", "identity", "random"])
def test_bucketed_edges_match_definition(m, kind):
    n = 3**m
    if kind == "const":
        labels = constant_labeling(m)
    elif kind == "identity":
        labels = list(range(1, n + 1))
    else:
        rnd = random.Random(m)
        labels = [rnd.randint(1, 3) for _ in range(n)]
    g = build_confusion_graph(m, labels)
    for i, j in itertools.combinations(range(n), 2):
        assert g.has_edge(i, j) == confusion_edge_brute(m, labels, i, j)
        assert g.has_edge(i, j) == g.has_edge(j, i)
    assert all(u != v for u, v in g.edges)


def test_identity_labeling_has_no_edges():
    # Carol's label reveals her vector, so Alice can always finish alone
    assert not build_confusion_graph(2, list(range(1, 10))).edges


@pytest.mark.parametrize("m,edges", [(1, 3), (2, 36), (3, 351)])
def test_constant_labeling_is_complete(m, edges):
    g = build_confusion_graph(m, constant_labeling(m))
    assert len(g.edges) == edges == 3**m * (3**m - 1) // 2


def test_labeling_length_checked():
    with pytest.raises(ValueError):
        build_confusion_graph(2, [1, 1, 1])


def test_shattered_pair_examples():
    full = [tuple(v) for v in all_vectors(3, 2)]
    sp = find_shattered_coordinate_pair(full)
    assert sp.coords == (0, 1) and len(sp.representatives) == 9
    assert find_shattered_coordinate_pair([v for v in full if v != (2, 2)]) is None
    assert find_shattered_coordinate_pair([(0, 0, 0)]) is None
    assert find_shattered_coordinate_pair([]) is None


def test_large_sets_without_a_shattered_pair_exist():
    # 27 = 3^(m-1) vectors at m = 4 in which no coordinate pair ever shows (2, 2)
    few_twos = [tuple(v) for v in all_vectors(3, 4) if sum(1 for c in v if c == 2) <= 1]
    assert len(few_twos) == 48 >= 27
    assert find_shattered_coordinate_pair(few_twos) is None
    # with m = 2, three vectors can never show nine patterns
    assert find_shattered_coordinate_pair([(0, 0), (1, 1), (2, 2)]) is None


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 4).flatmap(
    lambda m: st.sets(st.tuples(*[st.integers(0, 2)] * m), min_size=1, max_size=40)
))
def test_shattered_pair_search_is_exact(vectors):
    vectors = sorted(vectors)
    m = len(vectors[0])
    sp = find_shattered_coordinate_pair(vectors)
    shattered = [
        (i, j) for i, j in itertools.combinations(range(m), 2)
        if len({(v[i], v[j]) for v in vectors}) == 9
    ]
    if sp is None:
        assert shattered == []
    else:
        assert sp.coords == shattered[0]
        i, j = sp.coords
        for (a, b), rep in sp.representatives.items():
            assert rep in vectors and (rep[i], rep[j]) == (a, b)


@pytest.mark.parametrize("m", [2, 3])
def test_triangle_for_constant_labeling(m):
    tri = triangle_for_labeling(m, constant_labeling(m))
    assert tri is not None and tri.is_certificate()
    assert sorted(tri.values) == [0, 1, 2]
    g = build_confusion_graph(m, constant_labeling(m))
    a, b, c = tri.bob_indices
    assert g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)


def test_construct_triangle_needs_nine_patterns():
    with pytest.raises(ValueError):
        construct_triangle(None)


def test_chromatic_numbers():
    tri = ConfusionGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert chromatic_number_exact(tri) == 3
    assert chromatic_number_exact(ConfusionGraph.from_edges(4, [])) == 1
    c5 = ConfusionGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    assert chromatic_number_exact(c5) == 3
    g2 = build_confusion_graph(2, constant_labeling(2))
    assert chromatic_number_exact(g2) == 9
    assert len(greedy_clique(g2.adjacency())) == 9


def test_chromatic_number_limits():
    big = ConfusionGraph.from_edges(28, [])
    with pytest.raises(UndecidedError):
        chromatic_number_exact(big)


def test_proper_coloring_and_edge_list():
    g = ConfusionGraph.from_edges(3, [(1, 0), (1, 2)])
    assert g.edge_list() == "0 1\n1 2\n"
    assert is_proper_coloring(g, [1, 2, 1])
    assert not is_proper_coloring(g, [1, 1, 2])
    with pytest.raises(ValueError):
        ConfusionGraph(3, 3, frozenset({(2, 2)}))
