import itertools
import random

import pytest

from giplab.instances import enumerate_instances, gip_eval
from giplab.lowerbound.model import (
    AbsDiff,
    Constraint,
    LinearModel,
    Product,
    brute_force_feasible,
    build_ilp,
    export_lp,
    format_lp,
    linearize,
    parse_lp,
    solve_with_milp,
    term_value,
)
from giplab.lowerbound.pairs import (
    all_vectors,
    confusable_remote_pairs,
    enumerate_confusable_pairs,
    index_vector,
    vector_index,
)
from giplab.lowerbound.solver import FeasibilityConfig, solve_feasibility


def test_vector_index_round_trip():
    assert vector_index((1, 0, 2), 3) == 11
    assert index_vector(11, 3, 3) == (1, 0, 2)
    assert [vector_index(v, 3) for v in all_vectors(3, 2)] == list(range(9))


def test_known_pair_is_yielded():
    pairs = {(a.vector(1), a.vector(2), a.vector(3), b.vector(1), b.vector(2), b.vector(3))
             for a, b in enumerate_confusable_pairs(3, 1)}
    key = ((1,), (1,), (1,), (1,), (0,), (2,))
    assert key in pairs or key[3:] + key[:3] in pairs


@pytest.mark.parametrize("n,m", [(3, 1), (3, 2), (5, 1)])
def test_pairs_match_double_loop(n, m):
    got = set()
    for a, b in enumerate_confusable_pairs(n, m):
        assert a.vector(1) == b.vector(1)
        assert gip_eval(a) != gip_eval(b)
        assert a != b
        got.add(frozenset([a, b]))
    insts = list(enumerate_instances(n, m))
    brute = {
        frozenset([a, b])
        for a, b in itertools.product(insts, insts)
        if a.vector(1) == b.vector(1) and gip_eval(a) != gip_eval(b)
    }
    assert got == brute
    assert sum(1 for _ in confusable_remote_pairs(n, m)) == len(brute)


def test_build_ilp_counts():
    cfg = FeasibilityConfig.three_party(1, 1, 3)
    model = build_ilp(cfg)
    assert len(model.variables) == 3 * 1 + 3 * 3 == 12
    one_hot = [c for c in model.constraints if c.name.startswith("one_")]
    assert len(one_hot) == 2 * 3
    pairs = [c for c in model.constraints if c.name.startswith("pair")]
    assert len(pairs) == sum(1 for _ in confusable_remote_pairs(3, 1))
    assert all(len(c.terms) == 1 * 3 and c.rhs == 2 for c in pairs)
    assert not model.is_linear()
    model.check()


def test_abs_substitution_examples():
    model = LinearModel(["x", "y"], [Constraint("r", [(1, AbsDiff("x", "y"))], "=", 1)])
    lin = linearize(model)
    assert lin.is_linear()
    (row,) = [c for c in lin.constraints if c.name == "r"]
    coefs = {v: c for c, v in row.terms}
    assert coefs["x"] == 1 and coefs["y"] == 1 and coefs["aux0"] == -2
    assert 1 + 0 - 2 * 1 * 0 == 1


def test_product_bounds_force_value():
    model = LinearModel(["a", "b"], [Constraint("r", [(1, Product(("a", "b")))], ">=", 0)])
    lin = linearize(model)
    for a, b in itertools.product([0, 1], repeat=2):
        feasible_aux = [
            w for w in (0, 1) if lin.evaluate({"a": a, "b": b, "aux0": w})
        ]
        assert feasible_aux == [a * b]


def test_linearize_rejects_undeclared_operand():
    model = LinearModel(["a"], [Constraint("r", [(1, Product(("a", "zz")))], "=", 0)])
    with pytest.raises(ValueError, match="binary"):
        linearize(model)


def test_linearization_soundness_random():
    rng = random.Random(5)
    cfg = FeasibilityConfig.three_party(1, 2, 3)
    sym = build_ilp(cfg)
    lin = linearize(sym)
    for _ in range(300):
        base = {v: rng.randint(0, 1) for v in sym.variables}
        full = dict(base)
        for name, prod in lin.aux_of.items():
            full[name] = term_value(prod, full)
        # each auxiliary's defining rows admit exactly the product value
        for name in lin.aux_of:
            rows = [c for c in lin.constraints if c.name.startswith(name + "_")]
            ok = [w for w in (0, 1) if all(_row(c, {**full, name: w}) for c in rows)]
            assert ok == [full[name]]
        assert lin.evaluate(full) == sym.evaluate(base)
        for x, y in itertools.product([0, 1], repeat=2):
            assert x + y - 2 * x * y == abs(x - y)


def _row(c, a):
    return LinearModel([], [c]).evaluate(a)


def test_lp_format_and_round_trip(tmp_path):
    lin = linearize(build_ilp(FeasibilityConfig.three_party(1, 2, 2)))
    path = tmp_path / "m.lp"
    text = export_lp(lin, path)
    assert path.read_text() == text
    lines = text.splitlines()
    assert lines[1:4] == ["Minimize", " obj: 0", "Subject To"]
    assert " one_p2_v0: + I_p2_v0_c1 + I_p2_v0_c2 = 1" in lines
    assert "Binary" in lines and lines[-1] == "End"
    back = parse_lp(text)
    assert back.variables == lin.variables
    assert [(c.name, c.terms, c.sense, c.rhs) for c in back.constraints] == [
        (c.name, c.terms, c.sense, c.rhs) for c in lin.constraints
    ]
    assert format_lp(back) == text


def test_export_to_unwritable_destination(tmp_path):
    lin = linearize(build_ilp(FeasibilityConfig.three_party(1, 1, 1)))
    with pytest.raises(OSError):
        export_lp(lin, tmp_path / "missing" / "dir" / "m.lp")


def test_format_rejects_nonlinear():
    with pytest.raises(ValueError):
        format_lp(build_ilp(FeasibilityConfig.three_party(1, 1, 1)))


@pytest.mark.parametrize(
    "cfg", [(1, 1, 3), (1, 1, 2), (2, 3, 4), pytest.param((2, 2, 4), marks=pytest.mark.slow)]
)
def test_external_milp_matches_builtin(cfg):
    config = FeasibilityConfig.three_party(*cfg)
    lin = parse_lp(format_lp(linearize(build_ilp(config))))
    external = solve_with_milp(lin) is not None
    assert external == solve_feasibility(config).feasible


def test_brute_force_small_models():
    m = LinearModel(["a", "b"], [Constraint("r", [(1, "a"), (1, "b")], "=", 1)])
    sol = brute_force_feasible(m)
    assert sol is not None and sol["a"] + sol["b"] == 1
    m2 = LinearModel(["a", "b"], [Constraint("r", [(1, "a"), (1, "b")], ">=", 3)])
    assert brute_force_feasible(m2) is None
