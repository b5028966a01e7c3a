import numpy as np
import pytest

from hypodb.causal import (
    classify,
    coa_bruteforce,
    direct_deps,
    enumerate_perfect_matchings,
    first_causes,
    is_complete,
    tcm,
    transitive_closure,
)
from hypodb.errors import IncompleteStructureError, SizeGuardError
from hypodb.structure import Structure

from .oracles import random_small_structure, reachability

COUPLED = Structure.from_vars({
    "f1": ["x1"], "f2": ["x2"], "f3": ["x3"],
    "f4": ["x1", "x2", "x3", "x4", "x5"],
    "f5": ["x1", "x3", "x4", "x5"],
    "f6": ["x4", "x6"], "f7": ["x5", "x7"],
})

COUPLED_EDGES = frozenset({
    ("x1", "x4"), ("x1", "x5"), ("x2", "x4"), ("x3", "x4"), ("x3", "x5"),
    ("x4", "x5"), ("x5", "x4"), ("x4", "x6"), ("x5", "x7"),
})


def test_is_complete():
    assert is_complete(COUPLED)
    newton = Structure.from_vars({"f": ["F", "m", "a"]})
    assert not is_complete(newton)
    empty = Structure([], [], [])
    assert is_complete(empty)
    assert tcm(empty).pairs == ()


def test_tcm_on_coupled_structure():
    mapping = tcm(COUPLED).as_dict()
    for forced in ("f1", "f2", "f3"):
        assert mapping[forced] == f"x{forced[1]}"
    assert {mapping["f4"], mapping["f5"]} == {"x4", "x5"}
    assert mapping["f6"] == "x6" and mapping["f7"] == "x7"


def test_tcm_requires_completeness():
    newton = Structure.from_vars({"f": ["F", "m", "a"]})
    with pytest.raises(IncompleteStructureError):
        tcm(newton)


def test_tcm_detects_overconstrained():
    # |E| = |V| but two equations fight over one variable
    bad = Structure(["f1", "f2"], ["x1", "x2"], [[0], [0]])
    with pytest.raises(IncompleteStructureError):
        tcm(bad)


def test_tcm_forced_singleton():
    s = Structure.from_vars({"f": ["x"]})
    assert tcm(s).as_dict() == {"f": "x"}


def test_two_by_two_dense_has_two_matchings():
    s = Structure(["f1", "f2"], ["x1", "x2"], [[0, 1], [0, 1]])
    assert len(enumerate_perfect_matchings(s)) == 2
    assert tcm(s).as_dict() in (
        {"f1": "x1", "f2": "x2"}, {"f1": "x2", "f2": "x1"}
    )


def test_direct_deps_coupled_structure():
    assert direct_deps(COUPLED, tcm(COUPLED)).edges == COUPLED_EDGES


def test_direct_deps_newton():
    s = Structure.from_vars({"f_F": ["F"], "f_m": ["m"], "f": ["a", "F", "m"]})
    deps = direct_deps(s, tcm(s))
    assert deps.edges == frozenset({("F", "a"), ("m", "a")})


def test_transitive_closure():
    deps = direct_deps(COUPLED, tcm(COUPLED))
    closed = transitive_closure(deps)
    assert ("x1", "x7") in closed
    assert ("x4", "x4") in closed  # through the x4/x5 cycle
    assert transitive_closure(type(deps)(frozenset())).edges == frozenset()
    two_cycle = type(deps)(frozenset({("A", "B"), ("B", "A")}))
    assert transitive_closure(two_cycle).edges == frozenset(
        {("A", "B"), ("B", "A"), ("A", "A"), ("B", "B")}
    )


def test_classify_lotka_volterra():
    s = Structure.from_vars({
        "f1": ["t"], "f2": ["x__t_min"], "f3": ["b"], "f4": ["p"],
        "f5": ["y__t_min"], "f6": ["d"], "f7": ["r"],
        "f8": ["x", "t", "x__t_min", "b", "p", "y"],
        "f9": ["y", "t", "y__t_min", "d", "r", "x"],
    }, domains=frozenset({"t"}))
    classes = classify(s, tcm(s))
    assert classes["exogenous"] == {"x__t_min", "b", "p", "y__t_min", "d", "r"}
    assert classes["endogenous"] == {"x", "y"}
    assert classes["domain"] == {"t"}


def test_classify_free_fall_endogenous():
    s = Structure.from_vars({
        "f_t": ["t"], "f_g": ["g"], "f_v0": ["v0"], "f_s0": ["s0"],
        "f_a": ["a", "g"], "f_v": ["v", "g", "v0", "t"],
        "f_s": ["s", "g", "v0", "s0", "t"],
    }, domains=frozenset({"t"}))
    assert classify(s, tcm(s))["endogenous"] == {"a", "v", "s"}


def test_first_causes():
    closed = transitive_closure(direct_deps(COUPLED, tcm(COUPLED)))
    exo = frozenset({"x1", "x2", "x3"})
    assert first_causes(closed, exo, "x7") == {"x1", "x2", "x3"}
    assert first_causes(closed, exo, "x6") == {"x1", "x2", "x3"}
    assert first_causes(closed, exo, "x1") == frozenset()


def test_coa_bruteforce_coupled():
    assert coa_bruteforce(COUPLED) == [
        [frozenset({"x1"}), frozenset({"x2"}), frozenset({"x3"})],
        [frozenset({"x4", "x5"})],
        [frozenset({"x6"}), frozenset({"x7"})],
    ]


def test_coa_bruteforce_singleton():
    s = Structure.from_vars({"f": ["x"]})
    assert coa_bruteforce(s) == [[frozenset({"x"})]]


def test_coa_bruteforce_hardness_structure():
    s = Structure(
        ["f1", "f2", "f3", "f4"], ["x1", "x2", "x3", "x4"],
        [[0, 2], [0, 1], [1, 2], [0, 1, 2, 3]],
    )
    assert coa_bruteforce(s) == [
        [frozenset({"x1", "x2", "x3"})],
        [frozenset({"x4"})],
    ]


def test_coa_guard():
    big = Structure.from_vars({f"f{i}": [f"x{i}"] for i in range(13)})
    with pytest.raises(SizeGuardError):
        coa_bruteforce(big)


def test_coa_blocks_are_strongly_coupled():
    rng = np.random.default_rng(5)
    for _ in range(40):
        s = random_small_structure(rng)
        closed = reachability(direct_deps(s, tcm(s)).edges)
        for level in coa_bruteforce(s):
            for block in level:
                for a in block:
                    for b in block:
                        if a != b:
                            assert (a, b) in closed and (b, a) in closed


def test_matching_invariance_small():
    rng = np.random.default_rng(11)
    for _ in range(60):
        s = random_small_structure(rng)
        matchings = enumerate_perfect_matchings(s)
        assert matchings, "planted diagonal guarantees at least one"
        closures = {
            transitive_closure(direct_deps(s, m)).edges for m in matchings
        }
        assert len(closures) == 1


def test_tcm_succeeds_iff_complete():
    rng = np.random.default_rng(13)
    for _ in range(60):
        s = random_small_structure(rng)
        tcm(s)  # planted diagonal: must succeed
        if s.n_equations >= 2:
            # break completeness: all equations collapse onto variable 0
            broken = Structure(
                list(s.equations), list(s.variables),
                [[0] for _ in range(s.n_equations)],
            )
            with pytest.raises(IncompleteStructureError):
                tcm(broken)
