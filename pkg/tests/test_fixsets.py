import itertools

import pytest

from digifix import lattice as L
from digifix.fixsets import (
    HypothesisError,
    c2_cold_hypotheses,
    check_cycle_triple,
    construct_cold,
    construct_freezing,
    corner_push_witness,
    find_minimum_freezing,
    inward_step_witness,
    is_minimal_freezing,
    leaf_fold_witness,
    not_cold_witness,
    perimeter,
    pinned_points,
    projection_check,
    verify_cold,
    verify_freezing,
    wedge_collapse,
)
from digifix.maps import Budget, PointMap, is_continuous
from oracles import brute_force_maps, freezing_sets_brute, max_displacement, nonidentity_fixing


@pytest.mark.parametrize("name", ["interval_0_3", "C4", "C5", "rect2x2_c1", "rect2x2_c2", "rect3x2_c1"])
def test_freezing_matches_brute_force(corpus, name):
    X = corpus[name]
    maps = brute_force_maps(X)
    freezing = set(freezing_sets_brute(X, maps))
    for r in range(len(X) + 1):
        for A in itertools.combinations(range(len(X)), r):
            v = verify_freezing(X, A)
            assert v.holds == (frozenset(A) in freezing)
            if v.fails:
                assert v.witness.assignment in maps and not v.witness.is_identity()
                assert all(v.witness(a) == a for a in A)


@pytest.mark.parametrize("name", ["interval_0_4", "C5", "rect3x2_c1", "rect3x2_c2"])
def test_cold_matches_brute_force(corpus, name):
    X = corpus[name]
    maps = brute_force_maps(X)
    for r in range(0, 3):
        for A in itertools.combinations(range(len(X)), r):
            worst = max_displacement(X, A, maps)
            for s in range(0, 4):
                v = verify_cold(X, A, s)
                assert v.holds == (worst <= s), (A, s, worst)
                if v.fails:
                    x = v.certificate["violating_point"]
                    assert X.distances[x, v.witness(x)] == v.certificate["distance"] > s


def test_empty_candidate():
    assert verify_freezing(L.interval(0, 0), []).holds
    assert verify_freezing(L.interval(0, 1), []).fails
    assert verify_cold(L.interval(0, 2), [], 2).holds
    assert verify_cold(L.interval(0, 2), [], 1).fails


def test_minimal_and_minimum_against_brute_force(corpus):
    for name in ("interval_0_4", "C5", "rect3x2_c1", "rect2x2_c2"):
        X = corpus[name]
        freezing = set(freezing_sets_brute(X))
        smallest = min(len(A) for A in freezing)
        m = find_minimum_freezing(X)
        assert m.complete and m.size == smallest and m.example in freezing
        for A in freezing:
            minimal = not any(A - {a} in freezing for a in A)
            assert is_minimal_freezing(X, A).holds == minimal


def test_minimal_certificate_replays():
    X = L.interval(0, 5)
    v = is_minimal_freezing(X, {0, 5})
    assert v.holds
    for item in v.certificate["removal_witnesses"]:
        g = PointMap(X, X, tuple(item["witness"]))
        kept = {0, 5} - {item["removed"]}
        assert is_continuous(g) and not g.is_identity() and all(g(a) == a for a in kept)
    w = is_minimal_freezing(X, {0, 2, 5})
    assert w.fails and w.certificate["freezing_subset"] == [0, 5]


def test_reduction_points_are_in_every_minimum():
    X = L.box([(0, 3), (0, 2)], 1)
    m = find_minimum_freezing(X)
    corners = construct_freezing(X, "cube_c1")
    assert m.size == 4 and m.example == corners


def test_budget_inconclusive():
    X = L.box([(0, 3), (0, 3)], 2)
    v = verify_freezing(X, [], Budget(max_nodes=3))
    # the empty set is not freezing, and the first leaf is usually found quickly
    assert not v.holds
    v = verify_freezing(X, construct_freezing(X, "cube_cn_boundary"), Budget(max_nodes=0))
    assert v.inconclusive
    m = find_minimum_freezing(L.cycle(7), Budget(max_nodes=10))
    assert not m.complete and m.size is None and m.lower <= 3 <= m.upper


def test_freezing_families():
    X = L.box([(0, 2), (0, 1), (0, 1)], 1)
    assert verify_freezing(X, construct_freezing(X, "cube_c1")).holds
    Y = L.cube([2, 3], 2)
    assert verify_freezing(Y, construct_freezing(Y, "cube_cn_boundary")).holds
    Z = L.make_image([(0, 0), (1, 0), (2, 0), (1, 1), (1, 2), (2, 2)], L.CU(2))
    assert verify_freezing(Z, construct_freezing(Z, "boundary_cu")).holds
    T = L.tree([(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)])
    assert is_minimal_freezing(T, construct_freezing(T, "tree_leaves")).holds
    C = L.cycle(9)
    assert construct_freezing(C, "cycle_triple", points=(0, 3, 6)) == {0, 3, 6}
    with pytest.raises(HypothesisError):
        construct_freezing(C, "cycle_triple", points=(0, 1, 2))
    with pytest.raises(HypothesisError):
        construct_freezing(L.cycle(4), "cycle_triple", points=(0, 1, 2))
    with pytest.raises(HypothesisError):
        construct_freezing(L.cube([1, 2], 2), "cube_cn_boundary")
    with pytest.raises(ValueError):
        construct_freezing(C, "nope")


def test_cycle_triple_paths_cover():
    paths = check_cycle_triple(L.cycle(10), (0, 3, 6))
    assert [len(p) for p in paths] == [4, 4, 5]


def test_wedge_of_cycles():
    C5, C6 = L.cycle(5), L.cycle(6)
    W = L.wedge(C5, C6, 0)
    A = construct_freezing(W, "wedge_of_cycles", left_cycle=C5, right_cycle=C6, i=2, j=3, k=2, p=4)
    assert len(A) == 4 and verify_freezing(W, A).holds
    left, right = W.info["parts"]
    for keep, part in ((0, left), (1, right)):
        f = wedge_collapse(W, keep)
        assert is_continuous(f)
        assert verify_freezing(W, [x for x in A if x in part]).fails
        assert all(f(x) == x for x in part)


def test_explicit_witness_maps():
    X = L.box([(0, 3), (0, 2)], 1)
    g = corner_push_witness(X, X.index_of((0, 0)))
    corners = construct_freezing(X, "cube_c1")
    assert is_continuous(g) and all(g(c) == c for c in corners - {X.index_of((0, 0))})
    Y = L.cube([2, 2], 2)
    for y in sorted(L.boundary(Y)):
        h = inward_step_witness(Y, y)
        assert is_continuous(h) and h(y) != y
    T = L.tree([(0, 1), (1, 2)])
    assert is_continuous(leaf_fold_witness(T, 0))


def test_cold_families_verify():
    X = L.box([(0, 6), (0, 4)], 2)
    for fam, expect_s in (("rect_c2_alternating", 1), ("rect_c2_dominating", 2)):
        A, s = construct_cold(X, fam)
        assert s == expect_s
        for pin in (False, True):
            v = verify_cold(X, A, s, assume_interior_fixed=pin)
            assert v.holds and bool(v.certificate["interior_pinned"]) == pin
        assert verify_cold(X, A, s - 1).fails
        assert L.interior(X) <= pinned_points(X, A)
    Y = L.box([(0, 3), (0, 3)], 2)
    A, s = construct_cold(Y, "dominating_generic")
    assert s == 2 and verify_cold(Y, A, 2).holds
    with pytest.raises(HypothesisError):
        construct_cold(L.box([(0, 1), (0, 3)], 2), "rect_c2_alternating")


def test_c2_hypotheses_detection():
    X = L.box([(0, 3), (0, 3)], 2)
    ring = perimeter(X)
    assert c2_cold_hypotheses(X, ring[0::2]) == "no_adjacent_gap"
    assert c2_cold_hypotheses(X, ring[0::3]) in ("c1_dominating", None)
    assert c2_cold_hypotheses(X, [X.index_of((1, 1))]) is None
    assert c2_cold_hypotheses(L.box([(0, 3), (0, 3)], 1), ring[0::2]) is None


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_inner_corners(m, n):
    X = L.box([(-m, m), (-n, n)], 1)
    for s in range(0, min(m, n) + 1):
        A, bound = construct_cold(X, "rect_c1_inner_corners", s=s)
        assert bound == 4 * s and verify_cold(X, A, bound).holds


@pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (3, 3)])
def test_inner_ring(m, n):
    X = L.box([(-m, m), (-n, n)], 2)
    for s in range(1, min(m, n)):
        A, bound = construct_cold(X, "rect_c2_inner_ring", s=s)
        assert bound == 2 * s and verify_cold(X, A, bound).holds
    with pytest.raises(HypothesisError):
        construct_cold(X, "rect_c2_inner_ring", s=min(m, n))


def test_not_cold_witness():
    X = L.cube([2, 2], 2)
    A = X.indices_of([(0, 0), (2, 2)])
    f = not_cold_witness(X, A)
    assert is_continuous(f)
    assert verify_cold(X, A, 1).fails
    with pytest.raises(HypothesisError):
        not_cold_witness(X, L.boundary(X))


def test_projection_check():
    I = L.interval(0, 2)
    P = L.product([I, I])
    A = P.indices_of([(0, 0), (2, 2)])
    if verify_freezing(P, A).holds:
        assert all(r["verdict"].holds for r in projection_check(P, A))
    rows = projection_check(P, range(len(P)))
    assert [r["projection"] for r in rows] == [[0, 1, 2], [0, 1, 2]]
    B = P.indices_of([(0, 0), (0, 2)])
    assert verify_freezing(P, B).fails
    with pytest.raises(HypothesisError):
        projection_check(I, [0])


def test_brute_force_not_freezing_witness_agrees(corpus):
    X = corpus["C4"]
    for A in itertools.combinations(range(4), 3):
        assert nonidentity_fixing(X, A)
        assert verify_freezing(X, A).fails
