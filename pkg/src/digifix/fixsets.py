"""Freezing sets and s-cold sets: verification, search and constructions.

Verification is always by exhaustive search over continuous extensions of
the identity on the candidate set; the constructions only propose sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .homotopy import reduction_points_fast
from .lattice import (
    CU,
    DigitalImage,
    DisconnectedImage,
    Explicit,
    ImageError,
    NPU,
    boundary,
    box_bounds,
    cu_adjacent,
    factor_coordinates,
    interior,
    is_connected,
    is_tree,
    leaves,
    unique_shortest_path,
)
from .maps import (
    Budget,
    Outcome,
    PartialMap,
    PointMap,
    SearchStats,
    Status,
    Verdict,
    enumerate_continuous_extensions,
    failing,
    first_extension,
    is_continuous,
    is_dominating,
    mask_of,
    non_identity_first,
    propagated,
)


class HypothesisError(ValueError):
    """A construction's hypotheses do not hold for the given image or set."""


def _subset(X: DigitalImage, A: Iterable[int]) -> frozenset[int]:
    A = frozenset(int(a) for a in A)
    bad = [a for a in A if not 0 <= a < len(X)]
    if bad:
        raise ImageError(f"candidate indices {bad} are outside the image")
    return A


# --------------------------------------------------------------------------
# verification


def verify_freezing(X: DigitalImage, A: Iterable[int], budget: Budget | None = None) -> Verdict:
    """HOLDS iff the identity is the only continuous self-map fixing A."""
    A = _subset(X, A)
    found: list = []

    def visit(a):
        if any(v != i for i, v in enumerate(a)):
            found.append(a)
            return True
        return False

    res = enumerate_continuous_extensions(PartialMap.fixing(X, A), visit, budget=budget,
                                          value_order=non_identity_first)
    cert = {"candidate": sorted(A), "s": 0}
    if found:
        g = PointMap(X, X, found[0])
        moved = [i for i, v in enumerate(found[0]) if v != i]
        return failing(g, res.stats, moved=moved, **cert)
    if res.outcome is Outcome.BUDGET_EXCEEDED:
        return Verdict(Status.INCONCLUSIVE, None, res.stats, cert)
    return Verdict(Status.HOLDS, None, res.stats, cert)


def _c2_rectangle_sides(X: DigitalImage):
    b = box_bounds(X)
    if b is None or X.dim != 2 or X.adjacency != CU(2):
        return None
    return b


def c2_cold_hypotheses(X: DigitalImage, A: Iterable[int]) -> str | None:
    """Which rectangle hypothesis (if any) pins Int(X) for c_2 rectangles.

    Returns ``"no_adjacent_gap"`` when no two c_1-adjacent boundary points
    miss A, ``"c1_dominating"`` when A is c_1-dominating in Bd(X), else None.
    Both need X = [a,b] x [c,d] under c_2 with b-a >= 2, d-c >= 2 and A inside Bd(X).
    """
    b = _c2_rectangle_sides(X)
    if b is None or any(hi - lo < 2 for lo, hi in b):
        return None
    A = frozenset(A)
    bd = boundary(X)
    if not A <= bd:
        return None
    if no_adjacent_gap(X, A, bd):
        return "no_adjacent_gap"
    if c1_dominating_in(X, A, bd):
        return "c1_dominating"
    return None


def no_adjacent_gap(X: DigitalImage, A: Iterable[int], region: Iterable[int]) -> bool:
    """No two c_1-adjacent points of ``region`` both lie outside A."""
    A, region = frozenset(A), sorted(region)
    gaps = [x for x in region if x not in A]
    return not any(cu_adjacent(X.points[x], X.points[y], 1)
                   for x, y in itertools.combinations(gaps, 2))


def c1_dominating_in(X: DigitalImage, A: Iterable[int], region: Iterable[int]) -> bool:
    """Every point of ``region`` equals or is c_1-adjacent to a member of A."""
    A = frozenset(A)
    pts = X.points
    return all(x in A or any(cu_adjacent(pts[x], pts[a], 1) for a in A) for x in region)


def verify_cold(X: DigitalImage, A: Iterable[int], s: int, budget: Budget | None = None,
                assume_interior_fixed: bool = False) -> Verdict:
    """HOLDS iff every continuous g fixing A moves no point farther than s.

    The search runs once per point x that still has candidates farther than
    s after propagation, with x restricted to those far values. A point whose
    candidates are all within s is never searched.

    ``assume_interior_fixed`` pins Int(X) up front when X is a c_2 rectangle
    and A meets one of the boundary hypotheses under which interior points
    are known to stay fixed; the flag is recorded in the certificate.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    A = _subset(X, A)
    if not is_connected(X):
        raise DisconnectedImage("s-cold sets need a connected image")
    dist = X.distances
    n = len(X)
    p = PartialMap.fixing(X, A)
    cert: dict = {"candidate": sorted(A), "s": s, "interior_pinned": False}
    if assume_interior_fixed:
        hyp = c2_cold_hypotheses(X, A)
        if hyp is not None:
            for x in sorted(interior(X) - A):
                p = p.assign(x, x)
            cert["interior_pinned"] = hyp
    root = propagated(p)
    stats = SearchStats()
    if root is None:
        return Verdict(Status.HOLDS, None, stats, cert)
    far = [mask_of(v for v in range(n) if dist[x, v] > s) for x in range(n)]
    exhausted = True
    for x in range(n):
        targets = root.candidates[x] & far[x]
        if not targets:
            continue

        def farthest_first(y, values, x=x):
            if y == x:
                return sorted(values, key=lambda v: (-dist[x, v], v))
            return values

        found, res = first_extension(root.restrict(x, targets), budget=budget,
                                     value_order=farthest_first)
        stats.add(res.stats)
        if found is not None:
            g = PointMap(X, X, found)
            return failing(g, stats, violating_point=x, distance=int(dist[x, found[x]]), **cert)
        if res.outcome is Outcome.BUDGET_EXCEEDED:
            exhausted = False
            break
    if not exhausted:
        return Verdict(Status.INCONCLUSIVE, None, stats, cert)
    return Verdict(Status.HOLDS, None, stats, cert)


def pinned_points(X: DigitalImage, A: Iterable[int], budget: Budget | None = None) -> frozenset[int]:
    """Points fixed by every continuous self-map that fixes A."""
    A = _subset(X, A)
    root = propagated(PartialMap.fixing(X, A))
    out = set(A)
    for x in range(len(X)):
        if x in out:
            continue
        others = root.candidates[x] & ~(1 << x)
        if not others:
            out.add(x)
            continue
        found, res = first_extension(root.restrict(x, others), budget=budget)
        if res.outcome is Outcome.BUDGET_EXCEEDED:
            raise RuntimeError("budget exceeded while computing pinned points")
        if found is None:
            out.add(x)
    return frozenset(out)


def is_minimal_freezing(X: DigitalImage, A: Iterable[int], budget: Budget | None = None) -> Verdict:
    """HOLDS iff A is freezing and no A minus a point is.

    The certificate stores one witness per removed point.
    """
    A = _subset(X, A)
    top = verify_freezing(X, A, budget)
    if not top.holds:
        top.certificate["reason"] = "candidate is not freezing"
        return top
    stats = SearchStats().add(top.stats)
    witnesses: list[dict] = []
    for a in sorted(A):
        sub = verify_freezing(X, A - {a}, budget)
        stats.add(sub.stats)
        if sub.holds:
            return Verdict(Status.FAILS, None, stats,
                           {"candidate": sorted(A), "reason": "proper subset is freezing",
                            "freezing_subset": sorted(A - {a})})
        if sub.inconclusive:
            return Verdict(Status.INCONCLUSIVE, None, stats, {"candidate": sorted(A), "stuck_at": a})
        witnesses.append({"removed": a, "witness": list(sub.witness.assignment)})
    return Verdict(Status.HOLDS, None, stats, {"candidate": sorted(A), "removal_witnesses": witnesses})


@dataclass
class MinimumFreezing:
    size: int | None
    example: frozenset[int] | None
    complete: bool
    lower: int
    upper: int
    stats: SearchStats = field(default_factory=SearchStats)
    tested: int = 0


def find_minimum_freezing(X: DigitalImage, budget: Budget | None = None) -> MinimumFreezing:
    """Smallest freezing set by increasing-size subset search.

    Every freezing set contains every dominated point (its removal leaves a
    retract), so those are always included. Each failed candidate's witness g
    rules out every subset of Fix(g); later candidates inside a known Fix(g)
    are skipped without search.
    """
    n = len(X)
    mandatory = reduction_points_fast(X)
    others = [x for x in range(n) if x not in mandatory]
    full = (1 << n) - 1
    blocked = [full & ~(1 << x) for x in sorted(mandatory)]
    base = mask_of(mandatory)
    stats = SearchStats()
    tested = 0
    for k in range(len(mandatory), n + 1):
        for combo in itertools.combinations(others, k - len(mandatory)):
            amask = base | mask_of(combo)
            if any(amask & ~b == 0 for b in blocked):
                continue
            A = frozenset(mandatory) | frozenset(combo)
            v = verify_freezing(X, A, budget)
            stats.add(v.stats)
            tested += 1
            if v.holds:
                return MinimumFreezing(k, A, True, k, k, stats, tested)
            if v.inconclusive:
                return MinimumFreezing(None, None, False, k, n, stats, tested)
            g = v.witness.assignment
            blocked.append(mask_of(i for i, val in enumerate(g) if val == i))
    raise AssertionError("the whole image is always freezing")


# --------------------------------------------------------------------------
# constructions


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise HypothesisError(msg)


def _box(X: DigitalImage, u: int | None = None):
    b = box_bounds(X)
    _need(b is not None and isinstance(X.adjacency, CU), "image is not a full lattice box under c_u")
    if u is not None:
        _need(X.adjacency.u == u, f"needs c_{u} adjacency, image has c_{X.adjacency.u}")
    return b


def perimeter(X: DigitalImage, bounds=None) -> list[int]:
    """Boundary of a 2-D box (or sub-box ``bounds``) in cyclic walking order."""
    (a, b), (c, d) = bounds or box_bounds(X)
    _need(b > a and d > c, "perimeter walk needs both sides of length at least 2")
    walk = [(x, c) for x in range(a, b + 1)]
    walk += [(b, y) for y in range(c + 1, d + 1)]
    walk += [(x, d) for x in range(b - 1, a - 1, -1)]
    walk += [(a, y) for y in range(d - 1, c, -1)]
    return [X.index_of(p) for p in walk]


def check_cycle_triple(C: DigitalImage, triple) -> list[list[int]]:
    """Unique shorter paths between consecutive points of the triple.

    Raises HypothesisError unless the cycle has more than 4 points and is the
    union of unique shorter paths determined by the three points.
    """
    n = len(C)
    _need(C.info.get("family") == "cycle" or (is_connected(C) and all(len(nb) == 2 for nb in C.neighbors)),
          "image is not a cycle")
    _need(n > 4, f"needs n > 4, got C_{n}")
    i, j, k = sorted(int(t) for t in triple)
    _need(len({i, j, k}) == 3, "the three points must be distinct")
    paths = []
    for a, b in ((i, j), (j, k), (k, i)):
        path = unique_shortest_path(C, a, b)
        _need(path is not None, f"points {a} and {b} have no unique shorter path")
        paths.append(path)
    covered = set().union(*paths)
    _need(len(covered) == n, "the unique shorter paths do not cover the cycle")
    return paths


def construct_freezing(X: DigitalImage, family: str, **params) -> frozenset[int]:
    """A freezing set proposed by a known family result.

    Families: ``cube_c1`` (corners of a box under c_1), ``cube_cn_boundary``
    (Bd of a box with all sides > 1 under c_n), ``boundary_cu`` (Bd of any
    finite c_u image), ``cycle_triple`` (i, j, k), ``tree_leaves`` and
    ``wedge_of_cycles`` (i, j in the left cycle, k, p in the right one, in
    each part's own labels).
    """
    if family == "cube_c1":
        b = _box(X, 1)
        return frozenset(X.index_of(c) for c in itertools.product(*[sorted({lo, hi}) for lo, hi in b]))
    if family == "cube_cn_boundary":
        b = _box(X, X.dim)
        _need(all(hi - lo > 1 for lo, hi in b), "needs every side m_i > 1")
        return boundary(X)
    if family == "boundary_cu":
        _need(isinstance(X.adjacency, CU), "needs a c_u image")
        return boundary(X)
    if family == "cycle_triple":
        triple = params["points"] if "points" in params else (params["i"], params["j"], params["k"])
        check_cycle_triple(X, triple)
        return frozenset(int(t) for t in triple)
    if family == "tree_leaves":
        _need(isinstance(X.adjacency, Explicit) or X.info.get("family") == "tree", "needs a tree")
        _need(is_tree(X) and len(X) > 1, "needs a finite tree with more than one vertex")
        return leaves(X)
    if family == "wedge_of_cycles":
        parts = X.info.get("parts")
        left, right = params.get("left_cycle"), params.get("right_cycle")
        _need(parts is not None and left is not None and right is not None,
              "needs a wedge image plus its two cycles")
        w = X.info["wedge_point"]
        lw, rw = parts[0].index(w), parts[1].index(w)
        check_cycle_triple(left, (params["i"], params["j"], lw))
        check_cycle_triple(right, (params["k"], params["p"], rw))
        return frozenset({parts[0][params["i"]], parts[0][params["j"]],
                          parts[1][params["k"]], parts[1][params["p"]]})
    raise ValueError(f"unknown freezing family {family!r}")


def _symmetric_box(X: DigitalImage, u: int):
    b = _box(X, u)
    _need(X.dim == 2, "needs a rectangle in Z^2")
    _need(all(lo == -hi for lo, hi in b), "needs X = [-m,m] x [-n,n]")
    return b[0][1], b[1][1]


def construct_cold(X: DigitalImage, family: str, **params) -> tuple[frozenset[int], int]:
    """A set together with the s for which it is known to be s-cold.

    Families: ``rect_c2_alternating`` (1), ``rect_c2_dominating`` (2),
    ``dominating_generic`` (2), ``rect_c1_inner_corners`` (4s),
    ``rect_c2_inner_ring`` (2s).
    """
    if family in ("rect_c2_alternating", "rect_c2_dominating"):
        b = _c2_rectangle_sides(X)
        _need(b is not None, "needs a rectangle under c_2")
        _need(all(hi - lo >= 2 for lo, hi in b), "needs m >= 2 and n >= 2")
        ring = perimeter(X)
        if family == "rect_c2_alternating":
            A = frozenset(ring[0::2])
            _need(no_adjacent_gap(X, A, ring), "alternating set leaves a c_1-adjacent gap")
            return A, 1
        chosen = set(ring[1::3])
        if not c1_dominating_in(X, chosen, ring):
            chosen.add(ring[-1])
        _need(c1_dominating_in(X, chosen, ring), "could not build a c_1-dominating subset")
        return frozenset(chosen), 2
    if family == "dominating_generic":
        _need(is_connected(X), "needs a connected image")
        if "candidate" in params:
            A = _subset(X, params["candidate"])
            _need(is_dominating(X, A), "candidate is not dominating")
            return A, 2
        A, covered = set(), 0
        for x in range(len(X)):
            if not covered >> x & 1:
                A.add(x)
                covered |= X.closed_masks[x]
        return frozenset(A), 2
    if family == "rect_c1_inner_corners":
        m, n = _symmetric_box(X, 1)
        s = int(params["s"])
        _need(0 <= s <= min(m, n), f"needs 0 <= s <= min(m, n) = {min(m, n)}")
        corners = {(sx * (m - s), sy * (n - s)) for sx in (-1, 1) for sy in (-1, 1)}
        return X.indices_of(corners), 4 * s
    if family == "rect_c2_inner_ring":
        m, n = _symmetric_box(X, 2)
        s = int(params["s"])
        _need(s >= 1 and m - s >= 1 and n - s >= 1, "needs s >= 1, m - s >= 1 and n - s >= 1")
        ring = perimeter(X, [(-m + s, m - s), (-n + s, n - s)])
        return frozenset(ring[0::2]), 2 * s
    raise ValueError(f"unknown cold family {family!r}")


# --------------------------------------------------------------------------
# explicit counterexample maps


def not_cold_witness(X: DigitalImage, A: Iterable[int]) -> PointMap:
    """Map fixing A that moves a boundary point two steps inward.

    X is a box with every side > 1 under c_n and A a boundary subset that is
    not c_n-dominating in Bd(X). The first undominated boundary point y goes
    two steps inward along its first extreme coordinate j, and its neighbors
    go to the layer one step inward.
    """
    b = _box(X, X.dim)
    _need(all(hi - lo > 1 for lo, hi in b), "needs every side m_i > 1")
    A = _subset(X, A)
    bd = boundary(X)
    _need(A <= bd, "A must lie in Bd(X)")
    amask = mask_of(A)
    undominated = [y for y in sorted(bd) if not X.closed_masks[y] & amask]
    _need(bool(undominated), "A is c_n-dominating in Bd(X)")
    y = undominated[0]
    py = X.points[y]
    j = next(k for k in range(X.dim) if py[k] in b[k])
    lo, hi = b[j]
    one, two = (lo + 1, lo + 2) if py[j] == lo else (hi - 1, hi - 2)
    out = list(range(len(X)))
    out[y] = X.index_of(py[:j] + (two,) + py[j + 1:])
    for x in X.neighbors[y]:
        px = X.points[x]
        out[x] = X.index_of(px[:j] + (one,) + px[j + 1:])
    f = PointMap(X, X, tuple(out))
    assert is_continuous(f) and all(f(a) == a for a in A) and not X.adjacent_or_equal(y, f(y))
    return f


def inward_step_witness(X: DigitalImage, y: int) -> PointMap:
    """Move boundary point y one step inward, fixing everything else."""
    b = _box(X)
    py = X.points[y]
    js = [k for k in range(X.dim) if py[k] in b[k] and b[k][0] != b[k][1]]
    _need(bool(js), f"point {py} is not on the boundary of the box")
    j = js[0]
    step = 1 if py[j] == b[j][0] else -1
    out = list(range(len(X)))
    out[y] = X.index_of(py[:j] + (py[j] + step,) + py[j + 1:])
    return PointMap(X, X, tuple(out))


def corner_push_witness(X: DigitalImage, corner: int) -> PointMap:
    """Move a 2-D box corner to its diagonal inner neighbor, fixing the rest."""
    b = _box(X)
    _need(X.dim == 2, "needs a rectangle")
    p = X.points[corner]
    _need(all(c in side for c, side in zip(p, b)), f"{p} is not a corner")
    q = tuple(c + 1 if c == lo else c - 1 for c, (lo, hi) in zip(p, b))
    out = list(range(len(X)))
    out[corner] = X.index_of(q)
    return PointMap(X, X, tuple(out))


def leaf_fold_witness(X: DigitalImage, leaf: int) -> PointMap:
    """Send a tree leaf to its unique neighbor, fixing the rest."""
    _need(len(X.neighbors[leaf]) == 1, f"vertex {leaf} is not a leaf")
    out = list(range(len(X)))
    out[leaf] = X.neighbors[leaf][0]
    return PointMap(X, X, tuple(out))


def wedge_collapse(X: DigitalImage, keep: int) -> PointMap:
    """Identity on part ``keep`` of a wedge, the wedge point on the other part."""
    parts = X.info.get("parts")
    _need(parts is not None, "image was not built by wedge()")
    w = X.info["wedge_point"]
    kept = set(parts[keep])
    return PointMap(X, X, tuple(x if x in kept else w for x in range(len(X))))


# --------------------------------------------------------------------------
# products


def projection_check(X: DigitalImage, A: Iterable[int], s: int = 0,
                     budget: Budget | None = None) -> list[dict]:
    """Verify each factor projection p_i(A) as freezing (s = 0) or s-cold."""
    factors = X.info.get("factors")
    _need(factors is not None and isinstance(X.adjacency, NPU), "image was not built by product()")
    A = _subset(X, A)
    coords = [factor_coordinates(X, a) for a in sorted(A)]
    report = []
    for i, Y in enumerate(factors):
        proj = frozenset(c[i] for c in coords)
        v = verify_freezing(Y, proj, budget) if s == 0 else verify_cold(Y, proj, s, budget)
        report.append({"factor": i, "projection": sorted(proj), "verdict": v})
    return report
