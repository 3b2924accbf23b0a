"""Digital homotopy of self-maps, rigidity and reducibility.

Homotopy is decided by reachability under one-step homotopies. Any homotopy
``h`` of length m gives m one-step homotopies between the consecutive stages
``h_t`` and ``h_{t+1}`` (each stage is continuous, and each track ``h_x`` is a
path, so ``h_t(x)`` and ``h_{t+1}(x)`` are equal or adjacent). Conversely a
chain of one-step homotopies concatenates into a homotopy. Two maps are
therefore homotopic exactly when one lies in the one-step closure of the
other, and a map is rigid exactly when it has no one-step neighbor besides
itself.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .lattice import DigitalImage, is_connected
from .maps import (
    Budget,
    MapError,
    Outcome,
    PartialMap,
    PointMap,
    SearchResult,
    SearchStats,
    Status,
    Verdict,
    enumerate_continuous_extensions,
    failing,
    is_continuous,
    is_retraction,
    non_identity_first,
)

Assignment = tuple[int, ...]


def _require_continuous_self_map(*fs: PointMap) -> None:
    for f in fs:
        if not f.is_self_map:
            raise MapError("homotopy here is between self-maps of one image")
        if not is_continuous(f):
            raise MapError(f"{f} is not continuous")


def one_step_homotopic(f: PointMap, g: PointMap, fixed: Iterable[int] | None = None) -> bool:
    """f(x) and g(x) equal or adjacent everywhere; both fix ``fixed``."""
    _require_continuous_self_map(f, g)
    if f.domain != g.domain:
        raise MapError("maps live on different images")
    closed = f.domain.closed_masks
    if fixed is not None and any(f(x) != x or g(x) != x for x in fixed):
        return False
    return all(closed[a] >> b & 1 for a, b in zip(f.assignment, g.assignment))


def one_step_partial(f: PointMap, fixed: Iterable[int] | None = None) -> PartialMap:
    """Search state whose completions are the one-step neighbors of f."""
    X = f.domain
    p = PartialMap(X, X, (None,) * len(X), tuple(X.closed_masks[v] for v in f.assignment))
    for x in fixed or ():
        if f(x) != x:
            raise MapError(f"map does not fix point {x}")
        p = p.assign(x, x)
    return p


def one_step_successors(f: PointMap, fixed: Iterable[int] | None = None,
                        budget: Budget | None = None) -> tuple[list[Assignment], SearchResult]:
    out: list[Assignment] = []
    res = enumerate_continuous_extensions(one_step_partial(f, fixed), out.append, budget=budget)
    return out, res


def bridge(f: PointMap, g: PointMap, fixed: Iterable[int] | None = None,
           budget: Budget | None = None) -> Assignment | None:
    """A continuous h one-step homotopic to both f and g, if one exists."""
    _require_continuous_self_map(f, g)
    X = f.domain
    closed = X.closed_masks
    cand = tuple(closed[a] & closed[b] for a, b in zip(f.assignment, g.assignment))
    p = PartialMap(X, X, (None,) * len(X), cand)
    for x in fixed or ():
        p = p.assign(x, x)
    found: list[Assignment] = []
    enumerate_continuous_extensions(p, lambda a: found.append(a) or True, budget=budget)
    return found[0] if found else None


@dataclass
class HomotopyClass:
    """Maps reached from ``base`` by one-step moves.

    ``members`` maps each reached assignment to its predecessor, so every
    member carries a replayable step chain back to the base.
    """

    base: PointMap
    members: dict[Assignment, Assignment | None] = field(default_factory=dict)
    complete: bool = False
    fixed: frozenset[int] = frozenset()
    stats: SearchStats = field(default_factory=SearchStats)

    def __contains__(self, g) -> bool:
        a = g.assignment if isinstance(g, PointMap) else tuple(g)
        return a in self.members

    def __len__(self) -> int:
        return len(self.members)

    def maps(self) -> list[PointMap]:
        X = self.base.domain
        return [PointMap(X, X, a) for a in self.members]

    def chain(self, g) -> list[Assignment]:
        """Step chain from the base to g; consecutive entries are one-step homotopic."""
        a = g.assignment if isinstance(g, PointMap) else tuple(g)
        if a not in self.members:
            raise KeyError("map is not in the explored class")
        out = [a]
        while self.members[out[-1]] is not None:
            out.append(self.members[out[-1]])
        return out[::-1]


def search_class(f: PointMap, fixed: Iterable[int] | None = None,
                 goal: Callable[[Assignment], bool] | None = None,
                 priority: Callable[[Assignment], object] | None = None,
                 budget: Budget | None = None) -> tuple[HomotopyClass, Assignment | None]:
    """Explore the (pointed) homotopy class of f until ``goal`` is met.

    Breadth-first by default; with ``priority`` the frontier becomes a heap
    keyed on it (lower first), which changes only the exploration order. The
    class is marked complete when the frontier empties without a goal hit.
    """
    _require_continuous_self_map(f)
    fixed = frozenset(fixed or ())
    X = f.domain
    cls = HomotopyClass(f, {f.assignment: None}, False, fixed)
    if goal is not None and goal(f.assignment):
        return cls, f.assignment
    counter = 0
    frontier: list = []

    def push(a):
        nonlocal counter
        counter += 1
        if priority is None:
            frontier.append(a)
        else:
            heapq.heappush(frontier, (priority(a), counter, a))

    if priority is None:
        frontier = deque()
    push(f.assignment)
    while frontier:
        if priority is None:
            a = frontier.popleft()
        else:
            a = heapq.heappop(frontier)[2]
        succ, res = one_step_successors(PointMap(X, X, a), fixed, budget)
        cls.stats.add(res.stats)
        if res.outcome is Outcome.BUDGET_EXCEEDED:
            return cls, None
        for b in succ:
            if b in cls.members:
                continue
            cls.members[b] = a
            if budget is not None and not budget.allows_maps(len(cls.members)):
                return cls, None
            if goal is not None and goal(b):
                return cls, b
            push(b)
    cls.complete = True
    return cls, None


def homotopy_class(f: PointMap, fixed: Iterable[int] | None = None,
                   budget: Budget | None = None) -> HomotopyClass:
    cls, _ = search_class(f, fixed, budget=budget)
    return cls


def are_homotopic(f: PointMap, g: PointMap, fixed: Iterable[int] | None = None,
                  budget: Budget | None = None) -> Verdict:
    """HOLDS with a step chain, FAILS once the class of f is exhausted."""
    _require_continuous_self_map(f, g)
    target = g.assignment
    cls, hit = search_class(f, fixed, goal=lambda a: a == target, budget=budget)
    if hit is not None:
        return Verdict(Status.HOLDS, None, cls.stats, {"chain": cls.chain(hit)})
    if cls.complete:
        return Verdict(Status.FAILS, None, cls.stats, {"class_size": len(cls)})
    return Verdict(Status.INCONCLUSIVE, None, cls.stats, {"explored": len(cls)})


def _non_identity_neighbor(X: DigitalImage, fixed, budget) -> Verdict:
    ident = PointMap.identity(X)
    found: list[Assignment] = []

    def visit(a):
        if any(v != i for i, v in enumerate(a)):
            found.append(a)
            return True
        return False

    res = enumerate_continuous_extensions(one_step_partial(ident, fixed), visit,
                                          budget=budget, value_order=non_identity_first)
    if found:
        return failing(PointMap(X, X, found[0]), res.stats)
    if res.outcome is Outcome.BUDGET_EXCEEDED:
        return Verdict(Status.INCONCLUSIVE, None, res.stats)
    return Verdict(Status.HOLDS, None, res.stats, {"one_step_neighbors_of_id": 1})


def is_rigid(X: DigitalImage, budget: Budget | None = None) -> Verdict:
    """HOLDS iff id is the only map one-step homotopic to id."""
    return _non_identity_neighbor(X, None, budget)


def is_pointed_rigid(X: DigitalImage, x0: int, budget: Budget | None = None) -> Verdict:
    """HOLDS iff id is the only map one-step homotopic to id that fixes x0."""
    if not 0 <= x0 < len(X):
        raise MapError(f"basepoint {x0} is not a point of the image")
    return _non_identity_neighbor(X, (x0,), budget)


def is_contractible(X: DigitalImage, budget: Budget | None = None) -> Verdict:
    """HOLDS iff a constant map is homotopic to id (chain in the certificate)."""
    if not is_connected(X):
        return Verdict(Status.FAILS, None, SearchStats(), {"reason": "disconnected"})
    ident = PointMap.identity(X)
    cls, hit = search_class(ident, goal=lambda a: len(set(a)) == 1,
                            priority=lambda a: len(set(a)), budget=budget)
    if hit is not None:
        return Verdict(Status.HOLDS, None, cls.stats, {"chain": cls.chain(hit)})
    if cls.complete:
        return Verdict(Status.FAILS, None, cls.stats, {"class_size": len(cls)})
    return Verdict(Status.INCONCLUSIVE, None, cls.stats, {"explored": len(cls)})


def reduction_points_fast(X: DigitalImage) -> frozenset[int]:
    """Points x with N*(x) inside N*(y) for some other point y."""
    closed = X.closed_masks
    out = set()
    for x in range(len(X)):
        for y in X.neighbors[x]:
            if closed[x] & ~closed[y] == 0:
                out.add(x)
                break
    return frozenset(out)


def reduction_retraction(X: DigitalImage, x: int) -> PointMap:
    """The retraction X -> X minus {x} sending x to a dominating neighbor."""
    closed = X.closed_masks
    for y in X.neighbors[x]:
        if closed[x] & ~closed[y] == 0:
            a = list(range(len(X)))
            a[x] = y
            r = PointMap(X, X, tuple(a))
            assert is_retraction(r, set(range(len(X))) - {x})
            return r
    raise MapError(f"point {x} is not dominated by a neighbor")


def is_reducible(X: DigitalImage, budget: Budget | None = None) -> Verdict:
    """HOLDS iff id is homotopic to a nonsurjective map.

    A dominated point gives an immediate one-step witness; otherwise the
    class of id is searched, smallest images first.
    """
    fast = sorted(reduction_points_fast(X))
    if fast:
        r = reduction_retraction(X, fast[0])
        return Verdict(Status.HOLDS, None, SearchStats(),
                       {"nonsurjective_map": list(r.assignment), "reduction_point": fast[0],
                        "chain": [list(range(len(X))), list(r.assignment)], "fast_path": True})
    n = len(X)
    ident = PointMap.identity(X)
    cls, hit = search_class(ident, goal=lambda a: len(set(a)) < n,
                            priority=lambda a: len(set(a)), budget=budget)
    if hit is not None:
        return Verdict(Status.HOLDS, None, cls.stats,
                       {"nonsurjective_map": list(hit), "chain": [list(c) for c in cls.chain(hit)],
                        "fast_path": False})
    if cls.complete:
        return Verdict(Status.FAILS, None, cls.stats, {"class_size": len(cls)})
    return Verdict(Status.INCONCLUSIVE, None, cls.stats, {"explored": len(cls)})


def retractions(X: DigitalImage, A: Iterable[int], budget: Budget | None = None) -> list[Assignment]:
    """All retractions of X onto A, as self-map assignments."""
    A = frozenset(A)
    amask = sum(1 << a for a in A)
    p = PartialMap.fixing(X, A)
    for x in range(len(X)):
        if x not in A:
            p = p.restrict(x, amask)
    out: list[Assignment] = []
    enumerate_continuous_extensions(p, out.append, budget=budget)
    return out


def is_deformation_retract(X: DigitalImage, A: Iterable[int],
                           budget: Budget | None = None) -> Verdict:
    """HOLDS iff some retraction onto A is homotopic to id.

    The class of id is searched for a map that fixes A and lands in A, with
    the count of points outside A as the priority.
    """
    A = frozenset(A)
    if not A or any(not 0 <= a < len(X) for a in A):
        raise MapError("A must be a nonempty subset of X")

    def is_r(a):
        return all(a[x] == x for x in A) and all(v in A for v in a)

    def misplaced(a):
        return sum(v not in A for v in a) + sum(a[x] != x for x in A)

    ident = PointMap.identity(X)
    cls, hit = search_class(ident, goal=is_r, priority=misplaced, budget=budget)
    if hit is not None:
        return Verdict(Status.HOLDS, None, cls.stats,
                       {"retraction": list(hit), "chain": [list(c) for c in cls.chain(hit)]})
    if cls.complete:
        return Verdict(Status.FAILS, None, cls.stats, {"class_size": len(cls)})
    return Verdict(Status.INCONCLUSIVE, None, cls.stats, {"explored": len(cls)})
