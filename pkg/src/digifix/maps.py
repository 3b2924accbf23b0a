"""Point maps between digital images and the continuous-extension engine.

Every verification in the package reduces to one question: which continuous
maps extend a given partial assignment? :func:`enumerate_continuous_extensions`
answers it by depth-first search. Candidate sets are integer bitmasks over the
codomain's point indices; assigning ``f(x) = y`` restricts every neighbor of
``x`` to ``N*(y)`` (forward checking), and an optional AC-3 pass removes any
value with no support in a neighbor's candidate set.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .lattice import DigitalImage, ImageError, NPU, factor_coordinates, product


class MapError(ValueError):
    """Inconsistent map, partial map or image pairing."""


# --------------------------------------------------------------------------
# total maps


@dataclass(frozen=True)
class PointMap:
    domain: DigitalImage
    codomain: DigitalImage
    assignment: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(v) for v in self.assignment)
        if len(a) != len(self.domain):
            raise MapError(f"assignment has {len(a)} entries for {len(self.domain)} points")
        n = len(self.codomain)
        if any(not 0 <= v < n for v in a):
            raise MapError("assignment refers to a point outside the codomain")
        object.__setattr__(self, "assignment", a)

    def __call__(self, i: int) -> int:
        return self.assignment[i]

    def __repr__(self):
        return f"PointMap({list(self.assignment)})"

    @classmethod
    def identity(cls, X: DigitalImage) -> "PointMap":
        return cls(X, X, tuple(range(len(X))))

    @classmethod
    def constant(cls, X: DigitalImage, c: int, Y: DigitalImage | None = None) -> "PointMap":
        return cls(X, X if Y is None else Y, (c,) * len(X))

    @classmethod
    def from_points(cls, X: DigitalImage, rule, Y: DigitalImage | None = None) -> "PointMap":
        """Build a map from a function on coordinates."""
        Y = X if Y is None else Y
        return cls(X, Y, tuple(Y.index_of(rule(p)) for p in X.points))

    @property
    def is_self_map(self) -> bool:
        return self.domain == self.codomain

    def is_identity(self) -> bool:
        return self.is_self_map and all(v == i for i, v in enumerate(self.assignment))

    def image_set(self) -> frozenset[int]:
        return frozenset(self.assignment)

    def points(self) -> list[tuple]:
        """The assignment as coordinate pairs, for display."""
        return [(self.domain.points[i], self.codomain.points[v]) for i, v in enumerate(self.assignment)]


def is_continuous(f: PointMap) -> bool:
    closed = f.codomain.closed_masks
    a = f.assignment
    return all(closed[a[i]] >> a[j] & 1 for i, j in f.domain.edges)


def compose(g: PointMap, f: PointMap) -> PointMap:
    """g after f."""
    if f.codomain != g.domain:
        raise MapError("codomain of f must equal domain of g")
    return PointMap(f.domain, g.codomain, tuple(g.assignment[v] for v in f.assignment))


def fixed_points(f: PointMap) -> frozenset[int]:
    if not f.is_self_map:
        raise MapError("fixed points need a self-map")
    return frozenset(i for i, v in enumerate(f.assignment) if v == i)


def is_isomorphism(f: PointMap) -> bool:
    a = f.assignment
    if len(set(a)) != len(a) or len(a) != len(f.codomain):
        return False
    if not is_continuous(f):
        return False
    inverse = [0] * len(a)
    for i, v in enumerate(a):
        inverse[v] = i
    return is_continuous(PointMap(f.codomain, f.domain, tuple(inverse)))


def _check_subset(X: DigitalImage, A: Iterable[int]) -> frozenset[int]:
    A = frozenset(int(a) for a in A)
    if any(not 0 <= a < len(X) for a in A):
        raise MapError("subset contains an index outside the image")
    return A


def is_retraction(r: PointMap, A: Iterable[int]) -> bool:
    """Self-map r is continuous, maps into A and fixes A pointwise."""
    if not r.is_self_map:
        raise MapError("retraction is checked as a self-map of X")
    A = _check_subset(r.domain, A)
    return (is_continuous(r)
            and all(v in A for v in r.assignment)
            and all(r.assignment[a] == a for a in A))


def is_dominating(X: DigitalImage, A: Iterable[int]) -> bool:
    A = _check_subset(X, A)
    mask = sum(1 << a for a in A)
    return all(X.closed_masks[x] & mask for x in range(len(X)))


def product_map(fs: Sequence[PointMap], u: int | None = None,
                domain: DigitalImage | None = None,
                codomain: DigitalImage | None = None) -> PointMap:
    """Coordinatewise product of factor maps on NP_u products."""
    if not fs:
        raise MapError("product_map needs at least one factor")
    u = len(fs) if u is None else u
    X = product([f.domain for f in fs], u) if domain is None else domain
    Y = product([f.codomain for f in fs], u) if codomain is None else codomain
    for Z, attr in ((X, "domain"), (Y, "codomain")):
        facs = Z.info.get("factors")
        if facs is None or len(facs) != len(fs) or not isinstance(Z.adjacency, NPU):
            raise MapError(f"{attr} is not a product of {len(fs)} factors")
        if any(F != getattr(f, attr) for F, f in zip(facs, fs)):
            raise MapError(f"factor {attr}s do not match the product image")
    out = []
    for i in range(len(X)):
        coords = factor_coordinates(X, i)
        target = sum((f.codomain.points[f.assignment[c]] for f, c in zip(fs, coords)), ())
        out.append(Y.index_of(target))
    return PointMap(X, Y, tuple(out))


# --------------------------------------------------------------------------
# partial maps and budgets


def mask_of(values: Iterable[int]) -> int:
    m = 0
    for v in values:
        m |= 1 << v
    return m


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class PartialMap:
    """Search state: some points assigned, the rest with candidate sets.

    ``candidates`` holds one codomain bitmask per domain point; an assigned
    point's mask is the single bit of its value.
    """

    domain: DigitalImage
    codomain: DigitalImage
    assigned: tuple[int | None, ...]
    candidates: tuple[int, ...]

    @classmethod
    def empty(cls, X: DigitalImage, Y: DigitalImage | None = None) -> "PartialMap":
        Y = X if Y is None else Y
        full = (1 << len(Y)) - 1
        return cls(X, Y, (None,) * len(X), (full,) * len(X))

    @classmethod
    def fixing(cls, X: DigitalImage, A: Iterable[int]) -> "PartialMap":
        """Self-map search state with the identity on A."""
        p = cls.empty(X)
        for a in sorted(_check_subset(X, A)):
            p = p.assign(a, a)
        return p

    def assign(self, i: int, v: int) -> "PartialMap":
        if not 0 <= v < len(self.codomain):
            raise MapError(f"value {v} outside the codomain")
        a, c = list(self.assigned), list(self.candidates)
        a[i], c[i] = v, 1 << v
        return PartialMap(self.domain, self.codomain, tuple(a), tuple(c))

    def restrict(self, i: int, values: Iterable[int] | int) -> "PartialMap":
        """Intersect the candidates of point i with ``values`` (set or mask)."""
        m = values if isinstance(values, int) else mask_of(values)
        c = list(self.candidates)
        c[i] &= m
        return PartialMap(self.domain, self.codomain, self.assigned, tuple(c))

    def candidates_of(self, i: int) -> frozenset[int]:
        return frozenset(bits(self.candidates[i]))

    def violations(self) -> list[tuple[int, int]]:
        """Domain edges whose assigned endpoints break continuity."""
        closed = self.codomain.closed_masks
        a = self.assigned
        return [(i, j) for i, j in self.domain.edges
                if a[i] is not None and a[j] is not None and not closed[a[i]] >> a[j] & 1]


class Budget:
    """Node, wall-clock and stored-map limits, shared by every search it is passed to.

    ``None`` means unlimited. The clock starts at the first charge.
    """

    def __init__(self, max_nodes: int | None = None, max_seconds: float | None = None,
                 max_maps: int | None = None):
        self.max_nodes = max_nodes
        self.max_seconds = max_seconds
        self.max_maps = max_maps
        self.nodes = 0
        self._start: float | None = None

    def __repr__(self):
        return (f"Budget(max_nodes={self.max_nodes}, max_seconds={self.max_seconds}, "
                f"max_maps={self.max_maps}, used={self.nodes})")

    @property
    def elapsed(self) -> float:
        return 0.0 if self._start is None else time.perf_counter() - self._start

    def start(self) -> None:
        if self._start is None:
            self._start = time.perf_counter()

    def charge(self, nodes: int = 1) -> bool:
        """Consume nodes; False once any limit is exceeded."""
        self.start()
        self.nodes += nodes
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            return False
        if self.max_seconds is not None and (self.nodes & 255) == 0:
            if self.elapsed > self.max_seconds:
                return False
        return True

    def expired(self) -> bool:
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            return True
        return self.max_seconds is not None and self.elapsed > self.max_seconds

    def allows_maps(self, count: int) -> bool:
        return self.max_maps is None or count <= self.max_maps

    def to_dict(self) -> dict:
        return {"max_nodes": self.max_nodes, "max_seconds": self.max_seconds,
                "max_maps": self.max_maps}


class Outcome(enum.Enum):
    EXHAUSTED = "EXHAUSTED"
    STOPPED_BY_VISITOR = "STOPPED_BY_VISITOR"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"


@dataclass
class SearchStats:
    nodes: int = 0
    maps: int = 0
    seconds: float = 0.0

    def add(self, other: "SearchStats") -> "SearchStats":
        self.nodes += other.nodes
        self.maps += other.maps
        self.seconds += other.seconds
        return self

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "maps": self.maps}


@dataclass
class SearchResult:
    outcome: Outcome
    stats: SearchStats
    last: tuple[int, ...] | None = None


class Status(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Verdict:
    """Result of a verification.

    ``witness`` is set for FAILS verdicts that have a counterexample map; it is
    re-validated for continuity before being returned. ``certificate`` carries
    everything else needed to replay the verdict (step chains, violating
    points, per-point witnesses).
    """

    status: Status
    witness: PointMap | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    certificate: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def inconclusive(self) -> bool:
        return self.status is Status.INCONCLUSIVE


def failing(witness: PointMap, stats: SearchStats, **certificate) -> Verdict:
    if not is_continuous(witness):
        raise AssertionError(f"engine produced a discontinuous witness {witness}")
    return Verdict(Status.FAILS, witness, stats, certificate)


# --------------------------------------------------------------------------
# engine


class BudgetExceeded(Exception):
    pass


class _Stop(Exception):
    pass


ValueOrder = Callable[[int, list[int]], list[int]]
Visitor = Callable[[tuple[int, ...]], object]
Prune = Callable[[list, list], bool]


def non_identity_first(x: int, values: list[int]) -> list[int]:
    """Value order for self-map searches that hunt for a non-identity map."""
    if x in values:
        values.remove(x)
        values.append(x)
    return values


def auto_arc_consistency(p: PartialMap) -> bool:
    return len(p.domain) > 15


class _Engine:
    def __init__(self, p: PartialMap, visitor, budget, ac, value_order, prune):
        self.X, self.Y = p.domain, p.codomain
        self.nbrs = p.domain.neighbors
        self.closed = p.codomain.closed_masks
        self.visitor = visitor
        self.budget = budget
        self.ac = ac
        self.value_order = value_order
        self.prune = prune
        self.stats = SearchStats()
        self._support: dict[int, int] = {}
        self.last = None

    def support(self, mask: int) -> int:
        s = self._support.get(mask)
        if s is None:
            s = 0
            for v in bits(mask):
                s |= self.closed[v]
            self._support[mask] = s
        return s

    def propagate(self, cand: list[int], changed: Iterable[int]) -> bool:
        """Filter candidates after the points in ``changed`` shrank."""
        nbrs = self.nbrs
        if not self.ac:
            for x in changed:
                sup = self.support(cand[x])
                for y in nbrs[x]:
                    new = cand[y] & sup
                    if not new:
                        return False
                    cand[y] = new
            return True
        queue = list(changed)
        queued = set(queue)
        while queue:
            x = queue.pop()
            queued.discard(x)
            sup = self.support(cand[x])
            for y in nbrs[x]:
                old = cand[y]
                new = old & sup
                if new != old:
                    if not new:
                        return False
                    cand[y] = new
                    if y not in queued:
                        queued.add(y)
                        queue.append(y)
        return True

    def root(self, p: PartialMap) -> list[int] | None:
        cand = list(p.candidates)
        if any(c == 0 for c in cand):
            return None
        if self.ac:
            start = range(len(cand))
        else:
            start = [i for i, v in enumerate(p.assigned) if v is not None]
        return cand if self.propagate(cand, start) else None

    def run(self, p: PartialMap) -> Outcome:
        t0 = time.perf_counter()
        if self.budget is not None:
            self.budget.start()
        try:
            cand = self.root(p)
            if cand is not None:
                self.dfs(list(p.assigned), cand)
            outcome = Outcome.EXHAUSTED
        except _Stop:
            outcome = Outcome.STOPPED_BY_VISITOR
        except BudgetExceeded:
            outcome = Outcome.BUDGET_EXCEEDED
        self.stats.seconds = time.perf_counter() - t0
        return outcome

    def dfs(self, assigned: list, cand: list[int]) -> None:
        self.stats.nodes += 1
        if self.budget is not None and not self.budget.charge():
            raise BudgetExceeded
        if self.prune is not None and self.prune(assigned, cand):
            return
        best, best_size = -1, 1 << 62
        for i, v in enumerate(assigned):
            if v is None:
                size = cand[i].bit_count()
                if size < best_size:
                    best, best_size = i, size
                    if size == 1:
                        break
        if best < 0:
            self.stats.maps += 1
            leaf = tuple(assigned)
            self.last = leaf
            if self.visitor is not None and self.visitor(leaf):
                raise _Stop
            return
        values = bits(cand[best])
        if self.value_order is not None:
            values = self.value_order(best, values)
        for v in values:
            a2 = assigned.copy()
            a2[best] = v
            c2 = cand.copy()
            c2[best] = 1 << v
            if self.propagate(c2, (best,)):
                self.dfs(a2, c2)


def _resolve_ac(p: PartialMap, arc_consistency: bool | None) -> bool:
    return auto_arc_consistency(p) if arc_consistency is None else arc_consistency


def _validate(p: PartialMap) -> None:
    bad = p.violations()
    if bad:
        raise MapError(f"partial map already violates continuity on edges {bad[:5]}")
    for i, v in enumerate(p.assigned):
        if v is not None and p.candidates[i] != 1 << v:
            raise MapError(f"candidates of assigned point {i} must be exactly its value")


def enumerate_continuous_extensions(p: PartialMap, visitor: Visitor | None = None,
                                    budget: Budget | None = None,
                                    arc_consistency: bool | None = None,
                                    value_order: ValueOrder | None = None,
                                    prune: Prune | None = None) -> SearchResult:
    """Visit every continuous total map extending ``p``, in a deterministic order.

    ``visitor`` receives each assignment tuple; a truthy return stops the
    search. ``prune(assigned, candidates)`` may cut a subtree by returning
    True; it must only cut subtrees that contain no wanted map.
    ``arc_consistency=None`` enables AC-3 for domains over 15 points.
    """
    _validate(p)
    eng = _Engine(p, visitor, budget, _resolve_ac(p, arc_consistency), value_order, prune)
    outcome = eng.run(p)
    return SearchResult(outcome, eng.stats, eng.last)


def continuous_extensions(p: PartialMap, **kwargs) -> list[tuple[int, ...]]:
    """All extensions as a list; raises BudgetExceeded rather than truncating."""
    out: list[tuple[int, ...]] = []
    res = enumerate_continuous_extensions(p, out.append, **kwargs)
    if res.outcome is Outcome.BUDGET_EXCEEDED:
        raise BudgetExceeded(f"budget exceeded after {len(out)} maps")
    return out


def continuous_self_maps(X: DigitalImage, **kwargs) -> list[tuple[int, ...]]:
    return continuous_extensions(PartialMap.empty(X), **kwargs)


def first_extension(p: PartialMap, want: Callable[[tuple[int, ...]], bool] | None = None,
                    **kwargs) -> tuple[tuple[int, ...] | None, SearchResult]:
    """First continuous extension satisfying ``want`` (any extension if None)."""
    found: list[tuple[int, ...]] = []

    def visit(a):
        if want is None or want(a):
            found.append(a)
            return True
        return False

    res = enumerate_continuous_extensions(p, visit, **kwargs)
    return (found[0] if found else None), res


def propagated(p: PartialMap, arc_consistency: bool = True) -> PartialMap | None:
    """Root-propagated copy of p, or None if it has no continuous extension."""
    _validate(p)
    eng = _Engine(p, None, None, arc_consistency, None, None)
    cand = eng.root(p)
    if cand is None:
        return None
    return PartialMap(p.domain, p.codomain, p.assigned, tuple(cand))


def split(p: PartialMap, arc_consistency: bool | None = None) -> list[PartialMap]:
    """Children of the first branching point, in the engine's visiting order.

    Enumerating the children one after another visits exactly the maps the
    parent visits, in the same order, so subtrees can go to separate workers.
    """
    ac = _resolve_ac(p, arc_consistency)
    _validate(p)
    eng = _Engine(p, None, None, ac, None, None)
    cand = eng.root(p)
    if cand is None:
        return []
    free = [i for i, v in enumerate(p.assigned) if v is None]
    if not free:
        return [p]
    best = min(free, key=lambda i: (cand[i].bit_count(), i))
    kids = []
    for v in bits(cand[best]):
        c2 = cand.copy()
        c2[best] = 1 << v
        if eng.propagate(c2, (best,)):
            a2 = list(p.assigned)
            a2[best] = v
            kids.append(PartialMap(p.domain, p.codomain, tuple(a2), tuple(c2)))
    return kids

