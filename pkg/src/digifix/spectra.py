"""Fixed point spectra of images and homotopy fixed point spectra of maps."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .homotopy import search_class
from .lattice import DigitalImage
from .maps import (
    Budget,
    MapError,
    Outcome,
    PartialMap,
    PointMap,
    SearchStats,
    enumerate_continuous_extensions,
    split,
)


@dataclass
class Spectrum:
    counts: frozenset[int]
    complete: bool
    mode: str = "full"
    stats: SearchStats = field(default_factory=SearchStats)
    # one realizing map per count, when the mode records them
    witnesses: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def sorted(self) -> list[int]:
        return sorted(self.counts)


def _fix_count(a) -> int:
    return sum(1 for i, v in enumerate(a) if v == i)


def _collect_counts(p: PartialMap, budget: Budget | None):
    seen: dict[int, tuple[int, ...]] = {}

    def visit(a):
        k = _fix_count(a)
        if k not in seen:
            seen[k] = a

    res = enumerate_continuous_extensions(p, visit, budget=budget)
    return seen, res


def _worker(args):
    p, max_nodes = args
    seen, res = _collect_counts(p, Budget(max_nodes=max_nodes))
    return seen, res.outcome, res.stats


def _full(p: PartialMap, budget: Budget | None, workers: int) -> Spectrum:
    if workers <= 1:
        seen, res = _collect_counts(p, budget)
        return Spectrum(frozenset(seen), res.outcome is Outcome.EXHAUSTED, "full", res.stats, seen)
    # Subtrees go to separate processes; the count sets are merged in subtree
    # order so the recorded witnesses do not depend on scheduling.
    kids = split(p)
    limit = None if budget is None else budget.max_nodes
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_worker, [(k, limit) for k in kids]))
    seen: dict[int, tuple[int, ...]] = {}
    stats = SearchStats()
    complete = True
    for part, outcome, st in parts:
        for k, a in part.items():
            seen.setdefault(k, a)
        stats.add(st)
        complete &= outcome is Outcome.EXHAUSTED
    return Spectrum(frozenset(seen), complete, "full", stats, seen)


def count_prune(k: int):
    """Cut subtrees in which exactly k fixed points is no longer reachable."""

    def prune(assigned, cand):
        sure = possible = 0
        for i, v in enumerate(assigned):
            if v is None:
                possible += cand[i] >> i & 1
            elif v == i:
                sure += 1
        return sure > k or sure + possible < k

    return prune


def _targeted(p: PartialMap, budget: Budget | None) -> Spectrum:
    seen: dict[int, tuple[int, ...]] = {}
    stats = SearchStats()
    complete = True
    for k in range(len(p.domain) + 1):
        found: list = []
        res = enumerate_continuous_extensions(
            p, lambda a: found.append(a) or True, budget=budget, prune=count_prune(k))
        stats.add(res.stats)
        if found:
            assert _fix_count(found[0]) == k
            seen[k] = found[0]
        elif res.outcome is Outcome.BUDGET_EXCEEDED:
            complete = False
    return Spectrum(frozenset(seen), complete, "targeted", stats, seen)


def fixed_point_spectrum(X: DigitalImage, budget: Budget | None = None,
                         mode: str = "full", workers: int = 1) -> Spectrum:
    """F(X): the fixed point counts of all continuous self-maps.

    ``mode="full"`` enumerates every continuous self-map; ``"targeted"`` runs
    one first-witness search per count k with a pruning rule on how many
    fixed points remain possible.
    """
    return _spectrum(PartialMap.empty(X), budget, mode, workers)


def pointed_fixed_point_spectrum(X: DigitalImage, x0: int, budget: Budget | None = None,
                                 mode: str = "full", workers: int = 1) -> Spectrum:
    """F(X, x0): counts over continuous self-maps fixing x0."""
    if not 0 <= x0 < len(X):
        raise MapError(f"basepoint {x0} is not a point of the image")
    return _spectrum(PartialMap.empty(X).assign(x0, x0), budget, mode, workers)


def _spectrum(p, budget, mode, workers):
    if mode == "full":
        return _full(p, budget, workers)
    if mode == "targeted":
        return _targeted(p, budget)
    raise ValueError(f"unknown spectrum mode {mode!r}")


def homotopy_spectrum(f: PointMap, x0: int | None = None,
                      budget: Budget | None = None) -> Spectrum:
    """S(f), or S(f, x0) over the homotopy class holding x0 fixed."""
    fixed = None if x0 is None else (x0,)
    cls, _ = search_class(f, fixed, budget=budget)
    seen: dict[int, tuple[int, ...]] = {}
    for a in cls.members:
        seen.setdefault(_fix_count(a), a)
    return Spectrum(frozenset(seen), cls.complete, "class", cls.stats, seen)
