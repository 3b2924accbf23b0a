"""Digital images: lattice point sets with c_u, NP_u or explicit adjacency.

Images are immutable. Points are stored in a canonical order (lexicographic
for lattice adjacencies, insertion order for explicit graphs) and every other
module refers to points by their index in that order.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Point = tuple[int, ...]

UNREACHABLE = -1


class ImageError(ValueError):
    """Malformed image, adjacency or point data."""


class UnsupportedOperation(ImageError):
    """Operation needs an ambient lattice but the image is an abstract graph."""


class DisconnectedImage(ImageError):
    """Operation needs a connected image (or a connected pair of points)."""


# --------------------------------------------------------------------------
# adjacency specifications


@dataclass(frozen=True)
class CU:
    u: int


@dataclass(frozen=True)
class NPU:
    """Normal product adjacency over coordinate blocks.

    ``components`` is a tuple of ``(dimension, spec)`` pairs; the coordinate
    vector of a point is split into consecutive blocks of those dimensions.
    """

    u: int
    components: tuple[tuple[int, "AdjacencySpec"], ...]


@dataclass(frozen=True)
class Explicit:
    """Edges given as index pairs.

    At top level the indices refer to the image's own point order. When an
    ``Explicit`` spec is nested inside an ``NPU`` it carries ``points`` so the
    factor coordinates can be resolved to vertex indices.
    """

    edges: frozenset[tuple[int, int]]
    points: tuple[Point, ...] | None = None


AdjacencySpec = CU | NPU | Explicit


def explicit(edges: Iterable[Sequence[int]], points=None) -> Explicit:
    norm = set()
    for e in edges:
        i, j = int(e[0]), int(e[1])
        if i == j:
            raise ImageError(f"self-loop at vertex {i}")
        norm.add((min(i, j), max(i, j)))
    pts = None if points is None else tuple(tuple(int(c) for c in p) for p in points)
    return Explicit(frozenset(norm), pts)


def cu_adjacent(p: Sequence[int], q: Sequence[int], u: int) -> bool:
    """c_u adjacency of two lattice points."""
    if len(p) != len(q):
        raise ImageError(f"dimension mismatch: {len(p)} vs {len(q)}")
    if not 1 <= u <= len(p):
        raise ImageError(f"c_u needs 1 <= u <= n, got u={u}, n={len(p)}")
    changed = 0
    for a, b in zip(p, q):
        d = abs(a - b)
        if d > 1:
            return False
        changed += d
    return 1 <= changed <= u


def _factor_adjacent(p: Point, q: Point, spec: AdjacencySpec) -> bool:
    if isinstance(spec, CU):
        return cu_adjacent(p, q, spec.u)
    if isinstance(spec, NPU):
        return np_adjacent(p, q, spec)
    if spec.points is None:
        raise ImageError("explicit factor inside NP_u needs its vertex coordinates")
    index = _vertex_lookup(spec)
    try:
        i, j = index[p], index[q]
    except KeyError as exc:
        raise ImageError(f"{exc.args[0]} is not a vertex of the explicit factor") from None
    return (min(i, j), max(i, j)) in spec.edges


def _vertex_lookup(spec: Explicit) -> dict[Point, int]:
    hit = spec.__dict__.get("_lookup")
    if hit is None:
        hit = {p: i for i, p in enumerate(spec.points)}
        object.__setattr__(spec, "_lookup", hit)
    return hit


def _split(p: Sequence[int], spec: NPU) -> list[Point]:
    total = sum(d for d, _ in spec.components)
    if len(p) != total:
        raise ImageError(f"point {tuple(p)} does not split into factor dimensions "
                         f"{[d for d, _ in spec.components]}")
    out, k = [], 0
    for d, _ in spec.components:
        out.append(tuple(p[k:k + d]))
        k += d
    return out


def np_adjacent(p: Sequence[int], q: Sequence[int], spec: NPU) -> bool:
    """NP_u adjacency: 1..u factor blocks adjacent, the others equal."""
    if not isinstance(spec, NPU):
        raise ImageError("np_adjacent needs an NPU specification")
    if not 1 <= spec.u <= len(spec.components):
        raise ImageError(f"NP_u needs 1 <= u <= #factors, got u={spec.u}")
    moved = 0
    for a, b, (_, sub) in zip(_split(p, spec), _split(q, spec), spec.components):
        if a == b:
            continue
        if not _factor_adjacent(a, b, sub):
            return False
        moved += 1
    return 1 <= moved <= spec.u


def _is_lattice(spec: AdjacencySpec) -> bool:
    if isinstance(spec, CU):
        return True
    if isinstance(spec, NPU):
        return all(_is_lattice(s) for _, s in spec.components)
    return False


def _check_spec(spec: AdjacencySpec, dim: int) -> None:
    if isinstance(spec, CU):
        if not 1 <= spec.u <= dim:
            raise ImageError(f"c_u needs 1 <= u <= {dim}, got u={spec.u}")
    elif isinstance(spec, NPU):
        if not spec.components:
            raise ImageError("NP_u needs at least one factor")
        if not 1 <= spec.u <= len(spec.components):
            raise ImageError(f"NP_u needs 1 <= u <= {len(spec.components)}, got u={spec.u}")
        if sum(d for d, _ in spec.components) != dim:
            raise ImageError("factor dimensions must sum to the image dimension")
        for d, sub in spec.components:
            if isinstance(sub, Explicit) and sub.points is None:
                raise ImageError("explicit factor inside NP_u needs its vertex coordinates")
            if isinstance(sub, Explicit) and any(len(p) != d for p in sub.points):
                raise ImageError("explicit factor vertex has wrong dimension")
            if not isinstance(sub, Explicit):
                _check_spec(sub, d)


# --------------------------------------------------------------------------
# images


@dataclass(frozen=True, eq=False)
class DigitalImage:
    """A finite digital image.

    Build images with :func:`make_image` or the family generators rather than
    calling the constructor directly; they canonicalize point order and
    precompute neighbor lists.
    """

    dim: int
    points: tuple[Point, ...]
    adjacency: AdjacencySpec
    neighbors: tuple[tuple[int, ...], ...]
    # Family metadata (factors of a product, parts of a wedge, ...).
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, DigitalImage):
            return NotImplemented
        return (self.dim, self.points, self.adjacency) == (other.dim, other.points, other.adjacency)

    def __hash__(self):
        return hash((self.dim, self.points, self.adjacency))

    def __repr__(self):
        return f"DigitalImage(dim={self.dim}, #points={len(self.points)}, adjacency={self.adjacency!r})"

    @cached_property
    def index(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    def index_of(self, p: Sequence[int]) -> int:
        try:
            return self.index[tuple(p)]
        except KeyError:
            raise ImageError(f"{tuple(p)} is not a point of the image") from None

    def indices_of(self, pts: Iterable[Sequence[int]]) -> frozenset[int]:
        return frozenset(self.index_of(p) for p in pts)

    @property
    def is_lattice(self) -> bool:
        return _is_lattice(self.adjacency)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Open neighborhoods as integer bitmasks."""
        return tuple(sum(1 << j for j in nb) for nb in self.neighbors)

    @cached_property
    def closed_masks(self) -> tuple[int, ...]:
        """Closed neighborhoods N*(x) as integer bitmasks."""
        return tuple(m | (1 << i) for i, m in enumerate(self.neighbor_masks))

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i, nb in enumerate(self.neighbors) for j in nb if i < j)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.neighbor_masks[i] >> j & 1)

    def adjacent_or_equal(self, i: int, j: int) -> bool:
        return bool(self.closed_masks[i] >> j & 1)

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs path lengths; ``UNREACHABLE`` (-1) where no path exists."""
        n = len(self.points)
        out = np.full((n, n), UNREACHABLE, dtype=np.int64)
        for s in range(n):
            out[s] = _bfs(self.neighbors, s)
        out.setflags(write=False)
        return out

    def subimage(self, keep: Iterable[int]) -> "DigitalImage":
        """The image on a subset of points, with the same adjacency rule."""
        keep = sorted(set(keep))
        if isinstance(self.adjacency, Explicit):
            remap = {old: new for new, old in enumerate(keep)}
            edges = [(remap[i], remap[j]) for i, j in self.edges if i in remap and j in remap]
            return make_image([self.points[i] for i in keep], explicit(edges), dim=self.dim)
        return make_image([self.points[i] for i in keep], self.adjacency, dim=self.dim)

    def without(self, pts: Iterable[Sequence[int]]) -> "DigitalImage":
        drop = self.indices_of(pts)
        return self.subimage(i for i in range(len(self)) if i not in drop)


def _bfs(neighbors, source: int) -> np.ndarray:
    dist = np.full(len(neighbors), UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in neighbors[x]:
            if dist[y] == UNREACHABLE:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def make_image(points: Iterable[Sequence[int]], adjacency: AdjacencySpec,
               dim: int | None = None, info: dict | None = None) -> DigitalImage:
    """Build an image, canonicalizing order and computing neighbor lists."""
    pts = [tuple(int(c) for c in p) for p in points]
    if dim is None:
        if not pts:
            raise ImageError("cannot infer the dimension of an empty image")
        dim = len(pts[0])
    if dim < 1:
        raise ImageError("dimension must be at least 1")
    if any(len(p) != dim for p in pts):
        raise ImageError(f"all points must have dimension {dim}")
    if len(set(pts)) != len(pts):
        raise ImageError("points must be distinct")

    if isinstance(adjacency, Explicit):
        n = len(pts)
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for i, j in adjacency.edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ImageError(f"edge ({i}, {j}) refers to a missing vertex")
            nbrs[i].add(j)
            nbrs[j].add(i)
        return DigitalImage(dim, tuple(pts), Explicit(adjacency.edges),
                            tuple(tuple(sorted(s)) for s in nbrs), dict(info or {}))

    _check_spec(adjacency, dim)
    pts.sort()
    idx = {p: i for i, p in enumerate(pts)}
    if isinstance(adjacency, CU):
        offsets = [d for d in itertools.product((-1, 0, 1), repeat=dim)
                   if 1 <= sum(map(abs, d)) <= adjacency.u]
        neighbors = []
        for p in pts:
            nb = []
            for d in offsets:
                j = idx.get(tuple(a + b for a, b in zip(p, d)))
                if j is not None:
                    nb.append(j)
            neighbors.append(tuple(sorted(nb)))
    else:
        found: list[list[int]] = [[] for _ in pts]
        for i, j in itertools.combinations(range(len(pts)), 2):
            if np_adjacent(pts[i], pts[j], adjacency):
                found[i].append(j)
                found[j].append(i)
        neighbors = [tuple(sorted(nb)) for nb in found]
    return DigitalImage(dim, tuple(pts), adjacency, tuple(neighbors), dict(info or {}))


# --------------------------------------------------------------------------
# neighborhoods, connectivity, metric


def neighborhood(X: DigitalImage, i: int, closed: bool = False) -> frozenset[int]:
    nb = frozenset(X.neighbors[i])
    return nb | {i} if closed else nb


def is_connected(X: DigitalImage) -> bool:
    if len(X) == 0:
        raise ImageError("connectivity of an empty image is undefined")
    return bool((X.distances[0] != UNREACHABLE).all())


def path_distance(X: DigitalImage, i: int, j: int) -> int:
    """Shortest path length in X, or ``UNREACHABLE``."""
    return int(X.distances[i, j])


def diameter(X: DigitalImage) -> int:
    if not is_connected(X):
        raise DisconnectedImage("diameter of a disconnected image is undefined")
    return int(X.distances.max())


def _require_lattice(X: DigitalImage, what: str) -> None:
    if not X.is_lattice:
        raise UnsupportedOperation(f"{what} needs a lattice adjacency (c_u or NP_u over c_u)")


def boundary(X: DigitalImage) -> frozenset[int]:
    """Points with a c_1-neighbor in Z^n outside X."""
    _require_lattice(X, "boundary")
    out = set()
    for i, p in enumerate(X.points):
        for k in range(X.dim):
            for step in (-1, 1):
                q = p[:k] + (p[k] + step,) + p[k + 1:]
                if q not in X.index:
                    out.add(i)
                    break
            if i in out:
                break
    return frozenset(out)


def interior(X: DigitalImage) -> frozenset[int]:
    return frozenset(range(len(X))) - boundary(X)


def unique_shortest_path(X: DigitalImage, i: int, j: int) -> list[int] | None:
    """The shortest path from i to j if it is unique, else None.

    Geodesics are counted with BFS layer predecessor counts.
    """
    dist = X.distances[i]
    if dist[j] == UNREACHABLE:
        raise DisconnectedImage(f"no path between points {i} and {j}")
    order = np.argsort(dist, kind="stable")
    count = [0] * len(X)
    count[i] = 1
    for x in order:
        if dist[x] <= 0:
            continue
        count[x] = sum(count[y] for y in X.neighbors[x] if dist[y] == dist[x] - 1)
    if count[j] != 1:
        return None
    path = [j]
    while path[-1] != i:
        x = path[-1]
        path.append(next(y for y in X.neighbors[x] if dist[y] == dist[x] - 1))
    return path[::-1]


def is_tree(X: DigitalImage) -> bool:
    return len(X) > 0 and is_connected(X) and len(X.edges) == len(X) - 1


def leaves(X: DigitalImage) -> frozenset[int]:
    return frozenset(i for i, nb in enumerate(X.neighbors) if len(nb) == 1)


def box_bounds(X: DigitalImage) -> list[tuple[int, int]] | None:
    """Per-coordinate (lo, hi) if X is a full lattice box, else None."""
    if not X.is_lattice or len(X) == 0:
        return None
    arr = np.asarray(X.points)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    if int(np.prod(hi - lo + 1)) != len(X):
        return None
    return [(int(a), int(b)) for a, b in zip(lo, hi)]


# --------------------------------------------------------------------------
# generators


def interval(a: int, b: int) -> DigitalImage:
    """[a, b]_Z with c_1 adjacency."""
    if b < a:
        raise ImageError(f"empty interval [{a}, {b}]")
    return make_image(((t,) for t in range(a, b + 1)), CU(1), dim=1,
                      info={"family": "interval", "a": a, "b": b})


def box(ranges: Sequence[Sequence[int]], u: int = 1) -> DigitalImage:
    """Product of intervals [a_i, b_i]_Z with c_u adjacency."""
    ranges = [(int(a), int(b)) for a, b in ranges]
    if any(b < a for a, b in ranges):
        raise ImageError(f"empty box {ranges}")
    pts = itertools.product(*(range(a, b + 1) for a, b in ranges))
    return make_image(pts, CU(u), dim=len(ranges),
                      info={"family": "box", "ranges": ranges, "u": u})


def cube(m: Sequence[int], u: int = 1) -> DigitalImage:
    """prod [0, m_i]_Z with c_u adjacency."""
    return box([(0, mi) for mi in m], u)


def cycle(n: int) -> DigitalImage:
    """The cycle C_n on abstract vertices 0..n-1."""
    if n < 3:
        raise ImageError(f"a cycle needs at least 3 points, got {n}")
    return make_image(((i,) for i in range(n)), explicit((i, (i + 1) % n) for i in range(n)),
                      dim=1, info={"family": "cycle", "n": n})


def graph(n: int, edges: Iterable[Sequence[int]], **info) -> DigitalImage:
    """An abstract graph on vertices 0..n-1."""
    return make_image(((i,) for i in range(n)), explicit(edges), dim=1, info=info)


def tree(edges: Iterable[Sequence[int]], n: int | None = None) -> DigitalImage:
    """A tree on vertices 0..n-1; rejects graphs that are not trees."""
    edges = [tuple(e) for e in edges]
    if n is None:
        n = 1 + max((max(e) for e in edges), default=0)
    X = graph(n, edges, family="tree")
    if not is_tree(X):
        raise ImageError("edge list does not describe a tree")
    return X


def wedge(X0: DigitalImage, X1: DigitalImage, x0, x1=None) -> DigitalImage:
    """The wedge X0 v X1.

    Lattice images are united inside their common ambient lattice; ``x0`` is
    the shared point and the wedge condition is checked. Explicit graphs are
    glued by identifying vertex ``x0`` of X0 with vertex ``x1`` of X1 and
    relabelling. ``info["parts"]`` maps each part's indices to wedge indices.
    """
    if isinstance(X0.adjacency, Explicit) or isinstance(X1.adjacency, Explicit):
        if not (isinstance(X0.adjacency, Explicit) and isinstance(X1.adjacency, Explicit)):
            raise ImageError("cannot wedge an explicit graph with a lattice image")
        i0, i1 = int(x0), int(x0 if x1 is None else x1)
        left = list(range(len(X0)))
        right, k = [], len(X0)
        for j in range(len(X1)):
            if j == i1:
                right.append(i0)
            else:
                right.append(k)
                k += 1
        edges = list(X0.edges) + [(right[a], right[b]) for a, b in X1.edges]
        return graph(k, edges, family="wedge", parts=(left, right), wedge_point=i0)

    if X0.dim != X1.dim or X0.adjacency != X1.adjacency:
        raise ImageError("wedge parts must share dimension and adjacency")
    p0 = tuple(x0)
    common = set(X0.points) & set(X1.points)
    if common != {p0}:
        raise ImageError(f"wedge parts must meet exactly in {p0}, they meet in {sorted(common)}")
    X = make_image(list(X0.points) + [p for p in X1.points if p != p0], X0.adjacency, dim=X0.dim)
    s0, s1 = set(X0.points), set(X1.points)
    for a, b in X.edges:
        pa, pb = X.points[a], X.points[b]
        crosses = (pa in s0 and pb in s1) or (pa in s1 and pb in s0)
        if crosses and p0 not in (pa, pb):
            raise ImageError(f"cross adjacency {pa} <-> {pb} avoids the wedge point")
    parts = ([X.index[p] for p in X0.points], [X.index[p] for p in X1.points])
    return DigitalImage(X.dim, X.points, X.adjacency, X.neighbors,
                        {"family": "wedge", "parts": parts, "wedge_point": X.index[p0]})


def product(images: Sequence[DigitalImage], u: int | None = None) -> DigitalImage:
    """Cartesian product with NP_u adjacency (u defaults to the factor count)."""
    if not images:
        raise ImageError("product needs at least one factor")
    u = len(images) if u is None else u
    comps = []
    for Y in images:
        if isinstance(Y.adjacency, Explicit):
            comps.append((Y.dim, Explicit(Y.adjacency.edges, Y.points)))
        else:
            comps.append((Y.dim, Y.adjacency))
    spec = NPU(u, tuple(comps))
    pts = [sum(combo, ()) for combo in itertools.product(*(Y.points for Y in images))]
    return make_image(pts, spec, dim=sum(Y.dim for Y in images),
                      info={"family": "product", "factors": tuple(images), "u": u})


def factor_coordinates(X: DigitalImage, i: int) -> list[int]:
    """Indices, inside each factor, of the coordinates of product point i."""
    factors = X.info.get("factors")
    if factors is None:
        raise ImageError("image was not built by product()")
    p, k, out = X.points[i], 0, []
    for Y in factors:
        out.append(Y.index_of(p[k:k + Y.dim]))
        k += Y.dim
    return out


def transform(X: DigitalImage, perm: Sequence[int] | None = None,
              flip: Sequence[bool] | None = None,
              shift: Sequence[int] | None = None) -> tuple[DigitalImage, list[int]]:
    """Apply a coordinate permutation, reflections and a translation.

    Returns the new image and the index map ``F`` with ``F[i]`` the index of
    the image of point ``i``. Only ``CU`` images are supported; these maps are
    isomorphisms for every c_u.
    """
    if not isinstance(X.adjacency, CU):
        raise UnsupportedOperation("transform supports c_u images only")
    n = X.dim
    perm = list(range(n)) if perm is None else list(perm)
    flip = [False] * n if flip is None else list(flip)
    shift = [0] * n if shift is None else list(shift)
    if sorted(perm) != list(range(n)):
        raise ImageError(f"{perm} is not a permutation of range({n})")

    def move(p):
        return tuple((-p[perm[k]] if flip[k] else p[perm[k]]) + shift[k] for k in range(n))

    moved = [move(p) for p in X.points]
    Y = make_image(moved, X.adjacency, dim=n)
    return Y, [Y.index[q] for q in moved]
