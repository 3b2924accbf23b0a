"""Independent reference computations used by the tests.

Nothing here touches the search engine: maps are enumerated by brute force
over all |Y|^|X| assignments, and graph facts come from networkx.
"""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from digifix.lattice import DigitalImage


def adjacency_matrix(X: DigitalImage, closed: bool = True) -> np.ndarray:
    n = len(X)
    M = np.zeros((n, n), dtype=bool)
    for a, b in X.edges:
        M[a, b] = M[b, a] = True
    if closed:
        np.fill_diagonal(M, True)
    return M


def brute_force_maps(X: DigitalImage, Y: DigitalImage | None = None, chunk: int = 1 << 21) -> set[tuple]:
    """Every continuous map X -> Y, by filtering all |Y|^|X| assignments."""
    Y = X if Y is None else Y
    n, m = len(X), len(Y)
    M = adjacency_matrix(Y)
    edges = np.array(sorted(X.edges), dtype=np.int64).reshape(-1, 2)
    powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    total = m ** n
    out: set[tuple] = set()
    for start in range(0, total, chunk):
        k = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (k[:, None] // powers[None, :]) % m
        ok = np.ones(len(k), dtype=bool)
        for a, b in edges:
            ok &= M[digits[:, a], digits[:, b]]
        out.update(map(tuple, digits[ok].tolist()))
    return out


def to_networkx(X: DigitalImage) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(len(X)))
    G.add_edges_from(X.edges)
    return G


def nonidentity_fixing(X: DigitalImage, A, maps=None) -> list[tuple]:
    """Brute-force continuous self-maps fixing A that are not the identity."""
    maps = brute_force_maps(X) if maps is None else maps
    ident = tuple(range(len(X)))
    return [f for f in maps if f != ident and all(f[a] == a for a in A)]


def max_displacement(X: DigitalImage, A, maps=None) -> int:
    """Largest d(x, f(x)) over continuous f fixing A (networkx distances)."""
    maps = brute_force_maps(X) if maps is None else maps
    dist = dict(nx.all_pairs_shortest_path_length(to_networkx(X)))
    best = 0
    for f in maps:
        if all(f[a] == a for a in A):
            best = max(best, max(dist[x][f[x]] for x in range(len(X))))
    return best


def freezing_sets_brute(X: DigitalImage, maps=None) -> list[frozenset]:
    """All freezing subsets, by checking every subset against the map list."""
    maps = brute_force_maps(X) if maps is None else maps
    n = len(X)
    ident = tuple(range(n))
    movers = [f for f in maps if f != ident]
    fixsets = [frozenset(i for i in range(n) if f[i] == i) for f in movers]
    out = []
    for r in range(n + 1):
        for A in itertools.combinations(range(n), r):
            A = frozenset(A)
            if not any(A <= F for F in fixsets):
                out.append(A)
    return out


def homotopy_components(X: DigitalImage, fixed=(), maps=None) -> nx.Graph:
    """Graph of continuous self-maps fixing ``fixed``, joined when one-step homotopic."""
    maps = brute_force_maps(X) if maps is None else maps
    maps = sorted(f for f in maps if all(f[x] == x for x in fixed))
    M = adjacency_matrix(X)
    arr = np.array(maps, dtype=np.int64)
    G = nx.Graph()
    G.add_nodes_from(maps)
    for i, f in enumerate(maps):
        close = M[arr[i][None, :], arr].all(axis=1)
        for j in np.nonzero(close)[0]:
            if j > i:
                G.add_edge(f, maps[j])
    return G


def identity_class(X: DigitalImage, fixed=(), maps=None) -> set[tuple]:
    G = homotopy_components(X, fixed, maps)
    return nx.node_connected_component(G, tuple(range(len(X))))
