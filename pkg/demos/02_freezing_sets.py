"""
Freezing sets
=============

A freezing set A forces every continuous self-map that fixes A pointwise to
be the identity. Here the verifier, the minimality check and the minimum
search run on a few families.
"""

# %%
import networkx as nx

from digifix import lattice as L
from digifix.fixsets import construct_freezing, find_minimum_freezing, is_minimal_freezing, verify_freezing

# %% Corners of a rectangle under c_1

# %%
X = L.box([(0, 3), (0, 2)], 1)
corners = construct_freezing(X, "cube_c1")
print("corners:", sorted(X.points[i] for i in corners))
print("minimal freezing:", is_minimal_freezing(X, corners).status.name)
v = verify_freezing(X, corners - {X.index_of((0, 0))})
print("without (0,0):", v.status.name, "witness moves",
      [X.points[i] for i in range(len(X)) if v.witness(i) != i])

# %% Cycles: three well spread points freeze C_n for n > 4

# %%
for n in (5, 7, 9, 12):
    m = find_minimum_freezing(L.cycle(n))
    print(f"C_{n}: minimum freezing size {m.size}, example {sorted(m.example)}")

# %% Trees: the leaves

# %%
T = nx.random_labeled_tree(9, seed=3) if hasattr(nx, "random_labeled_tree") else nx.random_tree(9, seed=3)
X = L.tree(T.edges(), 9)
leaves = construct_freezing(X, "tree_leaves")
print("leaves", sorted(leaves), "->", is_minimal_freezing(X, leaves).status.name)

# %% The 4-cube: every point is a corner, yet far fewer points suffice

# %%
Q = L.cube([1, 1, 1, 1], 1)
m = find_minimum_freezing(Q)
print(f"[0,1]^4: minimum freezing size {m.size} after {m.tested} candidate sets, example",
      [Q.points[i] for i in sorted(m.example)])
