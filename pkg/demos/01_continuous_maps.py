"""
Counting continuous self-maps
=============================

Build a few small digital images and enumerate their continuous self-maps
with the pruned search, then compare with a plain numpy filter over every
possible assignment.
"""

# %%
import itertools

import numpy as np

from digifix import lattice as L
from digifix.maps import Budget, PartialMap, continuous_self_maps, enumerate_continuous_extensions

# %% [markdown]
# An interval, a cycle and the unit cube under c_1.

# %%
images = {"[0,2]": L.interval(0, 2), "C_5": L.cycle(5), "[0,1]^3": L.cube([1, 1, 1], 1)}
for name, X in images.items():
    print(f"{name:8s} {len(X)} points, {len(continuous_self_maps(X))} continuous self-maps")

# %% [markdown]
# The same count for C_5 by brute force: all 5^5 assignments at once.

# %%
X = images["C_5"]
M = np.eye(len(X), dtype=bool)
for a, b in X.edges:
    M[a, b] = M[b, a] = True
every = np.array(list(itertools.product(range(len(X)), repeat=len(X))))
ok = np.ones(len(every), dtype=bool)
for a, b in X.edges:
    ok &= M[every[:, a], every[:, b]]
print("brute force:", ok.sum())

# %% [markdown]
# Budgets stop a search early and say so.

# %%
res = enumerate_continuous_extensions(PartialMap.empty(L.cube([2, 2], 2)), budget=Budget(max_nodes=1000))
print(res.outcome.name, res.stats.maps, "maps seen before the cap")
