"""
A contractible image that is pointed rigid
==========================================

X = [0,2]^2 x [0,1] minus (1,1,1) under c_1. The identity has plenty of
one-step neighbors, but none of them keeps x0 = (0,0,1) fixed.
"""

# %%
from digifix.homotopy import bridge, is_pointed_rigid, is_rigid, one_step_successors
from digifix.io import contract_not_pointed
from digifix.maps import PointMap
from digifix.spectra import fixed_point_spectrum

X = contract_not_pointed()
x0 = X.index_of((0, 0, 1))
print(len(X), "points")
print("rigid:", is_rigid(X).status.name, " pointed rigid at (0,0,1):", is_pointed_rigid(X, x0).status.name)

# %%
succ, _ = one_step_successors(PointMap.identity(X))
print(len(succ), "one-step neighbors of id; fixing x0:", sum(a[x0] == x0 for a in succ))

# %% Fixed point spectrum, with a short homotopy to id for the large counts

# %%
sp = fixed_point_spectrum(X, mode="targeted")
print("F(X) =", sp.sorted())
ident = PointMap.identity(X)
for k in (12, 13, 14):
    g = PointMap(X, X, sp.witnesses[k])
    h = bridge(g, ident)
    print(k, "fixed points; two-step homotopy to id:", h is not None)
