"""
s-cold sets
===========

An s-cold set bounds how far a continuous self-map can move any point once
it fixes the set. The verifier reports the worst point it found.
"""

# %%
from digifix import lattice as L
from digifix.fixsets import construct_cold, perimeter, verify_cold

# %% Alternating and dominating boundary sets on a c_2 rectangle

# %%
X = L.box([(0, 6), (0, 4)], 2)
for fam in ("rect_c2_alternating", "rect_c2_dominating"):
    A, s = construct_cold(X, fam)
    ok = verify_cold(X, A, s)
    tighter = verify_cold(X, A, s - 1)
    print(f"{fam}: |A| = {len(A)}, {s}-cold {ok.status.name}; "
          f"{s - 1}-cold {tighter.status.name} (point {X.points[tighter.certificate['violating_point']]} "
          f"moves {tighter.certificate['distance']})")

# %% Smallest s for a few pairs in a c_1 strip

# %%
Y = L.box([(0, 4), (0, 1)], 1)
for pair in ([(0, 0), (4, 1)], [(0, 0), (4, 0)], [(2, 0), (2, 1)], [(0, 0), (0, 1)]):
    A = Y.indices_of(pair)
    s = next(s for s in range(len(Y)) if verify_cold(Y, A, s).holds)
    print(pair, "->", s)

# %% Inner corners of a c_1 rectangle

# %%
Z = L.box([(-3, 3), (-2, 2)], 1)
for s in range(3):
    A, bound = construct_cold(Z, "rect_c1_inner_corners", s=s)
    print(f"s={s}: corners {sorted(Z.points[i] for i in A)} -> {bound}-cold {verify_cold(Z, A, bound).status.name}")
print("perimeter walk:", [Z.points[i] for i in perimeter(Z)][:6], "...")
