"""The Hamiltonian and its integral as operators with polynomial coefficients."""
from h4algebra import Artifacts, CacheStore, commutator
from h4algebra.cli import default_cache_dir
from h4algebra.operators import integral_from_hamiltonian

art = Artifacts(CacheStore(default_cache_dir()))  # cold run: about a minute

# %% gauge-rotated Hamiltonian in tau: h = sum A_ij d_i d_j + sum B_i d_i
h = art.hamiltonian()
for (i, j), a in sorted(h.symbol().items()):
    print(f"A{i + 1}{j + 1} = {a.to_text()}")
for i, b in enumerate(h.first_order(), start=1):
    print(f"B{i} = {b.to_text()}")

# %% the integral, derived from angular momenta and checked against a second route
f = art.integral()
print("first row vanishes:", not any(f.symbol().get((0, j)) for j in range(4)) and not f.first_order()[0])
print("radial decomposition agrees:", integral_from_hamiltonian(h) == f)

# %% the two operators commute exactly, with nu and omega symbolic
print("[h, f] = 0:", commutator(h, f).is_zero())
