"""The configuration-space boundary as a polynomial in the invariant coordinates."""
from h4algebra import Artifacts, CacheStore
from h4algebra.cli import default_cache_dir
from h4algebra.reference import boundary_reference

art = Artifacts(CacheStore(default_cache_dir()))  # cold run: about 40 s

# %% the Jacobian of the coordinates is a multiple of the root product
b = art.boundary()
print("J = c * Delta1 Delta2 Delta3 with c =", b.jacobian_scalar)

# %% J^2 rewritten in tau: 38 terms, weighted degree 60
print(len(b.polynomial), "terms")
for exps, c in b.polynomial.terms()[:6]:
    print(f"  {c} * t^{exps[:4]}")

# %% one overall scalar relates it to the tabulated surface
table = boundary_reference()
scale = b.polynomial.coefficient((0, 10, 0, 0, 0, 0)) / table.coefficient((0, 10, 0, 0, 0, 0))
print("scalar", scale, "- all terms agree:", b.polynomial == table.scale(scale))
