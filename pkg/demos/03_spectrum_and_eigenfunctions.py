"""Triangular spectra on the flags, eigenfunctions and the integral's eigenvalues."""
from gmpy2 import mpq

from h4algebra import Artifacts, CacheStore, FLAG_FULL, FLAG_MIN, flag_basis, joint_eigenfunctions, spectrum
from h4algebra.cli import default_cache_dir
from h4algebra.invariants import weighted_degree
from h4algebra.spectral import gamma_closed_form, laguerre_family

art = Artifacts(CacheStore(default_cache_dir()))
h, f = art.hamiltonian(), art.integral()

# %% the spectrum on the minimal flag is read off the diagonal, symbolic in omega
res = spectrum(h, flag_basis(FLAG_MIN, 12), scale=-2)
for eps, mult in zip(res.eigenvalues, res.multiplicities):
    print(f"  eps = {eps.to_text():>10}  multiplicity {mult}")

# %% the t1-only eigenfunctions are Laguerre polynomials annihilated by f
phi, eps = laguerre_family(3)
print("L_3 :", phi.to_text())
print("f L_3 = 0:", f.apply(phi).is_zero())

# %% joint eigenfunctions at nu = 1/3, omega = 1 with their (eps, gamma) labels
nu = mpq(1, 3)
joint = joint_eigenfunctions(h, f, flag_basis(FLAG_FULL, 10), nu, 1)
for (e, g), phi in zip(joint.labels, [p for b in joint.eigenfunctions for p in b]):
    # flag-leading monomial: highest weight, then fewest powers of t1
    lead = max((exps[:4] for exps, _ in phi.terms()), key=lambda m: (weighted_degree(m, FLAG_FULL), -m[0]))
    print(f"  eps={e}  gamma={g}  leading monomial t^{lead}")

# %% gamma as a quadratic in the quantum numbers (cross terms 240, 360, 600)
print("gamma(1,1,0) =", gamma_closed_form(1, 1, 0, nu))
