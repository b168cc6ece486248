"""The H4 reflection group and its invariant coordinates."""
from h4algebra import RootSystemH4, generate_group, reflection, roots_from_delta_factors, tau_explicit
from h4algebra.coxeter import WEIGHTS, verify_invariance
from h4algebra.invariants import tau_from_orbit

# %% roots: the 60 linear factors of the ground-state prefactor
roots = roots_from_delta_factors()
print(len(roots), "roots; first non-coordinate one:", roots[4])

# %% simple roots dual to the fundamental weights, and the group they generate
system = RootSystemH4.build()
print("Coxeter diagram 5-3-3:", system.is_h4_chain())
group = generate_group([reflection(r) for r in system.simple_roots])
print("order", len(group))
for name, w in WEIGHTS.items():
    print(f"  orbit of {name}: {len(group.orbit(w))} points")

# %% invariant coordinates of x-degrees 2, 12, 20, 30
tau = tau_explicit()
print("x-degrees", tau.x_degrees(), "terms", [len(t) for t in tau])
generators = [reflection(r) for r in system.simple_roots]
print("invariant under the generators:", all(verify_invariance(t, generators) for t in tau))

# %% the same coordinates from power sums over the shortest orbit, up to scalars
fit = tau_from_orbit(group=group, tmap=tau)
for k, ratio in enumerate(fit.ratios, start=1):
    print(f"  corrected orbit sum {k} = ({ratio}) tau_{k}")
