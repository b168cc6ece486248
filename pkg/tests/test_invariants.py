"""Invariant coordinates, invariantization, orbit sums, the Jacobian and flags."""
from itertools import product

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from h4algebra.coxeter import RootSystemH4, reflection, verify_invariance
from h4algebra.field import ExactScalar
from h4algebra.invariants import (
    FLAG_FULL,
    FLAG_MIN,
    NotInvariant,
    factor_jacobian,
    jacobian_over_delta1,
    flag_monomials,
    invariantize,
    tau4_mislabeled,
    tau_from_orbit,
    weighted_degree,
    wpt_images,
    wpt_substitution,
    WPT_SHAPES,
)
from h4algebra.poly import TAU, X, Polynomial
from h4algebra.symmetric import alternating_delta4, monomial_symmetric


@pytest.fixture(scope="module")
def generators():
    return [reflection(r) for r in RootSystemH4.build().simple_roots]


def test_x_degrees(tau):
    assert tau.x_degrees() == (2, 12, 20, 30)


def test_first_coordinate_is_radius(tau):
    assert tau[0] == Polynomial.from_text(X, "x1^2 + x2^2 + x3^2 + x4^2")


@pytest.mark.parametrize("k", range(4))
def test_coordinates_invariant_under_generators(tau, generators, k):
    assert verify_invariance(tau[k], generators)


def test_mislabeled_degree_thirty_table_is_not_invariant(tau, generators):
    printed = tau4_mislabeled()
    assert printed.main_degree() == 30
    assert printed != tau[3]
    assert not verify_invariance(printed, generators)


def test_alternating_polynomial_value():
    # independent oracle: the product of x_i^2 - x_j^2 over i < j
    xs = sympy.symbols("x1:5")
    oracle = sympy.prod([xs[i] ** 2 - xs[j] ** 2 for i in range(4) for j in range(i + 1, 4)])
    assert oracle.subs(dict(zip(xs, (1, 2, 3, 4)))) == 151200
    assert alternating_delta4(X).evaluate([1, 2, 3, 4]) == 151200


def test_monomial_symmetric_counts_distinct_permutations():
    assert len(monomial_symmetric("[2|1|0^2]")) == 12
    assert len(monomial_symmetric("[1^4]")) == 1


@settings(max_examples=10, deadline=None)
@given(st.dictionaries(st.sampled_from([(6, 0, 0, 0), (3, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (0, 0, 0, 0)]),
                       st.integers(-5, 5), min_size=1))
def test_invariantize_inverts_composition(tau, coeffs):
    q = Polynomial(TAU, {e + (0, 0): c for e, c in coeffs.items()})
    assert invariantize(tau.compose(q), tau) == q


def test_invariantize_carries_parameters(tau):
    q = Polynomial.from_text(TAU, "nu*t2 + omega^2*t1^3")
    assert invariantize(tau.compose(q), tau) == q


def test_invariantize_rejects_non_invariant(tau):
    with pytest.raises(NotInvariant):
        invariantize(Polynomial.from_text(X, "x1^2"), tau)


def test_orbit_sums_match_with_fitted_scales(tau):
    fit = tau_from_orbit(tmap=tau)
    assert fit.scales[1] == ExactScalar("24883200000/133")
    assert fit.ratios[0] == ExactScalar(180, 60)


def test_jacobian_factor(tau):
    assert factor_jacobian(tau) == ExactScalar(0, -1296000)


def test_jacobian_over_coordinate_product_degree(tau):
    # J has x-degree 1 + 11 + 19 + 29 = 60 and the coordinate product has degree 4
    assert jacobian_over_delta1(tau).main_degree() == 56


def brute_force_flag(weights, n, bound=16):
    return sorted(e for e in product(range(bound), repeat=4) if weighted_degree(e, weights) <= n)


@pytest.mark.parametrize("weights", [FLAG_MIN, FLAG_FULL])
@pytest.mark.parametrize("n", [0, 5, 12])
def test_flag_monomials_match_enumeration(weights, n):
    assert sorted(flag_monomials(weights, n)) == brute_force_flag(weights, n)


wpt_params = st.fixed_dictionaries({k: st.lists(st.integers(-6, 6), min_size=len(v), max_size=len(v))
                                    for k, v in WPT_SHAPES.items()})


@settings(max_examples=25, deadline=None)
@given(wpt_params, st.sampled_from(flag_monomials(FLAG_MIN, 12)))
def test_wpt_preserves_minimal_flag(params, mono):
    image = wpt_substitution(Polynomial.monomial(TAU, mono + (0, 0)), params)
    assert max(weighted_degree(e[:4], FLAG_MIN) for e, _ in image.terms()) <= weighted_degree(mono, FLAG_MIN)


def test_wpt_shift_shapes_do_not_raise_weight():
    for k, name in enumerate("abcd"):
        for shape in WPT_SHAPES[name]:
            assert weighted_degree(shape, FLAG_MIN) <= FLAG_MIN[k]


def test_wpt_identity_with_zero_parameters():
    images = wpt_images()
    assert all(images[v] == Polynomial.var(TAU, v) for v in TAU.variables)
