"""Differential operators: algebra, gauge rotation, pushforward and the integral."""
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from h4algebra.coxeter import roots_from_delta_factors
from h4algebra.field import ExactScalar
from h4algebra.operators import (
    DiffOperator,
    ModelSpec,
    build_integral_cartesian,
    carre_du_champ,
    commutator,
    compose,
    euler_operator,
    gauge_rotate_hamiltonian,
    ground_state_eigenvalue,
    integral_from_hamiltonian,
)
from h4algebra.poly import TAU, X, Polynomial
from h4algebra.reference import hamiltonian_reference, integral_reference

SYMS = sympy.symbols("x1:5")
POINT = (1, 3, 4, 7)
NU, OMEGA = sympy.Rational(1, 3), sympy.Integer(2)


def sympy_poly(p: Polynomial):
    return sympy.sympify(p.to_text().replace("sqrt5", "sqrt(5)"), locals=dict(zip(X.variables, SYMS)))


def sympy_scalar(c: ExactScalar):
    return sympy.Rational(str(c.a)) + sympy.Rational(str(c.b)) * sympy.sqrt(5)


def rotated_hamiltonian_oracle(p):
    """``Lap p + 2 nu sum (a . grad p)/(a . x) - 2 omega x . grad p`` at ``POINT``."""
    grad = [sympy.diff(p, s) for s in SYMS]
    lap = sum(sympy.diff(p, s, 2) for s in SYMS)
    at = dict(zip(SYMS, POINT))
    total = lap.subs(at) - 2 * OMEGA * sum(s * g for s, g in zip(SYMS, grad)).subs(at)
    gvals = [g.subs(at) for g in grad]
    for r in roots_from_delta_factors():
        a = [sympy_scalar(c) for c in r.coeffs]
        total += 2 * NU * sum(ai * gi for ai, gi in zip(a, gvals)) / sum(ai * xi for ai, xi in zip(a, POINT))
    return sympy.radsimp(total)


ops = st.sampled_from([
    DiffOperator.partial(X, "x1"),
    DiffOperator.partial(X, "x2", 2),
    DiffOperator.multiplication(Polynomial.from_text(X, "x1*x3 + nu")),
    euler_operator(X),
])
polys = st.dictionaries(st.tuples(*[st.integers(0, 3)] * 4, st.just(0), st.just(0)),
                        st.integers(-5, 5), max_size=5).map(lambda d: Polynomial(X, d))


@settings(max_examples=40)
@given(ops, ops, polys)
def test_composition_is_sequential_application(a, b, p):
    assert compose(a, b).apply(p) == a.apply(b.apply(p))


@settings(max_examples=40)
@given(ops, ops)
def test_commutator_is_antisymmetric(a, b):
    assert commutator(a, b) == -commutator(b, a)


def test_euler_operator_counts_degree():
    p = Polynomial.from_text(X, "x1^3*x2 + x3^2*x4^2")
    assert euler_operator(X).apply(p) == p.scale(4)


@pytest.mark.parametrize("k", [0, 1])
def test_rotated_hamiltonian_matches_oracle(tau, k):
    h_cart = gauge_rotate_hamiltonian(ModelSpec.h4())
    got = h_cart.apply(tau[k]).evaluate(list(POINT) + [NU, OMEGA])
    assert sympy.simplify(sympy_scalar(got) - rotated_hamiltonian_oracle(sympy_poly(tau[k]))) == 0


def test_ground_state_eigenvalue_of_integral():
    spec = ModelSpec.h4()
    F = build_integral_cartesian(spec, check=False)
    gamma0 = ground_state_eigenvalue(F, spec)
    assert gamma0 == Polynomial.from_text(gamma0.ctx, "60*nu + 1800*nu^2")


def test_hamiltonian_matches_reference(hamiltonian):
    assert hamiltonian == hamiltonian_reference()


def test_integral_matches_reference(integral):
    assert integral == integral_reference()


def test_hamiltonian_pushforward_commutes_with_composition(tau, hamiltonian):
    h_cart = gauge_rotate_hamiltonian(ModelSpec.h4())
    q = Polynomial.from_text(TAU, "t1*t2 + nu*t1^3")
    assert tau.compose(hamiltonian.apply(q)) == h_cart.apply(tau.compose(q))


def test_carre_du_champ_of_hamiltonian_is_symbol(hamiltonian):
    t = [Polynomial.var(TAU, v) for v in TAU.variables]
    sym = hamiltonian.symbol()
    for i in range(4):
        for j in range(i, 4):
            expected = sym.get((i, j), Polynomial.zero(TAU))
            assert carre_du_champ(hamiltonian, t[i], t[j]) == expected


def test_integral_from_radial_decomposition(hamiltonian, integral):
    # second route to the integral, independent of its Cartesian construction
    assert integral_from_hamiltonian(hamiltonian) == integral


def test_hamiltonian_and_integral_commute(hamiltonian, integral):
    assert commutator(hamiltonian, integral).is_zero()


def test_first_row_of_integral_vanishes(integral):
    sym = integral.symbol()
    assert all(sym.get((0, j), Polynomial.zero(TAU)).is_zero() for j in range(4))
    assert integral.first_order()[0].is_zero()


def test_operators_have_polynomial_coefficients(hamiltonian, integral):
    assert hamiltonian.is_polynomial() and integral.is_polynomial()
    assert hamiltonian.order == 2 and integral.order == 2
