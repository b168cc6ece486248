"""Flag bases, triangular spectra, eigenfunctions and the integral's eigenvalues."""
from itertools import product

import pytest
import sympy
from gmpy2 import mpq

from h4algebra.field import ExactScalar
from h4algebra.invariants import FLAG_FULL, FLAG_MIN, flag_monomials, weighted_degree
from h4algebra.operators import DiffOperator
from h4algebra.poly import TAU, Polynomial
from h4algebra.reference import entry_polynomial, eigenfunction_entries, gamma_printed
from h4algebra.spectral import (
    NotInvariantSubspace,
    degeneracy,
    eigen_residual,
    eigenfunctions,
    flag_basis,
    gamma_closed_form,
    is_upper_triangular,
    joint_eigenfunctions,
    laguerre_family,
    matrix_on_basis,
    oscillator_levels,
    spectrum,
)

NU = mpq(1, 3)


def test_degeneracy_matches_enumeration():
    for n in range(32):
        brute = sum(1 for e in product(range(32), range(6), range(4), range(3))
                    if weighted_degree(e, FLAG_FULL) == n)
        assert degeneracy(n) == brute
    assert oscillator_levels(12)[6] == 2 and oscillator_levels(12)[10] == 3 and oscillator_levels(12)[12] == 4


def test_symbolic_spectrum_on_minimal_flag(hamiltonian):
    res = spectrum(hamiltonian, flag_basis(FLAG_MIN, 12), scale=-2)
    omega = Polynomial.var(TAU, "omega")
    expected: dict[str, int] = {}
    for m in flag_monomials(FLAG_MIN, 12):
        key = omega.scale(2 * weighted_degree(m, FLAG_FULL)).to_text()
        expected[key] = expected.get(key, 0) + 1
    assert res.as_multiset() == expected


def test_level_zero_has_single_zero_eigenvalue(hamiltonian):
    res = spectrum(hamiltonian, flag_basis(FLAG_MIN, 0), scale=-2)
    assert res.eigenvalues == [Polynomial.zero(TAU)] and res.multiplicities == [1]


@pytest.mark.parametrize("weights", [FLAG_MIN, FLAG_FULL])
def test_hamiltonian_matrix_is_upper_triangular(hamiltonian, weights):
    assert is_upper_triangular(matrix_on_basis(hamiltonian, flag_basis(weights, 12)))


def test_flag_violation_is_reported():
    with pytest.raises(NotInvariantSubspace):
        matrix_on_basis(DiffOperator.multiplication(Polynomial.var(TAU, "t2")), flag_basis(FLAG_MIN, 5))


@pytest.mark.parametrize("n", range(8))
def test_laguerre_family_matches_sympy(n):
    nu, omega, t1 = sympy.symbols("nu omega t1")
    expected = sympy.expand(sympy.assoc_laguerre(n, 1 + 60 * nu, omega * t1))
    phi, eps = laguerre_family(n)
    got = sympy.sympify(phi.to_text())
    assert sympy.expand(got - expected) == 0
    assert eps == Polynomial.from_text(TAU, f"{2 * n}*omega")


@pytest.mark.parametrize("n", range(13))
def test_laguerre_family_is_joint_eigenfunction(hamiltonian, integral, n):
    phi, eps = laguerre_family(n)
    assert eigen_residual(hamiltonian, phi, eps, -2).is_zero()
    assert integral.apply(phi).is_zero()


def _diagonal_gamma(integral, mono, nu):
    image = integral.specialize({"nu": nu}).apply(Polynomial.monomial(TAU, mono + (0, 0)))
    return image.coefficient(mono + (0, 0))


@pytest.mark.parametrize("nu", [NU, mpq(2, 7)])
def test_gamma_formula_with_doubled_cross_terms(integral, nu):
    for mono in flag_monomials(FLAG_FULL, 31):
        k = mono[1:]
        assert _diagonal_gamma(integral, mono, nu) == gamma_closed_form(*k, nu)


def test_printed_gamma_formula_differs_only_for_mixed_quantum_numbers(integral):
    for mono in flag_monomials(FLAG_FULL, 31):
        k = mono[1:]
        mixed = sum(1 for v in k if v) > 1
        assert (gamma_printed(*k, NU) == _diagonal_gamma(integral, mono, NU)) == (not mixed)


def test_gamma_values_at_low_levels():
    assert [gamma_closed_form(*k, NU) for k in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0))] == [324, 620, 1080, 792]
    assert gamma_closed_form(1, 1, 0, 0) == 544


def _entry(family, name):
    return next(e for e in eigenfunction_entries(family) if e["name"] == name)


def test_repaired_fifth_level_state_mixes_joint_states():
    # 2(7+60nu) phi_5_1 - omega^6 N is a multiple of L_6(omega t1), N the repaired joint numerator
    phi = entry_polynomial(_entry("minimal_flag", "phi_5_1")["corrected_phi"])
    num = entry_polynomial(_entry("joint", "tilde_phi_6_1")["corrected_phi_numerator"])
    lag, _ = laguerre_family(6)
    diff = phi * Polynomial.from_text(TAU, "2*(7+60*nu)") - num * Polynomial.from_text(TAU, "omega^6")
    t1_6 = (6, 0, 0, 0)
    lead_diff = diff.coefficients_in(TAU.variables)[t1_6]
    lead_lag = lag.coefficients_in(TAU.variables)[t1_6]
    assert diff * lead_lag == lag * lead_diff
    assert lead_diff * Polynomial.from_text(TAU, "omega^6") == lead_lag * Polynomial.from_text(
        TAU, "720*(1+10*nu)*omega^6")


def test_solver_eigenvectors_on_minimal_flag(hamiltonian):
    res = eigenfunctions(hamiltonian, flag_basis(FLAG_MIN, 5), NU, 1, scale=-2)
    assert res.multiplicities == [1] * 7
    for eps, funcs in zip(res.eigenvalues, res.eigenfunctions):
        assert eigen_residual(hamiltonian.specialize({"nu": NU, "omega": 1}), funcs[0],
                              Polynomial.constant(TAU, eps), -2).is_zero()


def test_joint_eigenfunctions_at_level_six(hamiltonian, integral):
    res = joint_eigenfunctions(hamiltonian, integral, flag_basis(FLAG_FULL, 6), NU, 1)
    assert (ExactScalar(12), ExactScalar(12 * (7 + 60 * NU))) in res.labels
    assert res.dimension == 8
