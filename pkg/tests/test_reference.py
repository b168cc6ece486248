"""Embedded reference data: shape and internal consistency."""
from h4algebra.invariants import EXPLICIT_TABLES
from h4algebra.poly import TAU, Polynomial
from h4algebra.reference import (
    REFERENCE_VERSION,
    boundary_reference,
    eigenfunction_entries,
    entry_polynomial,
    load_reference,
    operator_entries,
    orbit_parameters,
)


def test_version():
    assert load_reference()["version"] == REFERENCE_VERSION


def test_boundary_polynomial_and_anchors():
    poly = boundary_reference()
    anchors = load_reference()["boundary"]["anchors"]
    assert len(poly) == load_reference()["boundary"]["terms"] == 38
    for name, value in anchors.items():
        var, power = name.split("^")
        assert poly.coefficient({var: int(power)}) == value


def test_boundary_is_weighted_homogeneous():
    weights = (1, 6, 10, 15)
    assert {sum(w * e for w, e in zip(weights, exps)) for exps, _ in boundary_reference().terms()} == {60}


def test_operator_entry_counts():
    for kind in ("hamiltonian", "integral"):
        second, first = operator_entries(kind)
        assert len(second) == 10 and len(first) == 4


def test_seven_orbit_parameters():
    params = orbit_parameters()
    assert len(params) == 7 and params[0] == -1


def test_printed_tables_differ_only_in_degree_thirty():
    printed = load_reference()["tau_printed"]
    for key, value in EXPLICIT_TABLES.items():
        same = printed[key] == value
        assert same == (not key.startswith("tau4_") or key == "tau4_alt_factor"), key


def test_repaired_entries_differ_in_one_term():
    for family in ("minimal_flag", "joint"):
        for e in eigenfunction_entries(family):
            if "corrected_phi" in e:
                diff = entry_polynomial(e["phi"]) - entry_polynomial(e["corrected_phi"])
            elif "corrected_phi_numerator" in e:
                diff = entry_polynomial(e["phi_numerator"]) - entry_polynomial(e["corrected_phi_numerator"])
            else:
                continue
            expected = 2 if family == "minimal_flag" else 1  # t1^4 -> t1^3, or the t2 coefficient
            assert len(diff.coefficients_in(TAU.variables)) == expected


def test_eigenvalue_labels_are_polynomials():
    for family in ("minimal_flag", "joint"):
        for e in eigenfunction_entries(family):
            assert isinstance(Polynomial.from_text(TAU, e["epsilon"]), Polynomial)
