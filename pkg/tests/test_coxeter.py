"""The H4 reflection group: roots, reflections, simple roots and orbits."""
import pytest
from hypothesis import given, settings, strategies as st

from h4algebra.coxeter import (
    ORBIT_LENGTHS,
    WEIGHTS,
    GroupTooLarge,
    LinearForm,
    RootSystemH4,
    generate_group,
    reflection,
    roots_from_delta_factors,
    verify_invariance,
)
from h4algebra.field import ExactScalar
from h4algebra.poly import X, Polynomial


@pytest.fixture(scope="module")
def system():
    return RootSystemH4.build()


@pytest.fixture(scope="module")
def group(system):
    return generate_group([reflection(r) for r in system.simple_roots])


def test_sixty_pairwise_non_proportional_roots():
    roots = roots_from_delta_factors()
    assert len(roots) == 60
    assert len({r.direction_key() for r in roots}) == 60


def test_root_set_closed_under_reflections():
    roots = roots_from_delta_factors()
    keys = {r.direction_key() for r in roots}
    for r in roots:
        s = reflection(r)
        assert {LinearForm(s.apply(q.coeffs)).direction_key() for q in roots} == keys


def test_reflections_are_orthogonal_involutions():
    for r in roots_from_delta_factors()[::7]:
        s = reflection(r)
        assert s.is_orthogonal()
        assert s.determinant() == -1
        assert s @ s == type(s).identity()
        assert s.apply(r.coeffs) == tuple(-c for c in r.coeffs)


def test_simple_roots_form_h4_diagram(system):
    assert len(system.simple_roots) == 4
    assert system.is_h4_chain()
    assert all(r.norm2() == 4 for r in system.simple_roots)


def test_simple_roots_are_dual_to_weights(system):
    ws = list(WEIGHTS.values())
    for j, r in enumerate(system.simple_roots):
        for i, w in enumerate(ws):
            assert ExactScalar(2) * r.dot(w) / r.norm2() == int(i == j)


def test_group_order(group):
    assert len(group) == 14400


def test_orbit_lengths(group):
    assert [len(group.orbit(w)) for w in WEIGHTS.values()] == list(ORBIT_LENGTHS.values())


def test_group_contains_every_root_reflection(group):
    for r in roots_from_delta_factors():
        assert reflection(r) in group


def test_bent_root_overflows():
    roots = list(RootSystemH4.build().simple_roots)
    bent = list(roots[-1].coeffs)
    bent[0] = bent[0] + ExactScalar("1/7")
    roots[-1] = LinearForm(bent)
    with pytest.raises(GroupTooLarge):
        generate_group([reflection(r) for r in roots])


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_radius_is_invariant_and_linear_forms_are_not(v):
    r2 = Polynomial.from_text(X, "x1^2 + x2^2 + x3^2 + x4^2")
    assert verify_invariance(r2)
    if any(v):
        assert not verify_invariance(Polynomial.linear(X, v))


def test_zero_form_rejected():
    with pytest.raises(ValueError):
        LinearForm([0, 0, 0, 0])
