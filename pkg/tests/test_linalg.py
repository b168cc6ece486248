"""Exact linear algebra: rref, fraction-free elimination and the modular rank certificate."""
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from h4algebra.field import ExactScalar
from h4algebra.linalg import (
    SingularSystem,
    nullspace,
    rank,
    rank_fraction_free,
    rank_modular,
    rank_rational,
    solve,
    solve_fraction_free,
    solve_rational,
)

entries = st.builds(ExactScalar, st.integers(-5, 5), st.integers(-2, 2))
rational_entries = st.builds(ExactScalar, st.integers(-6, 6))


def matrices(elements, max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(lambda r: st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(elements, min_size=c, max_size=c), min_size=r, max_size=r)))


def to_sympy(m):
    return sympy.Matrix([[sympy.Rational(str(v.a)) + sympy.Rational(str(v.b)) * sympy.sqrt(5) for v in row]
                         for row in m])


@settings(max_examples=60)
@given(matrices(entries))
def test_ranks_agree_with_sympy(m):
    r = to_sympy(m).rank(simplify=True)
    assert rank(m) == r
    assert rank_fraction_free(m) == r
    assert rank_modular(m) <= r


@settings(max_examples=60)
@given(matrices(rational_entries))
def test_rational_rank(m):
    assert rank_rational([[v.a for v in row] for row in m]) == rank(m)


@settings(max_examples=60)
@given(matrices(entries))
def test_nullspace_vectors_are_annihilated(m):
    ncols = len(m[0])
    basis = nullspace(m, ncols)
    assert len(basis) == ncols - rank(m)
    for v in basis:
        assert all(sum((a * b for a, b in zip(row, v)), ExactScalar(0)) == 0 for row in m)


@settings(max_examples=60)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n + 2, max_size=n + 2),
    st.lists(entries, min_size=n, max_size=n))))
def test_fraction_free_solve_matches_rref_solve(data):
    a, x = data
    b = [sum((ai * xi for ai, xi in zip(row, x)), ExactScalar(0)) for row in a]
    try:
        expected = solve(a, b)
    except SingularSystem:
        with pytest.raises(SingularSystem):
            solve_fraction_free(a, b)
        return
    assert expected == x
    assert solve_fraction_free(a, b) == x


def test_rational_solve():
    a = [[2, 1], [1, 3], [1, 1]]
    b = [3, 4, 2]
    assert solve_rational(a, b) == [1, 1]


def test_inconsistent_system_raises():
    with pytest.raises(SingularSystem):
        solve([[ExactScalar(1)], [ExactScalar(1)]], [ExactScalar(1), ExactScalar(2)])
    with pytest.raises(SingularSystem):
        solve_fraction_free([[ExactScalar(1)], [ExactScalar(1)]], [ExactScalar(1), ExactScalar(2)])


def test_irrational_solution():
    s5 = ExactScalar(0, 1)
    a = [[ExactScalar(1), s5], [s5, ExactScalar(2)]]
    x = [ExactScalar(1, 1), ExactScalar(-2, 3)]
    b = [sum((ai * xi for ai, xi in zip(row, x)), ExactScalar(0)) for row in a]
    assert solve_fraction_free(a, b) == x
