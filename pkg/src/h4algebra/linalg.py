"""Exact Gaussian elimination over Q(sqrt5).

Matrices are lists of rows of :class:`ExactScalar` (ints and fractions are
accepted and coerced).
"""
from __future__ import annotations

from typing import Sequence

from gmpy2 import gcd, mpq, mpz, next_prime

from .field import ExactScalar, as_scalar

__all__ = ["SingularSystem", "identity", "nullspace", "rank", "rank_fraction_free", "rank_modular", "rank_rational", "rref", "solve",
           "solve_fraction_free", "solve_rational"]

Matrix = list[list[ExactScalar]]


class SingularSystem(ArithmeticError):
    """Raised when a linear system has no solution or no unique solution."""


def _copy(m: Sequence[Sequence]) -> Matrix:
    return [[as_scalar(v) for v in row] for row in m]


def identity(n: int) -> Matrix:
    return [[ExactScalar(int(i == j)) for j in range(n)] for i in range(n)]


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivots are taken left to right, using the first nonzero entry in each
    column, so the result is deterministic.
    """
    a = _copy(m)
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = a[r][c].inverse()
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> list[list[ExactScalar]]:
    """Basis of ``{v : m v = 0}``, one vector per free column.

    Each basis vector has a 1 in its free column and zeros in the other
    free columns.
    """
    if not m:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[ExactScalar(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    r, pivots = rref(m)
    cols = len(r[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ExactScalar(0)] * cols
        v[f] = ExactScalar(1)
        for row, pc in zip(r, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[ExactScalar]:
    """Unique solution of ``a x = b`` (overdetermined systems allowed).

    Raises :class:`SingularSystem` if the system is inconsistent or the
    solution is not unique.
    """
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    if not aug:
        raise SingularSystem("empty system")
    ncols = len(aug[0]) - 1
    r, pivots = rref(aug)
    if ncols in pivots:
        raise SingularSystem("inconsistent system")
    if len(pivots) < ncols:
        raise SingularSystem("solution is not unique")
    x = [ExactScalar(0)] * ncols
    for row, pc in zip(r, pivots):
        x[pc] = row[ncols]
    return x


def _integer_row(row: Sequence) -> list:
    """Scale a row of rationals by the lcm of its denominators."""
    qs = [mpq(v) for v in row]
    den = mpz(1)
    for q in qs:
        den = den * q.denominator // gcd(den, q.denominator)
    return [q.numerator * (den // q.denominator) for q in qs]


def _as_rational(v) -> mpq:
    if isinstance(v, ExactScalar):
        if not v.is_rational():
            raise ValueError("irrational entry in a rational system")
        return v.a
    return mpq(v)


def _bareiss(m: list[list]) -> tuple[list[list], list[int]]:
    """Fraction-free row echelon form of an integer matrix, in place."""
    rows, cols = len(m), len(m[0])
    prev = mpz(1)
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, rows):
            f = m[i][c]
            m[i] = [(piv * vi - f * vr) // prev for vi, vr in zip(m[i], m[r])]
        prev = piv
        pivots.append(c)
        r += 1
    return m, pivots


def rank_rational(m: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by fraction-free elimination."""
    if not m:
        return 0
    return len(_bareiss([_integer_row([_as_rational(v) for v in row]) for row in m])[1])


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[mpq]:
    """Unique solution of a rational system by fraction-free (Bareiss) elimination.

    Same contract as :func:`solve` but restricted to rational entries
    (``int``, ``Fraction``, ``mpq`` or rational :class:`ExactScalar`); much
    faster for large entries since no gcd is taken during elimination.
    """
    m = [_integer_row([_as_rational(v) for v in row] + [_as_rational(bv)]) for row, bv in zip(a, b)]
    if not m:
        raise SingularSystem("empty system")
    ncols = len(m[0]) - 1
    m, pivots = _bareiss(m)
    if ncols in pivots:
        raise SingularSystem("inconsistent system")
    if len(pivots) < ncols:
        raise SingularSystem("solution is not unique")
    x = [mpq(0)] * ncols
    for i in range(ncols - 1, -1, -1):
        row = m[i]
        acc = mpq(row[ncols])
        for j in range(i + 1, ncols):
            if row[j]:
                acc -= row[j] * x[j]
        x[i] = acc / row[i]
    return x


def _realify(m: Sequence[Sequence]) -> list[list[mpq]]:
    """The rational ``2r x 2c`` matrix of multiplication by ``m`` over Q(sqrt5).

    With ``m = P + sqrt5 Q`` acting on ``u + sqrt5 w`` the image is
    ``(P u + 5 Q w) + sqrt5 (Q u + P w)``.
    """
    out = []
    ps = [[as_scalar(v) for v in row] for row in m]
    for row in ps:
        out.append([v.a for v in row] + [5 * v.b for v in row])
    for row in ps:
        out.append([v.b for v in row] + [v.a for v in row])
    return out


def _all_rational(values) -> bool:
    return all(as_scalar(v).is_rational() for v in values)


def _sqrt5_prime(start: int = 2 ** 61) -> int:
    """Smallest prime ``p >= start`` with ``p = 3 mod 4`` in which 5 is a square."""
    p = int(next_prime(start - 1))
    while not (p % 4 == 3 and p % 5 in (1, 4)):
        p = int(next_prime(p))
    return p


MODULUS = _sqrt5_prime()
SQRT5_MOD = pow(5, (MODULUS + 1) // 4, MODULUS)


def _reduce(v, p: int, root: int) -> int:
    v = as_scalar(v)
    out = 0
    for q, mult in ((v.a, 1), (v.b, root)):
        if q:
            num, den = int(q.numerator), int(q.denominator)
            if den % p == 0:
                raise ZeroDivisionError("denominator divisible by the modulus")
            out += num * mult * pow(den, -1, p)
    return out % p


def rank_modular(m: Sequence[Sequence], p: int = MODULUS, root: int = SQRT5_MOD) -> int:
    """Rank of the image of ``m`` modulo ``p`` with ``sqrt5 -> root``.

    This is a lower bound for the rank over Q(sqrt5); equality with the
    column count therefore certifies full column rank.
    """
    a = [[_reduce(v, p, root) for v in row] for row in m]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [v * inv % p for v in a[r]]
        for i in range(r + 1, rows):
            f = a[i][c]
            if f:
                a[i] = [(vi - f * vr) % p for vi, vr in zip(a[i], a[r])]
        r += 1
    return r


def rank_fraction_free(m: Sequence[Sequence]) -> int:
    """Rank over Q(sqrt5), computed with integer arithmetic only."""
    if not m:
        return 0
    if _all_rational(v for row in m for v in row):
        return rank_rational(m)
    return rank_rational(_realify(m)) // 2


def solve_fraction_free(a: Sequence[Sequence], b: Sequence) -> list[ExactScalar]:
    """:func:`solve` over Q(sqrt5) using integer arithmetic only.

    When full column rank is certified modulo a prime, a rational solution
    is looked for first (a rational system with the same number of unknowns);
    otherwise, or if no rational solution exists, the equivalent rational
    system of twice the size is solved.
    """
    if not a:
        raise SingularSystem("empty system")
    if _all_rational(v for row in a for v in row) and _all_rational(b):
        return [ExactScalar(x) for x in solve_rational(a, b)]
    n = len(a[0])
    ps = [[as_scalar(v) for v in row] for row in a]
    bs = [as_scalar(v) for v in b]
    if rank_modular(ps) == n:
        stacked = [[v.a for v in row] for row in ps] + [[v.b for v in row] for row in ps]
        try:
            return [ExactScalar(x) for x in solve_rational(stacked, [v.a for v in bs] + [v.b for v in bs])]
        except SingularSystem:
            pass
    x = solve_rational(_realify(ps), [v.a for v in bs] + [v.b for v in bs])
    return [ExactScalar(x[i], x[n + i]) for i in range(n)]
