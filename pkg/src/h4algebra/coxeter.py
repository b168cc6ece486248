"""The H4 root system, its reflection group and weight orbits.

Group elements have entries in ``(Z + Z*sqrt5)/den``; they are stored as a
pair of integer 4x4 arrays ``(A, B)`` with a shared denominator so that the
closure and orbit computations run as batched integer matrix products.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from .field import PHI_MINUS, PHI_PLUS, ExactScalar, as_scalar
from .poly import X, Polynomial

__all__ = [
    "CoxeterGroup",
    "GroupElement",
    "GroupTooLarge",
    "LinearForm",
    "RootSystemH4",
    "WEIGHTS",
    "generate_group",
    "orbit",
    "reflection",
    "roots_from_delta_factors",
    "verify_invariance",
]


class GroupTooLarge(RuntimeError):
    """Closure exceeded its safety bound or left the coefficient lattice."""


def _vec(values: Iterable) -> tuple[ExactScalar, ...]:
    return tuple(as_scalar(v) for v in values)


@dataclass(frozen=True)
class LinearForm:
    """``l(x) = c . x`` with ``c`` a 4-vector over Q(sqrt5)."""

    coeffs: tuple[ExactScalar, ...]

    def __init__(self, coeffs: Iterable):
        c = _vec(coeffs)
        if len(c) != 4:
            raise ValueError("a linear form needs 4 coefficients")
        if all(v.is_zero() for v in c):
            raise ValueError("linear form must be nonzero")
        object.__setattr__(self, "coeffs", c)

    def dot(self, v: Sequence) -> ExactScalar:
        return sum((a * as_scalar(b) for a, b in zip(self.coeffs, v)), ExactScalar(0))

    def norm2(self) -> ExactScalar:
        return self.dot(self.coeffs)

    def __neg__(self):
        return LinearForm(-c for c in self.coeffs)

    def direction_key(self) -> tuple:
        """Key shared by exactly the nonzero multiples of this form."""
        lead = next(c for c in self.coeffs if c)
        inv = lead.inverse()
        return tuple(c * inv for c in self.coeffs)

    def is_proportional(self, other: LinearForm) -> bool:
        return self.direction_key() == other.direction_key()

    def as_polynomial(self, ctx=X) -> Polynomial:
        return Polynomial.linear(ctx, self.coeffs)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def _to_int_pair(m: Sequence[Sequence[ExactScalar]]) -> tuple[np.ndarray, np.ndarray, int]:
    den = 1
    for row in m:
        for v in row:
            den = lcm(den, int(v.a.denominator), int(v.b.denominator))
    a = np.array([[int(v.a * den) for v in row] for row in m], dtype=np.int64)
    b = np.array([[int(v.b * den) for v in row] for row in m], dtype=np.int64)
    return a, b, den


class GroupElement:
    """4x4 matrix over Q(sqrt5) stored as ``(A + sqrt5*B) / den``."""

    __slots__ = ("a", "b", "den", "_key")

    def __init__(self, a: np.ndarray, b: np.ndarray, den: int):
        g = gcd(den, *map(int, a.ravel()), *map(int, b.ravel()))
        if g > 1:
            a, b, den = a // g, b // g, den // g
        self.a = np.ascontiguousarray(a, dtype=np.int64)
        self.b = np.ascontiguousarray(b, dtype=np.int64)
        self.den = int(den)
        self._key = None

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence]) -> GroupElement:
        rows = [[as_scalar(v) for v in row] for row in m]
        return cls(*_to_int_pair(rows))

    @classmethod
    def identity(cls) -> GroupElement:
        return cls(np.eye(4, dtype=np.int64), np.zeros((4, 4), dtype=np.int64), 1)

    def matrix(self) -> list[list[ExactScalar]]:
        return [[ExactScalar(mpq(int(self.a[i, j]), self.den), mpq(int(self.b[i, j]), self.den))
                 for j in range(4)] for i in range(4)]

    def key(self) -> bytes:
        """Canonical serialization used for deduplication."""
        if self._key is None:
            self._key = self.den.to_bytes(8, "little") + self.a.tobytes() + self.b.tobytes()
        return self._key

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __matmul__(self, other: GroupElement) -> GroupElement:
        a = self.a @ other.a + 5 * (self.b @ other.b)
        b = self.a @ other.b + self.b @ other.a
        return GroupElement(a, b, self.den * other.den)

    def transpose(self) -> GroupElement:
        return GroupElement(self.a.T.copy(), self.b.T.copy(), self.den)

    def apply(self, v: Sequence) -> tuple[ExactScalar, ...]:
        m = self.matrix()
        v = _vec(v)
        return tuple(sum((m[i][j] * v[j] for j in range(4)), ExactScalar(0)) for i in range(4))

    def is_orthogonal(self) -> bool:
        return (self.transpose() @ self) == GroupElement.identity()

    def determinant(self) -> ExactScalar:
        m = self.matrix()
        det = ExactScalar(1)
        a = [row[:] for row in m]
        for c in range(4):
            p = next((r for r in range(c, 4) if a[r][c]), None)
            if p is None:
                return ExactScalar(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            det = det * a[c][c]
            inv = a[c][c].inverse()
            for r in range(c + 1, 4):
                f = a[r][c] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def substitution(self, ctx=X) -> dict[str, Polynomial]:
        """Images ``x_i -> sum_j M_ij x_j`` for composing a polynomial with this map."""
        m = self.matrix()
        return {ctx.variables[i]: Polynomial.linear(ctx, m[i]) for i in range(4)}

    def __repr__(self):
        return "GroupElement(" + str([[str(v) for v in row] for row in self.matrix()]) + ")"


def reflection(alpha: LinearForm | Sequence) -> GroupElement:
    """``s(x) = x - 2 (alpha.x)/(alpha.alpha) alpha`` as a matrix."""
    if not isinstance(alpha, LinearForm):
        alpha = LinearForm(alpha)
    c = alpha.coeffs
    f = ExactScalar(2) / alpha.norm2()
    m = [[ExactScalar(int(i == j)) - f * c[i] * c[j] for j in range(4)] for i in range(4)]
    return GroupElement.from_matrix(m)


def roots_from_delta_factors() -> list[LinearForm]:
    """The 60 linear factors of the ground-state prefactor, in a fixed order.

    Four coordinate forms, eight forms ``x1 +- x2 +- x3 +- x4`` and 48 forms
    ``x_i +- phi_plus x_j +- phi_minus x_k`` over the even permutations
    ``(i, j, k, l)`` of ``(1, 2, 3, 4)``.
    """
    roots = []
    for k in range(4):
        roots.append(LinearForm([int(i == k) for i in range(4)]))
    for s2, s3, s4 in product((1, -1), repeat=3):
        roots.append(LinearForm([1, s2, s3, s4]))
    for perm in _even_permutations(4):
        i, j, k, _ = perm
        for s1, s2 in product((1, -1), repeat=2):
            c = [ExactScalar(0)] * 4
            c[i] = ExactScalar(1)
            c[j] = PHI_PLUS * s1
            c[k] = PHI_MINUS * s2
            roots.append(LinearForm(c))
    return roots


def _even_permutations(n: int) -> list[tuple[int, ...]]:
    out = []
    for p in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if p[a] > p[b])
        if inversions % 2 == 0:
            out.append(p)
    return out


# fundamental weights as tabulated alongside their orbit lengths
WEIGHTS: dict[str, tuple[ExactScalar, ...]] = {
    "w1": (ExactScalar(0), ExactScalar(0), ExactScalar(0), 2 * PHI_PLUS),
    "w2": (ExactScalar(1), PHI_PLUS ** 2, ExactScalar(0), PHI_PLUS ** 4),
    "w3": (ExactScalar(0), PHI_PLUS, ExactScalar(1), PHI_PLUS ** 4 - 1),
    "w4": (ExactScalar(0), 2 * PHI_PLUS, ExactScalar(0), 2 * PHI_PLUS ** 3),
}
ORBIT_LENGTHS = {"w1": 120, "w2": 600, "w3": 720, "w4": 1200}


def _coxeter_order(a: LinearForm, b: LinearForm) -> int | None:
    """Order of ``s_a s_b`` from the angle between the roots (2, 3 or 5)."""
    c2 = a.dot(b.coeffs) ** 2 / (a.norm2() * b.norm2())
    table = {ExactScalar(0): 2, ExactScalar(mpq(1, 4)): 3,
             ExactScalar(mpq(3, 8), mpq(1, 8)): 5, ExactScalar(mpq(1, 2)): 4,
             ExactScalar(mpq(3, 4)): 6}
    return table.get(c2)


@dataclass
class RootSystemH4:
    """Positive roots, recovered simple roots and fundamental weights."""

    positive_roots: list[LinearForm]
    simple_roots: list[LinearForm] = field(default_factory=list)
    weights: dict = field(default_factory=lambda: dict(WEIGHTS))

    @classmethod
    def build(cls) -> RootSystemH4:
        rs = cls(roots_from_delta_factors())
        rs.simple_roots = rs.simple_roots_for_weights()
        return rs

    def all_roots(self) -> list[LinearForm]:
        return self.positive_roots + [-r for r in self.positive_roots]

    def reflections(self) -> list[GroupElement]:
        return [reflection(r) for r in self.positive_roots]

    def simple_roots_for_weights(self, weights: Sequence | None = None) -> list[LinearForm]:
        """Roots ``alpha_j`` with ``2 (w_i . alpha_j)/(alpha_j . alpha_j) = delta_ij``.

        Roots are taken with the common length of the system (the coordinate
        forms are doubled so every root has squared norm 4) and with the sign
        that makes the pairing positive.  Returns an empty list if some
        ``alpha_j`` does not exist.
        """
        ws = list(weights) if weights is not None else list(self.weights.values())
        simple = []
        for j in range(4):
            found = None
            for r in self.positive_roots:
                if r.norm2() == 1:
                    r = LinearForm([2 * c for c in r.coeffs])
                pair = [ExactScalar(2) * r.dot(w) / r.norm2() for w in ws]
                if pair[j] < 0:
                    r = -r
                    pair = [-p for p in pair]
                if all(p == int(i == j) for i, p in enumerate(pair)):
                    found = r
                    break
            if found is None:
                return []
            simple.append(found)
        return simple

    def coxeter_matrix(self, roots: Sequence[LinearForm] | None = None) -> list[list[int | None]]:
        roots = list(roots if roots is not None else self.simple_roots)
        return [[1 if i == j else _coxeter_order(a, b) for j, b in enumerate(roots)]
                for i, a in enumerate(roots)]

    def is_h4_chain(self, roots: Sequence[LinearForm] | None = None) -> bool:
        """True if the Coxeter diagram is a path with edge labels 5, 3, 3."""
        m = self.coxeter_matrix(roots)
        if len(m) != 4 or any(v is None for row in m for v in row):
            return False
        for order in permutations(range(4)):
            labels = [[m[order[i]][order[j]] for j in range(4)] for i in range(4)]
            if labels == [[1, 5, 2, 2], [5, 1, 3, 2], [2, 3, 1, 3], [2, 2, 3, 1]]:
                return True
        return False


class CoxeterGroup:
    """A finite matrix group stored as stacked integer arrays."""

    def __init__(self, elements: list[GroupElement]):
        if not elements:
            raise ValueError("empty group")
        den = elements[0].den
        for e in elements:
            den = lcm(den, e.den)
        self.den = den
        self.elements = elements
        self._a = np.stack([e.a * (den // e.den) for e in elements])
        self._b = np.stack([e.b * (den // e.den) for e in elements])

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: GroupElement) -> bool:
        if not hasattr(self, "_keys"):
            self._keys = {e.key() for e in self.elements}
        return g.key() in self._keys

    def orbit_raw(self, v: Sequence) -> tuple[np.ndarray, np.ndarray, int]:
        """Distinct images ``(P + sqrt5*Q)/den`` in first-appearance order."""
        v = _vec(v)
        vden = 1
        for c in v:
            vden = lcm(vden, int(c.a.denominator), int(c.b.denominator))
        va = np.array([int(c.a * vden) for c in v], dtype=np.int64)
        vb = np.array([int(c.b * vden) for c in v], dtype=np.int64)
        p = self._a @ va + 5 * (self._b @ vb)
        q = self._a @ vb + self._b @ va
        rows = np.concatenate([p, q], axis=1)
        _, first = np.unique(rows, axis=0, return_index=True)
        first.sort()
        return p[first], q[first], self.den * vden

    def orbit(self, v: Sequence) -> list[tuple[ExactScalar, ...]]:
        p, q, den = self.orbit_raw(v)
        return [tuple(ExactScalar(mpq(int(p[i, k]), den), mpq(int(q[i, k]), den)) for k in range(4))
                for i in range(len(p))]


def generate_group(generators: Sequence[GroupElement], max_size: int = 20000) -> CoxeterGroup:
    """Breadth-first closure of ``generators`` under multiplication.

    New elements are ``g @ h`` for ``h`` in the current frontier and ``g`` in
    generator order, so the element order is deterministic.  Entries must
    stay in ``(Z + Z*sqrt5)/den`` with ``den`` the generators' common
    denominator; leaving that lattice or exceeding ``max_size`` elements
    raises :class:`GroupTooLarge`.
    """
    if not generators:
        return CoxeterGroup([GroupElement.identity()])
    den = 1
    for g in generators:
        den = lcm(den, g.den)
    ga = np.stack([g.a * (den // g.den) for g in generators])
    gb = np.stack([g.b * (den // g.den) for g in generators])
    ident = GroupElement.identity()
    fa = (ident.a * den)[None]
    fb = (ident.b * den)[None]
    seen = {fa[0].tobytes() + fb[0].tobytes()}
    all_a, all_b = [fa], [fb]
    total = 1
    while len(fa):
        na = np.einsum("gij,njk->gnik", ga, fa) + 5 * np.einsum("gij,njk->gnik", gb, fb)
        nb = np.einsum("gij,njk->gnik", ga, fb) + np.einsum("gij,njk->gnik", gb, fa)
        na = na.reshape(-1, 4, 4)
        nb = nb.reshape(-1, 4, 4)
        if np.any(na % den) or np.any(nb % den):
            raise GroupTooLarge("product left the coefficient lattice; generators do not form a finite group here")
        na //= den
        nb //= den
        keep = []
        for i in range(len(na)):
            k = na[i].tobytes() + nb[i].tobytes()
            if k not in seen:
                seen.add(k)
                keep.append(i)
        total += len(keep)
        if total > max_size:
            raise GroupTooLarge(f"closure exceeded {max_size} elements")
        fa, fb = na[keep], nb[keep]
        if len(keep):
            all_a.append(fa)
            all_b.append(fb)
    a = np.concatenate(all_a)
    b = np.concatenate(all_b)
    return CoxeterGroup([GroupElement(a[i], b[i], den) for i in range(len(a))])


def orbit(v: Sequence, group: CoxeterGroup) -> list[tuple[ExactScalar, ...]]:
    return group.orbit(v)


def verify_invariance(p: Polynomial, reflections: Sequence[GroupElement] | None = None) -> bool:
    """True iff ``p(s x) == p(x)`` for every given reflection (default: all 60)."""
    if reflections is None:
        reflections = [reflection(r) for r in roots_from_delta_factors()]
    for s in reflections:
        if p.substitute(s.substitution(p.ctx), p.ctx) != p:
            return False
    return True
