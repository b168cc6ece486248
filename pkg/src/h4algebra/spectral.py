"""Exact spectra of triangular operators on flag spaces of τ-monomials.

A flag space ``P_n^(v)`` is spanned by the monomials ``t^p`` with
``sum p_i v_i <= n``.  Both gauge-rotated operators map each such space to
itself and are upper triangular in the :class:`FlagBasis` order, so
eigenvalues sit on the diagonal and eigenvectors come from exact Gaussian
elimination once the parameters are set to rationals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .field import ExactScalar, as_scalar
from .invariants import flag_monomials, weighted_degree
from .linalg import nullspace, rref
from .operators import DiffOperator
from .poly import TAU, Polynomial
from .symmetric import laguerre

__all__ = [
    "DefectiveMatrix",
    "FlagBasis",
    "NotInvariantSubspace",
    "SpectralResult",
    "check_triangular",
    "degeneracy",
    "eigenfunctions",
    "flag_basis",
    "gamma_closed_form",
    "joint_eigenfunctions",
    "laguerre_family",
    "matrix_on_basis",
    "oscillator_levels",
    "spectrum",
]

DEFAULT_NU = mpq(1, 3)
DEFAULT_OMEGA = mpq(1)
OSCILLATOR_WEIGHTS = (1, 6, 10, 15)


class NotInvariantSubspace(ValueError):
    """The operator maps a basis monomial outside the flag space."""


class DefectiveMatrix(ArithmeticError):
    """An eigenvalue has fewer independent eigenvectors than its multiplicity."""


@dataclass(frozen=True)
class FlagBasis:
    """Ordered monomial basis of ``P_n^(weights)``: by weighted degree, then
    decreasing power of ``t1``, then reverse lexicographic."""

    weights: tuple[int, ...]
    level: int
    monomials: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def index(self, exps: Sequence[int]) -> int:
        return self.monomials.index(tuple(exps))

    def polynomial(self, i: int, ctx=TAU) -> Polynomial:
        return Polynomial.monomial(ctx, self.monomials[i] + (0,) * len(ctx.params))

    def degree(self, i: int) -> int:
        return weighted_degree(self.monomials[i], self.weights)

    def combine(self, coeffs: Sequence, ctx=TAU) -> Polynomial:
        """``sum c_i * basis_i`` with scalar coefficients."""
        npar = len(ctx.params)
        return Polynomial(ctx, {m + (0,) * npar: c for m, c in zip(self.monomials, coeffs) if c})


def flag_basis(weights: Sequence[int], n: int) -> FlagBasis:
    if n < 0:
        raise ValueError("level must be nonnegative")
    weights = tuple(weights)
    return FlagBasis(weights, n, tuple(flag_monomials(weights, n)))


Matrix = list[list[Polynomial]]


def matrix_on_basis(op: DiffOperator, basis: FlagBasis, allow_outside: bool = False) -> Matrix:
    """``M[i][j]`` = coefficient of basis monomial ``i`` in ``op(basis_j)``.

    Entries are polynomials in the parameters only.  A term outside the
    space raises :class:`NotInvariantSubspace` unless ``allow_outside``, in
    which case it is dropped.
    """
    if op.ctx != TAU:
        raise ValueError("expected an operator in the τ context")
    pos = {m: i for i, m in enumerate(basis.monomials)}
    size = basis.dimension
    zero = Polynomial.zero(TAU)
    mat = [[zero] * size for _ in range(size)]
    for j in range(size):
        image = op.apply(basis.polynomial(j))
        for exps, coeff in image.coefficients_in(TAU.variables).items():
            i = pos.get(exps)
            if i is None:
                if allow_outside:
                    continue
                raise NotInvariantSubspace(
                    f"{_monomial_label(basis.monomials[j])} maps to {_monomial_label(exps)} outside P_{basis.level}{basis.weights}")
            mat[i][j] = coeff
    return mat


def _monomial_label(exps: Sequence[int]) -> str:
    parts = [f"t{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
    return "*".join(parts) or "1"


def check_triangular(matrix: Matrix, basis: FlagBasis) -> bool:
    """True iff no entry maps a monomial to one of higher weighted degree."""
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            if v and basis.degree(i) > basis.degree(j):
                return False
    return True


def is_upper_triangular(matrix: Sequence[Sequence]) -> bool:
    return all(not matrix[i][j] for i in range(len(matrix)) for j in range(i))


@dataclass
class SpectralResult:
    """Distinct eigenvalues with multiplicities, and optional eigenfunctions.

    For joint problems ``labels`` holds ``(epsilon, gamma)`` per eigenfunction.
    """

    eigenvalues: list
    multiplicities: list[int]
    eigenfunctions: list[list[Polynomial]] = field(default_factory=list)
    labels: list[tuple] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)

    def as_multiset(self) -> dict:
        return {_key(e): m for e, m in zip(self.eigenvalues, self.multiplicities)}

    def to_json(self) -> list[dict]:
        rows = []
        for k, (e, m) in enumerate(zip(self.eigenvalues, self.multiplicities)):
            row = {"eigenvalue": _text(e), "multiplicity": m}
            if self.eigenfunctions:
                row["eigenfunctions"] = [p.to_text() for p in self.eigenfunctions[k]]
            rows.append(row)
        if self.labels:
            for row, lab in zip(rows, self._labels_by_eigenvalue()):
                row["gamma"] = [_text(g) for g in lab]
        return rows

    def _labels_by_eigenvalue(self) -> list[list]:
        grouped = []
        for e in self.eigenvalues:
            grouped.append([g for (eps, g) in self.labels if eps == e])
        return grouped


def _text(v) -> str:
    return v.to_text() if isinstance(v, Polynomial) else str(v)


def _key(v):
    return v.to_text() if isinstance(v, Polynomial) else v


def _group(values: Sequence) -> tuple[list, list[int]]:
    distinct: list = []
    counts: list[int] = []
    for v in values:
        for k, d in enumerate(distinct):
            if d == v:
                counts[k] += 1
                break
        else:
            distinct.append(v)
            counts.append(1)
    return distinct, counts


def spectrum(op: DiffOperator, basis: FlagBasis, scale=1) -> SpectralResult:
    """Eigenvalues ``lambda`` of ``op phi = scale * lambda * phi`` read off the diagonal.

    Use ``scale=-2`` for the Hamiltonian convention ``h phi = -2 eps phi``.
    Works with symbolic parameters.
    """
    mat = matrix_on_basis(op, basis)
    if not is_upper_triangular(mat):
        raise ValueError("matrix is not upper triangular in the flag order")
    inv = as_scalar(scale).inverse()
    diag = [mat[i][i].scale(inv) for i in range(basis.dimension)]
    values, counts = _group(diag)
    return SpectralResult(values, counts)


def degeneracy(n: int, weights: Sequence[int] = OSCILLATOR_WEIGHTS) -> int:
    """Number of nonnegative solutions of ``sum n_i w_i = n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return len(flag_monomials(tuple(weights), n, exact=True))


def oscillator_levels(max_level: int, weights: Sequence[int] = OSCILLATOR_WEIGHTS) -> dict[int, int]:
    """``{n: degeneracy(n)}`` for ``n <= max_level``."""
    return {n: degeneracy(n, weights) for n in range(max_level + 1)}


# -- eigenvectors -------------------------------------------------------------------

def _numeric(op: DiffOperator, nu, omega) -> DiffOperator:
    return op.specialize({"nu": as_scalar(nu), "omega": as_scalar(omega)})


def _scalar_matrix(mat: Matrix) -> list[list[ExactScalar]]:
    out = []
    for row in mat:
        r = []
        for p in row:
            if not p.is_constant():
                raise ValueError("matrix still depends on parameters")
            r.append(p.constant_value())
        out.append(r)
    return out


def _graded_echelon(vectors: list[list[ExactScalar]]) -> list[list[ExactScalar]]:
    """Echelon form pivoting on the last nonzero entry (graded-leading monomial).

    Each returned vector has coefficient 1 on its leading monomial and 0 on
    the leading monomials of the others; sorted by leading position.
    """
    if not vectors:
        return []
    rev = [v[::-1] for v in vectors]
    red, pivots = rref(rev)
    out = [row[::-1] for row in red[:len(pivots)]]
    return sorted(out, key=_leading)


def _leading(v: Sequence) -> int:
    return max(i for i, c in enumerate(v) if c)


def _eigenspace(mat: list[list[ExactScalar]], lam: ExactScalar, expected: int) -> list[list[ExactScalar]]:
    size = len(mat)
    shifted = [[mat[i][j] - (lam if i == j else 0) for j in range(size)] for i in range(size)]
    vecs = nullspace(shifted, size)
    if len(vecs) != expected:
        raise DefectiveMatrix(f"eigenvalue {lam}: {len(vecs)} eigenvectors for multiplicity {expected}")
    return _graded_echelon(vecs)


def eigenfunctions(op: DiffOperator, basis: FlagBasis, nu=DEFAULT_NU, omega=DEFAULT_OMEGA,
                   scale=1) -> SpectralResult:
    """Exact eigenfunctions at rational ``nu``, ``omega``, one echelon basis per eigenvalue."""
    mat = _scalar_matrix(matrix_on_basis(_numeric(op, nu, omega), basis))
    if not is_upper_triangular(mat):
        raise ValueError("matrix is not upper triangular in the flag order")
    inv = as_scalar(scale).inverse()
    values, counts = _group([mat[i][i] for i in range(len(mat))])
    funcs = []
    for lam, m in zip(values, counts):
        funcs.append([basis.combine(v) for v in _eigenspace(mat, lam, m)])
    return SpectralResult([v * inv for v in values], counts, funcs)


def joint_eigenfunctions(h: DiffOperator, f: DiffOperator, basis: FlagBasis, nu=DEFAULT_NU,
                         omega=DEFAULT_OMEGA, h_scale=-2, f_scale=1) -> SpectralResult:
    """Common eigenfunctions of two commuting triangular operators.

    ``f`` is diagonalized inside each eigenspace of ``h``; ``labels`` pairs
    each eigenfunction with ``(epsilon, gamma)``.
    """
    hm = _scalar_matrix(matrix_on_basis(_numeric(h, nu, omega), basis))
    fm = _scalar_matrix(matrix_on_basis(_numeric(f, nu, omega), basis))
    size = len(hm)
    h_inv = as_scalar(h_scale).inverse()
    f_inv = as_scalar(f_scale).inverse()
    values, counts = _group([hm[i][i] for i in range(size)])
    eigvals, mults, funcs, labels = [], [], [], []
    for lam, m in zip(values, counts):
        space = _eigenspace(hm, lam, m)
        leads = [_leading(v) for v in space]
        # f restricted to the eigenspace, in coordinates read at the leading positions
        images = [[sum((fm[i][j] * v[j] for j in range(size) if v[j]), ExactScalar(0)) for i in range(size)]
                  for v in space]
        k = len(space)
        restricted = [[images[c][leads[r]] for c in range(k)] for r in range(k)]
        for c in range(k):
            recon = [sum((restricted[r][c] * space[r][i] for r in range(k)), ExactScalar(0)) for i in range(size)]
            if recon != images[c]:
                raise ValueError("second operator does not preserve the eigenspace")
        if not is_upper_triangular(restricted):
            raise ValueError("restricted matrix is not triangular")
        g_values, g_counts = _group([restricted[i][i] for i in range(k)])
        block_funcs = []
        for g, gm in zip(g_values, g_counts):
            sub = _eigenspace(restricted, g, gm)
            for w in sub:
                vec = [sum((w[r] * space[r][i] for r in range(k)), ExactScalar(0)) for i in range(size)]
                lead = vec[_leading(vec)]
                vec = [c / lead for c in vec]
                block_funcs.append(basis.combine(vec))
                labels.append((lam * h_inv, g * f_inv))
        eigvals.append(lam * h_inv)
        mults.append(m)
        funcs.append(block_funcs)
    return SpectralResult(eigvals, mults, funcs, labels)


def gamma_closed_form(k2: int, k3: int, k4: int, nu, cross: Sequence[int] = (240, 360, 600)) -> ExactScalar:
    """Eigenvalue of the gauge-rotated integral at quantum numbers ``(k2, k3, k4)``.

    ``72 k2^2 + 200 k3^2 + 450 k4^2 + c23 k2 k3 + c24 k2 k4 + c34 k3 k4
    + 2 (1 + 60 nu) (6 k2 + 10 k3 + 15 k4)``, with the cross coefficients
    given by ``cross``.
    """
    nu = as_scalar(nu)
    c23, c24, c34 = cross
    quad = 72 * k2 ** 2 + 200 * k3 ** 2 + 450 * k4 ** 2 + c23 * k2 * k3 + c24 * k2 * k4 + c34 * k3 * k4
    return ExactScalar(quad) + (nu * 60 + 1) * (2 * (6 * k2 + 10 * k3 + 15 * k4))


def laguerre_family(n1: int, ctx=TAU) -> tuple[Polynomial, Polynomial]:
    """``(L_n1^(1+60 nu)(omega t1), 2 omega n1)``."""
    if n1 < 0:
        raise ValueError("n1 must be nonnegative")
    nu = Polynomial.var(ctx, "nu")
    om = Polynomial.var(ctx, "omega")
    t1 = Polynomial.var(ctx, ctx.variables[0])
    return laguerre(n1, nu * 60 + 1, om * t1), om * (2 * n1)


def eigen_residual(op: DiffOperator, phi: Polynomial, value: Polynomial, scale=1) -> Polynomial:
    """``op(phi) - scale * value * phi`` (zero for an eigenfunction)."""
    return op.apply(phi) - phi * value.scale(as_scalar(scale))

