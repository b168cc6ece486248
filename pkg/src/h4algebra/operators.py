"""Linear differential operators with polynomial coefficients.

Operators in the Cartesian context may also carry rational terms
``numerator / (alpha . x)^k`` attached to a single root (``k`` is 1 or 2).
These are never put over a common denominator: applying one is an exact
division by the root's linear form, so every cancellation is checked.

Second-order coefficients are stored once per multi-index.  In the
symmetric convention ``sum_{i,j} A_ij d_i d_j`` an off-diagonal stored
coefficient equals ``2 * A_ij``; :meth:`DiffOperator.symbol` returns ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Mapping, Sequence

from .coxeter import LinearForm, roots_from_delta_factors
from .field import ExactScalar, as_scalar
from .invariants import TauMap, invariantize, tau_explicit
from .linalg import rref
from .poly import TAU, X, NotDivisible, Polynomial, VariableContext, divide_by_linear_form

__all__ = [
    "DiffOperator",
    "FNotEigen",
    "ModelSpec",
    "NonzeroFreeTerm",
    "PoleSum",
    "RootTerm",
    "apply",
    "build_integral_cartesian",
    "carre_du_champ",
    "commutator",
    "compose",
    "conjugate_by_ground_state",
    "euler_operator",
    "gauge_rotate_hamiltonian",
    "gauge_rotate_integral",
    "ground_state_eigenvalue",
    "integral_from_hamiltonian",
    "pushforward",
]

MultiIndex = tuple[int, ...]


class NonzeroFreeTerm(ArithmeticError):
    """A gauge-rotated operator kept a nonzero zero-order term."""


class FNotEigen(ArithmeticError):
    """The integral does not have the ground state as an eigenfunction."""


def _unit(n: int, i: int) -> MultiIndex:
    return tuple(int(k == i) for k in range(n))


def _add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def _sub_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x - y for x, y in zip(a, b))


def _sorted_indices(ms) -> list[MultiIndex]:
    """Highest order first, then reverse lexicographic."""
    return sorted(ms, key=lambda m: (-sum(m), tuple(-v for v in m)))


def _derivative(p: Polynomial, m: MultiIndex) -> Polynomial:
    for name, k in zip(p.ctx.variables, m):
        if k:
            p = p.diff(name, k)
            if p.is_zero():
                break
    return p


def _sub_indices(m: MultiIndex):
    """All ``k <= m`` componentwise, with the multinomial ``prod binom(m_i, k_i)``."""
    out = [((), 1)]
    for mi in m:
        out = [(k + (ki,), c * comb(mi, ki)) for k, c in out for ki in range(mi + 1)]
    return out


def _clean(terms: Mapping[MultiIndex, Polynomial]) -> dict[MultiIndex, Polynomial]:
    return {m: terms[m] for m in _sorted_indices(terms) if not terms[m].is_zero()}


@dataclass(frozen=True)
class RootTerm:
    """``(1 / (form . x)^power) * sum_m coeffs[m] d^m``."""

    form: LinearForm
    power: int
    coeffs: tuple[tuple[MultiIndex, Polynomial], ...]

    def numerator(self, p: Polynomial) -> Polynomial:
        out = Polynomial.zero(p.ctx)
        for m, c in self.coeffs:
            d = _derivative(p, m)
            if d:
                out = out + c * d
        return out

    def order(self) -> int:
        return max((sum(m) for m, _ in self.coeffs), default=0)


class DiffOperator:
    """``sum_m c_m(v) d^m`` over the main variables of a context, plus
    optional per-root rational terms (Cartesian context only)."""

    __slots__ = ("ctx", "terms", "root_terms")

    def __init__(self, ctx: VariableContext, terms: Mapping[MultiIndex, Polynomial] | None = None,
                 root_terms: Sequence[RootTerm] = ()):
        n = len(ctx.variables)
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != n or any(v < 0 for v in m):
                raise ValueError(f"bad multi-index {m}")
            if not isinstance(c, Polynomial):
                c = Polynomial.constant(ctx, c)
            if c.ctx != ctx:
                raise ValueError("coefficient context mismatch")
            clean[m] = clean[m] + c if m in clean else c
        self.ctx = ctx
        self.terms = _clean(clean)
        self.root_terms = tuple(
            rt for rt in root_terms if any(not c.is_zero() for _, c in rt.coeffs))

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ctx: VariableContext) -> DiffOperator:
        return cls(ctx)

    @classmethod
    def identity(cls, ctx: VariableContext) -> DiffOperator:
        return cls(ctx, {(0,) * len(ctx.variables): Polynomial.constant(ctx, 1)})

    @classmethod
    def multiplication(cls, p: Polynomial) -> DiffOperator:
        return cls(p.ctx, {(0,) * len(p.ctx.variables): p})

    @classmethod
    def partial(cls, ctx: VariableContext, name: str, order: int = 1) -> DiffOperator:
        i = ctx.variables.index(name)
        m = tuple(order if k == i else 0 for k in range(len(ctx.variables)))
        return cls(ctx, {m: Polynomial.constant(ctx, 1)})

    @classmethod
    def from_symbol(cls, ctx: VariableContext, second: Mapping[tuple[int, int], Polynomial],
                    first: Sequence[Polynomial]) -> DiffOperator:
        """Build ``sum_{i,j} A_ij d_i d_j + sum_i B_i d_i`` with ``A`` symmetric.

        ``second`` needs only the entries with ``i <= j``.
        """
        n = len(ctx.variables)
        terms: dict = {}
        for (i, j), a in second.items():
            if i > j:
                i, j = j, i
            m = _add_index(_unit(n, i), _unit(n, j))
            terms[m] = a if i == j else a * 2
        for i, b in enumerate(first):
            terms[_unit(n, i)] = b
        return cls(ctx, terms)

    # -- inspection --------------------------------------------------------
    @property
    def order(self) -> int:
        orders = [sum(m) for m in self.terms] + [rt.order() for rt in self.root_terms]
        return max(orders, default=0)

    def is_polynomial(self) -> bool:
        return not self.root_terms

    def is_zero(self) -> bool:
        return not self.terms and not self.root_terms

    def coefficient(self, m: MultiIndex) -> Polynomial:
        return self.terms.get(tuple(m), Polynomial.zero(self.ctx))

    def free_term(self) -> Polynomial:
        """Polynomial zero-order coefficient (rational root terms excluded)."""
        return self.coefficient((0,) * len(self.ctx.variables))

    def symbol(self) -> dict[tuple[int, int], Polynomial]:
        """``A_ij`` (``i <= j``) in the symmetric convention ``sum_{i,j} A_ij d_i d_j``."""
        n = len(self.ctx.variables)
        out = {}
        for i in range(n):
            for j in range(i, n):
                c = self.coefficient(_add_index(_unit(n, i), _unit(n, j)))
                out[(i, j)] = c if i == j else c / 2
        return out

    def first_order(self) -> list[Polynomial]:
        n = len(self.ctx.variables)
        return [self.coefficient(_unit(n, i)) for i in range(n)]

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if self.ctx != other.ctx or self.terms != other.terms:
            return False
        return _root_terms_key(self.root_terms) == _root_terms_key(other.root_terms)

    def __hash__(self):
        return hash((self.ctx, tuple(self.terms.items())))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: DiffOperator) -> DiffOperator:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if other.ctx != self.ctx:
            raise ValueError("operator context mismatch")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return DiffOperator(self.ctx, terms, self.root_terms + other.root_terms)

    def __neg__(self) -> DiffOperator:
        return self.scale(-1)

    def __sub__(self, other: DiffOperator) -> DiffOperator:
        return self + (-other)

    def scale(self, c) -> DiffOperator:
        """Multiply on the left by a scalar or a polynomial."""
        if isinstance(c, Polynomial):
            mul = lambda p: c * p  # noqa: E731
        else:
            s = as_scalar(c)
            mul = lambda p: p.scale(s)  # noqa: E731
        terms = {m: mul(p) for m, p in self.terms.items()}
        roots = [RootTerm(rt.form, rt.power, tuple((m, mul(p)) for m, p in rt.coeffs))
                 for rt in self.root_terms]
        return DiffOperator(self.ctx, terms, roots)

    def __mul__(self, c) -> DiffOperator:
        return self.scale(c)

    __rmul__ = __mul__

    def map_coefficients(self, fn: Callable[[Polynomial], Polynomial], ctx: VariableContext | None = None) -> DiffOperator:
        ctx = ctx or self.ctx
        return DiffOperator(ctx, {m: fn(c) for m, c in self.terms.items()},
                            [RootTerm(rt.form, rt.power, tuple((m, fn(c)) for m, c in rt.coeffs))
                             for rt in self.root_terms])

    def specialize(self, assignment: Mapping[str, object]) -> DiffOperator:
        """Set parameters (``nu``, ``omega``) to scalar values."""
        return self.map_coefficients(lambda p: p.specialize(assignment))

    # -- action --------------------------------------------------------------
    def apply(self, p: Polynomial) -> Polynomial:
        if p.ctx != self.ctx:
            raise ValueError("polynomial context does not match the operator")
        out = Polynomial.zero(self.ctx)
        for m, c in self.terms.items():
            d = _derivative(p, m)
            if d:
                out = out + c * d
        for rt in self.root_terms:
            num = rt.numerator(p)
            if num.is_zero():
                continue
            form = rt.form.as_polynomial(self.ctx)
            for _ in range(rt.power):
                num = divide_by_linear_form(num, form)
            out = out + num
        return out

    __call__ = apply

    # -- text ------------------------------------------------------------------
    def to_rows(self) -> list[dict]:
        """Canonical term list: one row per multi-index."""
        if self.root_terms:
            raise ValueError("only polynomial operators serialize")
        return [{"derivative": list(m), "coefficient": c.to_text()} for m, c in self.terms.items()]

    @classmethod
    def from_rows(cls, ctx: VariableContext, rows: Sequence[Mapping]) -> DiffOperator:
        return cls(ctx, {tuple(r["derivative"]): Polynomial.from_text(ctx, r["coefficient"]) for r in rows})

    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m, c in self.terms.items():
            d = "*".join(f"d{v}" + (f"^{k}" if k > 1 else "")
                         for v, k in zip(self.ctx.variables, m) if k)
            parts.append(f"({c.to_text()})" + (f"*{d}" if d else ""))
        if self.root_terms:
            parts.append(f"<{len(self.root_terms)} root terms>")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOperator({self.to_text()})"


def _root_terms_key(rts: Sequence[RootTerm]) -> list:
    merged: dict = {}
    for rt in rts:
        for m, c in rt.coeffs:
            k = (rt.form.direction_key(), rt.form.coeffs, rt.power, m)
            merged[k] = merged[k] + c if k in merged else c
    return sorted((repr(k), v.to_text()) for k, v in merged.items() if not v.is_zero())


def apply(op: DiffOperator, p: Polynomial) -> Polynomial:
    return op.apply(p)


def compose(op1: DiffOperator, op2: DiffOperator) -> DiffOperator:
    """``op1 o op2`` by the Leibniz rule (polynomial coefficients only)."""
    if op1.ctx != op2.ctx:
        raise ValueError("operator context mismatch")
    if op1.root_terms or op2.root_terms:
        raise ValueError("compose needs polynomial coefficients")
    terms: dict = {}
    for m, a in op1.terms.items():
        subs = _sub_indices(m)
        for n_, b in op2.terms.items():
            for k, mult in subs:
                db = _derivative(b, k)
                if db.is_zero():
                    continue
                idx = _add_index(_sub_index(m, k), n_)
                t = (a * db).scale(mult) if mult != 1 else a * db
                terms[idx] = terms[idx] + t if idx in terms else t
    return DiffOperator(op1.ctx, terms)


def commutator(op1: DiffOperator, op2: DiffOperator) -> DiffOperator:
    return compose(op1, op2) - compose(op2, op1)


def euler_operator(ctx: VariableContext, weights: Sequence[int] | None = None) -> DiffOperator:
    """``sum_i w_i v_i d_i`` (all weights 1 by default)."""
    n = len(ctx.variables)
    weights = weights or [1] * n
    return DiffOperator(ctx, {_unit(n, i): Polynomial.var(ctx, v) * w
                              for i, (v, w) in enumerate(zip(ctx.variables, weights))})


def carre_du_champ(op: DiffOperator, p: Polynomial, q: Polynomial) -> Polynomial:
    """``(op(pq) - p op(q) - q op(p)) / 2``."""
    return (op.apply(p * q) - p * op.apply(q) - q * op.apply(p)) / 2


# -- the model -------------------------------------------------------------------

def _param(ctx: VariableContext, name: str) -> Polynomial:
    return Polynomial.var(ctx, name)


@dataclass(frozen=True)
class ModelSpec:
    """Roots with inverse-square potential weights: ``V = sum k_a g/(a.x)^2``.

    ``g = nu(nu - 1)`` with ``nu`` and ``omega`` kept as indeterminates.
    ``ground_energy`` and ``integral_ground_value`` default to the values
    that make the product of root forms to the power ``nu`` times a Gaussian
    an eigenfunction; override them to test the error paths.
    """

    roots: tuple[LinearForm, ...]
    weights: tuple[ExactScalar, ...]
    ground_energy: Polynomial | None = None
    integral_ground_value: Polynomial | None = None
    ctx: VariableContext = X

    def __post_init__(self):
        if len(self.roots) != len(self.weights):
            raise ValueError("one potential weight per root")

    @classmethod
    def h4(cls, **overrides) -> ModelSpec:
        roots = tuple(roots_from_delta_factors())
        # g/(2 x_k^2) on the coordinate roots, 2g/(a.x)^2 on the others
        weights = tuple(ExactScalar(1, 0) / 2 if r.norm2() == 1 else ExactScalar(2) for r in roots)
        return cls(roots, weights, **overrides)

    @property
    def dim(self) -> int:
        return len(self.ctx.variables)

    @property
    def nu(self) -> Polynomial:
        return _param(self.ctx, "nu")

    @property
    def omega(self) -> Polynomial:
        return _param(self.ctx, "omega")

    @property
    def coupling(self) -> Polynomial:
        return self.nu * (self.nu - 1)

    def energy(self) -> Polynomial:
        if self.ground_energy is not None:
            return self.ground_energy
        return self.omega * (self.nu * len(self.roots) + ExactScalar(self.dim) / 2)

    def gamma0(self) -> Polynomial:
        if self.integral_ground_value is not None:
            return self.integral_ground_value
        n_roots = len(self.roots)
        return (self.nu * (self.dim - 2) * n_roots + self.nu ** 2 * n_roots ** 2) / 2

    def potential_terms(self, numerator: Polynomial | None = None) -> list[RootTerm]:
        """``numerator * k_a g / (a.x)^2`` as zero-order root terms."""
        zero = (0,) * self.dim
        base = self.coupling if numerator is None else self.coupling * numerator
        return [RootTerm(r, 2, ((zero, base.scale(w)),)) for r, w in zip(self.roots, self.weights)]


def hamiltonian_cartesian(spec: ModelSpec) -> DiffOperator:
    """``-1/2 Laplacian + omega^2 r^2 / 2 + V``."""
    ctx = spec.ctx
    n = spec.dim
    r2 = sum((Polynomial.var(ctx, v) ** 2 for v in ctx.variables), Polynomial.zero(ctx))
    terms = {tuple(2 * u for u in _unit(n, i)): Polynomial.constant(ctx, ExactScalar(-1) / 2) for i in range(n)}
    terms[(0,) * n] = spec.omega ** 2 * r2 / 2
    return DiffOperator(ctx, terms, spec.potential_terms())


def angular_momentum(ctx: VariableContext, i: int, j: int) -> DiffOperator:
    """``J_ij = x_i d_j - x_j d_i``."""
    n = len(ctx.variables)
    xi = Polynomial.var(ctx, ctx.variables[i])
    xj = Polynomial.var(ctx, ctx.variables[j])
    return DiffOperator(ctx, {_unit(n, j): xi, _unit(n, i): -xj})


# -- sums of root-pole terms ---------------------------------------------------------

def _pivot(form: LinearForm) -> int:
    cands = [i for i, c in enumerate(form.coeffs) if c]
    return min(cands, key=lambda i: (not form.coeffs[i].is_rational(), i))


def _restriction(form: LinearForm, ctx: VariableContext) -> tuple[int, dict[str, Polynomial]]:
    """Pivot index and the substitution putting ``form . x = 0``."""
    p = _pivot(form)
    c = form.coeffs[p]
    rest = [-(v / c) if k != p else ExactScalar(0) for k, v in enumerate(form.coeffs)]
    return p, {ctx.variables[p]: Polynomial.linear(ctx, rest)}


def _restrict(poly: Polynomial, sub: Mapping[str, Polynomial]) -> Polynomial:
    return poly.substitute(sub, poly.ctx)


@dataclass
class PoleSum:
    """``poly + sum_a S_a/(a.x) + sum_a D_a/(a.x)^2 + sum_{a<b} C_ab/((a.x)(b.x))``.

    Numerators are polynomials; keys are root indices into ``roots``.
    """

    roots: tuple[LinearForm, ...]
    ctx: VariableContext = X
    poly: Polynomial = None
    single: dict = field(default_factory=dict)
    double: dict = field(default_factory=dict)
    cross: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.poly is None:
            self.poly = Polynomial.zero(self.ctx)

    def _bump(self, table: dict, key, value: Polynomial) -> None:
        table[key] = table[key] + value if key in table else value

    def add_poly(self, p: Polynomial) -> None:
        self.poly = self.poly + p

    def add_single(self, a: int, p: Polynomial) -> None:
        self._bump(self.single, a, p)

    def add_double(self, a: int, p: Polynomial) -> None:
        self._bump(self.double, a, p)

    def add_cross(self, a: int, b: int, p: Polynomial) -> None:
        if a == b:
            self.add_double(a, p)
        else:
            self._bump(self.cross, (min(a, b), max(a, b)), p)

    def evaluate_main(self, point: Sequence) -> Polynomial:
        """Value at a point of the main variables (a polynomial in the parameters)."""
        vals = [as_scalar(v) for v in point]
        names = self.ctx.variables
        assign = dict(zip(names, vals))
        lin = [r.dot(vals) for r in self.roots]
        if any(v.is_zero() for v in lin):
            raise ZeroDivisionError("point lies on a root hyperplane")
        total = self.poly.specialize(assign)
        for a, p in self.single.items():
            total = total + p.specialize(assign).scale(lin[a].inverse())
        for a, p in self.double.items():
            total = total + p.specialize(assign).scale((lin[a] * lin[a]).inverse())
        for (a, b), p in self.cross.items():
            total = total + p.specialize(assign).scale((lin[a] * lin[b]).inverse())
        return total

    def to_polynomial(self) -> Polynomial:
        """The polynomial this sum equals; raises :class:`NonzeroFreeTerm` on a
        surviving pole.

        Double poles must have numerators divisible by their form.  Every
        simple pole must have zero residue on its hyperplane; the residue is a
        sum of partial fractions in the remaining variables whose numerators
        are checked class by class.  Once no pole survives, the rational part
        is a polynomial of known degree and is recovered by interpolation.
        """
        ctx = self.ctx
        single = dict(self.single)
        for a, num in self.double.items():
            if num.is_zero():
                continue
            _, sub = _restriction(self.roots[a], ctx)
            rem = _restrict(num, sub)
            if not rem.is_zero():
                raise NonzeroFreeTerm(f"double pole along {self.roots[a]}: {rem.to_text()}")
            q = divide_by_linear_form(num, self.roots[a].as_polynomial(ctx))
            single[a] = single[a] + q if a in single else q
        partners: dict = {}
        for (a, b), num in self.cross.items():
            if num.is_zero():
                continue
            partners.setdefault(a, []).append((b, num))
            partners.setdefault(b, []).append((a, num))
        for a in sorted(set(single) | set(partners)):
            self._check_residue(a, single.get(a), partners.get(a, []))
        rational_terms = [(p, 1) for p in single.values() if p] + \
                         [(p, 2) for p in self.cross.values() if p]
        top = max((p.main_degree() - k for p, k in rational_terms), default=-1)
        if top < 0:
            return self.poly
        rest = PoleSum(self.roots, ctx, Polynomial.zero(ctx), single, {}, dict(self.cross))
        return self.poly + _interpolate(rest.evaluate_main, ctx, top)

    def _check_residue(self, a: int, single: Polynomial | None, partners) -> None:
        ctx = self.ctx
        form = self.roots[a]
        piv, sub = _restriction(form, ctx)
        residue = _restrict(single, sub) if single is not None else Polynomial.zero(ctx)
        classes: dict = {}
        for b, num in partners:
            # beta . x on the hyperplane, as a linear form in the other variables
            beta = self.roots[b]
            c = beta.coeffs[piv] / form.coeffs[piv]
            restricted = [bc - c * fc for bc, fc in zip(beta.coeffs, form.coeffs)]
            lead = next(v for v in restricted if v)
            key = tuple(v / lead for v in restricted)
            numr = _restrict(num, sub).scale(lead.inverse())
            cls = classes.setdefault(key, [Polynomial.zero(ctx)])
            cls[0] = cls[0] + numr
        for key, (m,) in classes.items():
            if m.is_zero():
                continue
            try:
                residue = residue + divide_by_linear_form(m, list(key))
            except NotDivisible:
                raise NonzeroFreeTerm(f"simple pole along {form} does not cancel") from None
        if not residue.is_zero():
            raise NonzeroFreeTerm(f"residue along {form}: {residue.to_text()}")


def _interpolate(fn: Callable[[Sequence], Polynomial], ctx: VariableContext, degree: int) -> Polynomial:
    """Polynomial of main degree ``<= degree`` from values on a shifted simplex lattice."""
    n = len(ctx.variables)
    monos = []

    def rec(prefix, left):
        if len(prefix) == n:
            monos.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e)

    rec([], degree)
    base = [ExactScalar(3, 0) / 7, ExactScalar(5, 0) / 11, ExactScalar(7, 0) / 13, ExactScalar(11, 0) / 17]
    points = [[b + e for b, e in zip(base, m)] for m in monos]
    vander = []
    for pt in points:
        row = []
        for m in monos:
            v = ExactScalar(1)
            for x, e in zip(pt, m):
                v = v * x ** e
            row.append(v)
        vander.append(row)
    size = len(monos)
    aug = [row + [ExactScalar(int(i == j)) for j in range(size)] for i, row in enumerate(vander)]
    red, _ = rref(aug)
    inv = [row[size:] for row in red]
    values = [fn(pt) for pt in points]
    npar = len(ctx.params)
    out = Polynomial.zero(ctx)
    for i, m in enumerate(monos):
        c = Polynomial.zero(ctx)
        for j in range(size):
            if inv[i][j]:
                c = c + values[j].scale(inv[i][j])
        if c:
            out = out + c * Polynomial.monomial(ctx, m + (0,) * npar)
    return out


# -- gauge rotation -------------------------------------------------------------------

def conjugate_by_ground_state(op: DiffOperator, spec: ModelSpec) -> tuple[DiffOperator, PoleSum]:
    """``Psi^-1 o op o Psi`` for ``Psi = prod (a.x)^nu * exp(-omega r^2 / 2)``.

    ``op`` has polynomial derivative terms of order at most 2 and per-root
    terms of order zero (the potential).  Returns the derivative part (the
    zero-order part dropped) and the zero-order part as a :class:`PoleSum`.
    The log-gradient of ``Psi`` is ``nu sum a/(a.x) - omega x``.
    """
    ctx = spec.ctx
    n = spec.dim
    if op.order > 2 or any(rt.order() for rt in op.root_terms):
        raise ValueError("expected a second-order operator with a zero-order root potential")
    idx_of = {r.coeffs: k for k, r in enumerate(spec.roots)}
    nu, om = spec.nu, spec.omega
    xs = [Polynomial.var(ctx, v) for v in ctx.variables]
    sym = op.symbol()
    C = [[sym[(min(i, j), max(i, j))] for j in range(n)] for i in range(n)]
    b = op.first_order()

    # first order: b + 2 C v
    first_poly = [b[j] - sum((C[i][j] * xs[i] for i in range(n)), Polynomial.zero(ctx)) * om * 2
                  for j in range(n)]
    root_terms = []
    for r in spec.roots:
        num = [sum((C[i][j].scale(r.coeffs[i]) for i in range(n)), Polynomial.zero(ctx)) * nu * 2
               for j in range(n)]
        form = r.as_polynomial(ctx)
        keep = []
        for j, p in enumerate(num):
            if p.is_zero():
                continue
            try:
                first_poly[j] = first_poly[j] + divide_by_linear_form(p, form)
            except NotDivisible:
                keep.append((_unit(n, j), p))
        if keep:
            root_terms.append(RootTerm(r, 1, tuple(keep)))
    terms = {m: c for m, c in op.terms.items() if sum(m) == 2}
    for j in range(n):
        terms[_unit(n, j)] = first_poly[j]
    rotated = DiffOperator(ctx, terms, root_terms)

    # zero order: sum C_ij (d_i v_j + v_i v_j) + b.v + V
    free = PoleSum(tuple(spec.roots), ctx)
    trace = sum((C[i][i] for i in range(n)), Polynomial.zero(ctx))
    xcx = sum((C[i][j] * xs[i] * xs[j] for i in range(n) for j in range(n)), Polynomial.zero(ctx))
    bx = sum((b[i] * xs[i] for i in range(n)), Polynomial.zero(ctx))
    free.add_poly(-om * trace + om ** 2 * xcx - om * bx + op.free_term())

    def quad(u, v):
        return sum((C[i][j].scale(u[i] * v[j]) for i in range(n) for j in range(n) if u[i] and v[j]),
                   Polynomial.zero(ctx))

    for a, r in enumerate(spec.roots):
        aca = quad(r.coeffs, r.coeffs)
        free.add_double(a, aca * (nu * nu - nu))
        acx = sum((C[i][j].scale(r.coeffs[i]) * xs[j] for i in range(n) for j in range(n) if r.coeffs[i]),
                  Polynomial.zero(ctx))
        ba = sum((b[i].scale(r.coeffs[i]) for i in range(n) if r.coeffs[i]), Polynomial.zero(ctx))
        free.add_single(a, acx * (nu * om * -2) + ba * nu)
    for a, c in combinations(range(len(spec.roots)), 2):
        val = quad(spec.roots[a].coeffs, spec.roots[c].coeffs)
        if val:
            free.add_cross(a, c, val * (nu * nu * 2))
    for rt in op.root_terms:
        a = idx_of.get(rt.form.coeffs)
        if a is None or rt.power != 2:
            raise ValueError("potential terms must be inverse squares of model roots")
        for _, p in rt.coeffs:
            free.add_double(a, p)
    return rotated, free


def gauge_rotate_hamiltonian(spec: ModelSpec) -> DiffOperator:
    """``h = -2 Psi^-1 (H - E0) Psi``; raises :class:`NonzeroFreeTerm` unless the
    zero-order term cancels identically."""
    rotated, free = conjugate_by_ground_state(hamiltonian_cartesian(spec), spec)
    free.add_poly(-spec.energy())
    leftover = free.to_polynomial()
    if not leftover.is_zero():
        raise NonzeroFreeTerm(f"free term {leftover.to_text()}")
    return rotated.scale(-2)


def build_integral_cartesian(spec: ModelSpec, check: bool = True) -> DiffOperator:
    """``F = -1/2 sum_{i<j} J_ij^2 + r^2 V`` with ``V`` the inverse-square potential.

    With ``check`` the ground state is confirmed to be an eigenfunction with
    eigenvalue :meth:`ModelSpec.gamma0` (else :class:`FNotEigen`).
    """
    ctx = spec.ctx
    n = spec.dim
    total = DiffOperator.zero(ctx)
    for i, j in combinations(range(n), 2):
        J = angular_momentum(ctx, i, j)
        total = total + compose(J, J)
    r2 = sum((Polynomial.var(ctx, v) ** 2 for v in ctx.variables), Polynomial.zero(ctx))
    F = DiffOperator(ctx, total.scale(ExactScalar(-1) / 2).terms, spec.potential_terms(r2))
    if check:
        value = ground_state_eigenvalue(F, spec)
        if value != spec.gamma0():
            raise FNotEigen(f"F Psi0 = ({value.to_text()}) Psi0, expected {spec.gamma0().to_text()}")
    return F


def ground_state_eigenvalue(op: DiffOperator, spec: ModelSpec) -> Polynomial:
    """``(op Psi0) / Psi0``; raises :class:`FNotEigen` when it is not a constant."""
    _, free = conjugate_by_ground_state(op, spec)
    try:
        value = free.to_polynomial()
    except NonzeroFreeTerm as exc:
        raise FNotEigen(str(exc)) from None
    if value.main_degree() > 0:
        raise FNotEigen(f"(op Psi0)/Psi0 = {value.to_text()} is not constant")
    return value


def gauge_rotate_integral(F: DiffOperator, spec: ModelSpec) -> DiffOperator:
    """``f = Psi0^-1 (F - gamma0) Psi0``; raises :class:`NonzeroFreeTerm`."""
    rotated, free = conjugate_by_ground_state(F, spec)
    free.add_poly(-spec.gamma0())
    leftover = free.to_polynomial()
    if not leftover.is_zero():
        raise NonzeroFreeTerm(f"free term {leftover.to_text()}")
    return rotated


# -- change of variables ------------------------------------------------------------------

def pushforward(op: DiffOperator, tmap: TauMap | None = None, verify: bool = True) -> DiffOperator:
    """Rewrite a second-order operator without free term in the τ coordinates.

    ``B_a = op(tau_a)`` and ``A_ab = sum C_ij d_i tau_a d_j tau_b``, which
    equals the carre du champ ``(op(tau_a tau_b) - tau_a op(tau_b) -
    tau_b op(tau_a)) / 2`` because the first-order part is a derivation.
    Both are re-expressed through :func:`invariantize`.
    """
    tmap = tmap or tau_explicit()
    if op.order > 2:
        raise ValueError("pushforward handles operators of order at most 2")
    if not op.free_term().is_zero() or any(rt.order() == 0 for rt in op.root_terms):
        raise ValueError("operator must annihilate constants")
    ctx = op.ctx
    sym = op.symbol()
    grads = [[t.diff(v) for v in ctx.variables] for t in tmap]
    second = {}
    for a in range(4):
        for b in range(a, 4):
            acc = Polynomial.zero(ctx)
            for (i, j), c in sym.items():
                if c.is_zero():
                    continue
                term = grads[a][i] * grads[b][j]
                if i != j:
                    term = term + grads[a][j] * grads[b][i]
                acc = acc + c * term
            second[(a, b)] = invariantize(acc, tmap, verify=verify)
    first = [invariantize(op.apply(t), tmap, verify=verify) for t in tmap]
    return DiffOperator.from_symbol(TAU, second, first)


def integral_from_hamiltonian(h_tau: DiffOperator, degrees: Sequence[int] = (2, 12, 20, 30)) -> DiffOperator:
    """``-1/2 t1 (h + 2 omega E) + E^2 / 2 + (1 + 60 nu) E`` in τ coordinates.

    ``E`` is the Cartesian Euler operator written in τ (weights are the
    x-degrees); this is the radial decomposition of the Laplacian.
    """
    ctx = h_tau.ctx
    E = euler_operator(ctx, degrees)
    nu = _param(ctx, "nu")
    om = _param(ctx, "omega")
    t1 = Polynomial.var(ctx, ctx.variables[0])
    first = compose(DiffOperator.multiplication(t1), h_tau + E.scale(om * 2)).scale(ExactScalar(-1) / 2)
    return first + compose(E, E).scale(ExactScalar(1) / 2) + E.scale(nu * 60 + 1)
