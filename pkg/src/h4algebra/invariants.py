"""Invariant coordinates of H4 and re-expression of invariants in them.

Every H4 invariant is even in each coordinate, so most work happens in the
squared variables ``y_k = x_k^2`` (context :data:`Y`), which halves degrees
and cuts term counts.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import cached_property
from math import factorial, lcm as _lcm
from typing import Callable, Mapping, Sequence

from gmpy2 import mpq

from .coxeter import WEIGHTS, CoxeterGroup, LinearForm, roots_from_delta_factors
from .field import PHI_MINUS, PHI_PLUS, ExactScalar, as_scalar
from .linalg import SingularSystem, rank_modular, solve_fraction_free
from .poly import TAU, X, Polynomial, VariableContext, divide_by_linear_form, exact_divide
from .symmetric import alternating_delta4, monomial_symmetric

__all__ = [
    "AmbiguityParams",
    "EXPLICIT_TABLES",
    "FLAG_FULL",
    "FLAG_MIN",
    "InconsistentScales",
    "NotInvariant",
    "TauMap",
    "WPT_SHAPES",
    "Y",
    "apply_corrections",
    "boundary_surface",
    "delta_products",
    "delta3_quadratics_y",
    "factor_jacobian",
    "fit_orbit_scales",
    "flag_monomials",
    "invariantize",
    "jacobian",
    "jacobian_over_delta1",
    "jacobian_squared_y",
    "jacobian_y",
    "orbit_power_sum",
    "tau4_mislabeled",
    "tau_explicit",
    "tau_from_orbit",
    "tau_from_tables",
    "weighted_degree",
    "wpt_images",
    "wpt_substitution",
    "x_to_y",
    "y_to_x",
]

Y = VariableContext(("y1", "y2", "y3", "y4"))

FLAG_MIN = (1, 5, 8, 12)
FLAG_FULL = (1, 6, 10, 15)
TAU_DEGREES = (1, 6, 10, 15)  # degrees in the squared variables


class NotInvariant(ValueError):
    """The polynomial is not a polynomial in the invariant coordinates."""


class InconsistentScales(ArithmeticError):
    """No per-component scale makes orbit sums match the explicit coordinates."""


# -- squared-variable conversion ---------------------------------------------

def x_to_y(p: Polynomial) -> Polynomial:
    """Rewrite a polynomial that is even in every x_k in terms of y_k = x_k^2."""
    if p.ctx != X:
        raise ValueError("expected an x-context polynomial")
    nmain = len(X.variables)

    def half(e):
        if any(v % 2 for v in e[:nmain]):
            raise NotInvariant("polynomial is not even in every coordinate")
        return tuple(v // 2 for v in e[:nmain]) + tuple(e[nmain:])

    return p.map_keys(Y, half)


def y_to_x(p: Polynomial) -> Polynomial:
    nmain = len(Y.variables)
    return p.map_keys(X, lambda e: tuple(2 * v for v in e[:nmain]) + tuple(e[nmain:]))


# -- explicit coordinates ----------------------------------------------------

_TERM = re.compile(r"([+-]?\s*\d*)\s*(\[[^\]]*\])")


def _bracket_sum(text: str, ctx: VariableContext = X) -> Polynomial:
    """Evaluate ``14[3^2|0^2]-6[4|2|0^2]+...`` as a polynomial."""
    out = Polynomial.zero(ctx)
    pos = 0
    compact = re.sub(r"\s+", "", text)
    for m in _TERM.finditer(compact):
        if m.start() != pos:
            raise ValueError(f"unparsed text near {compact[pos:m.start() + 10]!r}")
        pos = m.end()
        c = m.group(1).replace(" ", "")
        coef = int(c + "1") if c in ("", "+", "-") else int(c)
        out = out + monomial_symmetric(m.group(2), ctx) * coef
    if pos != len(compact):
        raise ValueError(f"trailing text {compact[pos:]!r}")
    return out


TAU2_SYM = "14[3^2|0^2]-6[4|2|0^2]+2[5|1|0^2]-270[2^2|1^2]+30[2^3|0]-12[4|1^2|0]+348[3|1^3]+9[3|2|1|0]"
TAU3_SYM = (
    "2[8|2|0^2]+4[8|1^2|0]-10[7|3|0^2]-45[7|2|1|0]+60[7|1^3]"
    "+22[6|4|0^2]+157[6|3|1|0]+270[6|2^2|0]-150[6|2|1^2]"
    "-22[5^2|0^2]-131[5|4|1|0]-733[5|3|2|0]-2156[5|3|1^2]"
    "+4050[5|2^2|1]+1320[4^2|2|0]+4650[4^2|1^2]+6[4|3^2|0]"
    "-2175[4|3|2|1]-19050[4|2^3]+10800[3^2|2^2]+3336[3^3|1]"
)
TAU3_ALT_FACTOR = 3
TAU3_ALT = "5[4|0^3]-18[3|1|0^2]+49[2^2|0^2]+3[2|1^2|0]+1146[1^4]"
# Partition labels in these two tables are permuted relative to their
# coefficients; the resulting polynomial is not invariant.  Kept so tests can
# pin down exactly which relabeling repairs it.
TAU4_SYM_MISLABELED = (
    "65742[15|0^3]-504[13|2|0^2]+830[13|1^2|0]+61690[12|3|0^2]"
    "-5130[12|2|1|0]-9495[12|1^3]+18795[11|4|0^2]"
    "+28560[11|3|1|0]-43500[11|2^2|0]-53070[11|2|1^2]"
    "-156330[10|5|0^2]+59130[10|4|1|0]+26415[10|3|2|0]"
    "+405255[10|3|1^2]+1350[10|2^2|1]+19710[9|6|0^2]"
    "-20[9|4|2|0]-8663355[9|4|1^2]-120[9|3^2|0]+450[9|3|2|1]"
    "-962715[9|2^3]+13860[8|7|0^2]-94530[8|6|1|0]"
    "-353160[8|5|2|0]-1452060[8|5|1^2]+5557050[8|4|3|0]"
    "+590580[8|4|2|1]-198270[8|3^2|1]+389250[7^2|1|0]"
    "+2897820[7|6|2|0]-5227920[7|6|1^2]+1134540[7|5|3|0]"
    "-4041270[7|5|2|1]-591330[7|4^2|0]+23417850[7|4|3|1]"
    "-22770[7|4|2^2]-23528790[7|3^2|2]+29647380[6^2|3|0]"
    "+36597510[6^2|2|1]-1649925[6|5|4|0]+150[6|5|3|1]"
    "+40935[6|5|2^2]-510[6|4^2|1]-60[6|4|3|2]+242505[6|3^3]"
    "+270060[5^3|0]-528270[5^2|4|1]-36255[5|4^2|2]+825[5|4|3^2]"
    "+707085[4^3|3]"
)
TAU4_ALT_FACTOR = 45
TAU4_ALT_MISLABELED = (
    "-27040[9|0^3]-5[8|1|0^2]"
    "-1914[7|1^2|0]+23[6|3|0^2]+91[6|2|1|0]-44[6|1^3]"
    "-352[5|4|0^2]+8[5|3|1|0]+1085[5|2^2|0]+6875[5|2|1^2]"
    "-5168[4^2|1|0]-934[4|3|2|0]-568[4|3|1^2]+1773[4|2^2|1]"
    "+20911[3^3|0]+15915[3^2|2|1]+573[3|2^3]"
)

# Same coefficients as the mislabeled tables above, attached to the
# partitions for which the result is invariant.  Fixed by the identity
# 8*tau_4 = -4*tau_1^3*tau_2^2 + 24*tau_1^5*tau_3 - grad(tau_2).grad(tau_3).
TAU4_SYM = (
    "-20[12|3|0^2]-60[12|2|1|0]-120[12|1^3]+150[11|4|0^2]"
    "+825[11|3|1|0]+1350[11|2^2|0]+450[11|2|1^2]-504[10|5|0^2]"
    "-5130[10|4|1|0]-9495[10|3|2|0]+13860[10|3|1^2]-22770[10|2^2|1]"
    "+830[9|6|0^2]+18795[9|5|1|0]+28560[9|4|2|0]-94530[9|4|1^2]"
    "+61690[9|3^2|0]+40935[9|3|2|1]+389250[9|2^3]-510[8|7|0^2]"
    "-43500[8|6|1|0]-53070[8|5|2|0]+270060[8|5|1^2]-156330[8|4|3|0]"
    "+242505[8|4|2|1]-353160[8|3^2|1]-1452060[8|3|2^2]+59130[7^2|1|0]"
    "+26415[7|6|2|0]-198270[7|6|1^2]+405255[7|5|3|0]-1649925[7|5|2|1]"
    "+19710[7|4^2|0]+707085[7|4|3|1]+5557050[7|4|2^2]+590580[7|3^2|2]"
    "-528270[6^2|3|0]+2897820[6^2|2|1]-36255[6|5|4|0]-962715[6|5|3|1]"
    "-5227920[6|5|2^2]+1134540[6|4^2|1]-8663355[6|4|3|2]+29647380[6|3^3]"
    "+65742[5^3|0]-591330[5^2|4|1]+23417850[5^2|3|2]-4041270[5|4^2|2]"
    "-23528790[5|4|3^2]+36597510[4^3|3]"
)
TAU4_ALT = (
    "-5[8|1|0^2]+23[7|2|0^2]+91[7|1^2|0]-44[6|3|0^2]"
    "-352[6|2|1|0]-1914[6|1^3]+8[5|4|0^2]+573[5|3|1|0]"
    "+1085[5|2^2|0]+6875[5|2|1^2]-568[4^2|1|0]-934[4|3|2|0]"
    "-5168[4|3|1^2]-27040[4|2^2|1]+1773[3^3|0]+20911[3^2|2|1]"
    "+15915[3|2^3]"
)


@dataclass
class TauMap:
    """Four invariant polynomials in the x-context."""

    components: tuple[Polynomial, ...]
    degrees: tuple[int, ...] = TAU_DEGREES

    def __post_init__(self):
        if len(self.components) != 4:
            raise ValueError("a TauMap has four components")

    def __getitem__(self, i: int) -> Polynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    @cached_property
    def y_components(self) -> tuple[Polynomial, ...]:
        return tuple(x_to_y(c) for c in self.components)

    def substitution(self, ctx: VariableContext = X) -> dict[str, Polynomial]:
        """``{t1: tau_1, ...}`` in the x- or y-context, for composing τ-polynomials."""
        comps = self.components if ctx == X else self.y_components
        return dict(zip(TAU.variables, comps))

    def compose(self, q: Polynomial, ctx: VariableContext = X) -> Polynomial:
        """``q(tau_1(x), ..., tau_4(x))`` with parameters carried through."""
        return q.substitute(self.substitution(ctx), ctx)

    def values_y(self, point: Sequence) -> list[ExactScalar]:
        return [c.evaluate(list(point)) for c in self.y_components]

    def x_degrees(self) -> tuple[int, ...]:
        return tuple(c.main_degree() for c in self.components)


def tau_explicit() -> TauMap:
    """The invariant coordinates built from monomial symmetric polynomials of
    the squares and the alternating polynomial ``Delta_4``."""
    return _tau_explicit_cached()


_TAU_CACHE: list[TauMap] = []

TAU2_ALT_FACTOR = 33
EXPLICIT_TABLES = {
    "tau2_sym": TAU2_SYM, "tau2_alt_factor": TAU2_ALT_FACTOR,
    "tau3_sym": TAU3_SYM, "tau3_alt_factor": TAU3_ALT_FACTOR, "tau3_alt": TAU3_ALT,
    "tau4_sym": TAU4_SYM, "tau4_alt_factor": TAU4_ALT_FACTOR, "tau4_alt": TAU4_ALT,
}


def tau_from_tables(tables: Mapping[str, object]) -> TauMap:
    """Coordinates from bracket tables (keys as in :data:`EXPLICIT_TABLES`).

    ``tau_k = sym_k + f_k sqrt5 Delta_4 alt_k`` with ``alt_2 = 1``; no
    invariance check is made.
    """
    d4 = alternating_delta4(X)
    s5 = ExactScalar(0, 1)
    t1 = monomial_symmetric("[1|0^3]")
    t2 = _bracket_sum(tables["tau2_sym"]) + d4 * (s5 * int(tables["tau2_alt_factor"]))
    t3 = _bracket_sum(tables["tau3_sym"]) + d4 * _bracket_sum(tables["tau3_alt"]) * (
        s5 * int(tables["tau3_alt_factor"]))
    t4 = _bracket_sum(tables["tau4_sym"]) + d4 * _bracket_sum(tables["tau4_alt"]) * (
        s5 * int(tables["tau4_alt_factor"]))
    return TauMap((t1, t2, t3, t4))


def _tau_explicit_cached() -> TauMap:
    if not _TAU_CACHE:
        _TAU_CACHE.append(tau_from_tables(EXPLICIT_TABLES))
    return _TAU_CACHE[0]


def tau4_mislabeled() -> Polynomial:
    """Degree-30 polynomial from the mislabeled tables (not invariant)."""
    tables = dict(EXPLICIT_TABLES, tau4_sym=TAU4_SYM_MISLABELED, tau4_alt=TAU4_ALT_MISLABELED)
    return tau_from_tables(tables)[3]


# -- orbit sums ---------------------------------------------------------------

def _qmul(u, v):
    return (u[0] * v[0] + 5 * u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def orbit_power_sum(a: int, orbit_vectors: Sequence[Sequence], ctx: VariableContext = X) -> Polynomial:
    """``sum_{w in orbit} (w . x)^a`` expanded exactly.

    The coefficient of ``x^k`` is ``multinomial(a; k) * sum_w w^k``.  When the
    orbit is closed under every coordinate sign change only even ``k`` can
    survive, so only those moments are computed.
    """
    vecs = [tuple(as_scalar(c) for c in w) for w in orbit_vectors]
    if not vecs:
        raise ValueError("empty orbit")
    vset = set(vecs)
    sign_closed = all(tuple(-c if i == k else c for i, c in enumerate(w)) in vset
                      for w in vecs for k in range(4))
    ints = []
    den = 1
    for w in vecs:
        for c in w:
            den = _lcm(den, int(c.a.denominator))
            den = _lcm(den, int(c.b.denominator))
    for w in vecs:
        ints.append([(int(c.a * den), int(c.b * den)) for c in w])
    # power tables per vector and coordinate
    tables = []
    for w in ints:
        rows = []
        for c in w:
            pw = [(1, 0)]
            for _ in range(a):
                pw.append(_qmul(pw[-1], c))
            rows.append(pw)
        tables.append(rows)
    step = 2 if sign_closed else 1
    rat: dict = {}
    irr: dict = {}
    npar = len(ctx.params)
    fa = factorial(a)
    for k1 in range(0, a + 1, step):
        for k2 in range(0, a - k1 + 1, step):
            for k3 in range(0, a - k1 - k2 + 1, step):
                k4 = a - k1 - k2 - k3
                if k4 % step:
                    continue
                sr = si = 0
                for t in tables:
                    u = _qmul(_qmul(t[0][k1], t[1][k2]), _qmul(t[2][k3], t[3][k4]))
                    sr += u[0]
                    si += u[1]
                if sr == 0 and si == 0:
                    continue
                mult = fa // (factorial(k1) * factorial(k2) * factorial(k3) * factorial(k4))
                key = ctx.pack((k1, k2, k3, k4) + (0,) * npar)
                rat[key] = sr * mult
                irr[key] = si * mult
    return Polynomial._from_raw(ctx, rat, irr, den ** a)


# -- weighted degrees and flags --------------------------------------------------

def weighted_degree(exps: Sequence[int], weights: Sequence[int]) -> int:
    """``sum p_i v_i`` over the first ``len(weights)`` exponents."""
    return sum(p * v for p, v in zip(exps, weights))


def flag_monomials(weights: Sequence[int], n: int, exact: bool = False) -> list[tuple[int, ...]]:
    """Exponent 4-tuples with weighted degree ``<= n`` (``== n`` if ``exact``).

    Ordered by weighted degree, then by decreasing power of the first
    variable, then lexicographically on the reversed exponents.  Both
    gauge-rotated operators are upper triangular in this order.
    """
    v1, v2, v3, v4 = weights
    out = []
    for p4 in range(n // v4 + 1):
        for p3 in range((n - p4 * v4) // v3 + 1):
            for p2 in range((n - p4 * v4 - p3 * v3) // v2 + 1):
                rest = n - p4 * v4 - p3 * v3 - p2 * v2
                if exact:
                    if rest % v1 == 0:
                        out.append((rest // v1, p2, p3, p4))
                else:
                    out.extend((p1, p2, p3, p4) for p1 in range(rest // v1 + 1))
    out.sort(key=lambda e: (weighted_degree(e, weights), -e[0], e[::-1]))
    return out


# -- invariantize -----------------------------------------------------------------

POINT_SEED = 2718
POINT_RANGE = 7


def _evaluation_points(count: int, seed: int = POINT_SEED) -> list[tuple[int, int, int, int]]:
    """Deterministic integer points in the squared variables."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        pts.append(tuple(rng.randint(-POINT_RANGE, POINT_RANGE) for _ in range(4)))
    return pts


def _tau_monomial_values(vals: Sequence[ExactScalar], monos: Sequence[tuple[int, ...]]) -> list[ExactScalar]:
    cache: dict = {}

    def pw(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = vals[i] ** e
        return cache[key]

    out = []
    for m in monos:
        v = ExactScalar(1)
        for i, e in enumerate(m):
            if e:
                v = v * pw(i, e)
        out.append(v)
    return out


def _solve_tau_coefficients(value_at: Callable[[tuple], ExactScalar], d: int,
                            tmap: TauMap) -> tuple[list[tuple[int, ...]], list[ExactScalar]]:
    """Coefficients of the τ-monomials of squared-degree ``d`` matching ``value_at``."""
    monos = flag_monomials(TAU_DEGREES, d, exact=True)
    if not monos:
        raise NotInvariant(f"no invariant monomials of squared-degree {d}")
    npts = len(monos) + 3
    extra = 0
    while True:
        pts = _evaluation_points(npts + extra)
        rows = []
        rhs = []
        for pt in pts:
            rows.append(_tau_monomial_values(tmap.values_y(pt), monos))
            rhs.append(value_at(pt))
        if rank_modular(rows) == len(monos):
            break
        extra += len(monos)
        if extra > 10 * len(monos):
            raise RuntimeError("evaluation points fail to separate the candidate monomials")
    try:
        coeffs = solve_fraction_free(rows, rhs)
    except SingularSystem as exc:
        raise NotInvariant(f"no exact τ-expression: {exc}") from None
    return monos, coeffs


def _invariantize_homogeneous_y(p: Polynomial, tmap: TauMap, verify: bool) -> Polynomial:
    """Express a homogeneous y-polynomial without parameters in τ."""
    ctx = TAU
    if p.is_zero():
        return Polynomial.zero(ctx)
    monos, coeffs = _solve_tau_coefficients(lambda pt: p.evaluate(list(pt)), p.main_degree(), tmap)
    npar = len(ctx.params)
    q = Polynomial(ctx, {m + (0,) * npar: c for m, c in zip(monos, coeffs) if c})
    if verify and tmap.compose(q, Y) != p:
        raise NotInvariant("candidate τ-expression fails the symbolic check")
    return q


def invariantize(p: Polynomial, tmap: TauMap | None = None, verify: bool = True) -> Polynomial:
    """Return ``q`` in the τ-context with ``q(tau(x)) == p`` exactly.

    ``p`` may be given in the x- or y-context and may contain the parameters
    ``nu`` and ``omega``; each parameter coefficient and each homogeneous part
    is handled separately.  Coefficients are found by an exact linear solve
    at fixed evaluation points (:func:`_evaluation_points`) and, when
    ``verify`` is set, confirmed by full symbolic substitution.
    """
    tmap = tmap or tau_explicit()
    if p.ctx == X:
        p = x_to_y(p)
    elif p.ctx != Y:
        raise ValueError("invariantize expects an x- or y-context polynomial")
    total = Polynomial.zero(TAU)
    for pexp, part in p.coefficients_in(Y.params).items():
        pmono = Polynomial.monomial(TAU, (0, 0, 0, 0) + pexp)
        for _, hom in part.homogeneous_parts().items():
            total = total + _invariantize_homogeneous_y(hom, tmap, verify) * pmono
    return total


# -- ambiguity parameters and orbit coordinates ---------------------------------------

@dataclass(frozen=True)
class AmbiguityParams:
    """Coefficients of the lower-degree corrections added to the orbit sums."""

    A: tuple = (
        mpq(-1),
        mpq(-43510, 1809),
        mpq(41701, 1809),
        mpq(-17583778485, 146142376),
        mpq(-313009515, 15383408),
        mpq(22081114965, 7691704),
        mpq(-798259915667, 292284752),
    )

    def __post_init__(self):
        if len(self.A) != 7:
            raise ValueError("seven parameters expected")


def _orbit_sums(group: CoxeterGroup | None, weight=None, ctx=X) -> list[Polynomial]:
    from .coxeter import generate_group, reflection

    if group is None:
        group = generate_group([reflection(r) for r in roots_from_delta_factors()])
    orb = group.orbit(weight if weight is not None else WEIGHTS["w1"])
    return [orbit_power_sum(a, orb, ctx) for a in (2, 12, 20, 30)]


def apply_corrections(t: Sequence[Polynomial], params: AmbiguityParams,
                      scales: Sequence = (1, 1, 1, 1)) -> tuple[Polynomial, ...]:
    """Scale the four invariants and add the parameterized lower-degree corrections."""
    A = [as_scalar(v) for v in params.A]
    t2, t12, t20, t30 = (ti * as_scalar(s) for ti, s in zip(t, scales))
    u12 = t12 + t2 ** 6 * A[0]
    u20 = t20 + t2 ** 4 * t12 * A[1] + t2 ** 10 * A[2]
    u30 = t30 + t2 ** 5 * t20 * A[3] + t2 ** 3 * t12 ** 2 * A[4] + t2 ** 9 * t12 * A[5] + t2 ** 15 * A[6]
    return (t2, u12, u20, u30)


def _proportionality(q: Polynomial, k: int) -> tuple[ExactScalar | None, Polynomial]:
    """Scalar ``c`` with ``q == c * t_k`` in the τ-ring, and the residual."""
    e = [0] * TAU.nvars
    e[k] = 1
    c = q.coefficient(e)
    resid = q - Polynomial.monomial(TAU, e, c)
    return (c if resid.is_zero() and c else None), resid


def orbit_invariants_in_tau(group: CoxeterGroup | None = None, tmap: TauMap | None = None) -> list[Polynomial]:
    """The four orbit power sums of the shortest orbit, rewritten in τ."""
    return [invariantize(t, tmap) for t in _orbit_sums(group)]


def fit_orbit_scales(params: AmbiguityParams, t_tau: Sequence[Polynomial]) -> tuple[ExactScalar, ...]:
    """Per-invariant scales making the corrected orbit sums proportional to τ.

    The first scale is fixed to 1 (a common rescaling of the weight vector
    multiplies the degree-a sum by lambda^a, so only ratios matter).  Each
    later scale is fixed by one vanishing coefficient; the remaining
    coefficients are checks, and any nonzero residual raises
    :class:`InconsistentScales`.
    """
    def corrected(s):
        return apply_corrections(t_tau, params, s)

    scales = [ExactScalar(1), ExactScalar(1), ExactScalar(1), ExactScalar(1)]
    for k in (1, 2, 3):
        # the k-th corrected sum is affine in scales[k]: s*T_k + R
        s0 = list(scales)
        s0[k] = ExactScalar(0)
        s1 = list(scales)
        s1[k] = ExactScalar(1)
        r = corrected(s0)[k]
        tk = corrected(s1)[k] - r
        # pick the first non-target monomial of tk to eliminate
        target = [0] * TAU.nvars
        target[k] = 1
        cand = [(e, c) for e, c in tk.terms() if list(e) != target]
        if not cand:
            raise InconsistentScales(f"component {k + 1}: nothing to fit")
        e0, c0 = cand[0]
        scales[k] = -r.coefficient(e0) / c0
        resid = corrected(scales)[k]
        c, rest = _proportionality(resid, k)
        if c is None:
            raise InconsistentScales(
                f"component {k + 1}: residual {rest.to_text()} after fitting scale {scales[k]}")
    return tuple(scales)


@dataclass
class OrbitFit:
    """Result of matching corrected orbit sums to the explicit coordinates."""

    scales: tuple
    ratios: tuple
    tau_components: tuple


def tau_from_orbit(params: AmbiguityParams | None = None, scales: Sequence | None = None,
                   group: CoxeterGroup | None = None, tmap: TauMap | None = None,
                   want_x: bool = False) -> OrbitFit:
    """Apply the corrections to the orbit sums and check proportionality to τ.

    With ``scales=None`` the per-invariant scales are fitted
    (:func:`fit_orbit_scales`).  Returns the scales, the proportionality
    ratios ``corrected_k / tau_k`` and, if ``want_x``, the corrected sums in
    the x-context.  Raises :class:`InconsistentScales` when some component
    is not proportional to the matching τ.
    """
    params = params or AmbiguityParams()
    tmap = tmap or tau_explicit()
    t_x = _orbit_sums(group)
    t_tau = [invariantize(t, tmap) for t in t_x]
    if scales is None:
        scales = fit_orbit_scales(params, t_tau)
    scales = tuple(as_scalar(s) for s in scales)
    corrected = apply_corrections(t_tau, params, scales)
    ratios = []
    for k, q in enumerate(corrected):
        c, rest = _proportionality(q, k)
        if c is None:
            raise InconsistentScales(f"component {k + 1} not proportional to tau_{k + 1}: residual {rest.to_text()}")
        ratios.append(c)
    comps = apply_corrections(t_x, params, scales) if want_x else ()
    return OrbitFit(scales, tuple(ratios), tuple(comps))


# -- Jacobian and boundary ---------------------------------------------------------

def _det4(m: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant by expansion over 2x2 minors of the first two rows."""
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    total = None
    for (a, b) in pairs:
        comp = tuple(c for c in range(4) if c not in (a, b))
        top = m[0][a] * m[1][b] - m[0][b] * m[1][a]
        if top.is_zero():
            continue
        c, d = comp
        bot = m[2][c] * m[3][d] - m[2][d] * m[3][c]
        sign = (-1) ** (a + b + 1)  # sign of the permutation (a, b, c, d)
        term = top * bot
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total if total is not None else Polynomial.zero(m[0][0].ctx)


def jacobian_y(tmap: TauMap | None = None) -> Polynomial:
    """``det(d tau_i / d y_k)`` in the squared variables."""
    tmap = tmap or tau_explicit()
    m = [[c.diff(v) for v in Y.variables] for c in tmap.y_components]
    return _det4(m)


def jacobian(tmap: TauMap | None = None) -> Polynomial:
    """``det(d tau_i / d x_k) = 16 x1 x2 x3 x4 * det(d tau_i / d y_k)(x^2)``."""
    jy = jacobian_y(tmap)
    prod4 = Polynomial.monomial(X, (1, 1, 1, 1, 0, 0), 16)
    return y_to_x(jy) * prod4


def jacobian_over_delta1(tmap: TauMap | None = None) -> Polynomial:
    """``J / (x1 x2 x3 x4)`` as an x-polynomial."""
    return y_to_x(jacobian_y(tmap)) * 16


def delta_products() -> tuple[Polynomial, Polynomial, Polynomial]:
    """Products of the 4, 8 and 48 root forms, in the x-context."""
    roots = roots_from_delta_factors()
    out = []
    for chunk in (roots[:4], roots[4:12], roots[12:]):
        p = Polynomial.constant(X, 1)
        for r in chunk:
            p = p * r.as_polynomial(X)
        out.append(p)
    return tuple(out)


def delta3_quadratics_y() -> list[Polynomial]:
    """Delta_3 as 12 quadratics in y: one per even permutation (i, j, k, l).

    The four sign choices of ``x_i +- phi_plus x_j +- phi_minus x_k`` multiply
    to ``(y_i + phi_plus^2 y_j - phi_minus^2 y_k)^2 - 4 phi_plus^2 y_i y_j``.
    """
    from .coxeter import _even_permutations

    ys = [Polynomial.var(Y, v) for v in Y.variables]
    quads = []
    for i, j, k, _ in _even_permutations(4):
        lin = ys[i] + ys[j] * PHI_PLUS ** 2 - ys[k] * PHI_MINUS ** 2
        quads.append(lin * lin - ys[i] * ys[j] * (4 * PHI_PLUS ** 2))
    return quads


def delta2_y() -> Polynomial:
    return x_to_y(delta_products()[1])


def factor_jacobian(tmap: TauMap | None = None, literal: bool = False) -> ExactScalar:
    """Return ``c`` with ``J == c * Delta_1 Delta_2 Delta_3``; NotDivisible otherwise.

    The default route divides the squared-variable Jacobian by Delta_2 and
    the twelve Delta_3 quadratics; ``literal=True`` divides the x-Jacobian by
    all 60 root forms one at a time.
    """
    if literal:
        q = jacobian(tmap)
        for r in roots_from_delta_factors():
            q = divide_by_linear_form(q, r.as_polynomial(X))
    else:
        q = jacobian_y(tmap)
        q = exact_divide(q, delta2_y())
        for quad in delta3_quadratics_y():
            q = exact_divide(q, quad)
        q = q * 16
    if not q.is_constant():
        raise ArithmeticError("quotient is not a constant")
    return q.constant_value()


def jacobian_squared_y(tmap: TauMap | None = None) -> Polynomial:
    """``J^2`` in the squared variables: ``256 y1 y2 y3 y4 * Jy^2``."""
    jy = jacobian_y(tmap)
    return jy * jy * Polynomial.monomial(Y, (1, 1, 1, 1, 0, 0), 256)


BOUNDARY_CHECK_POINTS = 6


def boundary_surface(tmap: TauMap | None = None, verify: bool = True) -> Polynomial:
    """``J^2`` written as a polynomial in τ.

    ``J^2`` is never expanded: it is sampled as ``256 y1 y2 y3 y4 Jy(y)^2`` and
    the τ-coefficients are solved for on a full-rank point set.  The solution
    is unique because ``J^2`` is invariant and the τ's are algebraically
    independent (``J != 0``).  With ``verify`` the answer is also checked at
    extra points not used in the solve and ``J`` is factored as
    ``c * Delta_1 Delta_2 Delta_3``.
    """
    tmap = tmap or tau_explicit()
    jy = jacobian_y(tmap)

    def value_at(pt):
        j = jy.evaluate(list(pt))
        return j * j * (pt[0] * pt[1] * pt[2] * pt[3] * 256)

    d = 2 * jy.main_degree() + 4
    monos, coeffs = _solve_tau_coefficients(value_at, d, tmap)
    npar = len(TAU.params)
    q = Polynomial(TAU, {m + (0,) * npar: c for m, c in zip(monos, coeffs) if c})
    if verify:
        factor_jacobian(tmap)
        for pt in _evaluation_points(BOUNDARY_CHECK_POINTS, seed=POINT_SEED + 1):
            if q.evaluate(list(tmap.values_y(pt)) + [0] * npar) != value_at(pt):
                raise NotInvariant("τ-expression of J^2 fails at a check point")
    return q


# -- weighted projective transformation ----------------------------------------------

WPT_SHAPES = {
    "a": [(0, 0, 0, 0)],
    "b": [(5, 0, 0, 0), (4, 0, 0, 0), (3, 0, 0, 0), (2, 0, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0)],
    "c": [(3, 1, 0, 0), (2, 1, 0, 0), (1, 1, 0, 0), (0, 1, 0, 0)] + [(k, 0, 0, 0) for k in range(8, -1, -1)],
    "d": [(k, 0, 1, 0) for k in range(4, -1, -1)] + [(k, 1, 0, 0) for k in range(7, -1, -1)]
         + [(k, 0, 0, 0) for k in range(12, -1, -1)],
}


def wpt_images(params: Mapping[str, Sequence] | None = None) -> dict[str, Polynomial]:
    """Shifted coordinates ``t_k + (parameterized lower-weight terms)``.

    ``params`` maps ``"a"``, ``"b"``, ``"c"``, ``"d"`` to coefficient lists of
    lengths 1, 6, 13 and 26; missing entries are zero.
    """
    params = dict(params or {})
    images = {}
    for k, name in enumerate("abcd"):
        shapes = WPT_SHAPES[name]
        coeffs = params.get(name, [])
        if not isinstance(coeffs, (list, tuple)):
            coeffs = [coeffs]
        if len(coeffs) > len(shapes):
            raise ValueError(f"too many '{name}' parameters")
        e = [0] * TAU.nvars
        e[k] = 1
        img = Polynomial.monomial(TAU, e)
        for shape, c in zip(shapes, coeffs):
            img = img + Polynomial.monomial(TAU, shape + (0, 0), c)
        images[TAU.variables[k]] = img
    return images


def wpt_substitution(p: Polynomial, params: Mapping[str, Sequence] | None = None) -> Polynomial:
    """Substitute the shifted coordinates of :func:`wpt_images` into ``p``."""
    if p.ctx != TAU:
        raise ValueError("expected a τ-context polynomial")
    return p.substitute(wpt_images(params), TAU)
