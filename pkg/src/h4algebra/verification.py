"""The acceptance checks, one function per criterion.

Each check returns a :class:`CheckResult`; ``passed`` is None when the check
does not apply (symbolic parameters for the spectral checks).  Checks never
relax a comparison: where a printed closed form is defective the strict
comparison fails and the repaired form is reported alongside in ``rows``.
"""
from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable

from gmpy2 import mpq

from .artifacts import Artifacts, scalar_text
from .config import RunConfig
from .coxeter import ORBIT_LENGTHS, LinearForm, reflection, roots_from_delta_factors, verify_invariance
from .field import ExactScalar, as_scalar
from .invariants import (
    FLAG_FULL,
    FLAG_MIN,
    AmbiguityParams,
    InconsistentScales,
    tau_from_orbit,
    tau_from_tables,
    weighted_degree,
    wpt_substitution,
    WPT_SHAPES,
)
from .linalg import rank
from .operators import FNotEigen, build_integral_cartesian, commutator, ground_state_eigenvalue
from .poly import TAU, Polynomial
from .reference import (
    boundary_reference,
    eigenfunction_entries,
    entry_polynomial,
    gamma_printed,
    load_reference,
    operator_entries,
    orbit_parameters,
)
from .spectral import (
    NotInvariantSubspace,
    check_triangular,
    degeneracy,
    eigen_residual,
    eigenfunctions,
    flag_basis,
    is_upper_triangular,
    joint_eigenfunctions,
    laguerre_family,
    matrix_on_basis,
)

__all__ = [
    "CHECKS",
    "CheckResult",
    "LAGUERRE_MAX",
    "WPT_TRIALS",
    "check_boundary",
    "check_commutation",
    "check_eigenfunctions",
    "check_flags_and_wpt",
    "check_gamma_spectrum",
    "check_group",
    "check_hamiltonian",
    "check_integral",
    "check_orbit_sums",
    "check_roots",
    "check_spectrum",
    "check_tau",
    "closed_form_report",
    "convention_scalar",
    "run_checks",
]

LAGUERRE_MAX = 12
WPT_TRIALS = 5
WPT_SEED = 20100
SECOND_NU = mpq(2, 5)


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool | None
    detail: str
    rows: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]

    def line(self, timing: bool = False) -> str:
        text = f"[{self.status}] {self.number:2d}. {self.title}: {self.detail}"
        return text + (f" ({self.seconds:.1f}s)" if timing else "")

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "status": self.status,
                "detail": self.detail, "rows": self.rows, "seconds": round(self.seconds, 3)}


def _txt(v) -> str:
    if isinstance(v, Polynomial):
        return v.to_text()
    if isinstance(v, ExactScalar):
        return scalar_text(v)
    return str(v)


# -- 1. group ----------------------------------------------------------------------

def check_group(art: Artifacts, cfg: RunConfig) -> CheckResult:
    s = art.group()
    expected = tuple(ORBIT_LENGTHS.values())
    ok = s.order == 14400 and s.orbit_lengths == expected
    return CheckResult(1, "group order and orbit lengths", ok,
                       f"order={s.order}, orbits={list(s.orbit_lengths)}",
                       [{"order": s.order, "orbit_lengths": list(s.orbit_lengths)}])


# -- 2. roots ----------------------------------------------------------------------

def check_roots(art: Artifacts, cfg: RunConfig) -> CheckResult:
    roots = roots_from_delta_factors()
    keys = {r.direction_key() for r in roots}
    distinct = len(keys) == len(roots)
    closed = True
    for r in roots:
        s = reflection(r)
        for q in roots:
            image = LinearForm(s.apply(q.coeffs))
            if image.direction_key() not in keys:
                closed = False
                break
        if not closed:
            break
    ok = len(roots) == 60 and distinct and closed
    return CheckResult(2, "positive roots", ok,
                       f"{len(roots)} roots, pairwise non-proportional={distinct}, reflection-closed={closed}",
                       [{"roots": len(roots), "distinct_directions": len(keys), "closed": closed}])


# -- 3. invariant coordinates ------------------------------------------------------------

def _first_broken_reflection(p: Polynomial, roots) -> str | None:
    for r in roots:
        if not verify_invariance(p, [reflection(r)]):
            return str(r)
    return None


def check_tau(art: Artifacts, cfg: RunConfig) -> CheckResult:
    printed = tau_from_tables(load_reference()["tau_printed"])
    derived = art.tau()
    # the simple reflections generate the whole group (criterion 1)
    simple = art.group().simple_roots
    generators = [reflection(r) for r in simple]
    rows = []
    all_ok = True
    for k in range(4):
        same = printed[k] == derived[k]
        degree = derived[k].main_degree()
        derived_inv = verify_invariance(derived[k], generators)
        broken = None if same else _first_broken_reflection(printed[k], simple)
        row = {"tau": k + 1, "term_for_term": same, "x_degree": degree,
               "invariant": derived_inv, "printed_invariant": broken is None}
        if broken is not None:
            row["printed_breaks_under_reflection_in"] = broken
        rows.append(row)
        all_ok &= same and derived_inv and broken is None
    degrees_ok = tuple(r["x_degree"] for r in rows) == (2, 12, 20, 30)
    ok = all_ok and degrees_ok
    bad = [r["tau"] for r in rows if not r["term_for_term"]]
    detail = f"x-degrees {[r['x_degree'] for r in rows]}"
    if bad:
        names = ", ".join(f"tau_{k}" for k in bad)
        detail += (f"; printed {names} not reproduced and not invariant, relabeled tables used instead"
                   f" (invariant={all(r['invariant'] for r in rows)})")
    else:
        detail += "; all four reproduced and invariant"
    return CheckResult(3, "explicit invariant coordinates", ok, detail, rows)


# -- 4. orbit sums --------------------------------------------------------------------------

def check_orbit_sums(art: Artifacts, cfg: RunConfig) -> CheckResult:
    params = AmbiguityParams(orbit_parameters())
    try:
        fit = tau_from_orbit(params, group=art.coxeter_group(), tmap=art.tau())
    except InconsistentScales as exc:
        return CheckResult(4, "orbit sums proportional to tau", False, f"no consistent scalars: {exc}")
    rows = [{"component": k + 1, "scale": _txt(s), "ratio": _txt(r)}
            for k, (s, r) in enumerate(zip(fit.scales, fit.ratios))]
    return CheckResult(4, "orbit sums proportional to tau", True,
                       "ratios " + ", ".join(_txt(r) for r in fit.ratios), rows)


# -- 5/6. operator coefficients ------------------------------------------------------------

def _compare_entries(derived, kind: str, scale=ExactScalar(1)) -> tuple[list[dict], bool]:
    ref_second, ref_first = operator_entries(kind)
    sym = derived.symbol()
    first = derived.first_order()
    rows = []
    for (i, j), ref in sorted(ref_second.items()):
        got = sym.get((i, j), Polynomial.zero(TAU))
        rows.append({"entry": f"{'A' if kind == 'hamiltonian' else 'F'}{i + 1}{j + 1}",
                     "derived": got.to_text(), "match": got == ref.scale(scale)})
    for i, ref in enumerate(ref_first):
        got = first[i]
        rows.append({"entry": f"{'B' if kind == 'hamiltonian' else 'G'}{i + 1}",
                     "derived": got.to_text(), "match": got == ref.scale(scale)})
    return rows, all(r["match"] for r in rows)


def check_hamiltonian(art: Artifacts, cfg: RunConfig) -> CheckResult:
    h = art.hamiltonian()
    rows, ok = _compare_entries(h, "hamiltonian")
    matched = sum(r["match"] for r in rows)
    return CheckResult(5, "Hamiltonian coefficients", ok and len(rows) == 14,
                       f"{matched}/{len(rows)} polynomial identities hold", rows)


def convention_scalar(f) -> ExactScalar | None:
    """Ratio derived/printed of the ``t2`` coefficient of ``G2``."""
    _, ref_first = operator_entries("integral")
    e = (0, 1, 0, 0)
    ref = ref_first[1].coefficients_in(TAU.variables).get(e)
    got = f.first_order()[1].coefficients_in(TAU.variables).get(e)
    if ref is None or got is None:
        return None
    # both are polynomials in nu; the scalar is the ratio of leading coefficients
    exps, rc = ref.leading_term()
    return got.coefficient(exps) / rc


def check_integral(art: Artifacts, cfg: RunConfig) -> CheckResult:
    spec = art.spec
    try:
        F = build_integral_cartesian(spec, check=False)
        gamma0 = ground_state_eigenvalue(F, spec)
        gamma0_printed = Polynomial.from_text(gamma0.ctx, load_reference()["integral"]["gamma0"])
    except FNotEigen as exc:
        return CheckResult(6, "integral", False, f"ground state is not an eigenfunction: {exc}")
    f = art.integral()
    scale = convention_scalar(f)
    if scale is None or scale == 0:
        return CheckResult(6, "integral", False, "G2 does not fix a convention scalar")
    rows, entries_ok = _compare_entries(f, "integral", scale)
    first_row_zero = all(f.symbol().get((0, j), Polynomial.zero(TAU)).is_zero() for j in range(4))
    g1_zero = f.first_order()[0].is_zero()
    gamma_ok = gamma0 == gamma0_printed
    rows.insert(0, {"entry": "gamma0", "derived": gamma0.to_text(), "match": gamma_ok})
    ok = gamma_ok and entries_ok and first_row_zero and g1_zero
    matched = sum(r["match"] for r in rows[1:])
    return CheckResult(6, "integral", ok,
                       f"gamma0 {'matches' if gamma_ok else 'differs'}; {matched}/{len(rows) - 1} entries "
                       f"match with convention scalar {_txt(scale)}; F1j=0: {first_row_zero}; G1=0: {g1_zero}",
                       rows)


# -- 7. commutation --------------------------------------------------------------------------

def check_commutation(art: Artifacts, cfg: RunConfig) -> CheckResult:
    h, f = art.hamiltonian(), art.integral()
    comm = commutator(h, f)
    return CheckResult(7, "[h, f] = 0", comm.is_zero(),
                       f"commutator {'vanishes identically' if comm.is_zero() else 'is nonzero'}",
                       [{"commutator_terms": len(comm.to_rows())}])


# -- 8. spectrum ---------------------------------------------------------------------------------

def _diagonal_spectrum(h, nu, omega, level: int) -> tuple[bool, bool, dict[int, Counter]]:
    """Triangularity, upper-triangularity and the ``eps`` multiset on each ``P_n``."""
    numeric = h.specialize({"nu": as_scalar(nu), "omega": as_scalar(omega)})
    basis = flag_basis(FLAG_MIN, level)
    mat = matrix_on_basis(numeric, basis)
    diag = [mat[i][i].constant_value() / -2 for i in range(basis.dimension)]
    per_level = {}
    for n in range(level + 1):
        per_level[n] = Counter(_txt(d) for d, m in zip(diag, basis.monomials)
                               if weighted_degree(m, FLAG_MIN) <= n)
    return check_triangular(mat, basis), is_upper_triangular(mat), per_level


def _predicted_levels(omega, level: int) -> dict[int, Counter]:
    om = as_scalar(omega)
    out = {}
    basis = flag_basis(FLAG_MIN, level)
    for n in range(level + 1):
        out[n] = Counter(_txt(om * (2 * weighted_degree(m, FLAG_FULL))) for m in basis.monomials
                         if weighted_degree(m, FLAG_MIN) <= n)
    return out


def check_spectrum(art: Artifacts, cfg: RunConfig) -> CheckResult:
    if cfg.symbolic:
        return CheckResult(8, "spectrum on the minimal flag", None, "skipped (symbolic)")
    h = art.hamiltonian()
    level = 12
    predicted = _predicted_levels(cfg.omega, level)
    rows = []
    ok = True
    spectra = {}
    for nu in (cfg.nu, SECOND_NU):
        tri, upper, got = _diagonal_spectrum(h, nu, cfg.omega, level)
        match = got == predicted
        spectra[str(nu)] = got
        rows.append({"nu": str(nu), "triangular": tri, "upper_triangular": upper, "match": match})
        ok &= tri and upper and match
    independent = len({tuple(sorted((n, tuple(sorted(c.items()))) for n, c in sp.items()))
                       for sp in spectra.values()}) == 1
    top = predicted[level]
    om = as_scalar(cfg.omega)
    mult12 = top.get(_txt(om * 12), 0)
    mult20 = top.get(_txt(om * 20), 0)
    ok &= independent and mult12 == 2 == degeneracy(6) and mult20 == 3 == degeneracy(10)
    return CheckResult(8, "spectrum on the minimal flag", ok,
                       f"levels 0..{level} match at nu={cfg.nu} and nu={SECOND_NU}; "
                       f"multiplicity 2 at 12w: {mult12 == 2}, 3 at 20w: {mult20 == 3}", rows)


# -- 9. eigenfunctions --------------------------------------------------------------------------------

def _closed_form_rows(h, f) -> list[dict]:
    """Eigen-equation residuals of every printed closed form (and its repair)."""
    rows = []
    for family in ("minimal_flag", "joint"):
        for e in eigenfunction_entries(family):
            eps = Polynomial.from_text(TAU, e["epsilon"])
            gamma = Polynomial.from_text(TAU, e["gamma"]) if "gamma" in e else None
            variants = {}
            if "phi_numerator" in e:
                variants["printed"] = e["phi_numerator"]
                variants["corrected"] = e["corrected_phi_numerator"]
            else:
                variants["printed"] = e["phi"]
                if "corrected_phi" in e:
                    variants["corrected"] = e["corrected_phi"]
            for which, spec in variants.items():
                phi = entry_polynomial(spec)
                h_ok = eigen_residual(h, phi, eps, -2).is_zero()
                f_ok = True if gamma is None else eigen_residual(f, phi, gamma).is_zero()
                rows.append({"family": family, "name": e["name"], "form": which,
                             "h_equation": h_ok, "f_equation": f_ok if gamma is not None else None,
                             "holds": h_ok and f_ok})
    return rows


def _laguerre_rows(h, f, top: int = LAGUERRE_MAX) -> list[dict]:
    rows = []
    for n1 in range(top + 1):
        phi, eps = laguerre_family(n1)
        h_ok = eigen_residual(h, phi, eps, -2).is_zero()
        f_ok = f.apply(phi).is_zero()
        rows.append({"family": "laguerre", "name": f"L_{n1}", "form": "printed",
                     "h_equation": h_ok, "f_equation": f_ok, "holds": h_ok and f_ok})
    return rows


def _proportional(p: Polynomial, q: Polynomial) -> bool:
    """``p = c q`` for a nonzero scalar ``c`` (both parameter-free)."""
    if p.is_zero() or q.is_zero():
        return False
    exps, c = max(q.terms())
    pc = p.coefficient(exps)
    return bool(pc) and p.scale(c) == q.scale(pc)


def _in_span(p: Polynomial, basis: list[Polynomial]) -> bool:
    monos = sorted({e for b in basis + [p] for e, _ in b.terms()})
    cols = [[b.coefficient(e) for e in monos] for b in basis]
    return rank(cols) == rank(cols + [[p.coefficient(e) for e in monos]])


def _solver_rows(h, f, nu, omega) -> list[dict]:
    """Compare solver eigenvectors with the closed forms at rational parameters."""
    point = {"nu": as_scalar(nu), "omega": as_scalar(omega)}
    rows = []
    res = eigenfunctions(h, flag_basis(FLAG_MIN, 5), nu, omega, scale=-2)
    by_eps = {_txt(e): fs for e, fs in zip(res.eigenvalues, res.eigenfunctions)}
    for e in eigenfunction_entries("minimal_flag"):
        eps = Polynomial.from_text(TAU, e["epsilon"]).specialize(point).constant_value()
        space = by_eps.get(_txt(eps), [])
        for which, spec in (("printed", e["phi"]), ("corrected", e.get("corrected_phi"))):
            if spec is None:
                continue
            phi = entry_polynomial(spec).specialize(point)
            match = len(space) == 1 and _proportional(phi, space[0])
            rows.append({"family": "minimal_flag", "name": e["name"], "form": which, "solver_match": match})
    joint = joint_eigenfunctions(h, f, flag_basis(FLAG_FULL, 6), nu, omega)
    funcs = [p for block in joint.eigenfunctions for p in block]
    for e in eigenfunction_entries("joint"):
        eps = Polynomial.from_text(TAU, e["epsilon"]).specialize(point).constant_value()
        gam = Polynomial.from_text(TAU, e["gamma"]).specialize(point).constant_value()
        cands = [p for p, lab in zip(funcs, joint.labels) if lab == (eps, gam)]
        variants = ([("printed", e["phi_numerator"]), ("corrected", e["corrected_phi_numerator"])]
                    if "phi_numerator" in e else [("printed", e["phi"])])
        for which, spec in variants:
            phi = entry_polynomial(spec).specialize(point)
            match = len(cands) == 1 and _proportional(phi, cands[0])
            rows.append({"family": "joint", "name": e["name"], "form": which, "solver_match": match})
    # the h-eigenfunction with eps = 12 omega mixes the two joint states of that level
    level6 = [p for p, lab in zip(funcs, joint.labels) if lab[0] == as_scalar(omega) * 12]
    for e in eigenfunction_entries("minimal_flag"):
        if e["name"] != "phi_5_1":
            continue
        for which in ("printed", "corrected"):
            key = "phi" if which == "printed" else "corrected_phi"
            phi = entry_polynomial(e[key]).specialize(point)
            rows.append({"family": "mixing", "name": "phi_5_1 in span(tilde_phi_6_0, tilde_phi_6_1)",
                         "form": which, "solver_match": len(level6) == 2 and _in_span(phi, level6)})
    return rows


def closed_form_report(h, f, nu=None, omega=None) -> list[dict]:
    """Rows for every printed closed form: symbolic eigen-equations and,
    at rational ``nu`` and ``omega``, agreement with solver eigenvectors."""
    rows = _closed_form_rows(h, f) + _laguerre_rows(h, f)
    if nu is not None and omega is not None:
        rows += _solver_rows(h, f, nu, omega)
    return rows


def check_eigenfunctions(art: Artifacts, cfg: RunConfig) -> CheckResult:
    h, f = art.hamiltonian(), art.integral()
    rows = closed_form_report(h, f, None if cfg.symbolic else cfg.nu, None if cfg.symbolic else cfg.omega)
    printed = [r for r in rows if r["form"] == "printed"]
    corrected = [r for r in rows if r["form"] == "corrected"]

    def good(r):
        return r.get("holds", r.get("solver_match"))

    failing = sorted({r["name"] for r in printed if not good(r)})
    repaired_ok = all(good(r) for r in corrected)
    ok = not failing
    detail = f"{sum(map(good, printed))}/{len(printed)} printed-form checks hold"
    if failing:
        detail += f"; failing: {', '.join(failing)}; repaired forms hold: {repaired_ok}"
    if cfg.symbolic:
        detail += "; solver comparison skipped (symbolic)"
    return CheckResult(9, "closed-form eigenfunctions", ok, detail, rows)


# -- 10. integral spectrum -----------------------------------------------------------------------------

def check_gamma_spectrum(art: Artifacts, cfg: RunConfig) -> CheckResult:
    if cfg.symbolic:
        return CheckResult(10, "integral eigenvalues", None, "skipped (symbolic)")
    level = 15
    h, f = art.hamiltonian(), art.integral()
    basis = flag_basis(FLAG_FULL, level)
    joint = joint_eigenfunctions(h, f, basis, cfg.nu, cfg.omega)
    got = Counter((_txt(e), _txt(g)) for e, g in joint.labels)
    om = as_scalar(cfg.omega)
    expected = Counter((_txt(om * (2 * weighted_degree(m, FLAG_FULL))), _txt(gamma_printed(*m[1:], cfg.nu)))
                       for m in basis.monomials)
    ok = got == expected
    rows = [{"epsilon": e, "gamma": g, "count": c, "expected": expected.get((e, g), 0)}
            for (e, g), c in sorted(got.items())]
    return CheckResult(10, "integral eigenvalues", ok,
                       f"{len(joint.labels)} joint eigenfunctions on P_{level}{FLAG_FULL}, "
                       f"labels {'match' if ok else 'differ from'} the closed form", rows)


# -- 11. boundary -----------------------------------------------------------------------------------------

def check_boundary(art: Artifacts, cfg: RunConfig) -> CheckResult:
    b = art.boundary()
    ref = boundary_reference()
    anchors = load_reference()["boundary"]["anchors"]
    anchor_exps = {"t2^10": (0, 10, 0, 0), "t4^4": (0, 0, 0, 4), "t3^6": (0, 0, 6, 0)}
    lead = b.polynomial.coefficient(anchor_exps["t2^10"] + (0, 0))
    scale = lead / anchors["t2^10"]
    proportional = bool(scale) and b.polynomial == ref.scale(scale)
    anchor_rows = []
    for name, exps in anchor_exps.items():
        got = b.polynomial.coefficient(exps + (0, 0))
        anchor_rows.append({"anchor": name, "printed": anchors[name], "derived": _txt(got),
                            "match": got == scale * anchors[name]})
    ok = bool(b.jacobian_scalar) and proportional and all(r["match"] for r in anchor_rows)
    return CheckResult(11, "boundary surface", ok,
                       f"J = ({_txt(b.jacobian_scalar)}) Delta1 Delta2 Delta3; J^2 = ({_txt(scale)}) x printed "
                       f"polynomial: {proportional}",
                       [{"jacobian_scalar": _txt(b.jacobian_scalar), "proportionality": _txt(scale),
                         "terms": len(b.polynomial)}] + anchor_rows)


# -- 12. flags and weighted projective transformation -------------------------------------------------------

def _random_wpt_params(rng: random.Random) -> dict[str, list[int]]:
    return {k: [rng.randint(-9, 9) or 1 for _ in shapes] for k, shapes in WPT_SHAPES.items()}


def check_flags_and_wpt(art: Artifacts, cfg: RunConfig, level: int = 12) -> CheckResult:
    h = art.hamiltonian()
    rows = []
    flags_ok = True
    for weights in (FLAG_MIN, FLAG_FULL):
        preserved = True
        for n in range(level + 1):
            try:
                matrix_on_basis(h, flag_basis(weights, n))
            except NotInvariantSubspace:
                preserved = False
        rows.append({"flag": list(weights), "levels": f"0..{level}", "preserved": preserved})
        flags_ok &= preserved
    rng = random.Random(WPT_SEED)
    wpt_ok = True
    monos = flag_basis(FLAG_MIN, level).monomials
    for trial in range(WPT_TRIALS):
        params = _random_wpt_params(rng)
        worst = 0
        for m in monos:
            image = wpt_substitution(Polynomial.monomial(TAU, m + (0, 0)), params)
            excess = max((weighted_degree(e[:4], FLAG_MIN) for e, _ in image.terms()), default=0) \
                - weighted_degree(m, FLAG_MIN)
            worst = max(worst, excess)
        rows.append({"wpt_trial": trial, "max_degree_increase": worst})
        wpt_ok &= worst <= 0
    return CheckResult(12, "flags and weighted projective transformation", flags_ok and wpt_ok,
                       f"h preserves both flags for n<={level}: {flags_ok}; "
                       f"{WPT_TRIALS} random transformations preserve P_n{FLAG_MIN}: {wpt_ok}", rows)


CHECKS: tuple[Callable[[Artifacts, RunConfig], CheckResult], ...] = (
    check_group,
    check_roots,
    check_tau,
    check_orbit_sums,
    check_hamiltonian,
    check_integral,
    check_commutation,
    check_spectrum,
    check_eigenfunctions,
    check_gamma_spectrum,
    check_boundary,
    check_flags_and_wpt,
)


def run_checks(art: Artifacts, cfg: RunConfig, only: Any = None,
               on_result: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    """Run the checks in order (``only``: iterable of criterion numbers)."""
    wanted = set(only) if only is not None else None
    results = []
    for number, check in enumerate(CHECKS, start=1):
        if wanted is not None and number not in wanted:
            continue
        start = time.perf_counter()
        try:
            res = check(art, cfg)
        except Exception as exc:  # a crash is reported as a failure of that criterion
            res = CheckResult(number, check.__name__.removeprefix("check_"), False,
                              f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - start
        results.append(res)
        if on_result is not None:
            on_result(res)
    return results
