"""Derivation of the expensive artifacts, with optional on-disk caching.

Every artifact is derived symbolically in ``nu`` and ``omega``, so the cache
key depends only on the defining data (roots, potential weights and the
tables of the invariant coordinates) and on :data:`DERIVATION_VERSION`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .cache import CacheCorrupted, CacheStore, input_hash
from .coxeter import (
    ORBIT_LENGTHS,
    WEIGHTS,
    CoxeterGroup,
    LinearForm,
    RootSystemH4,
    generate_group,
    reflection,
    roots_from_delta_factors,
)
from .field import ExactScalar, as_scalar
from . import invariants
from .invariants import TauMap, boundary_surface, factor_jacobian, tau_explicit
from .operators import (
    DiffOperator,
    ModelSpec,
    build_integral_cartesian,
    gauge_rotate_hamiltonian,
    gauge_rotate_integral,
    integral_from_hamiltonian,
    pushforward,
)
from .poly import TAU, X, Polynomial

__all__ = ["Artifacts", "BoundaryResult", "DERIVATION_VERSION", "GroupSummary", "scalar_text", "parse_scalar"]

DERIVATION_VERSION = 1
SPOT_POINT = (1, 2, 3, 5)

log = logging.getLogger(__name__)


def scalar_text(c: ExactScalar) -> str:
    return Polynomial.constant(X, c).to_text()


def parse_scalar(text: str) -> ExactScalar:
    return Polynomial.from_text(X, text).constant_value()


def _vector_text(v: Sequence) -> list[str]:
    return [scalar_text(as_scalar(c)) for c in v]


@dataclass(frozen=True)
class GroupSummary:
    order: int
    orbit_lengths: tuple[int, ...]
    simple_roots: tuple[LinearForm, ...]
    orbit_w1: tuple[tuple[ExactScalar, ...], ...]

    def matches_reference(self) -> bool:
        return self.order == 14400 and self.orbit_lengths == tuple(ORBIT_LENGTHS.values())


@dataclass(frozen=True)
class BoundaryResult:
    polynomial: Polynomial
    jacobian_scalar: ExactScalar


def _tau_inputs() -> dict:
    return {name: getattr(invariants, name) for name in
            ("TAU2_SYM", "TAU3_SYM", "TAU3_ALT", "TAU3_ALT_FACTOR", "TAU4_SYM", "TAU4_ALT", "TAU4_ALT_FACTOR")}


def _model_inputs(spec: ModelSpec) -> dict:
    return {"roots": [_vector_text(r.coeffs) for r in spec.roots],
            "weights": [scalar_text(w) for w in spec.weights]}


class Artifacts:
    """Lazily derived group data, coordinates, operators and boundary.

    ``cache=None`` disables the disk cache; results are still memoized on
    the instance.  A corrupted cache file is reported, recomputed and
    overwritten.
    """

    def __init__(self, cache: CacheStore | None = None, spec: ModelSpec | None = None,
                 simple_roots: Sequence[LinearForm] | None = None):
        self.cache = cache
        self.spec = spec or ModelSpec.h4()
        self._simple_override = tuple(simple_roots) if simple_roots is not None else None
        self._memo: dict[str, Any] = {}
        self.events: list[str] = []

    # -- plumbing ------------------------------------------------------------
    def _hash(self, kind: str) -> str:
        base = {"version": DERIVATION_VERSION}
        if kind == "group":
            roots = self._simple_override or RootSystemH4.build().simple_roots
            base["simple_roots"] = [_vector_text(r.coeffs) for r in roots]
        else:
            base["tau"] = _tau_inputs()
            if kind in ("hamiltonian", "integral"):
                base["model"] = _model_inputs(self.spec)
        return input_hash(kind, base)

    def _get(self, kind: str, derive: Callable[[], Any], dump: Callable[[Any], Any],
             restore: Callable[[Any], Any], validate: Callable[[Any], bool]) -> Any:
        if kind in self._memo:
            return self._memo[kind]
        ihash = self._hash(kind)
        value = None
        if self.cache is not None:
            restored: dict = {}

            def check(payload) -> bool:
                restored["value"] = restore(payload)
                return validate(restored["value"])

            try:
                if self.cache.load(kind, ihash, check) is not None:
                    value = restored["value"]
                    self.events.append(f"{kind}: cache hit")
            except (CacheCorrupted, ValueError, KeyError, TypeError) as exc:
                log.warning("discarding cached %s: %s", kind, exc)
                self.events.append(f"{kind}: corrupted cache discarded ({exc})")
        if value is None:
            value = derive()
            self.events.append(f"{kind}: derived")
            if self.cache is not None:
                self.cache.save(kind, ihash, dump(value))
        self._memo[kind] = value
        return value

    # -- group -----------------------------------------------------------------
    def coxeter_group(self) -> CoxeterGroup:
        """The full group (not cached: generation takes well under a second)."""
        if "_group" not in self._memo:
            roots = self._simple_override or RootSystemH4.build().simple_roots
            self._memo["_group"] = generate_group([reflection(r) for r in roots])
        return self._memo["_group"]

    def group(self) -> GroupSummary:
        def derive():
            g = self.coxeter_group()
            roots = self._simple_override or RootSystemH4.build().simple_roots
            lengths = tuple(len(g.orbit_raw(w)[0]) for w in WEIGHTS.values())
            return GroupSummary(len(g), lengths, tuple(roots), tuple(g.orbit(WEIGHTS["w1"])))

        def dump(s: GroupSummary):
            return {"order": s.order, "orbit_lengths": list(s.orbit_lengths),
                    "simple_roots": [_vector_text(r.coeffs) for r in s.simple_roots],
                    "orbit_w1": [_vector_text(v) for v in s.orbit_w1]}

        def restore(p) -> GroupSummary:
            return GroupSummary(int(p["order"]), tuple(p["orbit_lengths"]),
                                tuple(LinearForm([parse_scalar(c) for c in r]) for r in p["simple_roots"]),
                                tuple(tuple(parse_scalar(c) for c in v) for v in p["orbit_w1"]))

        def validate(s: GroupSummary) -> bool:
            # the stored orbit is closed under the first simple reflection
            if not s.simple_roots:
                return False
            refl = reflection(s.simple_roots[0])
            pts = set(s.orbit_w1)
            return len(pts) == s.orbit_lengths[0] and all(refl.apply(v) in pts for v in s.orbit_w1)

        return self._get("group", derive, dump, restore, validate)

    # -- invariant coordinates --------------------------------------------------------
    def tau(self) -> TauMap:
        def dump(t: TauMap):
            return {"components": [c.to_text() for c in t.components]}

        def restore(p) -> TauMap:
            return TauMap(tuple(Polynomial.from_text(X, c) for c in p["components"]))

        def validate(t: TauMap) -> bool:
            # tau_2 is fixed by the reflection in a non-coordinate root
            root = next(r for r in roots_from_delta_factors() if r.norm2() != 1)
            sub = reflection(root).substitution(X)
            return t[1].substitute(sub, X) == t[1]

        return self._get("tau", tau_explicit, dump, restore, validate)

    # -- operators ---------------------------------------------------------------------
    @staticmethod
    def _dump_op(op: DiffOperator):
        return {"rows": op.to_rows()}

    @staticmethod
    def _restore_op(p) -> DiffOperator:
        return DiffOperator.from_rows(TAU, p["rows"])

    def hamiltonian(self) -> DiffOperator:
        """Gauge-rotated Hamiltonian in τ (the ``-2`` convention: ``h phi = -2 eps phi``)."""
        def derive():
            return pushforward(gauge_rotate_hamiltonian(self.spec), self.tau())

        def validate(h: DiffOperator) -> bool:
            # first-order coefficient of d/dt1 recomputed from the Cartesian operator
            h_cart = gauge_rotate_hamiltonian(self.spec)
            direct = invariants.invariantize(h_cart.apply(self.tau()[0]), self.tau())
            return h.coefficient((1, 0, 0, 0)) == direct

        return self._get("hamiltonian", derive, self._dump_op, self._restore_op, validate)

    def integral(self) -> DiffOperator:
        """Gauge-rotated integral in τ, derived from its Cartesian form."""
        def derive():
            F = build_integral_cartesian(self.spec)
            return pushforward(gauge_rotate_integral(F, self.spec), self.tau())

        def validate(f: DiffOperator) -> bool:
            # second route: the radial decomposition of the Hamiltonian
            return integral_from_hamiltonian(self.hamiltonian()) == f

        return self._get("integral", derive, self._dump_op, self._restore_op, validate)

    # -- boundary ------------------------------------------------------------------------
    def boundary(self) -> BoundaryResult:
        def derive():
            tmap = self.tau()
            return BoundaryResult(boundary_surface(tmap), factor_jacobian(tmap))

        def dump(b: BoundaryResult):
            return {"polynomial": b.polynomial.to_text(), "jacobian_scalar": scalar_text(b.jacobian_scalar)}

        def restore(p) -> BoundaryResult:
            return BoundaryResult(Polynomial.from_text(TAU, p["polynomial"]), parse_scalar(p["jacobian_scalar"]))

        def validate(b: BoundaryResult) -> bool:
            # J^2 = c^2 (product of the 60 root forms)^2 at one point
            x = [ExactScalar(v) for v in SPOT_POINT]
            prod = ExactScalar(1)
            for r in roots_from_delta_factors():
                prod = prod * r.dot(x)
            y = [v * v for v in x]
            tvals = self.tau_values_y(y)
            lhs = b.polynomial.evaluate(list(tvals) + [0, 0])
            return lhs == b.jacobian_scalar ** 2 * prod * prod

        return self._get("boundary", derive, dump, restore, validate)

    def tau_values_y(self, y: Sequence) -> list[ExactScalar]:
        return [c.evaluate(list(y) + [0, 0]) for c in self.tau().y_components]
