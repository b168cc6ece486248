"""Command-line front end: derive, cache, verify and export every artifact.

Every subcommand prints one report (``--format json`` gives
``{"kind", "inputs", "rows", "match"}``) and exits 0 when the report matches
the embedded reference values, 1 when it does not and 3 when a computation
raises.  Output on stdout is deterministic for a fixed configuration.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from gmpy2 import mpq

from .artifacts import Artifacts, scalar_text
from .cache import CacheStore
from .config import RunConfig, parse_parameter
from .coxeter import GroupTooLarge, LinearForm, RootSystemH4
from .field import ExactScalar
from .invariants import FLAG_FULL, FLAG_MIN, weighted_degree
from .poly import TAU, Polynomial
from .reference import operator_entries
from .spectral import degeneracy, flag_basis, spectrum
from .verification import (
    CheckResult,
    check_boundary,
    check_hamiltonian,
    check_integral,
    check_tau,
    closed_form_report,
    convention_scalar,
    run_checks,
)

__all__ = ["EXIT_ERROR", "EXIT_MISMATCH", "EXIT_OK", "Report", "build_parser", "default_cache_dir", "main"]

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 3

log = logging.getLogger("h4algebra")


@dataclass
class Report:
    kind: str
    inputs: dict
    rows: list[dict] = field(default_factory=list)
    match: bool = True
    summary: str = ""

    def to_json(self) -> str:
        payload = {"kind": self.kind, "inputs": self.inputs, "rows": self.rows, "match": self.match}
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [self.summary] if self.summary else []
        for row in self.rows:
            lines.append("  " + "  ".join(f"{k}={_plain(v)}" for k, v in row.items()))
        lines.append(f"match={'yes' if self.match else 'no'}")
        return "\n".join(lines) + "\n"


def _plain(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(map(_plain, v)) + "]"
    return str(v)


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "h4algebra"


# -- subcommands ----------------------------------------------------------------------

def _corrupted_roots() -> list[LinearForm]:
    """Simple roots with the last one bent off the root system (test mode)."""
    roots = list(RootSystemH4.build().simple_roots)
    bent = list(roots[-1].coeffs)
    bent[0] = bent[0] + ExactScalar(mpq(1, 7))
    roots[-1] = LinearForm(bent)
    return roots


def cmd_group(art: Artifacts, cfg: RunConfig, args) -> Report:
    s = art.group()
    ok = s.matches_reference()
    return Report("group", cfg.inputs(),
                  [{"order": s.order, "orbit_lengths": list(s.orbit_lengths),
                    "simple_roots": [[scalar_text(c) for c in r.coeffs] for r in s.simple_roots]}],
                  ok, f"order={s.order}, orbits=[{','.join(map(str, s.orbit_lengths))}]")


def _from_check(kind: str, cfg: RunConfig, res: CheckResult) -> Report:
    return Report(kind, cfg.inputs(), res.rows, bool(res.passed), res.detail)


def cmd_tau(art: Artifacts, cfg: RunConfig, args) -> Report:
    res = check_tau(art, cfg)
    rows = [dict(row, polynomial=art.tau()[row["tau"] - 1].to_text()) for row in res.rows]
    return Report("tau", cfg.inputs(), rows, bool(res.passed), res.detail)


def _operator_diff(kind: str, derived, scale: ExactScalar) -> list[dict]:
    second, first = operator_entries(kind)
    sym, fo = derived.symbol(), derived.first_order()
    letters = ("A", "B") if kind == "hamiltonian" else ("F", "G")
    rows = []
    entries = [(f"{letters[0]}{i + 1}{j + 1}", sym.get((i, j), Polynomial.zero(TAU)), ref)
               for (i, j), ref in sorted(second.items())]
    entries += [(f"{letters[1]}{i + 1}", fo[i], ref) for i, ref in enumerate(first)]
    for name, got, ref in entries:
        diff = got - ref.scale(scale)
        rows.append({"entry": name, "derived": got.to_text(), "printed": ref.to_text(),
                     "difference": diff.to_text(), "match": diff.is_zero()})
    return rows


def cmd_derive(art: Artifacts, cfg: RunConfig, args) -> Report:
    if args.artifact == "hamiltonian":
        res = check_hamiltonian(art, cfg)
        return Report("hamiltonian", cfg.inputs(), _operator_diff("hamiltonian", art.hamiltonian(), ExactScalar(1)),
                      bool(res.passed), res.detail)
    if args.artifact == "integral":
        res = check_integral(art, cfg)
        scale = convention_scalar(art.integral()) or ExactScalar(1)
        rows = [res.rows[0]] + _operator_diff("integral", art.integral(), scale)
        return Report("integral", cfg.inputs(), rows, bool(res.passed), res.detail)
    return _from_check("boundary", cfg, check_boundary(art, cfg))


def cmd_boundary(art: Artifacts, cfg: RunConfig, args) -> Report:
    res = check_boundary(art, cfg)
    b = art.boundary()
    rows = [{"monomial": _monomial(e), "coefficient": scalar_text(c)} for e, c in b.polynomial.terms()]
    return Report("boundary", cfg.inputs(), res.rows + rows, bool(res.passed), res.detail)


def _monomial(exps: Sequence[int]) -> str:
    parts = [f"t{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps[:4]) if e]
    return "*".join(parts) or "1"


def cmd_spectrum(art: Artifacts, cfg: RunConfig, args) -> Report:
    point = {k: v for k, v in (("nu", cfg.nu), ("omega", cfg.omega)) if v is not None}
    h = art.hamiltonian().specialize(point)
    basis = flag_basis(FLAG_MIN, cfg.level)
    res = spectrum(h, basis, scale=-2)
    omega = Polynomial.var(TAU, "omega").specialize(point)
    counts: dict[int, int] = {}
    for m in basis.monomials:
        k = weighted_degree(m, FLAG_FULL)
        counts[k] = counts.get(k, 0) + 1
    observed = {e.to_text(): m for e, m in zip(res.eigenvalues, res.multiplicities)}
    rows = []
    for k in sorted(counts):
        predicted = omega.scale(2 * k).to_text()
        mult = observed.pop(predicted, 0)
        rows.append({"level": k, "eigenvalue": predicted, "multiplicity": mult,
                     "predicted_multiplicity": counts[k], "degeneracy": degeneracy(k),
                     "match": mult == counts[k]})
    for text, mult in observed.items():  # eigenvalues off the predicted ladder
        rows.append({"level": None, "eigenvalue": text, "multiplicity": mult,
                     "predicted_multiplicity": 0, "degeneracy": 0, "match": False})
    ok = all(r["match"] for r in rows)
    return Report("spectrum", cfg.inputs(), rows, ok,
                  f"{basis.dimension} states on P_{cfg.level}{FLAG_MIN}, {len(res.eigenvalues)} distinct eigenvalues")


def cmd_eigenfunctions(art: Artifacts, cfg: RunConfig, args) -> Report:
    rows = closed_form_report(art.hamiltonian(), art.integral(),
                              None if cfg.symbolic else cfg.nu, None if cfg.symbolic else cfg.omega)
    printed = [r for r in rows if r["form"] == "printed"]
    ok = all(r.get("holds", r.get("solver_match")) for r in printed)
    return Report("eigenfunctions", cfg.inputs(), rows, ok,
                  f"{len(printed)} printed-form checks, {len(rows) - len(printed)} on repaired forms")


def cmd_verify_all(art: Artifacts, cfg: RunConfig, args) -> Report:
    stream = cfg.fmt == "text"

    def emit(res: CheckResult):
        if stream:
            print(res.line(), flush=True)

    results = run_checks(art, cfg, on_result=emit)
    ok = all(r.passed is not False for r in results)
    rows = [{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results]
    failed = [r.number for r in results if r.passed is False]
    summary = "" if stream else f"{len(results)} criteria"
    report = Report("verify-all", cfg.inputs(), [] if stream else rows, ok, summary)
    if stream:
        passed = sum(r.passed is True for r in results)
        skipped = len(results) - passed - len(failed)
        report.summary = f"{passed}/{len(results)} criteria pass" + (
            f", {skipped} skipped" if skipped else "") + (f"; failing: {failed}" if failed else "")
    return report


COMMANDS: dict[str, Callable[[Artifacts, RunConfig, argparse.Namespace], Report]] = {
    "group": cmd_group,
    "tau": cmd_tau,
    "derive": cmd_derive,
    "spectrum": cmd_spectrum,
    "eigenfunctions": cmd_eigenfunctions,
    "boundary": cmd_boundary,
    "verify-all": cmd_verify_all,
}


# -- argument handling ------------------------------------------------------------------

def _parameter(text: str):
    try:
        return parse_parameter(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nu", type=_parameter, default=argparse.SUPPRESS,
                        help="coupling parameter: P/Q or 'symbolic' (default 1/3)")
    common.add_argument("--omega", type=_parameter, default=argparse.SUPPRESS,
                        help="oscillator frequency: P/Q or 'symbolic' (default 1)")
    common.add_argument("--level", type=int, default=argparse.SUPPRESS, help="flag level n (default 12)")
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--cache", type=Path, default=argparse.SUPPRESS, metavar="DIR",
                        help=f"cache directory (default {default_cache_dir()})")
    common.add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="h4algebra", parents=[common],
                                     description="Exact algebra of the rational H4 model.")
    sub = parser.add_subparsers(dest="command", required=True)
    g = sub.add_parser("group", parents=[common], help="group order and orbit lengths")
    g.add_argument("--corrupt-root", action="store_true",
                   help="test mode: bend one simple root off the root system")
    sub.add_parser("tau", parents=[common], help="invariant coordinates and their invariance")
    d = sub.add_parser("derive", parents=[common], help="derive an artifact and diff it against the reference")
    d.add_argument("artifact", choices=("hamiltonian", "integral", "boundary"))
    sub.add_parser("spectrum", parents=[common], help="eigenvalue table on the minimal flag")
    sub.add_parser("eigenfunctions", parents=[common], help="check the closed-form eigenfunctions")
    sub.add_parser("boundary", parents=[common], help="boundary polynomial in invariant coordinates")
    sub.add_parser("verify-all", parents=[common], help="run every acceptance criterion")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(nu=getattr(args, "nu", mpq(1, 3)), omega=getattr(args, "omega", mpq(1)),
                     level=getattr(args, "level", 12), fmt=getattr(args, "fmt", "text"),
                     cache_dir=None if getattr(args, "no_cache", False)
                     else getattr(args, "cache", default_cache_dir()))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    corrupt = getattr(args, "corrupt_root", False)
    store = CacheStore(cfg.cache_dir) if cfg.cache_dir is not None else None
    art = Artifacts(store, simple_roots=_corrupted_roots() if corrupt else None)
    try:
        report = COMMANDS[args.command](art, cfg, args)
    except GroupTooLarge as exc:
        print(f"error: group generation overflow: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for event in art.events:
        log.info(event)
    sys.stdout.write(report.to_json() if cfg.fmt == "json" else report.to_text())
    return EXIT_OK if report.match else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
