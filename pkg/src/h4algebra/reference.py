"""Published reference values, embedded as a versioned data file.

Every entry of ``data/reference.json`` is stored as printed; where a printed
entry is known to be defective, the corrected form sits next to it under a
``corrected_*`` key so both can be checked.
"""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any

from gmpy2 import mpq

from .field import ExactScalar, as_scalar
from .operators import DiffOperator
from .poly import TAU, Polynomial
from .spectral import laguerre_family

__all__ = [
    "REFERENCE_VERSION",
    "boundary_reference",
    "eigenfunction_entries",
    "entry_polynomial",
    "gamma_printed",
    "hamiltonian_reference",
    "integral_reference",
    "load_reference",
    "operator_entries",
    "orbit_parameters",
    "parse",
]

REFERENCE_VERSION = 1


@lru_cache(maxsize=1)
def _raw() -> str:
    return resources.files("h4algebra").joinpath("data/reference.json").read_text(encoding="utf-8")


def load_reference() -> dict[str, Any]:
    """Parsed copy of the reference data (fresh on every call)."""
    data = json.loads(_raw())
    if data.get("version") != REFERENCE_VERSION:
        raise ValueError(f"unsupported reference data version {data.get('version')!r}")
    return data


def parse(text: str) -> Polynomial:
    """τ-context polynomial from a reference string."""
    return Polynomial.from_text(TAU, text)


def entry_polynomial(spec: str | dict) -> Polynomial:
    """Resolve an eigenfunction entry: a polynomial string or ``{"laguerre": n}``."""
    if isinstance(spec, dict):
        return laguerre_family(int(spec["laguerre"]))[0]
    return parse(spec)


def orbit_parameters() -> tuple[mpq, ...]:
    return tuple(mpq(s) for s in load_reference()["orbit_parameters"])


def operator_entries(kind: str) -> tuple[dict[tuple[int, int], Polynomial], list[Polynomial]]:
    """``(second-order coefficients, first-order coefficients)`` for
    ``kind`` in ``{"hamiltonian", "integral"}``; indices are 0-based."""
    data = load_reference()[kind]
    second_key, first_key = ("A", "B") if kind == "hamiltonian" else ("F", "G")
    second = {(int(k[0]) - 1, int(k[1]) - 1): parse(v) for k, v in data[second_key].items()}
    first = [parse(data[first_key][str(i)]) for i in range(1, 5)]
    return second, first


def hamiltonian_reference() -> DiffOperator:
    return DiffOperator.from_symbol(TAU, *operator_entries("hamiltonian"))


def integral_reference() -> DiffOperator:
    return DiffOperator.from_symbol(TAU, *operator_entries("integral"))


def boundary_reference() -> Polynomial:
    return parse(load_reference()["boundary"]["polynomial"])


def eigenfunction_entries(family: str) -> list[dict[str, Any]]:
    """Entries of ``family`` in ``{"minimal_flag", "joint"}``."""
    return load_reference()["eigenfunctions"][family]


def gamma_printed(k2: int, k3: int, k4: int, nu) -> ExactScalar:
    """The printed closed form for the integral eigenvalue, without ``gamma_0``."""
    data = load_reference()["gamma"]
    q = data["quadratic"]
    ks = {"k2": k2, "k3": k3, "k4": k4}
    total = ExactScalar(0)
    for mono, c in q.items():
        value = 1
        for factor in mono.split("*"):
            name, _, power = factor.partition("^")
            value *= ks[name] ** int(power or 1)
        total = total + c * value
    nu = as_scalar(nu)
    return total + (nu * 60 + 1) * (2 * (6 * k2 + 10 * k3 + 15 * k4))
