"""Run configuration shared by the command line and the verification suite."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from gmpy2 import mpq

__all__ = ["RunConfig", "SYMBOLIC", "parse_parameter"]

SYMBOLIC = "symbolic"


def parse_parameter(text: str | int | Fraction | None) -> mpq | None:
    """``"P/Q"``, an integer or ``"symbolic"`` (returned as None)."""
    if text is None:
        return None
    if isinstance(text, str):
        s = text.strip()
        if s.lower() == SYMBOLIC:
            return None
        try:
            return mpq(Fraction(s))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"expected P/Q or '{SYMBOLIC}', got {text!r}") from None
    return mpq(text)


@dataclass(frozen=True)
class RunConfig:
    """``nu`` and ``omega`` are rationals, or None for symbolic.

    A rational ``nu`` must satisfy ``nu (nu - 1) > -1/4`` and a rational
    ``omega`` must be positive.
    """

    nu: mpq | None = mpq(1, 3)
    omega: mpq | None = mpq(1)
    level: int = 12
    fmt: str = "text"
    cache_dir: Path | None = None

    def __post_init__(self):
        if self.nu is not None and not self.nu * (self.nu - 1) > mpq(-1, 4):
            raise ValueError(f"nu = {self.nu} violates nu(nu - 1) > -1/4")
        if self.omega is not None and not self.omega > 0:
            raise ValueError(f"omega = {self.omega} must be positive")
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if self.fmt not in ("json", "text"):
            raise ValueError(f"unknown format {self.fmt!r}")

    @property
    def symbolic(self) -> bool:
        return self.nu is None or self.omega is None

    def inputs(self) -> dict:
        def show(v):
            return SYMBOLIC if v is None else str(v)

        return {"nu": show(self.nu), "omega": show(self.omega), "level": self.level}
