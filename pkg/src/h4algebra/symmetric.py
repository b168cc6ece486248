"""Special polynomials: monomial symmetric functions of the squares,
the alternating product of squared differences, and generalized Laguerre
polynomials with symbolic parameter."""
from __future__ import annotations

import re
from itertools import combinations, permutations
from math import factorial

from .poly import X, Polynomial, VariableContext

__all__ = ["alternating_delta4", "bracket", "laguerre", "monomial_symmetric", "parse_bracket"]

_PART = re.compile(r"^(\d+)(?:\^(\d+))?$")


def parse_bracket(text: str, length: int = 4) -> tuple[int, ...]:
    """Read bracket notation such as ``[3^2|0^2]`` into ``(3, 3, 0, 0)``.

    Each ``p^k`` entry means the part ``p`` repeated ``k`` times.  Missing
    trailing parts are zeros.
    """
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"not a bracket partition: {text!r}")
    parts: list[int] = []
    for chunk in body[1:-1].split("|"):
        m = _PART.match(chunk.strip())
        if not m:
            raise ValueError(f"bad bracket entry {chunk!r} in {text!r}")
        parts += [int(m.group(1))] * int(m.group(2) or 1)
    if len(parts) > length:
        raise ValueError(f"partition {text!r} longer than {length}")
    return tuple(parts + [0] * (length - len(parts)))


def monomial_symmetric(partition, ctx: VariableContext = X) -> Polynomial:
    """Sum of ``prod x_k^(2*mu_k)`` over distinct permutations ``mu`` of ``partition``.

    ``partition`` is a non-increasing tuple of length at most the number of
    main variables, or a bracket string like ``"[2|1|0^2]"``.
    """
    n = len(ctx.variables)
    if isinstance(partition, str):
        partition = parse_bracket(partition, n)
    lam = tuple(partition)
    if len(lam) > n:
        raise ValueError(f"partition {lam} longer than {n}")
    if any(p < 0 for p in lam) or any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"partition must be non-increasing and nonnegative: {lam}")
    lam = lam + (0,) * (n - len(lam))
    npar = len(ctx.params)
    terms = {}
    for mu in set(permutations(lam)):
        terms[tuple(2 * m for m in mu) + (0,) * npar] = 1
    return Polynomial(ctx, terms)


bracket = monomial_symmetric


def alternating_delta4(ctx: VariableContext = X) -> Polynomial:
    """``prod_{i<j} (x_i^2 - x_j^2)`` over the main variables."""
    sq = [Polynomial.var(ctx, v) ** 2 for v in ctx.variables]
    out = Polynomial.constant(ctx, 1)
    for i, j in combinations(range(len(sq)), 2):
        out = out * (sq[i] - sq[j])
    return out


def laguerre(n: int, alpha: Polynomial, z: Polynomial) -> Polynomial:
    """Generalized Laguerre polynomial ``L_n^(alpha)(z)`` with exact coefficients.

    Uses ``L_n^(a)(z) = sum_k (-1)^k binom(n+a, n-k) z^k / k!`` where the
    binomial is expanded as a polynomial in ``alpha``.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if alpha.ctx != z.ctx:
        raise ValueError("alpha and z must share a context")
    ctx = z.ctx
    total = Polynomial.zero(ctx)
    zk = Polynomial.constant(ctx, 1)
    for k in range(n + 1):
        # binom(n + alpha, n - k) = prod_{i=1}^{n-k} (alpha + k + i) / (n-k)!
        binom = Polynomial.constant(ctx, 1)
        for i in range(1, n - k + 1):
            binom = binom * (alpha + (k + i))
        coeff = binom / (factorial(n - k) * factorial(k))
        term = coeff * zk
        total = total - term if k % 2 else total + term
        zk = zk * z
    return total
