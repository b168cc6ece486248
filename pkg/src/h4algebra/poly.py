"""Sparse multivariate polynomials with coefficients in Q(sqrt5).

Storage
-------
A polynomial is ``(R + sqrt5*S) / den`` where ``R`` and ``S`` are dicts from
packed exponent vectors to Python ints and ``den`` is a positive int.  The
gcd of ``den`` and every stored integer is 1, and zero entries are never
stored, so two equal polynomials have identical storage.

Exponent vectors are packed ``BITS`` bits per variable with the first
variable in the most significant slot; integer order of packed keys is then
lexicographic order, and the canonical (graded lexicographic) order is the
integer order of ``(total_degree, key)``.
"""
from __future__ import annotations

import ast
import heapq
from dataclasses import dataclass
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .field import ExactScalar, as_scalar, format_scalar, to_mpq

__all__ = [
    "BITS",
    "ContextMismatch",
    "NotDivisible",
    "Polynomial",
    "TAU",
    "VariableContext",
    "X",
    "divide_by_linear_form",
    "exact_divide",
]

BITS = 10
MASK = (1 << BITS) - 1


class ContextMismatch(ValueError):
    """Raised when polynomials from different variable contexts are mixed."""


class NotDivisible(ArithmeticError):
    """Raised when an exact division leaves a nonzero remainder."""


@dataclass(frozen=True)
class VariableContext:
    """Ordered variable names: main variables followed by parameters."""

    variables: tuple[str, ...]
    params: tuple[str, ...] = ("nu", "omega")

    def __post_init__(self):
        names = self.variables + self.params
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if BITS * len(names) > 63:
            raise ValueError("too many variables for the packed exponent format")

    @property
    def names(self) -> tuple[str, ...]:
        return self.variables + self.params

    @property
    def nvars(self) -> int:
        return len(self.variables) + len(self.params)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in context {self.names}") from None

    def shift(self, i: int) -> int:
        return BITS * (self.nvars - 1 - i)

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {len(exps)}")
        key = 0
        for e in exps:
            if e < 0 or e > MASK:
                raise ValueError(f"exponent {e} out of range")
            key = (key << BITS) | e
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.nvars):
            out.append(key & MASK)
            key >>= BITS
        return tuple(reversed(out))

    def degree_of_key(self, key: int) -> int:
        d = 0
        while key:
            d += key & MASK
            key >>= BITS
        return d

    def main_degree_of_key(self, key: int) -> int:
        d = 0
        key >>= BITS * len(self.params)
        while key:
            d += key & MASK
            key >>= BITS
        return d

    def __str__(self):
        return "(" + ",".join(self.names) + ")"


X = VariableContext(("x1", "x2", "x3", "x4"))
TAU = VariableContext(("t1", "t2", "t3", "t4"))


def _scalar_parts(c) -> tuple[int, int, int]:
    """Return ``(p, q, r)`` with ``c = (p + q*sqrt5)/r`` and ``r > 0``."""
    s = as_scalar(c)
    a, b = s.a, s.b
    r = lcm(int(a.denominator), int(b.denominator))
    return int(a.numerator) * (r // int(a.denominator)), int(b.numerator) * (r // int(b.denominator)), r


def _mul_dicts(a: dict, b: dict) -> dict:
    """Product of two packed-key integer dicts (zeros may remain)."""
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    bitems = list(b.items())
    for k1, c1 in a.items():
        for k2, c2 in bitems:
            k = k1 + k2
            out[k] = get(k, 0) + c1 * c2
    return out


def _add_into(out: dict, src: dict, factor: int = 1) -> None:
    get = out.get
    if factor == 1:
        for k, v in src.items():
            out[k] = get(k, 0) + v
    else:
        for k, v in src.items():
            out[k] = get(k, 0) + factor * v


class Polynomial:
    """Immutable sparse polynomial over Q(sqrt5) in a :class:`VariableContext`.

    Parameters
    ----------
    ctx : VariableContext
    terms : mapping, optional
        ``{exponent tuple: coefficient}``; coefficients may be ints,
        fractions or :class:`ExactScalar`.
    """

    __slots__ = ("ctx", "_rat", "_irr", "_den", "_maxexp", "_hash")

    def __init__(self, ctx: VariableContext, terms: Mapping | None = None):
        rat: dict = {}
        irr: dict = {}
        den = 1
        if terms:
            parts = []
            for exps, c in terms.items():
                p, q, r = _scalar_parts(c)
                if p == 0 and q == 0:
                    continue
                parts.append((ctx.pack(exps), p, q, r))
                den = lcm(den, r)
            for key, p, q, r in parts:
                f = den // r
                if p:
                    rat[key] = rat.get(key, 0) + p * f
                if q:
                    irr[key] = irr.get(key, 0) + q * f
        self._set(ctx, rat, irr, den)

    # -- construction helpers --------------------------------------------
    def _set(self, ctx, rat, irr, den):
        rat = {k: v for k, v in rat.items() if v}
        irr = {k: v for k, v in irr.items() if v}
        if not rat and not irr:
            den = 1
        else:
            g = gcd(den, *rat.values(), *irr.values())
            if g != 1:
                den //= g
                rat = {k: v // g for k, v in rat.items()}
                irr = {k: v // g for k, v in irr.items()}
        self.ctx = ctx
        self._rat = rat
        self._irr = irr
        self._den = den
        self._maxexp = None
        self._hash = None

    @classmethod
    def _from_raw(cls, ctx, rat, irr, den) -> Polynomial:
        obj = cls.__new__(cls)
        obj._set(ctx, rat, irr, den)
        return obj

    @classmethod
    def zero(cls, ctx: VariableContext) -> Polynomial:
        return cls._from_raw(ctx, {}, {}, 1)

    @classmethod
    def constant(cls, ctx: VariableContext, c) -> Polynomial:
        p, q, r = _scalar_parts(c)
        return cls._from_raw(ctx, {0: p}, {0: q}, r)

    @classmethod
    def var(cls, ctx: VariableContext, name: str) -> Polynomial:
        i = ctx.index(name)
        return cls._from_raw(ctx, {1 << ctx.shift(i): 1}, {}, 1)

    @classmethod
    def monomial(cls, ctx: VariableContext, exps: Sequence[int], c=1) -> Polynomial:
        p, q, r = _scalar_parts(c)
        key = ctx.pack(exps)
        return cls._from_raw(ctx, {key: p}, {key: q}, r)

    @classmethod
    def linear(cls, ctx: VariableContext, coeffs: Sequence) -> Polynomial:
        """``sum_i coeffs[i] * (i-th main variable)``."""
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * ctx.nvars
            e[i] = 1
            terms[tuple(e)] = c
        return cls(ctx, terms)

    # -- inspection -------------------------------------------------------
    def keys(self) -> set:
        return self._rat.keys() | self._irr.keys()

    def __len__(self):
        return len(self.keys())

    def is_zero(self) -> bool:
        return not self._rat and not self._irr

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        """True if every coefficient lies in Q."""
        return not self._irr

    def _coeff_key(self, key: int) -> ExactScalar:
        return ExactScalar._raw(mpq(self._rat.get(key, 0), self._den),
                                mpq(self._irr.get(key, 0), self._den))

    def coefficient(self, exps: Sequence[int] | Mapping[str, int]) -> ExactScalar:
        if isinstance(exps, Mapping):
            e = [0] * self.ctx.nvars
            for name, v in exps.items():
                e[self.ctx.index(name)] = v
            exps = e
        return self._coeff_key(self.ctx.pack(exps))

    def _sorted_keys(self, descending: bool = True) -> list:
        deg = self.ctx.degree_of_key
        return sorted(self.keys(), key=lambda k: (deg(k), k), reverse=descending)

    def terms(self) -> list[tuple[tuple[int, ...], ExactScalar]]:
        """Terms in canonical order (descending graded lexicographic)."""
        return [(self.ctx.unpack(k), self._coeff_key(k)) for k in self._sorted_keys()]

    def leading_term(self) -> tuple[tuple[int, ...], ExactScalar]:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        deg = self.ctx.degree_of_key
        k = max(self.keys(), key=lambda k: (deg(k), k))
        return self.ctx.unpack(k), self._coeff_key(k)

    def degree(self) -> int:
        """Total degree over all context variables (-1 for zero)."""
        if self.is_zero():
            return -1
        return max(map(self.ctx.degree_of_key, self.keys()))

    def main_degree(self) -> int:
        """Total degree in the main variables only (-1 for zero)."""
        if self.is_zero():
            return -1
        return max(map(self.ctx.main_degree_of_key, self.keys()))

    def degree_in(self, name: str) -> int:
        if self.is_zero():
            return -1
        sh = self.ctx.shift(self.ctx.index(name))
        return max((k >> sh) & MASK for k in self.keys())

    def max_exponent(self) -> int:
        if self._maxexp is None:
            if self.is_zero():
                self._maxexp = 0
            else:
                self._maxexp = max(max(self.ctx.unpack(k)) for k in self.keys())
        return self._maxexp

    def is_homogeneous(self) -> bool:
        """Homogeneous in the main variables."""
        degs = {self.ctx.main_degree_of_key(k) for k in self.keys()}
        return len(degs) <= 1

    def is_constant(self) -> bool:
        return self.keys() <= {0}

    def constant_value(self) -> ExactScalar:
        return self._coeff_key(0)

    def variables_used(self) -> set[str]:
        used = set()
        for k in self.keys():
            for name, e in zip(self.ctx.names, self.ctx.unpack(k)):
                if e:
                    used.add(name)
        return used

    # -- equality ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (self.ctx == other.ctx and self._den == other._den
                    and self._rat == other._rat and self._irr == other._irr)
        s = as_scalar(other, strict=False)
        if s is None:
            return NotImplemented
        return self == Polynomial.constant(self.ctx, s)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, self._den, frozenset(self._rat.items()),
                               frozenset(self._irr.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> Polynomial | None:
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        s = as_scalar(other, strict=False)
        if s is None:
            return None
        return Polynomial.constant(self.ctx, s)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        den = lcm(self._den, o._den)
        f1, f2 = den // self._den, den // o._den
        rat = {k: v * f1 for k, v in self._rat.items()} if f1 != 1 else dict(self._rat)
        irr = {k: v * f1 for k, v in self._irr.items()} if f1 != 1 else dict(self._irr)
        _add_into(rat, o._rat, f2)
        _add_into(irr, o._irr, f2)
        return Polynomial._from_raw(self.ctx, rat, irr, den)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from_raw(self.ctx, {k: -v for k, v in self._rat.items()},
                                    {k: -v for k, v in self._irr.items()}, self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> Polynomial:
        p, q, r = _scalar_parts(c)
        if q == 0:
            return Polynomial._from_raw(self.ctx, {k: v * p for k, v in self._rat.items()},
                                        {k: v * p for k, v in self._irr.items()}, self._den * r)
        rat = {k: v * p for k, v in self._rat.items()}
        irr = {k: v * q for k, v in self._rat.items()}
        _add_into(rat, self._irr, 5 * q)
        _add_into(irr, self._irr, p)
        return Polynomial._from_raw(self.ctx, rat, irr, self._den * r)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            s = as_scalar(other, strict=False)
            if s is None:
                return NotImplemented
            return self.scale(s)
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(self.ctx)
        if self.max_exponent() + other.max_exponent() > MASK:
            raise OverflowError("exponent overflow in polynomial product")
        r1, s1, r2, s2 = self._rat, self._irr, other._rat, other._irr
        if not s1 and not s2:
            rat, irr = _mul_dicts(r1, r2), {}
        elif not s2:
            rat, irr = _mul_dicts(r1, r2), _mul_dicts(s1, r2)
        elif not s1:
            rat, irr = _mul_dicts(r1, r2), _mul_dicts(r1, s2)
        else:
            rr = _mul_dicts(r1, r2)
            ss = _mul_dicts(s1, s2)
            a = dict(r1)
            _add_into(a, s1)
            b = dict(r2)
            _add_into(b, s2)
            irr = _mul_dicts(a, b)
            _add_into(irr, rr, -1)
            _add_into(irr, ss, -1)
            rat = rr
            _add_into(rat, ss, 5)
        return Polynomial._from_raw(self.ctx, rat, irr, self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = as_scalar(other, strict=False)
        if s is None:
            return NotImplemented
        return self.scale(s.inverse())

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Polynomial.constant(self.ctx, 1)
        for _ in range(n):
            result = result * self
        return result

    def conjugate(self) -> Polynomial:
        """Apply sqrt5 -> -sqrt5 to every coefficient."""
        return Polynomial._from_raw(self.ctx, dict(self._rat),
                                    {k: -v for k, v in self._irr.items()}, self._den)

    # -- calculus ---------------------------------------------------------
    def diff(self, name: str, order: int = 1) -> Polynomial:
        out = self
        sh = self.ctx.shift(self.ctx.index(name))
        step = 1 << sh
        for _ in range(order):
            rat = {}
            irr = {}
            for k, v in out._rat.items():
                e = (k >> sh) & MASK
                if e:
                    rat[k - step] = v * e
            for k, v in out._irr.items():
                e = (k >> sh) & MASK
                if e:
                    irr[k - step] = v * e
            out = Polynomial._from_raw(self.ctx, rat, irr, out._den)
        return out

    def gradient(self) -> list[Polynomial]:
        return [self.diff(v) for v in self.ctx.variables]

    # -- evaluation / substitution ---------------------------------------
    def _point(self, values) -> list:
        if isinstance(values, Mapping):
            vals = []
            for name in self.ctx.names:
                if name in values:
                    vals.append(values[name])
                elif any(self.ctx.unpack(k)[self.ctx.index(name)] for k in self.keys()):
                    raise KeyError(f"no value supplied for variable {name!r}")
                else:
                    vals.append(0)
            return vals
        vals = list(values)
        if len(vals) == len(self.ctx.variables):
            vals += [0] * len(self.ctx.params)
        if len(vals) != self.ctx.nvars:
            raise ValueError("wrong number of evaluation values")
        return vals

    def evaluate(self, values) -> ExactScalar:
        """Evaluate at a point given as a sequence or ``{name: value}``."""
        vals = [as_scalar(v) for v in self._point(values)]
        n = self.ctx.nvars
        if all(v.is_rational() for v in vals):
            rvals = [v.a for v in vals]
            powers = [{} for _ in range(n)]
            ra = mpq(0)
            rb = mpq(0)
            for k in self.keys():
                m = mpq(1)
                kk = k
                for i in range(n - 1, -1, -1):
                    e = kk & MASK
                    kk >>= BITS
                    if e:
                        pw = powers[i].get(e)
                        if pw is None:
                            pw = rvals[i] ** e
                            powers[i][e] = pw
                        m *= pw
                c = self._rat.get(k)
                if c:
                    ra += c * m
                c = self._irr.get(k)
                if c:
                    rb += c * m
            return ExactScalar._raw(ra / self._den, rb / self._den)
        total = ExactScalar(0)
        powers = [{} for _ in range(n)]
        for k in self.keys():
            m = ExactScalar(1)
            exps = self.ctx.unpack(k)
            for i, e in enumerate(exps):
                if e:
                    pw = powers[i].get(e)
                    if pw is None:
                        pw = vals[i] ** e
                        powers[i][e] = pw
                    m = m * pw
            total = total + m * self._coeff_key(k)
        return total

    def __call__(self, *values):
        if len(values) == 1 and not isinstance(values[0], (int, ExactScalar)):
            return self.evaluate(values[0])
        return self.evaluate(values)

    def specialize(self, assignment: Mapping[str, object]) -> Polynomial:
        """Substitute scalar values for some variables (context unchanged)."""
        idx = {self.ctx.index(n): as_scalar(v) for n, v in assignment.items()}
        out_terms: dict = {}
        for exps, c in self.terms():
            val = c
            e = list(exps)
            for i, v in idx.items():
                if e[i]:
                    val = val * v ** e[i]
                    e[i] = 0
            t = tuple(e)
            out_terms[t] = out_terms.get(t, 0) + val
        return Polynomial(self.ctx, out_terms)

    def substitute(self, mapping: Mapping[str, Polynomial], target: VariableContext | None = None) -> Polynomial:
        """Compose with polynomials: each variable ``v`` becomes ``mapping[v]``.

        Variables absent from ``mapping`` are mapped to the same-named
        variable of ``target`` (parameters pass through this way).
        Evaluation is nested Horner over the context variables.
        """
        if target is None:
            target = next(iter(mapping.values())).ctx if mapping else self.ctx
        images = []
        for name in self.ctx.names:
            if name in mapping:
                img = mapping[name]
                if img.ctx != target:
                    raise ContextMismatch(f"image of {name} lives in {img.ctx}, not {target}")
            else:
                img = Polynomial.var(target, name)
            images.append(img)
        # outermost Horner variable: the largest image, so that the big
        # multiplications happen while the accumulator is still small
        order = sorted(range(self.ctx.nvars), key=lambda i: -len(images[i]))
        terms = [(self.ctx.unpack(k), self._coeff_key(k)) for k in self.keys()]
        return _horner(terms, order, images, target)

    def coefficients_in(self, names: Iterable[str]) -> dict[tuple[int, ...], Polynomial]:
        """Split as ``sum m_e * P_e`` with ``m_e`` monomials in ``names``.

        Returns ``{exponents over names: P_e}`` where ``P_e`` does not involve
        ``names``.
        """
        names = list(names)
        idx = [self.ctx.index(n) for n in names]
        groups: dict = {}
        for k in self.keys():
            exps = list(self.ctx.unpack(k))
            sel = tuple(exps[i] for i in idx)
            for i in idx:
                exps[i] = 0
            rest = self.ctx.pack(exps)
            g = groups.setdefault(sel, ({}, {}))
            if k in self._rat:
                g[0][rest] = self._rat[k]
            if k in self._irr:
                g[1][rest] = self._irr[k]
        return {sel: Polynomial._from_raw(self.ctx, r, s, self._den) for sel, (r, s) in groups.items()}

    def homogeneous_parts(self) -> dict[int, Polynomial]:
        """Split by total degree in the main variables."""
        groups: dict = {}
        for k in self.keys():
            d = self.ctx.main_degree_of_key(k)
            g = groups.setdefault(d, ({}, {}))
            if k in self._rat:
                g[0][k] = self._rat[k]
            if k in self._irr:
                g[1][k] = self._irr[k]
        return {d: Polynomial._from_raw(self.ctx, r, s, self._den) for d, (r, s) in sorted(groups.items())}

    def map_keys(self, ctx: VariableContext, fn) -> Polynomial:
        """Re-key every term with ``fn(exponent tuple) -> exponent tuple``."""
        rat = {ctx.pack(fn(self.ctx.unpack(k))): v for k, v in self._rat.items()}
        irr = {ctx.pack(fn(self.ctx.unpack(k))): v for k, v in self._irr.items()}
        return Polynomial._from_raw(ctx, rat, irr, self._den)

    # -- text -------------------------------------------------------------
    def _monomial_text(self, key: int) -> str:
        parts = []
        for name, e in zip(self.ctx.names, self.ctx.unpack(key)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def to_text(self) -> str:
        """Canonical serialization, e.g. ``3/2*x1^2 + (1+1/2*sqrt5)*x2``."""
        if self.is_zero():
            return "0"
        out = []
        for k in self._sorted_keys():
            a = mpq(self._rat.get(k, 0), self._den)
            b = mpq(self._irr.get(k, 0), self._den)
            c = format_scalar(a, b)
            if a != 0 and b != 0:
                c = f"({c})"
            mono = self._monomial_text(k)
            out.append(f"{c}*{mono}" if mono else c)
        return " + ".join(out)

    __str__ = to_text

    def __repr__(self):
        text = self.to_text()
        if len(text) > 200:
            text = text[:200] + " ..."
        return f"Polynomial({text})"

    @classmethod
    def from_text(cls, ctx: VariableContext, text: str) -> Polynomial:
        """Parse an arithmetic expression in the context variables.

        Accepts ``+ - * / ^ **``, parentheses, integer literals and the name
        ``sqrt5``; division is only allowed by constants.
        """
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return _eval_ast(tree.body, ctx)


def _horner(terms, order, images, target):
    """Nested Horner evaluation of ``sum c * prod images[i]**e_i``."""
    if not terms:
        return Polynomial.zero(target)
    if not order:
        return Polynomial.constant(target, terms[0][1]) if len(terms) == 1 else \
            Polynomial.constant(target, reduce(lambda s, t: s + t[1], terms, ExactScalar(0)))
    v, rest = order[0], order[1:]
    by_power: dict = {}
    for exps, c in terms:
        by_power.setdefault(exps[v], []).append((exps, c))
    top = max(by_power)
    acc = None
    for e in range(top, -1, -1):
        part = by_power.get(e)
        inner = _horner(part, rest, images, target) if part else None
        if acc is None:
            acc = inner
        else:
            acc = acc * images[v]
            if inner is not None:
                acc = acc + inner
    return acc


def _eval_ast(node, ctx):
    if isinstance(node, ast.BinOp):
        left = _eval_ast(node.left, ctx)
        right = _eval_ast(node.right, ctx)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant():
                raise ValueError("division by a non-constant polynomial")
            return left / right.constant_value()
        if isinstance(node.op, ast.Pow):
            if not right.is_constant() or not right.constant_value().is_rational():
                raise ValueError("exponent must be a nonnegative integer")
            e = right.constant_value().a
            if e.denominator != 1 or e < 0:
                raise ValueError("exponent must be a nonnegative integer")
            return left ** int(e)
        raise ValueError(f"unsupported operator {type(node.op).__name__}")
    if isinstance(node, ast.UnaryOp):
        val = _eval_ast(node.operand, ctx)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
        raise ValueError(f"unsupported unary operator {type(node.op).__name__}")
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Polynomial.constant(ctx, node.value)
    if isinstance(node, ast.Name):
        if node.id == "sqrt5":
            return Polynomial.constant(ctx, ExactScalar(0, 1))
        return Polynomial.var(ctx, node.id)
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


# -- exact division ----------------------------------------------------------

def divide_by_linear_form(p: Polynomial, form: Polynomial | Sequence) -> Polynomial:
    """Return ``q`` with ``p == form * q`` exactly.

    ``form`` is a nonzero homogeneous linear polynomial in the main
    variables (or the sequence of its coefficients).  Synthetic division is
    carried out in a pivot variable with nonzero coefficient; a nonzero
    remainder raises :class:`NotDivisible`.
    """
    ctx = p.ctx
    if not isinstance(form, Polynomial):
        form = Polynomial.linear(ctx, list(form))
    if form.ctx != ctx:
        raise ContextMismatch(f"{ctx} vs {form.ctx}")
    coeffs = []
    for i, name in enumerate(ctx.variables):
        e = [0] * ctx.nvars
        e[i] = 1
        coeffs.append(form.coefficient(e))
    if any(form.ctx.main_degree_of_key(k) != 1 for k in form.keys()) or form.is_zero():
        raise ValueError("divisor must be a nonzero linear form in the main variables")
    if len(form) != sum(1 for c in coeffs if c):
        raise ValueError("divisor must be a nonzero linear form in the main variables")
    if p.is_zero():
        return p
    candidates = [i for i, c in enumerate(coeffs) if c]
    # prefer rational pivot coefficients, then the lowest degree of p
    piv = min(candidates, key=lambda i: (not coeffs[i].is_rational(), p.degree_in(ctx.variables[i]), i))
    pname = ctx.variables[piv]
    cinv = coeffs[piv].inverse()
    rest = form - Polynomial.var(ctx, pname).scale(coeffs[piv])
    # p = sum_j p_j * x_piv^j
    sh = ctx.shift(piv)
    groups: dict = {}
    for k in p.keys():
        e = (k >> sh) & MASK
        g = groups.setdefault(e, ({}, {}))
        base = k - (e << sh)
        if k in p._rat:
            g[0][base] = p._rat[k]
        if k in p._irr:
            g[1][base] = p._irr[k]
    slices = {e: Polynomial._from_raw(ctx, r, s, p._den) for e, (r, s) in groups.items()}
    top = max(slices)
    xp = Polynomial.var(ctx, pname)
    quotient_slices = {}
    carry = slices.get(top, Polynomial.zero(ctx))
    for j in range(top, 0, -1):
        qj = carry.scale(cinv)
        quotient_slices[j - 1] = qj
        carry = slices.get(j - 1, Polynomial.zero(ctx)) - rest * qj
    if not carry.is_zero():
        raise NotDivisible(f"nonzero remainder dividing by {form.to_text()}")
    q = Polynomial.zero(ctx)
    for j, qj in quotient_slices.items():
        if qj:
            q = q + qj * (xp ** j) if j else q + qj
    return q


def exact_divide(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact quotient ``p / q`` by leading-term elimination (grlex order)."""
    if q.ctx != p.ctx:
        raise ContextMismatch(f"{p.ctx} vs {q.ctx}")
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    ctx = p.ctx
    deg = ctx.degree_of_key
    if q.is_constant():
        return p.scale(q.constant_value().inverse())
    qterms = [(k, q._coeff_key(k)) for k in q.keys()]
    lead_k, lead_c = max(qterms, key=lambda t: (deg(t[0]), t[0]))
    lead_exps = ctx.unpack(lead_k)
    lead_inv = lead_c.inverse()
    rem = {k: p._coeff_key(k) for k in p.keys()}
    heap = [(-deg(k), -k) for k in rem]
    heapq.heapify(heap)
    quot: dict = {}
    while heap:
        nd, nk = heapq.heappop(heap)
        k = -nk
        c = rem.get(k)
        if c is None:
            continue
        if c.is_zero():
            del rem[k]
            continue
        exps = ctx.unpack(k)
        if any(a < b for a, b in zip(exps, lead_exps)):
            raise NotDivisible("leading term not divisible by the divisor's leading term")
        t = c * lead_inv
        shift = k - lead_k
        quot[shift] = t
        for qk, qc in qterms:
            nkey = qk + shift
            old = rem.get(nkey)
            val = (old if old is not None else ExactScalar(0)) - t * qc
            if old is None:
                heapq.heappush(heap, (-deg(nkey), -nkey))
            rem[nkey] = val
        del rem[k]
    if any(not c.is_zero() for c in rem.values()):
        raise NotDivisible("nonzero remainder in exact division")
    return Polynomial(ctx, {ctx.unpack(k): c for k, c in quot.items()})
