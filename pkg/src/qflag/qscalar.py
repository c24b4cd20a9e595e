"""Exact arithmetic in the rational function field Q(q).

Values are stored as ``t^shift * num(t) / den(t)`` where ``t^root = q`` and
``num``, ``den`` are integer polynomials. The stored form is canonical, so
equality and hashing are structural.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Optional, Union

from flint import fmpz, fmpz_poly

__all__ = [
    "LaurentScalar",
    "ProjParam",
    "ZeroDenominator",
    "ScalarParseError",
    "Q",
    "ONE",
    "ZERO",
    "q_power",
    "q_integer",
    "q_factorial",
    "q_binomial",
    "bracket_ratio",
    "monomial_lattice_test",
    "parse_scalar",
    "parse_proj",
    "serialize_scalar",
    "as_scalar",
    "INFINITY",
    "ORIGIN",
]

Number = Union[int, Fraction]


class ZeroDenominator(ZeroDivisionError):
    pass


class ScalarParseError(ValueError):
    pass


_ONE_POLY = fmpz_poly([1])
_ZERO_POLY = fmpz_poly([])


def _valuation(p: fmpz_poly) -> int:
    if p[0] != 0:
        return 0
    for i, c in enumerate(p.coeffs()):
        if c != 0:
            return i
    raise ValueError("valuation of zero polynomial")


def _deflate(p: fmpz_poly, k: int) -> fmpz_poly:
    if k == 1:
        return p
    cs = p.coeffs()
    return fmpz_poly(cs[::k])


def _inflate(p: fmpz_poly, k: int) -> fmpz_poly:
    if k == 1:
        return p
    return p.inflate(k)


def _exponent_gcd(p: fmpz_poly) -> int:
    g = 0
    for i, c in enumerate(p.coeffs()):
        if c != 0:
            g = gcd(g, i)
    return g


class LaurentScalar:
    """An element of Q(q), kept in reduced canonical form."""

    __slots__ = ("_num", "_den", "_shift", "_root", "_hash")

    def __init__(self, num: fmpz_poly, den: fmpz_poly = _ONE_POLY, shift: int = 0, root: int = 1):
        # callers outside this module should prefer the helper constructors
        self._hash = None
        if den.is_zero():
            raise ZeroDenominator("zero denominator")
        if num.is_zero():
            self._num, self._den, self._shift, self._root = _ZERO_POLY, _ONE_POLY, 0, 1
            return
        vn = _valuation(num)
        vd = _valuation(den)
        if vn:
            num = num.right_shift(vn)
        if vd:
            den = den.right_shift(vd)
        shift += vn - vd
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
            c = gcd(int(num.content()), int(den.content()))
            if c != 1:
                num = num // fmpz(c)
                den = den // fmpz(c)
            if den.coeffs()[0] < 0:
                num = -num
                den = -den
        if root > 1:
            k = gcd(root, shift)
            if k > 1:
                k = gcd(k, _exponent_gcd(num))
            if k > 1 and not den.is_one():
                k = gcd(k, _exponent_gcd(den))
            if k > 1:
                num = _deflate(num, k)
                den = _deflate(den, k)
                shift //= k
                root //= k
        self._num, self._den, self._shift, self._root = num, den, shift, root

    # construction helpers

    @classmethod
    def _raw(cls, num: fmpz_poly, den: fmpz_poly, shift: int, root: int) -> "LaurentScalar":
        # trusted: already canonical
        obj = object.__new__(cls)
        obj._num, obj._den, obj._shift, obj._root, obj._hash = num, den, shift, root, None
        return obj

    @classmethod
    def from_number(cls, c: Number) -> "LaurentScalar":
        c = Fraction(c)
        return cls(fmpz_poly([c.numerator]), fmpz_poly([c.denominator]))

    @classmethod
    def monomial(cls, exponent: Number, coefficient: Number = 1) -> "LaurentScalar":
        e = Fraction(exponent)
        c = Fraction(coefficient)
        return cls(fmpz_poly([c.numerator]), fmpz_poly([c.denominator]), e.numerator, e.denominator)

    @classmethod
    def from_laurent(cls, coeffs: dict) -> "LaurentScalar":
        """Build from ``{integer exponent: integer coefficient}``."""
        coeffs = {e: c for e, c in coeffs.items() if c}
        if not coeffs:
            return ZERO
        lo = min(coeffs)
        dense = [0] * (max(coeffs) - lo + 1)
        for e, c in coeffs.items():
            dense[e - lo] = c
        return cls(fmpz_poly(dense), _ONE_POLY, lo, 1)

    # coercion and alignment

    @staticmethod
    def _coerce(other) -> "LaurentScalar":
        if isinstance(other, LaurentScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentScalar.from_number(other)
        return NotImplemented

    def _lifted(self, root: int):
        k = root // self._root
        if k == 1:
            return self._num, self._den, self._shift
        return _inflate(self._num, k), _inflate(self._den, k), self._shift * k

    # structure

    @property
    def numerator(self) -> "LaurentScalar":
        return LaurentScalar(self._num, _ONE_POLY, self._shift, self._root)

    @property
    def denominator(self) -> "LaurentScalar":
        return LaurentScalar(self._den, _ONE_POLY, 0, self._root)

    @property
    def root(self) -> int:
        return self._root

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_one(self) -> bool:
        return self._shift == 0 and self._num.is_one() and self._den.is_one()

    def is_laurent(self) -> bool:
        return self._den.is_one()

    def is_constant(self) -> bool:
        if self.is_zero():
            return True
        return self._shift == 0 and self._num.degree() == 0 and self._den.degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        if self.is_zero():
            return Fraction(0)
        return Fraction(int(self._num.coeffs()[0]), int(self._den.coeffs()[0]))

    def monomial_data(self) -> Optional[tuple[Fraction, Fraction]]:
        """Return (coefficient, exponent) if the value is c*q^e, else None."""
        if self.is_zero() or self._num.degree() != 0 or self._den.degree() != 0:
            return None
        c = Fraction(int(self._num.coeffs()[0]), int(self._den.coeffs()[0]))
        return c, Fraction(self._shift, self._root)

    def laurent_terms(self) -> dict[Fraction, int]:
        """Exponent -> coefficient, for Laurent polynomials only."""
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return {
            Fraction(self._shift + i, self._root): int(c)
            for i, c in enumerate(self._num.coeffs())
            if c != 0
        }

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        root = self._root if self._root == other._root else _lcm(self._root, other._root)
        n1, d1, s1 = self._lifted(root)
        n2, d2, s2 = other._lifted(root)
        s = min(s1, s2)
        if s1 > s:
            n1 = n1.left_shift(s1 - s)
        if s2 > s:
            n2 = n2.left_shift(s2 - s)
        if d1.is_one() and d2.is_one():
            return LaurentScalar(n1 + n2, _ONE_POLY, s, root)
        if d1 == d2:
            return LaurentScalar(n1 + n2, d1, s, root)
        return LaurentScalar(n1 * d2 + n2 * d1, d1 * d2, s, root)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return LaurentScalar._raw(-self._num, self._den, self._shift, self._root)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return ZERO
        if self.is_one():
            return other
        if other.is_one():
            return self
        root = self._root if self._root == other._root else _lcm(self._root, other._root)
        n1, d1, s1 = self._lifted(root)
        n2, d2, s2 = other._lifted(root)
        if d1.is_one() and d2.is_one():
            # product of primitive-free Laurent polynomials is already canonical
            return LaurentScalar._raw(n1 * n2, _ONE_POLY, s1 + s2, root) if root == 1 else LaurentScalar(
                n1 * n2, _ONE_POLY, s1 + s2, root
            )
        return LaurentScalar(n1 * n2, d1 * d2, s1 + s2, root)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentScalar":
        if self.is_zero():
            raise ZeroDenominator("inverse of zero")
        return LaurentScalar(self._den, self._num, -self._shift, self._root)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return ONE
        if self.is_zero():
            return ZERO
        return LaurentScalar(self._num ** k, self._den ** k, self._shift * k, self._root)

    def substitute_power(self, d: int) -> "LaurentScalar":
        """Apply q -> q^d."""
        if d == 1 or self.is_zero():
            return self
        if d < 0:
            raise ValueError("substitution exponent must be positive")
        return LaurentScalar(_inflate(self._num, d), _inflate(self._den, d), self._shift * d, self._root)

    # comparison

    def _key(self):
        return (
            tuple(int(c) for c in self._num.coeffs()),
            tuple(int(c) for c in self._den.coeffs()),
            self._shift,
            self._root,
        )

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentScalar.from_number(other)
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        return (
            self._shift == other._shift
            and self._root == other._root
            and self._num == other._num
            and self._den == other._den
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # evaluation

    def evaluate(self, q0: float) -> float:
        t0 = q0 ** (1.0 / self._root)
        num = sum(float(c) * t0 ** i for i, c in enumerate(self._num.coeffs()))
        den = sum(float(c) * t0 ** i for i, c in enumerate(self._den.coeffs()))
        return t0 ** self._shift * num / den

    def evaluate_exact(self, q0: Fraction) -> Fraction:
        if self._root != 1:
            raise ValueError("exact evaluation needs an integral exponent lattice")
        q0 = Fraction(q0)
        num = sum((Fraction(int(c)) * q0 ** i for i, c in enumerate(self._num.coeffs())), Fraction(0))
        den = sum((Fraction(int(c)) * q0 ** i for i, c in enumerate(self._den.coeffs())), Fraction(0))
        return q0 ** self._shift * num / den

    # text

    def __str__(self):
        return serialize_scalar(self)

    def __repr__(self):
        return f"LaurentScalar('{serialize_scalar(self)}')"


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


ZERO = LaurentScalar._raw(_ZERO_POLY, _ONE_POLY, 0, 1)
ONE = LaurentScalar._raw(_ONE_POLY, _ONE_POLY, 0, 1)
Q = LaurentScalar._raw(_ONE_POLY, _ONE_POLY, 1, 1)


def as_scalar(x) -> LaurentScalar:
    if isinstance(x, LaurentScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentScalar.from_number(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {x!r} as a scalar")


@lru_cache(maxsize=None)
def q_power(e: Number) -> LaurentScalar:
    return LaurentScalar.monomial(e)


@lru_cache(maxsize=None)
def q_integer(n: int) -> LaurentScalar:
    """[n]_q = q^(n-1) + q^(n-3) + ... + q^(1-n), and [-n] = -[n]."""
    if n == 0:
        return ZERO
    if n < 0:
        return -q_integer(-n)
    return LaurentScalar(fmpz_poly([1, 0] * (n - 1) + [1]), _ONE_POLY, 1 - n, 1)


@lru_cache(maxsize=None)
def q_factorial(n: int) -> LaurentScalar:
    if n < 0:
        raise ValueError("q-factorial of a negative integer")
    return reduce(lambda acc, j: acc * q_integer(j), range(1, n + 1), ONE)


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int) -> LaurentScalar:
    """[n][n-1]...[n-k+1] / [k]! for k >= 0 and 0 for k < 0; n may be negative."""
    if k < 0:
        return ZERO
    top = reduce(lambda acc, j: acc * q_integer(n - j), range(k), ONE)
    return top / q_factorial(k)


class ProjParam:
    """A point [x : y] of the projective line over Q(q)."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        x, y = as_scalar(x), as_scalar(y)
        if x.is_zero() and y.is_zero():
            raise ValueError("[0 : 0] is not a projective point")
        if not x.is_zero():
            x, y = ONE, y / x
        else:
            y = ONE
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):
        raise AttributeError("ProjParam is immutable")

    @classmethod
    def from_value(cls, s) -> "ProjParam":
        return cls(s, ONE)

    def is_zero(self) -> bool:
        return self.x.is_zero()

    def is_infinity(self) -> bool:
        return self.y.is_zero()

    def is_finite_nonzero(self) -> bool:
        return not (self.is_zero() or self.is_infinity())

    def ratio(self) -> LaurentScalar:
        """x / y; raises ZeroDenominator at infinity."""
        if self.is_infinity():
            raise ZeroDenominator("ratio of the point at infinity")
        return self.x / self.y

    def inverted(self) -> "ProjParam":
        return ProjParam(self.y, self.x)

    def scaled(self, s) -> "ProjParam":
        """[s x : y]."""
        s = as_scalar(s)
        if s.is_zero():
            raise ZeroDenominator("scaling a projective point by zero")
        return ProjParam(s * self.x, self.y)

    def __eq__(self, other):
        if not isinstance(other, ProjParam):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __str__(self):
        return f"[{self.x} : {self.y}]"

    def __repr__(self):
        return f"ProjParam('{self}')"


INFINITY = ProjParam(ONE, ZERO)
ORIGIN = ProjParam(ZERO, ONE)


def bracket_ratio(n: int, m: int, chi: ProjParam, d: int = 1) -> LaurentScalar:
    """[n;chi]/[m;chi] = (x q^n - y q^-n) / (x q^m - y q^-m), in the variable q^d."""
    x, y = chi.x, chi.y
    den = x * q_power(d * m) - y * q_power(-d * m)
    if den.is_zero():
        raise ZeroDenominator(f"[{m};{chi}] vanishes")
    return (x * q_power(d * n) - y * q_power(-d * n)) / den


def monomial_lattice_test(s, d: int = 1) -> Optional[int]:
    """Return m when s equals q^(2dm), otherwise None.

    For a projective point the ratio x/y is tested, and both
    coordinates must be nonzero.
    """
    if isinstance(s, ProjParam):
        if not s.is_finite_nonzero():
            return None
        s = s.ratio()
    data = s.monomial_data()
    if data is None or data[0] != 1:
        return None
    e = data[1] / (2 * d)
    return int(e) if e.denominator == 1 else None


# serialization


def _format_exponent(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def _format_laurent(terms: dict[Fraction, int]) -> tuple[str, int]:
    parts: list[str] = []
    for e in sorted(terms, reverse=True):
        c = terms[e]
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            power = "q" if e == 1 else f"q^{_format_exponent(e)}"
            body = power if mag == 1 else f"{mag}*{power}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts), len(terms)


def serialize_scalar(s: LaurentScalar) -> str:
    if s.is_zero():
        return "0"
    num_terms = {
        Fraction(s._shift + i, s._root): int(c) for i, c in enumerate(s._num.coeffs()) if c != 0
    }
    num, n_count = _format_laurent(num_terms)
    if s._den.is_one():
        return num
    den_terms = {Fraction(i, s._root): int(c) for i, c in enumerate(s._den.coeffs()) if c != 0}
    den, d_count = _format_laurent(den_terms)
    if n_count > 1:
        num = f"({num})"
    if d_count > 1 or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"


_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|([-+*/^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ScalarParseError(f"unexpected character at {pos} in {text!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ScalarParseError(f"expected {expected or 'token'} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> LaurentScalar:
        if not self.toks:
            raise ScalarParseError("empty scalar expression")
        value = self.expr()
        if self.peek() is not None:
            raise ScalarParseError(f"trailing input in {self.text!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except ZeroDivisionError as exc:
                    raise ScalarParseError(f"division by zero in {self.text!r}") from exc
        return value

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        tok = self.peek()
        if tok == "q":
            self.take()
            if self.peek() == "^":
                self.take()
                return q_power(self.exponent(allow_fraction=True))
            return Q
        base = self.atom()
        if self.peek() == "^":
            self.take()
            e = self.exponent(allow_fraction=False)
            try:
                return base ** int(e)
            except ZeroDivisionError as exc:
                raise ScalarParseError(f"zero raised to a negative power in {self.text!r}") from exc
        return base

    def exponent(self, allow_fraction: bool) -> Fraction:
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        if self.peek() == "(":
            self.take()
            if self.peek() == "-":
                self.take()
                sign = -sign
            num = int(self.take_number())
            den = 1
            if self.peek() == "/":
                self.take()
                den = int(self.take_number())
            self.take(")")
            if den == 0:
                raise ScalarParseError("zero exponent denominator")
            e = Fraction(sign * num, den)
        else:
            e = Fraction(sign * int(self.take_number()))
        if not allow_fraction and e.denominator != 1:
            raise ScalarParseError("fractional exponent on a non-q base")
        return e

    def take_number(self) -> str:
        tok = self.take()
        if not tok.isdigit():
            raise ScalarParseError(f"expected an integer, got {tok!r} in {self.text!r}")
        return tok

    def atom(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        return LaurentScalar.from_number(int(self.take_number()))


def parse_scalar(text: str) -> LaurentScalar:
    return _Parser(text).parse()


def parse_proj(text: str) -> ProjParam:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ScalarParseError(f"projective point must look like [x : y], got {text!r}")
    inner = body[1:-1]
    depth, split = 0, None
    for i, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == ":" and depth == 0:
            if split is not None:
                raise ScalarParseError(f"too many ':' in {text!r}")
            split = i
    if split is None:
        raise ScalarParseError(f"missing ':' in {text!r}")
    try:
        return ProjParam(parse_scalar(inner[:split]), parse_scalar(inner[split + 1:]))
    except ValueError as exc:
        raise ScalarParseError(str(exc)) from exc
