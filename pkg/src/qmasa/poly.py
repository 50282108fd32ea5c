"""Univariate polynomials in the Hecke parameter ``p`` with exact rational coefficients.

Coefficients are stored low degree first as a tuple of Python ints or
``Fraction`` objects.  Integral fractions are demoted to ``int`` so that the
common integer case stays on the fast path.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["PolyP", "P", "as_fraction", "format_rational", "parse_rational"]


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and rational strings such as ``"-3/7"`` to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    try:
        return Fraction(s)
    except ValueError as exc:
        raise ValueError(f"malformed rational {s!r}") from exc


def format_rational(x) -> str:
    """Serialize a rational as ``"num/den"`` (denominator always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class PolyP:
    """Immutable polynomial ``c0 + c1 p + c2 p^2 + ...``.

    The zero polynomial has an empty coefficient tuple and ``degree == -1``.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs=()):
        cs = [_norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple) -> "PolyP":
        # caller guarantees normalized coefficients and no trailing zero
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "PolyP":
        return cls((c,))

    @classmethod
    def from_dict(cls, d: dict) -> "PolyP":
        if not d:
            return ZERO
        n = max(d) + 1
        cs = [0] * n
        for k, v in d.items():
            if k < 0:
                raise ValueError("negative degree")
            cs[k] = v
        return cls(cs)

    def to_dict(self) -> dict:
        return {k: c for k, c in enumerate(self.coeffs) if c != 0}

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, PolyP):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == ((_norm(other),) if other != 0 else ())
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        if not self.coeffs:
            return "PolyP(0)"
        return f"PolyP({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*p" if c != 1 else "p")
            else:
                parts.append(f"{c}*p^{k}" if c != 1 else f"p^{k}")
        return " + ".join(parts)

    def __neg__(self):
        return PolyP._raw(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        if not isinstance(other, PolyP):
            if isinstance(other, (int, Fraction)):
                other = PolyP.const(other)
            else:
                return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return self if a is self.coeffs else other
        out = list(a)
        for i, c in enumerate(b):
            out[i] = _norm(out[i] + c)
        while out and out[-1] == 0:
            out.pop()
        return PolyP._raw(tuple(out))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, PolyP):
            if isinstance(other, (int, Fraction)):
                other = PolyP.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PolyP):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return ZERO
            if len(b) == 1:
                return self.scale(b[0])
            if len(a) == 1:
                return other.scale(a[0])
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x == 0:
                    continue
                for j, y in enumerate(b):
                    out[i + j] += x * y
            return PolyP(out)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c) -> "PolyP":
        if c == 0 or not self.coeffs:
            return ZERO
        if c == 1:
            return self
        return PolyP._raw(tuple(_norm(x * c) for x in self.coeffs))

    def shift(self, k: int = 1) -> "PolyP":
        """Multiply by ``p**k``."""
        if not self.coeffs or k == 0:
            return self
        return PolyP._raw((0,) * k + self.coeffs)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x):
        """Evaluate at ``x`` by Horner's rule (exact for rational ``x``)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_json(self) -> dict:
        return {str(k): format_rational(c) for k, c in enumerate(self.coeffs) if c != 0}

    @classmethod
    def from_json(cls, d: dict) -> "PolyP":
        return cls.from_dict({int(k): parse_rational(v) for k, v in d.items()})


ZERO = PolyP()
ONE = PolyP((1,))
#: the indeterminate p
P = PolyP((0, 1))
