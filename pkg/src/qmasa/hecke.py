"""Exact arithmetic in the Hecke algebra of the free product of Z/2Z's.

Elements are finite sums ``sum_w c_w T_w`` with ``c_w`` a :class:`PolyP`, so
every identity checked here holds for all values of the deformation
parameter ``p`` at once.  The symbol of an element is the coefficient family
itself (``T_w Omega = delta_w``).

Multiplication rule for a generator ``s``::

    T_s T_w = T_{sw}            if |sw| > |w|
    T_s T_w = T_{sw} + p T_w    if |sw| < |w|

The product of two basis elements has the closed form (``w = A c``,
``v = c^{-1} B`` with maximal cancellation ``c = c_1 ... c_k``)::

    T_w T_v = T_{AB} + p * sum_{j=1..k} T_{A c_1..c_j c_{j-1}..c_1 B}

which :func:`mul` uses; :func:`mul_via_generators` expands the left factor
letter by letter and serves as the reference route.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping

from .coxeter import FreeCoxeterGroup, Word, format_word, parse_word, word_key
from .poly import ONE, ZERO, PolyP, as_fraction

__all__ = [
    "HeckeElement",
    "basis",
    "from_words",
    "mul",
    "mul_generator",
    "right_mul_generator",
    "mul_via_generators",
    "mul_projected",
    "linear_combination",
    "star",
    "trace",
    "project_degree",
    "inner",
    "inner_poly",
    "to_json",
    "from_json",
]


def _coerce(c) -> PolyP:
    if isinstance(c, PolyP):
        return c
    return PolyP.const(c)


def _acc(d: dict, w: Word, c: PolyP) -> None:
    old = d.get(w)
    if old is None:
        if c:
            d[w] = c
        return
    s = old + c
    if s:
        d[w] = s
    else:
        del d[w]


class HeckeElement:
    """A finitely supported element ``sum_w c_w T_w``.

    ``terms`` maps reduced words (tuples) to non-zero :class:`PolyP`
    coefficients.  Treat instances as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for w, c in terms.items():
                c = _coerce(c)
                if c:
                    clean[tuple(w)] = c
        self.terms = clean

    @classmethod
    def _wrap(cls, d: dict) -> "HeckeElement":
        obj = object.__new__(cls)
        obj.terms = d
        return obj

    # -- container protocol -------------------------------------------------
    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def items(self):
        return self.terms.items()

    def coeff(self, w: Word) -> PolyP:
        return self.terms.get(tuple(w), ZERO)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list:
        return sorted(self.terms, key=word_key)

    def degrees(self) -> set:
        return {len(w) for w in self.terms}

    def max_degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def __eq__(self, other):
        if isinstance(other, HeckeElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "HeckeElement(0)"
        shown = []
        for w in self.support()[:6]:
            shown.append(f"({self.terms[w]})*T[{format_word(w)}]")
        more = "" if len(self.terms) <= 6 else f" + ... ({len(self.terms)} terms)"
        return "HeckeElement(" + " + ".join(shown) + more + ")"

    # -- linear structure ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        d = dict(self.terms)
        for w, c in other.terms.items():
            _acc(d, w, c)
        return HeckeElement._wrap(d)

    def __neg__(self):
        return HeckeElement._wrap({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        d = dict(self.terms)
        for w, c in other.terms.items():
            _acc(d, w, -c)
        return HeckeElement._wrap(d)

    def scale(self, c) -> "HeckeElement":
        c = _coerce(c)
        if not c:
            return HeckeElement()
        if c == ONE:
            return self
        d = {}
        for w, x in self.terms.items():
            y = x * c
            if y:
                d[w] = y
        return HeckeElement._wrap(d)

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return mul(self, other)
        if isinstance(other, (int, Fraction, PolyP)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, PolyP)):
            return self.scale(other)
        return NotImplemented

    def evaluate(self, p_value) -> dict:
        """Symbol at a numeric ``p``: ``{word: value}`` with zeros dropped."""
        out = {}
        for w, c in self.terms.items():
            v = c(p_value)
            if v != 0:
                out[w] = v
        return out


def linear_combination(pairs: Iterable) -> HeckeElement:
    """``sum c_i a_i`` for ``(c_i, a_i)`` pairs, accumulated in place."""
    d: dict = {}
    for c, a in pairs:
        c = _coerce(c)
        if not c:
            continue
        for w, x in a.terms.items():
            _acc(d, w, x * c)
    return HeckeElement._wrap(d)


def basis(w: Iterable[int]) -> HeckeElement:
    """``T_w`` for a reduced word ``w``."""
    return HeckeElement._wrap({tuple(w): ONE})


def from_words(words: Iterable[Word], coeff=1) -> HeckeElement:
    c = _coerce(coeff)
    d = {}
    for w in words:
        _acc(d, tuple(w), c)
    return HeckeElement._wrap(d)


def mul_generator(s: int, a: HeckeElement, group: FreeCoxeterGroup | None = None) -> HeckeElement:
    """Left multiplication ``T_s * a``."""
    if group is not None:
        group.check_generator(s)
    elif s < 0:
        raise ValueError(f"invalid generator {s}")
    d: dict = {}
    for w, c in a.terms.items():
        if w and w[0] == s:
            _acc(d, w[1:], c)
            _acc(d, w, c.shift())
        else:
            _acc(d, (s,) + w, c)
    return HeckeElement._wrap(d)


def right_mul_generator(a: HeckeElement, s: int, group: FreeCoxeterGroup | None = None) -> HeckeElement:
    """Right multiplication ``a * T_s``."""
    if group is not None:
        group.check_generator(s)
    elif s < 0:
        raise ValueError(f"invalid generator {s}")
    d: dict = {}
    for w, c in a.terms.items():
        if w and w[-1] == s:
            _acc(d, w[:-1], c)
            _acc(d, w, c.shift())
        else:
            _acc(d, w + (s,), c)
    return HeckeElement._wrap(d)


def _basis_product(w: Word, v: Word) -> list:
    """Terms of ``T_w T_v`` as ``(word, p_power)`` pairs."""
    k = 0
    n = min(len(w), len(v))
    lw = len(w)
    while k < n and w[lw - 1 - k] == v[k]:
        k += 1
    A = w[: lw - k]
    B = v[k:]
    out = [(A + B, 0)]
    if k:
        C = w[lw - k :]
        for j in range(1, k + 1):
            out.append((A + C[:j] + C[: j - 1][::-1] + B, 1))
    return out


def mul(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Exact product ``a * b``."""
    d: dict = {}
    bt = b.terms
    for w, c in a.terms.items():
        for v, e in bt.items():
            ce = c * e
            for u, k in _basis_product(w, v):
                _acc(d, u, ce.shift() if k else ce)
    return HeckeElement._wrap(d)


def mul_projected(a: HeckeElement, b: HeckeElement, degree: int) -> HeckeElement:
    """``q_degree(a * b)`` without forming the other degrees.

    For ``|w| = r``, ``|v| = t`` with cancellation ``c`` the product has
    lengths ``r + t - 2c`` and ``r + t - 2c + 2j - 1`` (``1 <= j <= c``), so
    only ``c >= (r + t - degree) / 2`` can contribute.  The words of ``b``
    are indexed by prefix so those ``v`` are found directly.
    """
    if degree < 0:
        return HeckeElement()
    index: dict = {}
    for v, e in b.terms.items():
        t = len(v)
        for c in range(t + 1):
            index.setdefault((t, v[:c]), []).append((v, e))
    lengths = sorted({len(v) for v in b.terms})
    d: dict = {}
    for w, cw in a.terms.items():
        r = len(w)
        for t in lengths:
            if r + t < degree:
                continue
            c_min = max(0, (r + t - degree + 1) // 2)
            for c in range(c_min, min(r, t) + 1):
                key = (t, w[r - c :][::-1])
                for v, e in index.get(key, ()):
                    if c < r and c < t and v[c] == w[r - c - 1]:
                        continue  # cancels further
                    base = r + t - 2 * c
                    A, B, C = w[: r - c], v[c:], w[r - c :]
                    if base == degree:
                        _acc(d, A + B, cw * e)
                    j2 = degree - base + 1
                    if j2 > 0 and j2 % 2 == 0 and j2 // 2 <= c:
                        j = j2 // 2
                        _acc(d, A + C[:j] + C[: j - 1][::-1] + B, (cw * e).shift())
    return HeckeElement._wrap(d)


def mul_via_generators(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Reference product: ``T_w b = T_{w_1}(T_{w_2}(... T_{w_k} b))``."""
    out = HeckeElement()
    for w, c in a.terms.items():
        x = b
        for s in reversed(w):
            x = mul_generator(s, x)
        out = out + x.scale(c)
    return out


def star(a: HeckeElement) -> HeckeElement:
    """The involution ``T_w -> T_{w^{-1}}``; coefficients are real so stay put."""
    return HeckeElement._wrap({w[::-1]: c for w, c in a.terms.items()})


def trace(a: HeckeElement) -> PolyP:
    return a.terms.get((), ZERO)


def project_degree(l: int, a: HeckeElement) -> HeckeElement:
    """Keep the terms ``T_w`` with ``|w| = l``; ``l < 0`` gives zero."""
    if l < 0:
        return HeckeElement()
    return HeckeElement._wrap({w: c for w, c in a.terms.items() if len(w) == l})


def inner_poly(a: HeckeElement, b: HeckeElement) -> PolyP:
    """The l2 pairing of symbols as a polynomial in ``p``."""
    if len(a.terms) > len(b.terms):
        a, b = b, a
    acc = ZERO
    bt = b.terms
    for w, c in a.terms.items():
        e = bt.get(w)
        if e is not None:
            acc = acc + c * e
    return acc


def inner(a: HeckeElement, b: HeckeElement, p_value) -> Fraction:
    """The l2 pairing of symbols evaluated at ``p = p_value``."""
    pv = as_fraction(p_value) if not isinstance(p_value, float) else p_value
    return inner_poly(a, b)(pv)


def to_json(a: HeckeElement) -> str:
    rows = [
        {"word": format_word(w), "coeff": a.terms[w].to_json()}
        for w in a.support()
    ]
    return json.dumps(rows, sort_keys=True)


def from_json(s: str) -> HeckeElement:
    rows = json.loads(s)
    return HeckeElement(
        {parse_word(r["word"]): PolyP.from_json(r["coeff"]) for r in rows}
    )
