"""Reduced words in the free product of ``L`` copies of Z/2Z.

A word is a plain tuple of generator indices.  It is reduced when no two
adjacent letters coincide; every group element has exactly one reduced word.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Word",
    "InvalidGenerator",
    "FreeCoxeterGroup",
    "format_word",
    "parse_word",
]

Word = tuple  # tuple[int, ...]

IDENTITY: Word = ()


class InvalidGenerator(ValueError):
    pass


class FreeCoxeterGroup:
    """The right-angled Coxeter group with all generator pairs free.

    Parameters
    ----------
    L : int
        Number of generators, at least 3.
    """

    def __init__(self, L: int):
        if int(L) != L or L < 3:
            raise ValueError(f"need at least 3 generators, got L={L!r}")
        self.L = int(L)

    @classmethod
    def from_coxeter_matrix(cls, m: Sequence[Sequence]) -> "FreeCoxeterGroup":
        """Accept a Coxeter matrix only if every off-diagonal entry is infinite."""
        L = len(m)
        for i in range(L):
            for j in range(L):
                if i != j and m[i][j] not in (None, float("inf"), "inf"):
                    raise ValueError(
                        "only the all-free case is supported; "
                        f"m[{i}][{j}] = {m[i][j]!r}"
                    )
        return cls(L)

    def __repr__(self):
        return f"FreeCoxeterGroup(L={self.L})"

    def __eq__(self, other):
        return isinstance(other, FreeCoxeterGroup) and other.L == self.L

    def __hash__(self):
        return hash(("FreeCoxeterGroup", self.L))

    @property
    def generators(self) -> range:
        return range(self.L)

    def check_generator(self, s: int) -> int:
        if not (0 <= s < self.L) or int(s) != s:
            raise InvalidGenerator(f"generator index {s!r} not in 0..{self.L - 1}")
        return int(s)

    def reduce(self, letters: Iterable[int]) -> Word:
        """Free reduction with ``s*s = e``; a stack makes cancellations cascade."""
        stack: list[int] = []
        for s in letters:
            self.check_generator(s)
            if stack and stack[-1] == s:
                stack.pop()
            else:
                stack.append(s)
        return tuple(stack)

    def is_reduced(self, w: Sequence[int]) -> bool:
        return all(0 <= s < self.L for s in w) and all(
            w[i] != w[i + 1] for i in range(len(w) - 1)
        )

    @staticmethod
    def multiply(w: Word, v: Word) -> Word:
        k = 0
        n = min(len(w), len(v))
        while k < n and w[-1 - k] == v[k]:
            k += 1
        return w[: len(w) - k] + v[k:]

    @staticmethod
    def inverse(w: Word) -> Word:
        return tuple(reversed(w))

    def sphere(self, n: int) -> list[Word]:
        """All reduced words of length ``n``, lexicographically ordered."""
        return list(_sphere(self.L, n))

    def ball(self, n: int) -> list[Word]:
        """Words of length at most ``n`` in (length, lexicographic) order."""
        out: list[Word] = []
        for k in range(n + 1):
            out.extend(_sphere(self.L, k))
        return out

    def sphere_count(self, n: int) -> int:
        if n < 0:
            return 0
        return 1 if n == 0 else self.L * (self.L - 1) ** (n - 1)

    def ball_count(self, n: int) -> int:
        return sum(self.sphere_count(k) for k in range(n + 1))

    def growth_radius(self) -> Fraction:
        """Radius of convergence of the growth series, ``1/(L-1)``."""
        return Fraction(1, self.L - 1)

    def raw_words(self, n: int) -> Iterator[tuple]:
        """Every (unreduced) letter sequence of length ``n``."""
        return product(range(self.L), repeat=n)


@lru_cache(maxsize=None)
def _sphere(L: int, n: int) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for w in _sphere(L, n - 1):
        for s in range(L):
            if not w or w[-1] != s:
                out.append(w + (s,))
    out.sort()
    return tuple(out)


def word_key(w: Word) -> tuple:
    """Sort key for the canonical (length, lexicographic) basis order."""
    return (len(w), w)


def format_word(w: Word) -> str:
    return "e" if not w else ",".join(str(s) for s in w)


def parse_word(s: str) -> Word:
    s = s.strip()
    if s in ("e", ""):
        return ()
    try:
        return tuple(int(t) for t in s.split(","))
    except ValueError as exc:
        raise ValueError(f"malformed word {s!r}") from exc
