"""Truncated q-Fock spaces over a d-dimensional real Hilbert space.

Basis tensors ``e_{i_1} (x) ... (x) e_{i_n}`` are tuples of indices; the empty
tuple is the vacuum.  Vectors are finite maps from words to scalars and are
never truncated themselves: creation on a vector simply produces longer
words.  Truncation enters only when an operator is written as a matrix on
the words of degree ``<= N``; such matrices are compressions, and operator
identities are asserted on input degrees where every factor acts faithfully.

Scalars are ``Fraction`` whenever ``q`` and the data are rational, so the
algebraic checks are exact; floats and complex numbers are accepted too.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .linalg import rank
from .poly import as_fraction, format_rational
from .verdict import FAIL, PASS, Verdict

__all__ = [
    "TruncationOverflow",
    "NotAContraction",
    "parse_q",
    "q_int",
    "q_factorial",
    "FockVector",
    "basis_words",
    "inversions",
    "pq_apply",
    "pq_apply_enumerate",
    "pq_matrix",
    "pq_blocks",
    "is_positive_definite",
    "q_inner",
    "q_norm2",
    "create",
    "annihilate",
    "create_right",
    "annihilate_right",
    "field_apply",
    "field_right_apply",
    "wick_apply",
    "wick_right_apply",
    "tensor_power",
    "OperatorMatrix",
    "operator_matrix",
    "field_matrix",
    "wick_matrix",
    "wick_right_matrix",
    "jacobi_offdiagonal",
    "jacobi_matrix",
    "pure_power_block",
    "first_quantization",
    "second_quantization_check",
    "wick_covariance_check",
    "adjointness_check",
    "ccr_check",
    "wick_vacuum_check",
    "vacuum_separation_rank",
    "norm_growth",
    "growth_ratio",
]


class TruncationOverflow(ValueError):
    pass


class NotAContraction(ValueError):
    pass


def parse_q(q):
    """Accept ``"1/2"``, ``"-0.9"``, Fractions, ints or floats.

    Decimal strings are read exactly (``"0.9"`` is ``9/10``).
    """
    if isinstance(q, str):
        return as_fraction(q)
    if isinstance(q, int):
        return Fraction(q)
    return q


def _conj(x):
    return x.conjugate() if isinstance(x, complex) else x


def q_int(n: int, q):
    """``[n]_q = 1 + q + ... + q^(n-1)``."""
    return sum((q**i for i in range(n)), 0 * q)


def q_factorial(n: int, q):
    out = 1 + 0 * q
    for i in range(1, n + 1):
        out = out * q_int(i, q)
    return out


# --------------------------------------------------------------------------
# vectors
# --------------------------------------------------------------------------

class FockVector(dict):
    """Finite map ``word -> amplitude``; zero amplitudes are never stored."""

    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        for w in [w for w, c in self.items() if c == 0]:
            del self[w]

    @classmethod
    def vacuum(cls, c=1) -> "FockVector":
        return cls({(): c})

    @classmethod
    def word(cls, w: Sequence[int], c=1) -> "FockVector":
        return cls({tuple(w): c})

    def acc(self, w: tuple, c) -> None:
        v = self.get(w, 0) + c
        if v == 0:
            self.pop(w, None)
        else:
            self[w] = v

    def __add__(self, other):
        out = FockVector(self)
        for w, c in other.items():
            out.acc(w, c)
        return out

    def __sub__(self, other):
        out = FockVector(self)
        for w, c in other.items():
            out.acc(w, -c)
        return out

    def __neg__(self):
        return FockVector({w: -c for w, c in self.items()})

    def scale(self, c) -> "FockVector":
        if c == 0:
            return FockVector()
        return FockVector({w: x * c for w, x in self.items()})

    def degree_part(self, n: int) -> "FockVector":
        return FockVector({w: c for w, c in self.items() if len(w) == n})

    def degrees(self) -> set:
        return {len(w) for w in self}

    def max_degree(self) -> int:
        return max((len(w) for w in self), default=-1)

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0:
            return all(c == 0 for c in self.values())
        return all(abs(c) <= tol for c in self.values())

    def truncate(self, N: int) -> "FockVector":
        return FockVector({w: c for w, c in self.items() if len(w) <= N})

    def map_words(self, fn: Callable[[tuple], tuple]) -> "FockVector":
        out = FockVector()
        for w, c in self.items():
            out.acc(fn(w), c)
        return out


def _check_N(v: FockVector, N: int | None):
    if N is not None and v.max_degree() > N:
        raise TruncationOverflow(f"degree {v.max_degree()} exceeds truncation {N}")


def basis_words(d: int, N: int) -> list:
    """All words of degree ``<= N`` ordered by (degree, lexicographic)."""
    out = []
    for n in range(N + 1):
        out.extend(itertools.product(range(d), repeat=n))
    return out


# --------------------------------------------------------------------------
# the Gram operator P_q
# --------------------------------------------------------------------------

def inversions(perm: Sequence[int]) -> int:
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


@lru_cache(maxsize=200_000, typed=True)  # 0.5 and Fraction(1, 2) must not share entries
def _pq_word(w: tuple, q) -> tuple:
    # P^n = (1 (x) P^{n-1}) R_n,  R_n(e_1..e_n) = sum_i q^{i-1} e_i (x) (rest)
    if len(w) <= 1:
        return ((w, 1),)
    out: dict = {}
    qi = 1
    for i, a in enumerate(w):
        if i:
            qi = qi * q
        for u, c in _pq_word(w[:i] + w[i + 1 :], q):
            key = (a,) + u
            out[key] = out.get(key, 0) + qi * c
    return tuple((u, c) for u, c in out.items() if c != 0)


def pq_apply(v: FockVector, q, N: int | None = None) -> FockVector:
    """Apply ``P_q`` degree by degree (recursive insertion factorization)."""
    _check_N(v, N)
    out = FockVector()
    for w, c in v.items():
        for u, e in _pq_word(w, q):
            out.acc(u, c * e)
    return out


def pq_apply_enumerate(v: FockVector, q) -> FockVector:
    """Reference ``P_q``: sum over all permutations weighted by ``q^inversions``."""
    out = FockVector()
    for w, c in v.items():
        n = len(w)
        for perm in itertools.permutations(range(n)):
            u = tuple(w[perm[i]] for i in range(n))
            out.acc(u, c * q ** inversions(perm))
    return out


def pq_matrix(n: int, d: int, q) -> list:
    """Dense matrix of ``P_q^n`` in the lexicographic basis of degree ``n``."""
    words = list(itertools.product(range(d), repeat=n))
    idx = {w: i for i, w in enumerate(words)}
    M = [[0 * q] * len(words) for _ in words]
    for j, w in enumerate(words):
        for u, c in _pq_word(w, q):
            M[idx[u]][j] = c
    return M


def pq_blocks(n: int, d: int, q) -> list:
    """``P_q^n`` split into its blocks: words with a fixed multiset of letters."""
    classes: dict = {}
    for w in itertools.product(range(d), repeat=n):
        classes.setdefault(tuple(sorted(w)), []).append(w)
    blocks = []
    for words in classes.values():
        idx = {w: i for i, w in enumerate(words)}
        M = [[0 * q] * len(words) for _ in words]
        for j, w in enumerate(words):
            for u, c in _pq_word(w, q):
                M[idx[u]][j] = c
        blocks.append(M)
    return blocks


def is_positive_definite(M: list) -> bool:
    """Exact test via symmetric Gaussian elimination (all pivots positive).

    Works for Fraction entries; for float entries it falls back to a
    Cholesky factorization.
    """
    n = len(M)
    if n == 0:
        return True
    if not isinstance(M[0][0], Fraction) and not isinstance(M[0][0], int):
        try:
            np.linalg.cholesky(np.array(M, dtype=float))
            return True
        except np.linalg.LinAlgError:
            return False
    A = [[Fraction(x) for x in row] for row in M]
    for k in range(n):
        piv = A[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, n):
            f = A[i][k] / piv
            if f:
                Ai, Ak = A[i], A[k]
                for j in range(k + 1, n):
                    Ai[j] -= f * Ak[j]
    return True


def q_inner(u: FockVector, v: FockVector, q) -> object:
    """``<u, v>_q``: conjugate-linear in ``u``, degrees mutually orthogonal."""
    Pv = pq_apply(v, q)
    acc = 0
    for w, c in u.items():
        e = Pv.get(w)
        if e is not None:
            acc = acc + _conj(c) * e
    return acc


def q_norm2(v: FockVector, q):
    return q_inner(v, v, q)


# --------------------------------------------------------------------------
# creation, annihilation and fields
# --------------------------------------------------------------------------

def _xi_items(xi: Sequence):
    return [(i, c) for i, c in enumerate(xi) if c != 0]


def create(xi: Sequence, v: FockVector, N: int | None = None) -> FockVector:
    """``a*(xi)``: tensor ``xi`` on the left."""
    _check_N(v, None if N is None else N - 1)
    out = FockVector()
    items = _xi_items(xi)
    for w, c in v.items():
        for i, x in items:
            out.acc((i,) + w, x * c)
    return out


def create_right(xi: Sequence, v: FockVector, N: int | None = None) -> FockVector:
    """Right creation: tensor ``xi`` on the right."""
    _check_N(v, None if N is None else N - 1)
    out = FockVector()
    items = _xi_items(xi)
    for w, c in v.items():
        for i, x in items:
            out.acc(w + (i,), x * c)
    return out


def annihilate(xi: Sequence, v: FockVector, q) -> FockVector:
    """``a(xi) e_{w_1..w_n} = sum_i q^(i-1) <xi, e_{w_i}> e_{w without i}``."""
    out = FockVector()
    for w, c in v.items():
        qi = 1
        for i, a in enumerate(w):
            if i:
                qi = qi * q
            x = xi[a] if a < len(xi) else 0
            if x != 0:
                out.acc(w[:i] + w[i + 1 :], _conj(x) * qi * c)
    return out


def annihilate_right(xi: Sequence, v: FockVector, q) -> FockVector:
    """Adjoint of right creation: ``sum_i q^(n-i) <xi, e_{w_i}> e_{w without i}``."""
    out = FockVector()
    for w, c in v.items():
        n = len(w)
        for i, a in enumerate(w):
            x = xi[a] if a < len(xi) else 0
            if x != 0:
                out.acc(w[:i] + w[i + 1 :], _conj(x) * q ** (n - 1 - i) * c)
    return out


def field_apply(xi: Sequence, v: FockVector, q) -> FockVector:
    """``W(xi) = a*(xi) + a(xi)``."""
    return create(xi, v) + annihilate(xi, v, q)


def field_right_apply(xi: Sequence, v: FockVector, q) -> FockVector:
    return create_right(xi, v) + annihilate_right(xi, v, q)


def _unit(i: int, d: int) -> list:
    e = [0] * d
    e[i] = 1
    return e


def wick_apply(u: Sequence[int], v: FockVector, q, d: int | None = None) -> FockVector:
    """Apply the Wick word ``W(e_{u_1} (x) ... (x) e_{u_n})`` to ``v``.

    ``W(xi (x) u) = W(xi) W(u) - sum_k q^(k-1) <xi, u_k> W(u without u_k)``.
    """
    u = tuple(u)
    if d is None:
        d = max(u, default=-1) + 1
        d = max(d, 1)
    memo: dict = {}

    def rec(w: tuple) -> FockVector:
        if w in memo:
            return memo[w]
        if not w:
            res = FockVector(v)
        else:
            xi = _unit(w[0], d)
            rest = w[1:]
            res = field_apply(xi, rec(rest), q)
            qk = 1
            for k, b in enumerate(rest):
                if k:
                    qk = qk * q
                if b == w[0]:
                    res = res - rec(rest[:k] + rest[k + 1 :]).scale(qk)
        memo[w] = res
        return res

    return rec(u)


def wick_right_apply(u: Sequence[int], v: FockVector, q, d: int | None = None) -> FockVector:
    """Right Wick word ``W_r(u)``, the mirror of :func:`wick_apply`.

    ``W_r(u (x) xi) = W_r(xi) W_r(u) - sum_i q^(n-i) <xi, u_i> W_r(u without u_i)``.
    """
    u = tuple(u)
    if d is None:
        d = max(max(u, default=-1) + 1, 1)
    memo: dict = {}

    def rec(w: tuple) -> FockVector:
        if w in memo:
            return memo[w]
        if not w:
            res = FockVector(v)
        else:
            xi = _unit(w[-1], d)
            rest = w[:-1]
            n = len(rest)
            res = field_right_apply(xi, rec(rest), q)
            for i, b in enumerate(rest):
                if b == w[-1]:
                    res = res - rec(rest[:i] + rest[i + 1 :]).scale(q ** (n - 1 - i))
        memo[w] = res
        return res

    return rec(u)


def tensor_power(xi: Sequence, j: int) -> FockVector:
    """``xi^{(x) j}`` expanded in basis words."""
    out = FockVector.vacuum()
    for _ in range(j):
        out = create_right(xi, out)
    return out


# --------------------------------------------------------------------------
# operator matrices on the truncated space
# --------------------------------------------------------------------------

@dataclass
class OperatorMatrix:
    """Compression of an operator to the words of degree ``<= N``.

    ``cols[j]`` is the image of ``words[j]`` (plain amplitudes, not
    orthonormalised), with components above degree ``N`` dropped.
    """

    d: int
    N: int
    words: list
    cols: list

    @property
    def dim(self) -> int:
        return len(self.words)

    def apply(self, v: FockVector) -> FockVector:
        idx = self._index()
        out = FockVector()
        for w, c in v.items():
            for u, e in self.cols[idx[w]].items():
                out.acc(u, c * e)
        return out

    def _index(self) -> dict:
        return {w: i for i, w in enumerate(self.words)}

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        cols = [self.apply(c) for c in other.cols]
        return OperatorMatrix(self.d, self.N, self.words, cols)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.d, self.N, self.words, [a - b for a, b in zip(self.cols, other.cols)])

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.d, self.N, self.words, [a + b for a, b in zip(self.cols, other.cols)])

    def scale(self, c) -> "OperatorMatrix":
        return OperatorMatrix(self.d, self.N, self.words, [a.scale(c) for a in self.cols])

    def agrees_with(self, other: "OperatorMatrix", max_input_degree: int) -> bool:
        """Exact equality of the columns indexed by words of degree ``<= max_input_degree``."""
        for w, a, b in zip(self.words, self.cols, other.cols):
            if len(w) <= max_input_degree and not (a - b).is_zero():
                return False
        return True

    def to_dense(self) -> list:
        idx = self._index()
        M = [[0] * self.dim for _ in range(self.dim)]
        for j, col in enumerate(self.cols):
            for u, c in col.items():
                M[idx[u]][j] = c
        return M

    def to_csv(self) -> str:
        """Dense row-major CSV; rationals as ``num/den``."""
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        for row in self.to_dense():
            wr.writerow([_fmt_scalar(x) for x in row])
        return buf.getvalue()


def _fmt_scalar(x) -> str:
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    return repr(x)


def operator_matrix(fn: Callable[[FockVector], FockVector], d: int, N: int) -> OperatorMatrix:
    words = basis_words(d, N)
    cols = [fn(FockVector.word(w)).truncate(N) for w in words]
    return OperatorMatrix(d, N, words, cols)


def field_matrix(xi: Sequence, q, N: int, d: int | None = None) -> OperatorMatrix:
    d = len(xi) if d is None else d
    return operator_matrix(lambda v: field_apply(xi, v, q), d, N)


def wick_matrix(u: Sequence[int], q, N: int, d: int) -> OperatorMatrix:
    if len(u) > N:
        raise TruncationOverflow(f"Wick word of degree {len(u)} exceeds truncation {N}")
    return operator_matrix(lambda v: wick_apply(u, v, q, d), d, N)


def wick_right_matrix(u: Sequence[int], q, N: int, d: int) -> OperatorMatrix:
    if len(u) > N:
        raise TruncationOverflow(f"Wick word of degree {len(u)} exceeds truncation {N}")
    return operator_matrix(lambda v: wick_right_apply(u, v, q, d), d, N)


def jacobi_offdiagonal(q, N: int) -> list:
    """``sqrt([n]_q)`` for ``n = 1..N`` (floats)."""
    return [math.sqrt(float(q_int(n, q))) for n in range(1, N + 1)]


def jacobi_matrix(q, N: int) -> np.ndarray:
    """``W(e)`` on ``span{e^{(x) n} : n <= N}`` in the q-orthonormal basis."""
    off = jacobi_offdiagonal(q, N)
    J = np.zeros((N + 1, N + 1))
    for n, b in enumerate(off):
        J[n, n + 1] = J[n + 1, n] = b
    return J


def pure_power_block(xi: Sequence, q, N: int) -> list:
    """Exact matrix of ``W(xi)`` on ``xi^{(x) n}``, ``n <= N`` (unnormalised basis).

    Entries come from applying the field operator; the expected shape is
    ``W xi^n = xi^{n+1} + [n]_q xi^{n-1}`` for a unit vector ``xi``.
    """
    powers = [tensor_power(xi, n) for n in range(N + 2)]
    norms = [q_norm2(p, q) for p in powers]
    M = [[0 * q] * (N + 1) for _ in range(N + 1)]
    for j in range(N + 1):
        img = field_apply(xi, powers[j], q)
        for i in range(N + 1):
            if abs(i - j) == 1:
                M[i][j] = _ratio(q_inner(powers[i], img, q), norms[i])
    return M


# --------------------------------------------------------------------------
# quantisation
# --------------------------------------------------------------------------

def _ratio(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def _apply_one_particle(T, w: tuple) -> FockVector:
    out = FockVector.vacuum()
    for a in w:
        col = [T[i][a] for i in range(len(T))]
        out = create_right(col, out)
    return out


def first_quantization(T, q, N: int, tol: float = 1e-12) -> OperatorMatrix:
    """``F_q(T)``: ``T^{(x) n}`` on each degree ``n <= N``.

    ``T`` is a ``d x d`` matrix (nested lists); its operator norm must not
    exceed ``1 + tol``.
    """
    d = len(T)
    norm = float(np.linalg.norm(np.array(T, dtype=complex), 2))
    if norm > 1 + tol:
        raise NotAContraction(f"operator norm {norm} > 1")
    words = basis_words(d, N)
    cols = [_apply_one_particle(T, w) for w in words]
    return OperatorMatrix(d, N, words, cols)


def _transpose(U):
    return [[U[j][i] for j in range(len(U))] for i in range(len(U))]


def second_quantization_check(U, xi: Sequence, q, N: int) -> Verdict:
    """``F_q(U) W(xi) F_q(U)* = W(U xi)`` on input degrees ``< N``.

    ``U`` must be real orthogonal, so ``F_q(U)* = F_q(U^T)``.
    """
    d = len(U)
    Ut = _transpose(U)
    prod = [[sum(U[i][k] * Ut[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    if any(prod[i][j] != (1 if i == j else 0) for i in range(d) for j in range(d)):
        raise ValueError("U is not orthogonal")
    F = first_quantization(U, q, N)
    Fs = first_quantization(Ut, q, N)
    lhs = F @ field_matrix(xi, q, N, d) @ Fs
    Uxi = [sum(U[i][k] * xi[k] for k in range(d)) for i in range(d)]
    rhs = field_matrix(Uxi, q, N, d)
    ok = lhs.agrees_with(rhs, N - 1)
    params = {"q": q, "N": N, "d": d}
    return Verdict("fock-second-quantization", params, PASS if ok else FAIL, "0" if ok else "mismatch")


def wick_covariance_check(U, u: Sequence[int], q, N: int) -> Verdict:
    """``F_q(U) W(u) F_q(U)* = W(U^{(x)n} u)`` on input degrees ``<= N - |u|``."""
    d = len(U)
    Ut = _transpose(U)
    F = first_quantization(U, q, N)
    Fs = first_quantization(Ut, q, N)
    lhs = F @ wick_matrix(u, q, N, d) @ Fs
    image = _apply_one_particle(U, tuple(u))

    def rhs_fn(v):
        out = FockVector()
        for w, c in image.items():
            out = out + wick_apply(w, v, q, d).scale(c)
        return out

    rhs = operator_matrix(rhs_fn, d, N)
    ok = lhs.agrees_with(rhs, N - len(u))
    params = {"q": q, "N": N, "u": tuple(u)}
    return Verdict("fock-wick-covariance", params, PASS if ok else FAIL, "0" if ok else "mismatch")


# --------------------------------------------------------------------------
# structural checks
# --------------------------------------------------------------------------

def adjointness_check(xi: Sequence, q, d: int, N: int, right: bool = False) -> Verdict:
    """``<a*(xi) u, v>_q = <u, a(xi) v>_q`` for basis ``u`` of degree ``< N``, ``v`` one degree up."""
    cr, an = (create_right, annihilate_right) if right else (create, annihilate)
    bad = 0
    for n in range(N):
        lower = list(itertools.product(range(d), repeat=n))
        upper = list(itertools.product(range(d), repeat=n + 1))
        for a in lower:
            ua = cr(xi, FockVector.word(a))
            for b in upper:
                vb = FockVector.word(b)
                if q_inner(ua, vb, q) != q_inner(FockVector.word(a), an(xi, vb, q), q):
                    bad += 1
    name = "fock-adjointness-right" if right else "fock-adjointness"
    return Verdict(name, {"q": q, "d": d, "N": N}, PASS if not bad else FAIL,
                   "0" if not bad else f"{bad} pairs differ")


def ccr_check(xi: Sequence, eta: Sequence, q, d: int, N: int) -> Verdict:
    """``a(xi) a*(eta) - q a*(eta) a(xi) = <xi, eta>`` on words of degree ``< N``."""
    ip = sum(_conj(a) * b for a, b in zip(xi, eta))
    bad = 0
    for w in basis_words(d, N - 1):
        v = FockVector.word(w)
        lhs = annihilate(xi, create(eta, v), q) - create(eta, annihilate(xi, v, q)).scale(q)
        if not (lhs - v.scale(ip)).is_zero():
            bad += 1
    return Verdict("fock-ccr", {"q": q, "d": d, "N": N}, PASS if not bad else FAIL,
                   "0" if not bad else f"{bad} words differ")


def wick_vacuum_check(q, d: int, max_len: int, right: bool = False) -> Verdict:
    """``W(u) Omega = u`` for every word ``|u| <= max_len``."""
    fn = wick_right_apply if right else wick_apply
    bad = [u for u in basis_words(d, max_len)
           if fn(u, FockVector.vacuum(), q, d) != FockVector.word(u)]
    name = "fock-wick-right-vacuum" if right else "fock-wick-vacuum"
    return Verdict(name, {"q": q, "d": d, "max_len": max_len}, PASS if not bad else FAIL,
                   "0" if not bad else f"{len(bad)} words, first {bad[0]}")


def vacuum_separation_rank(q, d: int, N: int) -> tuple[int, int]:
    """Rank of ``{W(u) Omega}`` over Wick words of degree ``<= N`` and their number."""
    rows = [dict(wick_apply(u, FockVector.vacuum(), q, d)) for u in basis_words(d, N)]
    return rank(rows), len(rows)


def norm_growth(v: Sequence, j: int, q):
    """Exact ``||v^{(x) j}||_q^2``."""
    return q_norm2(tensor_power(v, j), q)


def growth_ratio(j: int, q) -> float:
    """``(1-q) ||v^{(x) j}||^2 / ||v^{(x) (j-1)}||^2`` for a unit vector at ``d = 1``."""
    a = norm_growth([1], j, q)
    b = norm_growth([1], j - 1, q)
    return float((1 - q) * a / b)
