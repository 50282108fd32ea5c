"""The radial subalgebra generated by ``h = sum_s T_s``.

Contents:

* sphere sums ``h_n`` and the three-term recurrence they satisfy;
* ``h_n`` as an explicit polynomial in ``h``;
* the radial projection of symbols (the conditional expectation on symbols);
* trace moments of ``h`` and the closed-form spectral density;
* approximate intertwining vectors ``eta`` with ``h eta - R_h eta`` close to
  ``e_v - e_w`` (floating point, computed on shell sums);
* a truncated commutant probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from .coxeter import FreeCoxeterGroup, Word
from .hecke import (
    HeckeElement,
    basis,
    from_words,
    mul,
    mul_generator,
    trace,
)
from .linalg import nullspace, rank
from .poly import ONE, ZERO, P, PolyP, as_fraction
from .verdict import ANOMALY, FAIL, PASS, Verdict, exact_verdict

__all__ = [
    "RadialContext",
    "h_n",
    "verify_recurrence",
    "express_hn_in_h",
    "substitute",
    "radial_project",
    "moment_poly",
    "moment",
    "SpectralDensity",
    "moment_table",
    "TruncationTooSmall",
    "ShellVector",
    "AdjacentConfiguration",
    "tail_bound",
    "choose_truncation",
    "approximating_vector",
    "commutator_residual",
    "transition_chain",
    "CommutantReport",
    "commutant_probe",
]


@dataclass(frozen=True)
class RadialContext:
    """Generator count ``L`` and the ball radius ``K`` used for l2 windows."""

    L: int
    K: int = 8

    def __post_init__(self):
        if self.L < 3:
            raise ValueError("L must be at least 3")
        if self.K < 1:
            raise ValueError("K must be at least 1")

    @property
    def group(self) -> FreeCoxeterGroup:
        return FreeCoxeterGroup(self.L)


# --------------------------------------------------------------------------
# sphere sums and the recurrence
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _h_n(L: int, n: int) -> HeckeElement:
    return from_words(FreeCoxeterGroup(L).sphere(n))


def h_n(ctx: RadialContext, n: int) -> HeckeElement:
    """Sum of ``T_w`` over the sphere of radius ``n`` (zero for ``n < 0``)."""
    if n < 0:
        return HeckeElement()
    return _h_n(ctx.L, n)


def left_h(a: HeckeElement, L: int) -> HeckeElement:
    out = HeckeElement()
    for s in range(L):
        out = out + mul_generator(s, a)
    return out


def verify_recurrence(ctx: RadialContext, n: int) -> Verdict:
    """Check ``h h_n = h_{n+1} + (L-1) h_{n-1} + p h_n`` exactly.

    The companion ``h^2 = h_2 + p h + L`` is checked alongside; the verdict
    passes only when both residuals vanish identically in ``p``.
    """
    if n < 2:
        raise ValueError("the recurrence is stated for n >= 2")
    L = ctx.L
    h = h_n(ctx, 1)
    hn = h_n(ctx, n)
    lhs = mul(h, hn)
    rhs = h_n(ctx, n + 1) + h_n(ctx, n - 1).scale(L - 1) + hn.scale(P)
    residual = lhs - rhs
    companion = mul(h, h) - (h_n(ctx, 2) + h.scale(P) + h_n(ctx, 0).scale(L))
    v = exact_verdict("recurrence", {"L": L, "n": n}, residual)
    if companion:
        v.status = FAIL
        v.residual = f"companion residual: {companion!r}"
    v.detail = {"residual": residual, "companion": companion}
    return v


def express_hn_in_h(ctx: RadialContext, n: int) -> tuple:
    """Coefficients (constant first) of the polynomial ``P_n`` with ``P_n(h) = h_n``.

    Coefficients are :class:`PolyP`.  Inverts the recurrence:
    ``P_0 = 1``, ``P_1 = x``, ``P_2 = x^2 - p x - L`` and
    ``P_{k+1} = (x - p) P_k - (L - 1) P_{k-1}`` for ``k >= 2``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    L = ctx.L
    polys = [(ONE,), (ZERO, ONE), (PolyP.const(-L), -P, ONE)]
    for k in range(2, n):
        pk, pk1 = polys[k], polys[k - 1]
        nxt = [ZERO] * (len(pk) + 1)
        for i, c in enumerate(pk):
            nxt[i + 1] = nxt[i + 1] + c
            nxt[i] = nxt[i] - c * P
        for i, c in enumerate(pk1):
            nxt[i] = nxt[i] - c.scale(L - 1)
        polys.append(tuple(nxt))
    return polys[n]


def substitute(coeffs, x: HeckeElement) -> HeckeElement:
    """Evaluate ``sum_k coeffs[k] x^k`` in the Hecke algebra (Horner)."""
    acc = HeckeElement()
    one = basis(())
    for c in reversed(coeffs):
        acc = mul(acc, x) + one.scale(c)
    return acc


# --------------------------------------------------------------------------
# radial projection
# --------------------------------------------------------------------------

def radial_project(ctx: RadialContext, v):
    """Average symbol coefficients over each sphere of the ball of radius ``K``.

    Accepts a :class:`HeckeElement` (exact) or a dict ``{word: number}`` and
    returns the same kind.  Mass outside the ball is rejected.
    """
    G = ctx.group
    is_hecke = isinstance(v, HeckeElement)
    items = v.terms.items() if is_hecke else v.items()
    sums: dict[int, object] = {}
    for w, c in items:
        k = len(w)
        if k > ctx.K:
            raise ValueError(f"word of length {k} outside ball {ctx.K}")
        sums[k] = sums[k] + c if k in sums else c
    out = {}
    for k, total in sums.items():
        n = G.sphere_count(k)
        if is_hecke:
            avg = total.scale(Fraction(1, n))
        else:
            avg = total / n if not isinstance(total, int) else Fraction(total, n)
        if avg:
            for w in G.sphere(k):
                out[w] = avg
    return HeckeElement(out) if is_hecke else out


def radial_projection_matrix(ctx: RadialContext) -> np.ndarray:
    """Dense matrix of the radial projection on the ball of radius ``K``."""
    G = ctx.group
    words = G.ball(ctx.K)
    index = {w: i for i, w in enumerate(words)}
    M = np.zeros((len(words), len(words)))
    for k in range(ctx.K + 1):
        sph = [index[w] for w in G.sphere(k)]
        M[np.ix_(sph, sph)] = 1.0 / len(sph)
    return M


# --------------------------------------------------------------------------
# moments and density
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _power(L: int, n: int) -> HeckeElement:
    if n == 0:
        return basis(())
    return left_h(_power(L, n - 1), L)


def moment_poly(ctx: RadialContext, n: int) -> PolyP:
    """``tau(h^n)`` as a polynomial in ``p`` from the exact ``n``-fold product."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return trace(_power(ctx.L, n))


def moment(ctx: RadialContext, n: int, p_value) -> Fraction:
    return moment_poly(ctx, n)(as_fraction(p_value))


class SpectralDensity:
    """The closed-form density of ``h`` (up to normalisation).

    With ``y = x - p`` and ``Lt = L - 1`` the unnormalised density is::

        Lt * sqrt(4 Lt - y^2) / (pi * (-y^2 - p (2 - L) y + p^2 (L - 1) + L^2))

    on ``|y| <= 2 sqrt(Lt)`` and zero outside.  Integrals use the
    substitution ``y = 2 sqrt(Lt) cos(theta)``, which removes the square-root
    endpoint singularities, followed by adaptive quadrature.
    """

    def __init__(self, L: int, p: float):
        self.L = int(L)
        self.p = float(p)
        self.Lt = self.L - 1
        self.radius = 2.0 * math.sqrt(self.Lt)

    @property
    def support(self) -> tuple[float, float]:
        return (self.p - self.radius, self.p + self.radius)

    def bracket(self, y: float) -> float:
        p, L = self.p, self.L
        return -y * y - p * (2 - L) * y + p * p * (L - 1) + L * L

    @property
    def anomalous(self) -> bool:
        """True when the denominator is non-positive somewhere on the support.

        The bracket is a concave quadratic in ``y``, so its minimum over the
        support sits at an endpoint.
        """
        return min(self.bracket(-self.radius), self.bracket(self.radius)) <= 0

    def __call__(self, x: float) -> float:
        y = x - self.p
        if abs(y) >= self.radius:
            return 0.0
        den = self.bracket(y)
        if den <= 0:
            return math.nan
        return self.Lt * math.sqrt(4 * self.Lt - y * y) / (math.pi * den)

    def _theta_integrand(self, theta: float, n: int) -> float:
        s = math.sin(theta)
        y = self.radius * math.cos(theta)
        r = self.radius * s
        return (y + self.p) ** n * self.Lt * r * self.radius * s / (math.pi * self.bracket(y))

    def raw_moment(self, n: int) -> float:
        """``int x^n rho(x) dx`` for the unnormalised density."""
        if self.anomalous:
            return math.nan
        # odd moments can vanish, so the absolute tolerance follows the
        # size of the integrand rather than the size of the result
        scale = (abs(self.p) + self.radius) ** n
        val, _ = integrate.quad(
            self._theta_integrand, 0.0, math.pi, args=(n,),
            epsabs=1e-13 * scale, epsrel=1e-11, limit=400,
        )
        return val

    def mass(self) -> float:
        return self.raw_moment(0)

    def moment(self, n: int) -> float:
        """Moment of the normalised density."""
        return self.raw_moment(n) / self.mass()


def moment_table(ctx: RadialContext, p_value, nmax: int = 10, tol: float = 1e-6,
                 binding: bool | None = None) -> list[dict]:
    """Exact ``tau(h^n)`` against quadrature moments of the normalised density.

    Each row carries ``n, p, exact, quadrature, abs_err, status``.  A mismatch
    is ``fail`` when the comparison is binding (default: only at ``p = 0``)
    and ``anomaly`` otherwise.
    """
    pv = as_fraction(p_value)
    if binding is None:
        binding = pv == 0
    dens = SpectralDensity(ctx.L, float(pv))
    rows = []
    for n in range(nmax + 1):
        exact = moment(ctx, n, pv)
        quad = dens.moment(n)
        err = abs(float(exact) - quad)
        ok = err <= tol
        rows.append({
            "n": n,
            "p": pv,
            "exact": exact,
            "quadrature": quad,
            "abs_err": err,
            "status": PASS if ok else (FAIL if binding else ANOMALY),
        })
    return rows


# --------------------------------------------------------------------------
# approximate intertwiners
# --------------------------------------------------------------------------

class TruncationTooSmall(ValueError):
    pass


def tail_bound(delta: float, K: int) -> float:
    """``sum_{k > K} 4 (1 - delta)^(2k)``, the squared-norm mass cut by truncating at ``K``."""
    r = (1.0 - delta) ** 2
    return 4.0 * r ** (K + 1) / (1.0 - r)


def choose_truncation(delta: float, tol: float = 1e-10) -> int:
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    r = (1.0 - delta) ** 2
    # smallest K with 4 r^(K+1) / (1 - r) <= tol
    K = math.ceil(math.log(tol * (1.0 - r) / 4.0) / math.log(r) - 1.0)
    K = max(K, 0)
    while tail_bound(delta, K) > tol:
        K += 1
    while K > 0 and tail_bound(delta, K - 1) <= tol:
        K -= 1
    return K


class ShellVector(dict):
    """A vector in the span of shell indicators around a fixed core ``a z b``.

    Key ``(i, j)`` stands for the indicator of
    ``C(i, j) = {x a z b y : |x| = i, |y| = j, x a and b y reduced}``, which
    has squared norm ``(L-1)^(i+j)``.  Keys ``("cutL", j)`` and
    ``("cutR", i)`` stand for the indicators of ``z b y`` and ``x a z`` that
    appear when ``T_a`` (resp. ``T_b``) cancels into the core.
    """

    def add(self, key, c: float):
        v = self.get(key, 0.0) + c
        if v == 0.0:
            self.pop(key, None)
        else:
            self[key] = v


class AdjacentConfiguration:
    """The pair ``w = a z``, ``v = z b`` with ``a z b`` reduced.

    Vectors are built either explicitly on words (small truncations) or as
    :class:`ShellVector` sums, on which ``h`` and ``R_h`` act by::

        h 1_C(i,j)   = 1_C(i+1,j) + (L-1) 1_C(i-1,j) + p 1_C(i,j)   (i >= 1)
        h 1_C(0,j)   = 1_C(1,j) + 1_cutL(j) + p 1_C(0,j)
        R_h 1_C(i,j) = 1_C(i,j+1) + (L-1) 1_C(i,j-1) + p 1_C(i,j)   (j >= 1)
        R_h 1_C(i,0) = 1_C(i,1) + 1_cutR(i) + p 1_C(i,0)
    """

    def __init__(self, ctx: RadialContext, z: Word, a: int, b: int):
        G = ctx.group
        z = tuple(z)
        G.check_generator(a)
        G.check_generator(b)
        core = (a,) + z + (b,)
        if not G.is_reduced(core):
            raise ValueError(f"a z b = {core} is not reduced")
        self.ctx = ctx
        self.L = ctx.L
        self.z, self.a, self.b = z, a, b
        self.core = core
        self.w = (a,) + z
        self.v = z + (b,)

    # -- explicit words ---------------------------------------------------
    def _left_words(self, k: int):
        return [x for x in self.ctx.group.sphere(k) if not x or x[-1] != self.a]

    def _right_words(self, k: int):
        return [y for y in self.ctx.group.sphere(k) if not y or y[0] != self.b]

    def psi(self, k: int) -> dict:
        """``sum e_{x a z b y}`` over ``|x| = |y| = k`` with ``x a``, ``b y`` reduced."""
        return {
            x + self.core + y: 1.0
            for x in self._left_words(k)
            for y in self._right_words(k)
        }

    def eta_explicit(self, delta: float, K: int) -> dict:
        c = (1.0 - delta) / (self.L - 1)
        out: dict = {}
        for k in range(K + 1):
            f = c ** k
            for word in self.psi(k):
                out[word] = f
        return out

    # -- shell sums -------------------------------------------------------
    def eta(self, delta: float, K: int) -> ShellVector:
        c = (1.0 - delta) / (self.L - 1)
        vec = ShellVector()
        for k in range(K + 1):
            vec.add((k, k), c ** k)
        return vec

    def apply_h(self, vec: ShellVector, p: float = 0.0) -> ShellVector:
        L = self.L
        out = ShellVector()
        for key, c in vec.items():
            if key[0] in ("cutL", "cutR"):
                raise NotImplementedError("h is not needed on cut vectors")
            i, j = key
            out.add((i + 1, j), c)
            out.add((i, j), p * c)
            if i >= 1:
                out.add((i - 1, j), (L - 1) * c)
            else:
                out.add(("cutL", j), c)
        return out

    def apply_Rh(self, vec: ShellVector, p: float = 0.0) -> ShellVector:
        L = self.L
        out = ShellVector()
        for key, c in vec.items():
            if key[0] in ("cutL", "cutR"):
                raise NotImplementedError("R_h is not needed on cut vectors")
            i, j = key
            out.add((i, j + 1), c)
            out.add((i, j), p * c)
            if j >= 1:
                out.add((i, j - 1), (L - 1) * c)
            else:
                out.add(("cutR", i), c)
        return out

    def norm2(self, vec: ShellVector) -> float:
        """Squared l2 norm of a shell vector.

        Indicators of different total length are orthogonal; at equal length
        ``C(i,j)`` and ``C(i+1,j-1)`` are disjoint because a reduced core
        cannot coincide with its own shift by one letter.  Larger shifts are
        not needed by this construction and are refused.
        """
        L = self.L
        by_len: dict = {}
        total = 0.0
        for key, c in vec.items():
            if key[0] == "cutL":
                size = (L - 1) ** key[1]
                length = len(self.z) + 1 + key[1]
            elif key[0] == "cutR":
                size = (L - 1) ** key[1]
                length = len(self.z) + 1 + key[1]
            else:
                i, j = key
                size = (L - 1) ** (i + j)
                length = len(self.core) + i + j
                by_len.setdefault(length, []).append(i)
            total += c * c * size
        for length, shifts in by_len.items():
            if max(shifts) - min(shifts) > 1:
                raise NotImplementedError(
                    f"shell overlap analysis needed at length {length}: shifts {shifts}"
                )
        cuts = [k for k in vec if k[0] in ("cutL", "cutR")]
        if cuts:
            cut_lengths = [len(self.z) + 1 + k[1] for k in cuts]
            if len(set(cut_lengths)) != len(cut_lengths) or set(cut_lengths) & set(by_len):
                raise NotImplementedError("cut vectors overlap other components")
        return total

    def residual_vector(self, delta: float, K: int, p: float = 0.0) -> ShellVector:
        """``e_v - e_w - (h eta - R_h eta)`` as a shell vector."""
        eta = self.eta(delta, K)
        out = ShellVector()
        out.add(("cutL", 0), 1.0)   # e_v = e_{z b}
        out.add(("cutR", 0), -1.0)  # e_w = e_{a z}
        for key, c in self.apply_h(eta, p).items():
            out.add(key, -c)
        for key, c in self.apply_Rh(eta, p).items():
            out.add(key, c)
        return out

    def residual(self, delta: float, K: int | None = None, tol: float = 1e-10,
                 p: float = 0.0) -> float:
        """``||e_v - e_w - (h eta - R_h eta)||_2`` for the truncated ``eta``."""
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if K is None:
            K = choose_truncation(delta, tol)
        elif tail_bound(delta, K) > tol:
            raise TruncationTooSmall(
                f"tail bound {tail_bound(delta, K):.3g} exceeds tolerance {tol:.3g} at K={K}"
            )
        return math.sqrt(self.norm2(self.residual_vector(delta, K, p)))

    def residual_explicit(self, delta: float, K: int, p: float = 0.0) -> float:
        """Same quantity by applying ``h`` and ``R_h`` to explicit word vectors."""
        eta = self.eta_explicit(delta, K)
        diff: dict = {self.v: 1.0}
        diff[self.w] = diff.get(self.w, 0.0) - 1.0
        for word, c in _left_h_float(eta, self.L, p).items():
            diff[word] = diff.get(word, 0.0) - c
        for word, c in _right_h_float(eta, self.L, p).items():
            diff[word] = diff.get(word, 0.0) + c
        return math.sqrt(sum(c * c for c in diff.values()))

    def psi_norm_check(self, k: int, delta: float) -> tuple[float, float]:
        """``(||c^k psi_k||^2, 4 (1-delta)^(2k))`` from the explicit vector."""
        c = (1.0 - delta) / (self.L - 1)
        n2 = c ** (2 * k) * len(self.psi(k))
        return n2, 4.0 * (1.0 - delta) ** (2 * k)


def _left_h_float(vec: dict, L: int, p: float) -> dict:
    out: dict = {}
    for w, c in vec.items():
        for s in range(L):
            if w and w[0] == s:
                out[w[1:]] = out.get(w[1:], 0.0) + c
                out[w] = out.get(w, 0.0) + p * c
            else:
                u = (s,) + w
                out[u] = out.get(u, 0.0) + c
    return out


def _right_h_float(vec: dict, L: int, p: float) -> dict:
    out: dict = {}
    for w, c in vec.items():
        for s in range(L):
            if w and w[-1] == s:
                out[w[:-1]] = out.get(w[:-1], 0.0) + c
                out[w] = out.get(w, 0.0) + p * c
            else:
                u = w + (s,)
                out[u] = out.get(u, 0.0) + c
    return out


def approximating_vector(ctx: RadialContext, z: Word, a: int, b: int, delta: float,
                         K: int | None = None, tol: float = 1e-10) -> ShellVector:
    """Truncated ``eta = sum_k ((1-delta)/(L-1))^k psi_k`` as a shell vector."""
    cfg = AdjacentConfiguration(ctx, z, a, b)
    if K is None:
        K = choose_truncation(delta, tol)
    elif tail_bound(delta, K) > tol:
        raise TruncationTooSmall(
            f"tail bound {tail_bound(delta, K):.3g} exceeds tolerance {tol:.3g} at K={K}"
        )
    return cfg.eta(delta, K)


def transition_chain(ctx: RadialContext, v: Word, w: Word) -> list[tuple]:
    """Adjacent pairs ``(z, a, b)`` walking from ``v`` to ``w``.

    Each step drops the first letter and appends one.  When ``v`` ends with
    the first letter of ``w`` an auxiliary letter ``b`` different from it is
    routed through, costing one extra step.
    """
    v, w = tuple(v), tuple(w)
    n = len(v)
    if len(w) != n:
        raise ValueError("words must have equal length")
    if v == w:
        return []
    if v[-1] != w[0]:
        words = [v[k:] + w[:k] for k in range(n + 1)]
    else:
        b = min(s for s in range(ctx.L) if s != v[-1])
        words = [v] + [v[k:] + (b,) + w[: k - 1] for k in range(1, n + 1)] + [w]
    pairs = []
    for u0, u1 in zip(words, words[1:]):
        pairs.append((u0[1:], u0[0], u1[-1]))
    return pairs


def commutator_residual(ctx: RadialContext, v: Word, w: Word, delta: float,
                        K: int | None = None, tol: float = 1e-10) -> float:
    """Residual ``||e_v - e_w - (h eta - R_h eta)||`` for ``|v| = |w|``.

    Adjacent pairs are handled directly; in general the residuals along
    :func:`transition_chain` are summed (triangle inequality), which is the
    value the construction certifies.
    """
    v, w = tuple(v), tuple(w)
    if len(v) != len(w):
        raise ValueError("v and w must have equal length")
    total = 0.0
    for z, a, b in transition_chain(ctx, v, w):
        total += AdjacentConfiguration(ctx, z, a, b).residual(delta, K, tol)
    return total


# --------------------------------------------------------------------------
# truncated commutant
# --------------------------------------------------------------------------

@dataclass
class CommutantReport:
    L: int
    K: int
    dropped_shells: int
    dimension: int
    radial_dimension: int
    interior_radius: int
    nonradial_rank: int
    distances: list

    @property
    def radial_contained(self) -> bool:
        return self.dimension >= self.radial_dimension


def commutant_probe(ctx: RadialContext, drop_shells: int = 2, p_value=Fraction(-3, 7)) -> CommutantReport:
    """Exact kernel of ``h - R_h`` on symbols supported in the ball of radius ``K``.

    The equations are indexed by words of length at most ``K + 1 - drop_shells``.
    For every kernel basis vector the part on the ball of radius ``K - 2`` is
    compared with its radial projection; ``nonradial_rank`` is the rank of
    those differences and ``distances`` their l2 norms (floats).
    """
    K = ctx.K
    if K < 3:
        raise ValueError("K must be at least 3")
    L = ctx.L
    p = as_fraction(p_value)
    G = ctx.group
    cols = G.ball(K)
    rows: dict = {}

    def put(u, w, c):
        r = rows.setdefault(u, {})
        r[w] = r.get(w, 0) + c

    for w in cols:
        for s in range(L):
            if w and w[0] == s:
                put(w[1:], w, 1)
                put(w, w, p)
            else:
                put((s,) + w, w, 1)
            if w and w[-1] == s:
                put(w[:-1], w, -1)
                put(w, w, -p)
            else:
                put(w + (s,), w, -1)
    keep = K + 1 - drop_shells
    eqs = [r for u, r in rows.items() if len(u) <= keep]
    # outer shells first keeps fill-in small
    kernel = nullspace(eqs, cols[::-1])

    inner_r = K - 2
    inner_ctx = RadialContext(L, inner_r)
    diffs, dists = [], []
    for vec in kernel:
        part = {wd: c for wd, c in vec.items() if len(wd) <= inner_r}
        proj = radial_project(inner_ctx, part)
        d = {}
        for wd in set(part) | set(proj):
            x = part.get(wd, 0) - proj.get(wd, 0)
            if x:
                d[wd] = x
        diffs.append(d)
        dists.append(math.sqrt(float(sum(x * x for x in d.values()))))
    return CommutantReport(
        L=L, K=K, dropped_shells=drop_shells, dimension=len(kernel),
        radial_dimension=K + 1, interior_radius=inner_r,
        nonradial_rank=rank(diffs), distances=dists,
    )
