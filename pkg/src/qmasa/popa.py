"""Intertwining-decay experiments on the truncated q-Fock space.

Two unit vectors define two one-generator subalgebras.  The expectation onto
the second one acts on vectors as the q-orthogonal projection ``P`` onto the
pure powers of a target basis vector, and the experiments measure
``||P(x y~ eta_k)||`` where ``x`` is a Wick word, ``y~`` the right Wick word
of ``y`` and ``eta_k`` a weakly null sequence in the first subalgebra's
Fock component.

Configuration convention: the target of ``P`` is ``e_target``; the moving
direction is ``v = alpha e_target + beta e_other``.  The orthogonal case is
``alpha = 0``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import solve
from .poly import as_fraction, format_rational
from .qfock import (
    FockVector,
    basis_words,
    jacobi_matrix,
    parse_q,
    q_factorial,
    q_inner,
    q_norm2,
    tensor_power,
    wick_apply,
    wick_right_apply,
)
from .verdict import FAIL, PASS, Verdict

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "orthogonal_config",
    "general_config",
    "proj_B",
    "proj_Q",
    "eta_sequence",
    "sandwich_vector",
    "commutation_check",
    "decay_orthogonal",
    "orthogonal_sweep",
    "r_jk",
    "decomposition_check",
    "v_tilde",
    "envelope_table",
    "decay_general",
    "rows_to_csv",
]


class ConfigError(ValueError):
    pass


def _word(s) -> tuple:
    if isinstance(s, (tuple, list)):
        return tuple(int(x) for x in s)
    s = str(s).strip()
    if s in ("", "e", "()"):
        return ()
    return tuple(int(x) for x in s.replace(" ", "").split(","))


def _number(s):
    if isinstance(s, (int, Fraction, float)):
        return s
    return as_fraction(s)


@dataclass(frozen=True)
class ExperimentConfig:
    q: object = Fraction(1, 2)
    d: int = 2
    N: int = 10
    alpha: object = Fraction(0)
    beta: object = Fraction(1)
    x_word: tuple = (1,)
    y_word: tuple = (1,)
    target: int = 1
    other: int = 0
    kind: str = "pure-power"

    def __post_init__(self):
        object.__setattr__(self, "q", parse_q(self.q))
        object.__setattr__(self, "alpha", _number(self.alpha))
        object.__setattr__(self, "beta", _number(self.beta))
        object.__setattr__(self, "x_word", _word(self.x_word))
        object.__setattr__(self, "y_word", _word(self.y_word))
        self.validate()

    def validate(self):
        if not -1 < self.q < 1:
            raise ConfigError("q must lie in (-1, 1)")
        if self.target == self.other or not (0 <= self.target < self.d and 0 <= self.other < self.d):
            raise ConfigError("target and other must be distinct indices below d")
        norm = self.alpha**2 + self.beta**2
        exact = all(isinstance(x, (int, Fraction)) for x in (self.alpha, self.beta))
        if (exact and norm != 1) or (not exact and abs(norm - 1) > 1e-12):
            raise ConfigError("alpha^2 + beta^2 must equal 1")
        if self.beta == 0:
            raise ConfigError("beta must be non-zero")
        if self.N < len(self.x_word) + len(self.y_word) + 2:
            raise ConfigError("N must be at least |x| + |y| + 2")
        for a in self.x_word + self.y_word:
            if not 0 <= a < self.d:
                raise ConfigError(f"letter {a} outside dimension {self.d}")
        if self.kind not in ("pure-power", "jacobi-phase"):
            raise ConfigError(f"unknown kind {self.kind!r}")

    @property
    def n_plus_m(self) -> int:
        return len(self.x_word) + len(self.y_word)

    @property
    def direction(self) -> list:
        v = [0] * self.d
        v[self.target] = self.alpha
        v[self.other] = self.beta
        return v

    @classmethod
    def from_text(cls, text: str, defaults: dict | None = None, **overrides) -> "ExperimentConfig":
        """Parse ``key = value`` lines (``#`` starts a comment).

        Precedence: ``overrides`` over the file over ``defaults``.
        """
        known = {f.name for f in fields(cls)}
        vals: dict = dict(defaults or {})
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            k, v = (t.strip() for t in line.split("=", 1))
            if k not in known:
                raise ConfigError(f"line {lineno}: unknown key {k!r}")
            vals[k] = v
        vals.update({k: v for k, v in overrides.items() if v is not None})
        for k in ("d", "N", "target", "other"):
            if k in vals:
                vals[k] = int(vals[k])
        return cls(**vals)

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def to_params(self) -> dict:
        return {
            "q": self.q, "d": self.d, "N": self.N, "alpha": self.alpha, "beta": self.beta,
            "x": self.x_word, "y": self.y_word, "target": self.target, "kind": self.kind,
        }


def orthogonal_config(**kw) -> ExperimentConfig:
    """``eta`` along ``e_0``, projection onto powers of ``e_1``."""
    base = dict(alpha=0, beta=1, target=1, other=0)
    base.update(kw)
    return ExperimentConfig(**base)


def general_config(**kw) -> ExperimentConfig:
    """``v = (3/5) e_0 + (4/5) e_1``, projection onto powers of ``e_0``."""
    base = dict(alpha=Fraction(3, 5), beta=Fraction(4, 5), target=0, other=1)
    base.update(kw)
    return ExperimentConfig(**base)


# --------------------------------------------------------------------------
# projections
# --------------------------------------------------------------------------

def proj_B(v: FockVector, t: int, q, method: str = "direct") -> FockVector:
    """q-orthogonal projection onto ``span{e_t^{(x) n}}``.

    ``direct`` keeps the pure-power amplitudes: ``P_q`` maps a word to
    rearrangements of itself, so ``<e_t^n, w>_q = 0`` for every other word.
    ``normal`` solves the normal equations with the q-Gram of the pure powers.
    """
    if method == "direct":
        return FockVector({w: c for w, c in v.items() if all(a == t for a in w)})
    if method != "normal":
        raise ValueError(f"unknown method {method!r}")
    degs = sorted(v.degrees())
    if not degs:
        return FockVector()
    powers = [FockVector.word((t,) * n) for n in degs]
    G = [[q_inner(a, b, q) for b in powers] for a in powers]
    rhs = [q_inner(a, v, q) for a in powers]
    sol = solve(G, rhs)
    out = FockVector()
    for n, c in zip(degs, sol):
        if c != 0:
            out.acc((t,) * n, c)
    return out


def proj_Q(l: int, v: FockVector) -> FockVector:
    """Keep the pure powers of exponent ``<= l`` of a single-index vector."""
    letters = {a for w in v for a in w}
    if len(letters) > 1:
        raise ValueError("vector is not supported on pure powers of one index")
    return FockVector({w: c for w, c in v.items() if len(w) <= l})


# --------------------------------------------------------------------------
# weakly null sequences
# --------------------------------------------------------------------------

def _phase_unitary(q, N: int) -> np.ndarray:
    J = jacobi_matrix(q, N)
    lam, V = np.linalg.eigh(J)
    R = 2.0 / math.sqrt(1.0 - float(q))
    theta = np.arccos(np.clip(lam / R, -1.0, 1.0))
    return (V * np.exp(1j * theta)) @ V.T


def eta_sequence(kind: str, k: int, q, N: int, direction: Sequence, exact: bool = False) -> FockVector:
    """``eta_k`` along the unit vector ``direction``.

    ``pure-power``: ``direction^{(x) k}``, normalised unless ``exact=True``.
    ``jacobi-phase``: ``u^k Omega`` with ``u = exp(i arccos(J / R))`` for
    the Jacobi matrix ``J`` of the field on the first ``N + 1`` pure powers
    and ``R = 2 / sqrt(1 - q)``; ``u`` is unitary on that subspace.
    """
    if k < 0 or (kind == "pure-power" and k > N):
        raise ValueError("need 0 <= k <= N")
    if kind == "pure-power":
        vec = tensor_power(direction, k)
        if exact:
            return vec
        return vec.scale(1 / math.sqrt(float(q_factorial(k, q))))
    if kind != "jacobi-phase":
        raise ValueError(f"unknown kind {kind!r}")
    U = _phase_unitary(q, N)
    coeffs = np.linalg.matrix_power(U, k)[:, 0]
    out = FockVector()
    for n, c in enumerate(coeffs):
        if c == 0:
            continue
        scale = complex(c) / math.sqrt(float(q_factorial(n, q)))
        for w, a in tensor_power(direction, n).items():
            out.acc(w, scale * float(a))
    return out


# --------------------------------------------------------------------------
# the decay quantity
# --------------------------------------------------------------------------

def sandwich_vector(x_word, y_word, eta: FockVector, q, d: int) -> FockVector:
    """``x y~ eta`` with ``x = W(x_word)`` and ``y~ = W_r(y_word)``."""
    return wick_apply(x_word, wick_right_apply(y_word, eta, q, d), q, d)


def commutation_check(x_word, y_word, q, d: int, N: int) -> Verdict:
    """``x y~ w = y~ x w`` for every basis word ``w`` of degree ``<= N - |x| - |y|``."""
    bad = 0
    for w in basis_words(d, N - len(x_word) - len(y_word)):
        v = FockVector.word(w)
        a = wick_apply(x_word, wick_right_apply(y_word, v, q, d), q, d)
        b = wick_right_apply(y_word, wick_apply(x_word, v, q, d), q, d)
        if not (a - b).is_zero():
            bad += 1
    return Verdict("popa-commutation", {"q": q, "x": tuple(x_word), "y": tuple(y_word), "N": N},
                   PASS if not bad else FAIL, "0" if not bad else f"{bad} words")


def _ratio_norm(num2, den2) -> float:
    if isinstance(num2, (int, Fraction)) and isinstance(den2, (int, Fraction)):
        return math.sqrt(Fraction(num2) / Fraction(den2))
    return math.sqrt(abs(num2) / abs(den2))


def decay_orthogonal(cfg: ExperimentConfig) -> tuple[list, Verdict]:
    """Rows ``(k, ||P(x y~ eta_k)||)`` for ``k = 0..N`` and an exact-zero verdict.

    For the pure-power kind the projected vector is computed from the
    unnormalised ``e^{(x) k}`` in exact arithmetic and must vanish
    identically for every ``k > |x| + |y|``.
    """
    if cfg.alpha != 0:
        raise ConfigError("orthogonal configuration needs alpha = 0")
    q, d = cfg.q, cfg.d
    rows, bad = [], []
    for k in range(cfg.N + 1):
        exact = cfg.kind == "pure-power"
        eta = eta_sequence(cfg.kind, k, q, cfg.N, cfg.direction, exact=exact)
        Pv = proj_B(sandwich_vector(cfg.x_word, cfg.y_word, eta, q, d), cfg.target, q)
        if exact:
            norm = _ratio_norm(q_norm2(Pv, q), q_norm2(eta, q))
            if k > cfg.n_plus_m and Pv:
                bad.append(k)
        else:
            norm = math.sqrt(abs(q_norm2(Pv, q)))
        rows.append((k, norm))
    params = cfg.to_params()
    if cfg.kind == "pure-power":
        v = Verdict("popa-orthogonal", params, PASS if not bad else FAIL,
                    "0" if not bad else f"non-zero at k={bad}")
    else:
        last = rows[-1][1]
        v = Verdict("popa-orthogonal-jacobi", params, PASS if last <= 1e-6 else FAIL, last)
    v.detail = rows
    return rows, v


def orthogonal_sweep(q, N: int = 10, d: int = 2, max_deg: int = 2) -> list:
    """:func:`decay_orthogonal` for every pair of Wick words of degree ``<= max_deg``."""
    out = []
    words = basis_words(d, max_deg)
    for x, y in itertools.product(words, repeat=2):
        cfg = orthogonal_config(q=q, N=N, d=d, x_word=x, y_word=y)
        out.append(decay_orthogonal(cfg)[1])
    return out


# --------------------------------------------------------------------------
# the general configuration
# --------------------------------------------------------------------------

def r_jk(j: int, k: int, a: int = 0, b: int = 1) -> FockVector:
    """Sum of the ``C(j, k)`` words with ``j - k`` letters ``a`` and ``k`` letters ``b``."""
    if not 0 <= k <= j:
        raise ValueError("need 0 <= k <= j")
    out = FockVector()
    for pos in itertools.combinations(range(j), k):
        w = [a] * j
        for i in pos:
            w[i] = b
        out[tuple(w)] = 1
    return out


def decomposition_check(cfg: ExperimentConfig, jmax: int = 6) -> Verdict:
    """``v^{(x) j} = sum_k alpha^(j-k) beta^k R_{j,k}`` for ``j <= jmax``.

    Exact for rational ``alpha, beta``; float inputs are compared to 1e-12.
    """
    exact = all(isinstance(x, (int, Fraction)) for x in (cfg.alpha, cfg.beta))
    tol = 0.0 if exact else 1e-12
    bad = []
    for j in range(jmax + 1):
        lhs = tensor_power(cfg.direction, j)
        rhs = FockVector()
        for k in range(j + 1):
            rhs = rhs + r_jk(j, k, cfg.target, cfg.other).scale(cfg.alpha ** (j - k) * cfg.beta**k)
        if not (lhs - rhs).is_zero(tol):
            bad.append(j)
    return Verdict("popa-decomposition", {"alpha": cfg.alpha, "beta": cfg.beta, "jmax": jmax},
                   PASS if not bad else FAIL, "0" if not bad else f"j={bad}")


def v_tilde(cfg: ExperimentConfig, j: int, K: int | None = None) -> FockVector:
    """The decomposition of ``v^{(x) j}`` summed only over ``k <= min(j, K)``."""
    K = cfg.n_plus_m if K is None else K
    out = FockVector()
    for k in range(min(j, K) + 1):
        out = out + r_jk(j, k, cfg.target, cfg.other).scale(cfg.alpha ** (j - k) * cfg.beta**k)
    return out


def envelope_table(cfg: ExperimentConfig, jmin: int = 4, jmax: int = 14) -> tuple[list, Verdict]:
    """Rows ``(j, (1-q)^j ||v~^{(x) j}||^2, C j^(n+m) |alpha|^j)`` with ``C`` fixed at ``jmin``."""
    q, e = cfg.q, cfg.n_plus_m
    a = abs(cfg.alpha)
    if not a < 1:
        raise ConfigError("need |alpha| < 1")
    lhs = {j: (1 - q) ** j * q_norm2(v_tilde(cfg, j), q) for j in range(jmin, jmax + 1)}
    C = lhs[jmin] / (jmin**e * a**jmin)
    rows, bad = [], []
    for j in range(jmin, jmax + 1):
        env = C * j**e * a**j
        rows.append((j, lhs[j], env))
        if lhs[j] > env:
            bad.append(j)
    params = dict(cfg.to_params(), jmin=jmin, jmax=jmax)
    v = Verdict("popa-envelope", params, PASS if not bad else FAIL,
                "0" if not bad else f"envelope exceeded at j={bad}")
    v.detail = rows
    return rows, v


def decay_general(cfg: ExperimentConfig, kmax: int | None = None) -> tuple[list, Verdict]:
    """Rows ``(k, ||P(x y~ eta_k)||)`` with ``eta_k`` the normalised ``v^{(x) k}``.

    The verdict requires (i) ``P(x y~ v^k) = P(x y~ v~^k)`` exactly for every
    ``k`` and (ii) strict decrease of the norm for ``k > |x| + |y|``.
    """
    q, d = cfg.q, cfg.d
    kmax = cfg.N if kmax is None else kmax
    exact = all(isinstance(x, (int, Fraction)) for x in (cfg.alpha, cfg.beta))
    tol = 0.0 if exact else 1e-9
    rows, problems = [], []
    for k in range(kmax + 1):
        vk = tensor_power(cfg.direction, k)
        Pv = proj_B(sandwich_vector(cfg.x_word, cfg.y_word, vk, q, d), cfg.target, q)
        Pt = proj_B(sandwich_vector(cfg.x_word, cfg.y_word, v_tilde(cfg, k), q, d), cfg.target, q)
        if not (Pv - Pt).is_zero(tol):
            problems.append(f"truncation changes P at k={k}")
        rows.append((k, _ratio_norm(q_norm2(Pv, q), q_norm2(vk, q))))
    tail = [r for k, r in rows if k > cfg.n_plus_m]
    if any(b >= a for a, b in zip(tail, tail[1:])):
        problems.append("not strictly decreasing")
    v = Verdict("popa-general", dict(cfg.to_params(), kmax=kmax),
                PASS if not problems else FAIL, "0" if not problems else "; ".join(problems))
    v.detail = rows
    return rows, v


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return format_rational(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, float):
        return repr(x)
    return str(x)
