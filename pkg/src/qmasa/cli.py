"""Command line entry point: ``qmasa <command> ...``.

Every command produces verdict records (JSON lines by default) and, where
it makes sense, a table (``--format csv``).  The exit status is 0 unless
some record has status ``fail``; ``anomaly`` records are reported but do
not fail a run.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import hecke, popa, pukanszky, qfock, radial
from .coxeter import FreeCoxeterGroup, parse_word
from .poly import PolyP, as_fraction
from .verdict import ANOMALY, FAIL, PASS, Verdict, exact_verdict, timed

SUITES = (
    "hecke-core",
    "radial",
    "lemma24",
    "pukanszky",
    "fock-core",
    "popa-orthogonal",
    "popa-general",
    "density",
)

DEFAULT_SEED = 20240611
DEFAULT_DELTAS = (0.4, 0.2, 0.1, 0.05)
Q_GRID = ("-9/10", "-1/2", "0", "1/2", "9/10")


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# suite tasks (top-level so they can run in worker processes)
# --------------------------------------------------------------------------

def _random_element(G: FreeCoxeterGroup, rng: random.Random, radius: int, terms: int):
    words = G.ball(radius)
    d = {}
    for _ in range(terms):
        d[rng.choice(words)] = PolyP((rng.randint(-2, 2), rng.randint(-2, 2)))
    return hecke.HeckeElement(d)


def task_hecke_core(L: int, seed: int, count: int = 200) -> list:
    G = FreeCoxeterGroup(L)
    rng = random.Random(seed)
    out = []
    bad = sum(
        1
        for _ in range(count)
        if (lambda a, b: hecke.mul(a, b) != hecke.mul_via_generators(a, b))(
            _random_element(G, rng, 4, 3), _random_element(G, rng, 4, 3)
        )
    )
    out.append(_count_verdict("hecke-product", {"L": L, "seed": seed, "pairs": count}, bad))
    bad = 0
    for _ in range(count // 4):
        a, b, c = (_random_element(G, rng, 3, 3) for _ in range(3))
        if hecke.mul(hecke.mul(a, b), c) != hecke.mul(a, hecke.mul(b, c)):
            bad += 1
    out.append(_count_verdict("hecke-associativity", {"L": L, "seed": seed, "triples": count // 4}, bad))
    bad = 0
    for _ in range(count // 4):
        a, b = _random_element(G, rng, 4, 3), _random_element(G, rng, 4, 3)
        if hecke.star(hecke.mul(a, b)) != hecke.mul(hecke.star(b), hecke.star(a)):
            bad += 1
        if hecke.trace(hecke.mul(hecke.star(a), b)) != hecke.inner_poly(a, b):
            bad += 1
    out.append(_count_verdict("hecke-star-trace", {"L": L, "seed": seed, "pairs": count // 4}, bad))
    bad = 0
    for s in range(L):
        Ts = hecke.basis((s,))
        if hecke.mul(Ts, Ts) != hecke.basis(()) + Ts.scale(PolyP((0, 1))):
            bad += 1
    out.append(_count_verdict("hecke-quadratic", {"L": L}, bad))
    return out


def _count_verdict(check: str, params: dict, bad: int) -> Verdict:
    return Verdict(check, params, PASS if not bad else FAIL, "0" if not bad else f"{bad} mismatches")


def task_recurrence(L: int, nmax: int) -> list:
    ctx = radial.RadialContext(L)
    return [radial.verify_recurrence(ctx, n) for n in range(2, nmax + 1)]


def task_polynomial(L: int, nmax: int) -> list:
    ctx = radial.RadialContext(L)
    h = radial.h_n(ctx, 1)
    out = []
    for n in range(nmax + 1):
        res = radial.substitute(radial.express_hn_in_h(ctx, n), h) - radial.h_n(ctx, n)
        out.append(exact_verdict("hn-polynomial", {"L": L, "n": n}, res))
    return out


def task_odd_moments(L: int) -> list:
    ctx = radial.RadialContext(L)
    bad = [2 * k + 1 for k in range(6) if radial.moment(ctx, 2 * k + 1, 0) != 0]
    return [Verdict("odd-moments", {"L": L, "p": 0, "nmax": 11}, PASS if not bad else FAIL,
                    "0" if not bad else f"non-zero at n={bad}")]


def lemma24_rows(L: int, deltas, v=None, w=None) -> list:
    ctx = radial.RadialContext(L)
    rows = []
    for d in deltas:
        K = radial.choose_truncation(d)
        if v is None:
            r = radial.AdjacentConfiguration(ctx, (), 0, 1).residual(d, K)
        else:
            r = radial.commutator_residual(ctx, v, w, d)
        rows.append((d, K, r))
    return rows


def _slope(rows) -> float:
    xs = [math.log(d) for d, _, _ in rows]
    ys = [math.log(r) for _, _, r in rows]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


def lemma24_verdicts(L: int, rows, label: dict) -> list:
    out = []
    for d, K, r in rows:
        out.append(Verdict("lemma24-residual", dict(label, L=L, delta=d, K=K), PASS, r))
    res = [r for _, _, r in rows]
    dec = all(b < a for a, b in zip(res, res[1:]))
    out.append(Verdict("lemma24-monotone", dict(label, L=L), PASS if dec else FAIL, "0" if dec else str(res)))
    if len(rows) >= 2:
        s = _slope(rows)
        out.append(Verdict("lemma24-slope", dict(label, L=L, window="0.3..0.7"),
                           PASS if 0.3 <= s <= 0.7 else FAIL, s))
    return out


def task_lemma24(L: int, deltas) -> list:
    out = lemma24_verdicts(L, lemma24_rows(L, deltas), {"v": "0", "w": "1"})
    # a pair whose chain needs the auxiliary letter
    rows = lemma24_rows(L, deltas, (0, 1), (1, 0))
    chain = next(v for v in lemma24_verdicts(L, rows, {"v": "0,1", "w": "1,0"})
                 if v.check == "lemma24-monotone")
    chain.check = "lemma24-chain-monotone"
    return out + [chain]


def task_density(L: int, p) -> list:
    ctx = radial.RadialContext(L)
    out = []
    for row in radial.moment_table(ctx, p):
        out.append(Verdict("density-moment", {"L": L, "p": row["p"], "n": row["n"]},
                           row["status"], row["abs_err"]))
    return out


def task_lemma32(L: int, case: int, seeds, lmax: int = 3, window: int = 3) -> list:
    ctx = radial.RadialContext(L)
    out = []
    for l in range(1, lmax + 1):
        for m in range(window + 1):
            for n in range(window + 1):
                if not pukanszky.case_applies(case, l, m, n):
                    continue
                for s in seeds:
                    out.append(pukanszky.verify_relation(ctx, case, l, m, n, s))
    return out


def task_orthogonality(L: int, seeds, window: int = 3) -> list:
    ctx = radial.RadialContext(L)
    out = []
    for kind in ("beta", "gamma"):
        v = pukanszky.verify_orthogonality(ctx, kind, l=2, window=window, seeds=tuple(seeds[:2]))
        v.detail = None
        out.append(v)
    return out


def task_expansion(L: int, mmax: int, seeds) -> list:
    ctx = radial.RadialContext(L)
    out = []
    for m in range(mmax + 1):
        for n in range(mmax + 1):
            v = pukanszky.verify_coefficient_relation(ctx, m, n, l=2, seeds=(seeds[0], seeds[0]))
            v.detail = None
            out.append(v)
    return out


def task_intertwiner(L: int, depth: int, exact_window: int, seeds) -> list:
    ctx = radial.RadialContext(L)
    out = []
    for D in range(1, depth + 1):
        rep = pukanszky.intertwiner_check(ctx, depth=D, l=2, seeds=(seeds[0], seeds[0]),
                                          exact_window=min(D, exact_window))
        params = {"L": L, "depth": D, "exact_window": rep.exact_window,
                  "sigma_min": rep.sigma_min, "sigma_max": rep.sigma_max,
                  "lower_bound": rep.lower_bound, "upper_bound": rep.upper_bound}
        out.append(Verdict("theorem33-transfer", params, PASS if rep.passed else FAIL,
                           "0" if rep.passed else str(rep.mismatches or "bounds")))
    return out


def task_toeplitz(kmax: int = 32) -> list:
    out = []
    for a in (0.5, -0.5):
        bad = []
        for k in range(1, kmax + 1):
            try:
                pukanszky.toeplitz_bounds(a, k)
            except pukanszky.BoundViolation:
                bad.append(k)
        out.append(Verdict("toeplitz-bounds", {"a": a, "kmax": kmax}, PASS if not bad else FAIL,
                           "0" if not bad else f"k={bad}"))
    return out


def task_lemma36(L: int, seeds, total: int = 6) -> list:
    ctx = radial.RadialContext(L)
    out = []
    for m in range(total - 1):
        for n in range(total - 1 - m):
            for r in range(total):
                for s in range(total - r):
                    if m + n + 2 != r + s + 1:
                        continue
                    for route in ("direct", "factor"):
                        out.append(pukanszky.verify_cross_orthogonality(
                            ctx, 2, 1, m, n, r, s, seeds=(seeds[0], seeds[1]), route=route))
    return out


def task_orbit_span(L: int, N: int) -> list:
    r, dim = pukanszky.orbit_span_rank(radial.RadialContext(L), N)
    return [Verdict("orbit-span", {"L": L, "N": N, "rank": r, "dimension": dim},
                    PASS if r == dim else FAIL, "0" if r == dim else f"{dim - r} missing")]


def task_positivity(q, dmax: int = 3, nmax: int = 6) -> list:
    q = qfock.parse_q(q)
    bad = []
    for d in range(1, dmax + 1):
        for n in range(1, nmax + 1):
            if not all(qfock.is_positive_definite(B) for B in qfock.pq_blocks(n, d, q)):
                bad.append((d, n))
    return [Verdict("fock-positivity", {"q": q, "dmax": dmax, "nmax": nmax},
                    PASS if not bad else FAIL, "0" if not bad else str(bad))]


def task_fock_algebra(q, d: int, N: int) -> list:
    q = qfock.parse_q(q)
    xi = [Fraction(3, 5), Fraction(4, 5)] + [0] * (d - 2)
    eta = [1] + [0] * (d - 1)
    out = [
        qfock.adjointness_check(xi, q, d, N - 1),
        qfock.adjointness_check(xi, q, d, N - 1, right=True),
        qfock.ccr_check(xi, eta, q, d, N),
        qfock.wick_vacuum_check(q, d, 5),
        qfock.wick_vacuum_check(q, d, 5, right=True),
    ]
    return out


def task_quantization(q, N: int) -> list:
    q = qfock.parse_q(q)
    c, s = Fraction(3, 5), Fraction(4, 5)
    U = [[c, -s], [s, c]]
    out = [qfock.second_quantization_check(U, [1, 0], q, N)]
    out.append(qfock.wick_covariance_check(U, (0, 1), q, N - 1))
    F = qfock.first_quantization(U, q, 4)
    rng = random.Random(DEFAULT_SEED)
    bad = 0
    for _ in range(50):
        x = qfock.FockVector({w: Fraction(rng.randint(-3, 3)) for w in rng.sample(F.words, 4)})
        y = qfock.FockVector({w: Fraction(rng.randint(-3, 3)) for w in rng.sample(F.words, 4)})
        if qfock.q_inner(F.apply(x), F.apply(y), q) != qfock.q_inner(x, y, q):
            bad += 1
    out.append(_count_verdict("fock-first-quantization-unitary", {"q": q, "N": 4, "pairs": 50}, bad))
    return out


def task_growth(q, jmax: int = 12, jratio: int = 30) -> list:
    q = qfock.parse_q(q)
    bad = [j for j in range(jmax + 1) if qfock.norm_growth([1], j, q) != qfock.q_factorial(j, q)]
    v2 = [Fraction(3, 5), Fraction(4, 5)]
    bad += [("d=2", j) for j in range(7) if qfock.norm_growth(v2, j, q) != qfock.q_factorial(j, q)]
    out = [Verdict("fock-norm-growth", {"q": q, "jmax": jmax}, PASS if not bad else FAIL,
                   "0" if not bad else str(bad))]
    err = abs(qfock.growth_ratio(jratio, q) - 1.0)
    out.append(Verdict("fock-growth-ratio", {"q": q, "j": jratio, "tol": 1e-6},
                       PASS if err <= 1e-6 else FAIL, err))
    return out


def task_popa_orthogonal(q, N: int) -> list:
    out = popa.orthogonal_sweep(qfock.parse_q(q), N=N)
    for v in out:
        v.detail = None
    out.append(popa.commutation_check((1, 0), (0, 1), qfock.parse_q(q), 2, 6))
    return out


def task_popa_general(q, alpha, N: int) -> list:
    cfg = popa.general_config(q=q, N=N, **_alpha_beta(alpha))
    out = [popa.decomposition_check(cfg)]
    out.append(popa.envelope_table(cfg)[1])
    out.append(popa.decay_general(cfg)[1])
    for v in out:
        v.detail = None
    return out


def _alpha_beta(alpha) -> dict:
    if alpha is None:
        return {}
    a = as_fraction(alpha)
    b2 = 1 - a * a
    if b2 <= 0:
        raise UsageError("need |alpha| < 1")
    num, den = math.isqrt(b2.numerator), math.isqrt(b2.denominator)
    if num * num == b2.numerator and den * den == b2.denominator:
        return {"alpha": a, "beta": Fraction(num, den)}
    return {"alpha": float(a), "beta": math.sqrt(float(b2))}


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------

def _seeds(args) -> list:
    base = DEFAULT_SEED if args.seed is None else args.seed
    return [base + i for i in range(5)]


def suite_tasks(name: str, args) -> list:
    """``(callable, kwargs)`` pairs making up a suite, defaults from the acceptance list."""
    seeds = _seeds(args)
    if name == "hecke-core":
        return [(task_hecke_core, {"L": L, "seed": seeds[0]}) for L in (args.L and [args.L] or [3, 4])]
    if name == "radial":
        Ls = [args.L] if args.L else [3, 4, 5]
        tasks = [(task_recurrence, {"L": L, "nmax": args.depth or 8}) for L in Ls]
        tasks += [(task_polynomial, {"L": args.L or 3, "nmax": args.depth or 8})]
        tasks += [(task_odd_moments, {"L": args.L or 3})]
        return tasks
    if name == "lemma24":
        return [(task_lemma24, {"L": args.L or 3, "deltas": tuple(args.delta or DEFAULT_DELTAS)})]
    if name == "density":
        ps = [args.p] if args.p is not None else ["0", "-1/2"]
        return [(task_density, {"L": args.L or 3, "p": as_fraction(p)}) for p in ps]
    if name == "pukanszky":
        Ls = [args.L] if args.L else [3, 4]
        L0 = args.L or 3
        tasks = [(task_lemma32, {"L": L, "case": c, "seeds": seeds}) for L in Ls for c in range(1, 8)]
        tasks += [
            (task_orthogonality, {"L": L0, "seeds": seeds}),
            (task_expansion, {"L": L0, "mmax": 4, "seeds": seeds}),
            (task_intertwiner, {"L": L0, "depth": args.depth or 5, "exact_window": 4, "seeds": seeds}),
            (task_toeplitz, {}),
            (task_lemma36, {"L": L0, "seeds": seeds}),
            (task_orbit_span, {"L": L0, "N": args.trunc or 4}),
        ]
        return tasks
    if name == "fock-core":
        qs = [args.q] if args.q is not None else list(Q_GRID)
        exact_qs = [args.q] if args.q is not None else ["1/2", "-1/2"]
        d = args.dim or 2
        N = args.trunc or 6
        tasks = [(task_positivity, {"q": q}) for q in qs]
        tasks += [(task_fock_algebra, {"q": q, "d": d, "N": N}) for q in exact_qs]
        tasks += [(task_quantization, {"q": q, "N": N}) for q in exact_qs[:1]]
        tasks += [(task_growth, {"q": q}) for q in exact_qs[:1]]
        return tasks
    if name == "popa-orthogonal":
        qs = [args.q] if args.q is not None else ["1/2", "-1/2"]
        return [(task_popa_orthogonal, {"q": q, "N": args.trunc or 10}) for q in qs]
    if name == "popa-general":
        return [(task_popa_general, {"q": args.q or "1/2", "alpha": args.alpha, "N": args.trunc or 10})]
    raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


def _call(task):
    fn, kw = task
    verdicts: list = []
    with timed(verdicts):
        verdicts.extend(fn(**kw))
    return verdicts


def run_tasks(tasks: list, jobs: int = 1) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        results = [_call(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_call, tasks))
    return [v for batch in results for v in batch]


def run_suite(name: str, args=None, jobs: int = 1) -> list:
    """Run a suite in-process (or over ``jobs`` workers); records keep task order."""
    if args is None:
        args = build_parser().parse_args(["verify", name])
    return run_tasks(suite_tasks(name, args), jobs)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def emit(verdicts: list, table, fmt: str, out, timing: bool) -> None:
    if fmt == "json":
        for v in verdicts:
            out.write(v.to_json(timing) + "\n")
        return
    if table is not None:
        header, rows = table
        out.write(popa.rows_to_csv(header, rows))
        return
    header = ["check", "status", "residual", "params"] + (["runtime_ms"] if timing else [])
    rows = []
    for v in verdicts:
        rec = v.to_record(timing)
        row = [rec["check"], rec["status"], rec["residual"], json.dumps(rec["params"], sort_keys=True)]
        if timing:
            row.append(rec["runtime_ms"])
        rows.append(row)
    out.write(popa.rows_to_csv(header, rows))


def _exit_code(verdicts) -> int:
    return 1 if any(v.status == FAIL for v in verdicts) else 0


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _jobs(args) -> int:
    if args.jobs is not None:
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        return args.jobs
    return os.cpu_count() or 1


def cmd_verify(args):
    if args.suite == "density" and args.format == "csv":
        ps = [args.p] if args.p is not None else ["0", "-1/2"]
        ctx = radial.RadialContext(args.L or 3)
        rows = [r for p in ps for r in radial.moment_table(ctx, as_fraction(p))]
        verdicts = [Verdict("density-moment", {"L": ctx.L, "p": r["p"], "n": r["n"]},
                            r["status"], r["abs_err"]) for r in rows]
        table = (["n", "p", "exact", "quadrature", "abs_err"],
                 [(r["n"], r["p"], r["exact"], r["quadrature"], r["abs_err"]) for r in rows])
        return verdicts, table
    return run_suite(args.suite, args, _jobs(args)), None


def cmd_radial(args):
    L = args.L or 3
    if args.what == "moments":
        p = as_fraction(args.p if args.p is not None else "0")
        rows = radial.moment_table(radial.RadialContext(L), p, nmax=args.nmax)
        verdicts = [Verdict("density-moment", {"L": L, "p": r["p"], "n": r["n"]}, r["status"], r["abs_err"])
                    for r in rows]
        table = (["n", "p", "exact", "quadrature", "abs_err"],
                 [(r["n"], r["p"], r["exact"], r["quadrature"], r["abs_err"]) for r in rows])
        return verdicts, table
    if args.what == "density":
        p = float(as_fraction(args.p if args.p is not None else "0"))
        dens = radial.SpectralDensity(L, p)
        lo, hi = dens.support
        pts = args.points
        rows = []
        for i in range(pts + 1):
            x = lo + (hi - lo) * i / pts
            rows.append((x, dens(x)))
        status = ANOMALY if dens.anomalous else PASS
        verdicts = [Verdict("density-formula", {"L": L, "p": p, "mass": dens.mass()}, status,
                            "0" if status == PASS else "non-positive bracket on the support")]
        return verdicts, (["x", "density"], rows)
    if args.what == "lemma24":
        deltas = tuple(args.delta or DEFAULT_DELTAS)
        v = parse_word(args.v) if args.v else None
        w = parse_word(args.w) if args.w else None
        if (v is None) != (w is None):
            raise UsageError("give both --v and --w or neither")
        rows = lemma24_rows(L, deltas, v, w)
        label = {"v": args.v or "0", "w": args.w or "1"}
        return lemma24_verdicts(L, rows, label), (["delta", "K", "residual"], rows)
    if args.what == "commutant":
        rep = radial.commutant_probe(radial.RadialContext(L, args.trunc or 8), drop_shells=args.drop)
        params = {"L": L, "K": rep.K, "dropped_shells": rep.dropped_shells, "dimension": rep.dimension,
                  "radial_dimension": rep.radial_dimension, "nonradial_rank": rep.nonradial_rank}
        ok = rep.nonradial_rank == 0 and rep.radial_contained
        return [Verdict("commutant-probe", params, PASS if ok else FAIL,
                        "0" if ok else max(rep.distances))], None
    raise UsageError(args.what)


def cmd_pukanszky(args):
    L = args.L or 3
    seeds = _seeds(args)
    c = args.check
    if c == "lemma32":
        cases = [args.case] if args.case else range(1, 8)
        tasks = [(task_lemma32, {"L": L, "case": k, "seeds": seeds, "window": args.depth or 3}) for k in cases]
        return run_tasks(tasks, _jobs(args)), None
    if c == "orthogonality":
        return task_orthogonality(L, seeds, args.depth or 3), None
    if c == "expansion":
        ctx = radial.RadialContext(L)
        m, n = args.m, args.n
        beta = pukanszky.complement_sample(ctx, 1, seeds[0])
        gamma = pukanszky.complement_sample(ctx, 2, seeds[0])
        eb = pukanszky.expansion_coefficients(ctx, beta, m, n)
        ec = pukanszky.expansion_coefficients(ctx, gamma, m, n)
        rows = [(k, j, str(eb.get(k, j)), str(ec.get(k, j))) for k in range(m + 1) for j in range(n + 1)]
        v = pukanszky.verify_coefficient_relation(ctx, m, n, seeds=(seeds[0], seeds[0]))
        v.detail = None
        return [v], (["k", "j", "b", "c"], rows)
    if c == "intertwiner":
        return task_intertwiner(L, args.depth or 5, 4, seeds), None
    if c == "toeplitz":
        return task_toeplitz(), None
    if c == "lemma36":
        return task_lemma36(L, seeds), None
    if c == "orbit-span":
        return task_orbit_span(L, args.trunc or 4), None
    raise UsageError(c)


def cmd_fock(args):
    q = args.q or "1/2"
    d = args.dim or 2
    N = args.trunc or 6
    c = args.check
    if c == "positivity":
        return task_positivity(q, args.dim or 3), None
    if c == "algebra":
        return task_fock_algebra(q, d, N), None
    if c == "quantization":
        return task_quantization(q, N), None
    if c == "growth":
        qq = qfock.parse_q(q)
        rows = []
        for j in range(1, (args.depth or 30) + 1):
            rows.append((j, qfock.norm_growth([1], j, qq), qfock.growth_ratio(j, qq)))
        return task_growth(q), (["j", "norm2", "ratio"], rows)
    if c == "matrix":
        xi = [1] + [0] * (d - 1)
        M = qfock.field_matrix(xi, qfock.parse_q(q), N, d)
        return [], ("matrix", M)
    raise UsageError(c)


def cmd_popa(args):
    overrides = {"q": args.q, "N": args.trunc, "d": args.dim, "x_word": args.x, "y_word": args.y,
                 "kind": args.kind}
    overrides.update(_alpha_beta(args.alpha) if args.alpha is not None else {})
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.what == "orthogonal":
        base = dict(alpha=0, beta=1, target=1, other=0)
        cfg = _config(args, base, overrides)
        rows, v = popa.decay_orthogonal(cfg)
        v.detail = None
        return [v], (["k", "norm"], rows)
    base = dict(alpha=Fraction(3, 5), beta=Fraction(4, 5), target=0, other=1)
    cfg = _config(args, base, overrides)
    verdicts = [popa.decomposition_check(cfg)]
    env_rows, ve = popa.envelope_table(cfg)
    dec_rows, vd = popa.decay_general(cfg)
    ve.detail = vd.detail = None
    verdicts += [ve, vd]
    if args.table == "decay":
        return verdicts, (["k", "norm"], dec_rows)
    return verdicts, (["j", "lhs", "envelope"], env_rows)


def _config(args, base: dict, overrides: dict) -> popa.ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            return popa.ExperimentConfig.from_text(fh.read(), defaults=base, **overrides)
    return popa.ExperimentConfig(**{**base, **overrides})


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _delta_list(s: str) -> list:
    try:
        vals = [float(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed delta list {s!r}") from exc
    if not vals or any(not 0 < v < 1 for v in vals):
        raise argparse.ArgumentTypeError("deltas must lie in (0, 1)")
    return vals


def _rational_str(s: str) -> str:
    try:
        as_fraction(s)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"malformed rational {s!r}") from exc
    return s


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common options")
    g.add_argument("--L", type=int, help="number of generators (>= 3)")
    g.add_argument("--p", type=_rational_str, help="Hecke parameter, rational string")
    g.add_argument("--q", type=_rational_str, help="Fock parameter in (-1, 1), rational or decimal")
    g.add_argument("--dim", type=int, help="dimension d of the one-particle space")
    g.add_argument("--trunc", type=int, help="truncation (ball radius K or Fock degree N)")
    g.add_argument("--depth", type=int, help="window size / depth")
    g.add_argument("--delta", type=_delta_list, help="comma separated deltas in (0, 1)")
    g.add_argument("--alpha", type=_rational_str, help="component of v along the target vector")
    g.add_argument("--seed", type=int, help=f"base seed (default {DEFAULT_SEED})")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--out", help="output file (default standard output)")
    g.add_argument("--jobs", type=int, help="worker processes for suites (default: all cores)")
    g.add_argument("--timing", action="store_true", help="include runtime_ms in records")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmasa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("radial", help="radial subalgebra tables")
    p.add_argument("what", choices=("moments", "density", "lemma24", "commutant"))
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--v", help="word such as 0,1 (lemma24)")
    p.add_argument("--w", help="word such as 1,0 (lemma24)")
    p.add_argument("--drop", type=int, default=2, help="boundary shells dropped (commutant)")
    _common(p)
    p.set_defaults(func=cmd_radial)

    p = sub.add_parser("pukanszky", help="orbit family checks")
    p.add_argument("check", choices=("lemma32", "orthogonality", "expansion", "intertwiner",
                                     "toeplitz", "lemma36", "orbit-span"))
    p.add_argument("--case", type=int, choices=range(1, 8))
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    _common(p)
    p.set_defaults(func=cmd_pukanszky)

    p = sub.add_parser("fock", help="q-Fock space checks")
    p.add_argument("check", choices=("positivity", "algebra", "quantization", "growth", "matrix"))
    _common(p)
    p.set_defaults(func=cmd_fock)

    p = sub.add_parser("popa", help="intertwining decay experiments")
    p.add_argument("what", choices=("orthogonal", "general"))
    p.add_argument("--x", help="x word, e.g. 1 or 0,1")
    p.add_argument("--y", help="y word")
    p.add_argument("--kind", choices=("pure-power", "jacobi-phase"))
    p.add_argument("--table", choices=("envelope", "decay"), default="envelope")
    p.add_argument("--config", help="key = value experiment file")
    _common(p)
    p.set_defaults(func=cmd_popa)
    return parser


_SIGNED = ("--p", "--q", "--alpha")


def _glue_signed(argv: list) -> list:
    """Let ``--p -1/2`` through; argparse would read ``-1/2`` as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _SIGNED:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_signed(list(sys.argv[1:] if argv is None else argv)))
    try:
        verdicts, table = args.func(args)
    except (UsageError, ValueError) as exc:
        parser.exit(2, f"qmasa: error: {exc}\n")
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if table is not None and table[0] == "matrix":
            out.write(table[1].to_csv())
        else:
            emit(verdicts, table, args.format, out, args.timing)
    finally:
        if args.out:
            out.close()
    return _exit_code(verdicts)


if __name__ == "__main__":
    sys.exit(main())
