import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmasa.qfock import (
    FockVector, NotAContraction, TruncationOverflow, adjointness_check, annihilate, basis_words,
    ccr_check, create, field_apply, field_matrix, first_quantization, growth_ratio,
    is_positive_definite, jacobi_matrix, norm_growth, operator_matrix, parse_q, pq_apply,
    pq_apply_enumerate, pq_blocks, pq_matrix, q_factorial, q_inner, q_int, q_norm2,
    second_quantization_check, vacuum_separation_rank, wick_apply, wick_covariance_check,
    wick_matrix, wick_right_apply, wick_vacuum_check,
)

H = Fraction(1, 2)
W = FockVector.word
OMEGA = FockVector.vacuum()


def test_parse_q():
    assert parse_q("0.9") == Fraction(9, 10)
    assert parse_q("-1/2") == Fraction(-1, 2)
    assert parse_q(0) == 0 and isinstance(parse_q(0), Fraction)


def test_pq_examples():
    q = Fraction(1, 3)
    assert pq_apply(W((0, 1)), q) == FockVector({(0, 1): 1, (1, 0): q})
    assert pq_apply(W((1,)), q) == W((1,))
    assert pq_apply(W((0, 0, 0)), q) == W((0, 0, 0), 1 + 2 * q + 2 * q**2 + q**3)
    assert q_factorial(3, q) == 1 + 2 * q + 2 * q**2 + q**3


def test_pq_recursion_matches_enumeration():
    for q in (H, Fraction(-2, 3), Fraction(0)):
        for n in range(1, 7):
            for w in [tuple(i % 3 for i in range(n)), tuple([0] * (n - 1) + [1]), tuple(range(n))]:
                assert pq_apply(W(w), q) == pq_apply_enumerate(W(w), q)


def test_pq_degree_check():
    with pytest.raises(TruncationOverflow):
        pq_apply(W((0, 0, 0)), H, N=2)


def test_pq_blocks_cover_matrix():
    blocks = pq_blocks(3, 2, H)
    assert sum(len(b) for b in blocks) == 8
    M = pq_matrix(3, 2, H)
    assert all(M[i][j] == M[j][i] for i in range(8) for j in range(8))


@pytest.mark.parametrize("q", ["-9/10", "-1/2", "0", "1/2", "9/10"])
def test_positivity(q):
    q = parse_q(q)
    for d in (1, 2, 3):
        for n in range(1, 6 if d == 3 else 7):
            assert all(is_positive_definite(B) for B in pq_blocks(n, d, q))


def test_positivity_float_path_agrees():
    M = pq_matrix(4, 2, 0.9)
    assert is_positive_definite(M)
    assert np.linalg.eigvalsh(np.array(M, dtype=float)).min() > 0
    assert not is_positive_definite([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(1)]])
    assert not is_positive_definite([[1.0, 2.0], [2.0, 1.0]])


def test_q_inner_examples():
    assert q_inner(OMEGA, OMEGA, H) == 1
    assert q_norm2(W((0, 0)), H) == Fraction(3, 2)
    assert q_inner(W((0, 1)), W((1, 0)), H) == H
    assert q_inner(W((0,)), W((0, 0)), H) == 0


def test_create_annihilate_examples():
    assert create([0, 1], OMEGA) == W((1,))
    assert create([0, 1], W((0,))) == W((1, 0))
    a, b = Fraction(3, 5), Fraction(4, 5)
    assert create([a, b], OMEGA) == FockVector({(0,): a, (1,): b})
    assert annihilate([1, 0], W((0, 0)), H) == W((0,), 1 + H)
    assert annihilate([1, 0], W((1, 0)), H) == W((1,), H)
    assert annihilate([1, 0], OMEGA, H) == FockVector()
    with pytest.raises(TruncationOverflow):
        create([1, 0], W((0, 0)), N=2)


def test_field_examples():
    assert field_apply([1], OMEGA, H) == W((0,))
    M = field_matrix([1], Fraction(0), 4, 1)
    dense = M.to_dense()
    assert [dense[i][i + 1] for i in range(4)] == [1, 1, 1, 1]


def test_free_moments_are_catalan():
    for k in range(6):
        v = OMEGA
        for _ in range(2 * k):
            v = field_apply([1], v, Fraction(0))
        assert v.get((), 0) == math.comb(2 * k, k) // (k + 1)


def test_jacobi_entries():
    J = jacobi_matrix(H, 5)
    for n in range(1, 6):
        assert J[n - 1, n] == pytest.approx(math.sqrt(float(q_int(n, H))))


def test_field_symmetric_for_q_gram():
    q = Fraction(-1, 2)
    xi = [Fraction(3, 5), Fraction(4, 5)]
    words = basis_words(2, 3)
    for u, v in itertools.product(words, words):
        U, V = W(u), W(v)
        assert q_inner(field_apply(xi, U, q), V, q) == q_inner(U, field_apply(xi, V, q), q)


@pytest.mark.parametrize("q", [H, -H])
def test_adjointness_and_ccr(q):
    xi = [Fraction(3, 5), Fraction(4, 5)]
    assert adjointness_check(xi, q, 2, 4).passed
    assert adjointness_check(xi, q, 2, 4, right=True).passed
    assert ccr_check(xi, [1, 0], q, 2, 5).passed
    assert ccr_check([0, 1], [1, 0], q, 2, 5).passed


def test_wick_examples():
    assert wick_apply((), W((0, 1)), H) == W((0, 1))
    assert wick_apply((0, 1), OMEGA, H, 2) == W((0, 1))
    v = field_apply([1, 0], field_apply([0, 1], OMEGA, H), H)
    assert v == W((0, 1))
    ee = field_apply([1, 0], field_apply([1, 0], OMEGA, H), H) - OMEGA
    assert wick_apply((0, 0), OMEGA, H, 2) == ee == W((0, 0))


@pytest.mark.parametrize("q", [H, -H, Fraction(0)])
def test_wick_vacuum_property(q):
    assert wick_vacuum_check(q, 2, 5).passed
    assert wick_vacuum_check(q, 2, 4, right=True).passed


def test_wick_matrix_overflow():
    with pytest.raises(TruncationOverflow):
        wick_matrix((0, 0, 0), H, 2, 2)


def test_left_and_right_wick_commute():
    q = H
    for u, v in [((0,), (1,)), ((0, 1), (1,)), ((1, 0), (0, 0))]:
        for w in basis_words(2, 2):
            x = W(w)
            a = wick_apply(u, wick_right_apply(v, x, q, 2), q, 2)
            b = wick_right_apply(v, wick_apply(u, x, q, 2), q, 2)
            assert a == b


def test_vacuum_separation():
    r, n = vacuum_separation_rank(H, 2, 4)
    assert r == n == 31


def test_first_quantization():
    F = first_quantization([[1, 0], [0, 1]], H, 3)
    assert all(F.apply(W(w)) == W(w) for w in basis_words(2, 3))
    S = first_quantization([[0, 1], [1, 0]], H, 3)
    assert S.apply(W((0, 1))) == W((1, 0))
    with pytest.raises(NotAContraction):
        first_quantization([[2, 0], [0, 1]], H, 2)


def test_first_quantization_is_q_unitary():
    import random
    rng = random.Random(11)
    U = [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]
    F = first_quantization(U, H, 4)
    for _ in range(50):
        x = FockVector({w: Fraction(rng.randint(-3, 3)) for w in rng.sample(F.words, 5)})
        y = FockVector({w: Fraction(rng.randint(-3, 3)) for w in rng.sample(F.words, 5)})
        assert q_inner(F.apply(x), F.apply(y), H) == q_inner(x, y, H)


def test_second_quantization():
    I = [[1, 0], [0, 1]]
    assert second_quantization_check(I, [1, 0], H, 4).passed
    U = [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]
    assert second_quantization_check(U, [1, 0], H, 6).passed
    assert wick_covariance_check(U, (0, 1), H, 5).passed
    assert wick_covariance_check(U, (0, 0), -H, 4).passed
    with pytest.raises(ValueError):
        second_quantization_check([[1, 1], [0, 1]], [1, 0], H, 3)


def test_matrix_csv():
    M = field_matrix([1], H, 2, 1)
    rows = M.to_csv().strip().splitlines()
    assert rows[0] == "0/1,1/1,0/1"
    assert rows[1] == "1/1,0/1,3/2"


def test_operator_algebra():
    A = field_matrix([1, 0], H, 3, 2)
    B = operator_matrix(lambda v: v, 2, 3)
    assert (A @ B).agrees_with(A, 3)
    assert (A + A).agrees_with(A.scale(2), 3)
    assert (A - A).agrees_with(B.scale(0), 3)


def test_norm_growth():
    assert all(norm_growth([1], j, Fraction(0)) == 1 for j in range(6))
    assert norm_growth([1], 2, H) == Fraction(3, 2)
    assert norm_growth([1], 3, H) == Fraction(21, 8)
    v = [Fraction(3, 5), Fraction(4, 5)]
    for j in range(7):
        assert norm_growth(v, j, H) == q_factorial(j, H)
    for j in range(13):
        assert norm_growth([1], j, -H) == q_factorial(j, -H)


def test_growth_ratio():
    r = [growth_ratio(j, H) for j in range(1, 31)]
    assert all(b > a for a, b in zip(r, r[1:]))
    assert abs(r[-1] - 1) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=5),
       st.fractions(min_value=-Fraction(9, 10), max_value=Fraction(9, 10), max_denominator=10))
def test_pq_recursion_property(w, q):
    assert pq_apply(W(tuple(w)), q) == pq_apply_enumerate(W(tuple(w)), q)


def test_float_and_exact_q_do_not_share_cache():
    pq_apply(W((0, 0, 1)), 0.5)
    out = pq_apply(W((0, 0, 1)), H)
    assert all(isinstance(c, Fraction) for c in out.values())


def test_zero_amplitudes_not_stored():
    assert FockVector({(0,): 0, (1,): Fraction(2)}) == W((1,), 2)
