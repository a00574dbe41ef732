import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from arithwave import DomainError, enumerate_frequencies
from arithwave.chaos import (
    CoefficientDraw, W_ORDER, chaos_statistics, correlation_sums_brute_force,
    covariance_matrix_exact, covariance_matrix_limit, d2_limit_law, engine_for, fourth_chaos,
    fourth_chaos_bracket, fourth_chaos_d3, fourth_chaos_from_integrals, h4_integral_identities,
    limit_law, nodal_length_fourth_chaos, pairing_decomposition, sample_batch, sample_draw,
    second_chaos, second_chaos_terms, theoretical_variance,
)
from arithwave.chaos.statistics import ChaosStatistics
from arithwave.correlations import brute_force_census


def reference_stats(draw):
    """W, R and X statistics straight from their definitions, with loops."""
    f = draw.freq
    n, d, N = f.n, f.d, f.N
    pts = [tuple(int(c) for c in p) for p in f.points]
    a = draw.full
    W = sum(abs(a[i]) ** 2 - 1 for i in range(N)) / math.sqrt(N)
    Wjk = np.zeros((d, d))
    Rjk = np.zeros((d, d))
    for j, k in itertools.product(range(d), repeat=2):
        Wjk[j, k] = sum(pts[i][j] * pts[i][k] * (abs(a[i]) ** 2 - 1) for i in range(N)) / (n * math.sqrt(N))
        Rjk[j, k] = sum(pts[i][j] ** 2 * pts[i][k] ** 2 * abs(a[i]) ** 4 for i in range(N)) / (n * n * N)
    R = sum(abs(a[i]) ** 4 for i in range(N)) / N
    X = 0j
    Xkk = np.zeros(d, complex)
    Xkkjj = np.zeros((d, d), complex)
    tuples = brute_force_census(f).x4_tuples
    for t in tuples:
        p = a[t[0]] * a[t[1]] * a[t[2]] * a[t[3]]
        l = [pts[i] for i in t]
        X += p
        for k in range(d):
            Xkk[k] += l[0][k] * l[1][k] * p
            for j in range(d):
                Xkkjj[k, j] += l[0][k] * l[1][k] * l[2][j] * l[3][j] * p
    return W, Wjk, R, Rjk, X / N, Xkk / (n * N), Xkkjj / (n * n * N)


# draws

def test_draw_determinism_and_reality():
    f = enumerate_frequencies(6, 3)
    a, b = sample_draw(f, 11), sample_draw(f, 11)
    assert np.array_equal(a.values, b.values)
    full = a.full
    assert np.array_equal(full[f.neg_index], np.conj(full))
    assert np.array_equal(sample_batch(f, [11])[0], full)
    assert a[tuple(f.half_set[0])] == a.values[0]


def test_draw_moments():
    f = enumerate_frequencies(1, 3)
    a = sample_batch(f, range(100_000 // 3))
    p = np.abs(a[:, f.half_index]).ravel() ** 2
    assert abs(p.mean() - 1) < 0.01
    assert abs((p**2).mean() - 2) < 0.05


def test_draw_validation():
    f = enumerate_frequencies(2, 3)
    with pytest.raises(DomainError):
        CoefficientDraw.from_half(f, np.ones(3))
    with pytest.raises(DomainError):
        sample_draw(enumerate_frequencies(7, 3), 0)
    with pytest.raises(ValueError):
        sample_draw(f, 0).values[0] = 1


def test_shift_is_translation():
    from arithwave.field import evaluate_at
    f = enumerate_frequencies(5, 3)
    dr = sample_draw(f, 3)
    x0 = np.array([0.1, 0.25, 0.7])
    x = np.array([0.3, 0.2, 0.9])
    assert evaluate_at(f, dr.shifted(x0).full, x) == pytest.approx(
        evaluate_at(f, dr.full, x + x0), abs=1e-12)


# statistics

def test_unit_draw_statistics():
    f = enumerate_frequencies(14, 3)
    s = chaos_statistics(CoefficientDraw.constant(f))
    assert s.W == pytest.approx(0, abs=1e-13)
    assert np.allclose(s.Wjk, 0, atol=1e-13)
    assert s.R == pytest.approx(1)


def test_single_axis_bump():
    f = enumerate_frequencies(1, 3)
    v = np.ones(3, complex)
    v[list(map(tuple, f.half_set)).index((1, 0, 0))] = math.sqrt(2)
    s = chaos_statistics(CoefficientDraw.from_half(f, v))
    assert s.W == pytest.approx(2 / math.sqrt(6))
    assert s.Wjk[0, 0] == pytest.approx(2 / math.sqrt(6))
    assert s.Wjk[1, 1] == pytest.approx(0, abs=1e-15)
    assert s.Wjk[2, 2] == pytest.approx(0, abs=1e-15)


@given(st.integers(0, 10**6))
@settings(max_examples=10, deadline=None)
def test_x_vanishes_for_n1(seed):
    s = chaos_statistics(sample_draw(enumerate_frequencies(1, 3), seed))
    assert s.X == 0 and np.all(s.Xkk == 0) and np.all(s.Xkkjj == 0)


@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_statistics_match_definitions(n):
    f = enumerate_frequencies(n, 3)
    dr = sample_draw(f, n)
    ref = reference_stats(dr)
    for method in ("direct", "complement"):
        s = chaos_statistics(dr, method)
        got = (s.W, s.Wjk, s.R, s.Rjk, s.X, s.Xkk, s.Xkkjj)
        for g, r in zip(got, ref):
            assert np.allclose(g, r, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("n", [14, 26, 74])
def test_two_routes_agree(n):
    f = enumerate_frequencies(n, 3)
    eng = engine_for(f)
    a = sample_batch(f, range(4))
    d, c = eng.x_sums(a, "direct"), eng.x_sums(a, "complement")
    assert np.allclose(d, c, rtol=1e-10, atol=1e-8 * np.abs(d).max())
    # swapping the two pairs of a tuple keeps it non-degenerate
    assert np.allclose(d, np.swapaxes(d, 1, 2), atol=1e-8 * np.abs(d).max())


def test_unknown_method():
    f = enumerate_frequencies(2, 3)
    with pytest.raises(ValueError):
        engine_for(f).x_sums(sample_batch(f, [0]), "bogus")


# appendix-style identities: sums over C(4) vs pairing decomposition

@pytest.mark.parametrize("n", [1, 2, 3, 5, 6])
def test_correlation_sum_decomposition(n):
    f = enumerate_frequencies(n, 3)
    pts = f.points
    N = f.N
    idx = np.array(list(itertools.product(range(N), repeat=4)))
    c4 = idx[np.all(pts[idx].sum(axis=1) == 0, axis=1)]
    for seed in range(20):
        dr = sample_draw(f, seed)
        lhs = correlation_sums_brute_force(dr, c4)
        rhs = pairing_decomposition(dr)
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * np.abs(lhs).max())


def test_b1_closed_form():
    # sum over C(4) of the product = 3 (sum |a|^2)^2 - 3 sum |a|^4 + N X
    f = enumerate_frequencies(3, 3)
    dr = sample_draw(f, 5)
    p = np.abs(dr.full) ** 2
    s = chaos_statistics(dr)
    assert pairing_decomposition(dr)[0, 0] == pytest.approx(
        3 * p.sum() ** 2 - 3 * (p**2).sum() + f.N * s.X.real, rel=1e-12)


# projections

def test_second_chaos_cancels():
    for n in (1, 2, 3, 5, 6, 14):
        f = enumerate_frequencies(n, 3)
        for seed in range(5):
            dr = sample_draw(f, seed)
            t1, t2 = second_chaos_terms(dr)
            assert abs(t1) > 1e-6
            assert abs(second_chaos(dr)) <= 1e-12 * (1 + abs(chaos_statistics(dr).W))
    assert second_chaos(CoefficientDraw.constant(enumerate_frequencies(5, 3))) == 0


def test_second_chaos_d2():
    f = enumerate_frequencies(25, 2)
    assert abs(second_chaos(sample_draw(f, 1))) < 1e-12


def deterministic_stats(n, N):
    Rjk = np.full((3, 3), 2 / 15) + np.diag([2 / 5 - 2 / 15] * 3)
    z = np.zeros(3)
    return ChaosStatistics(n=n, d=3, N=N, W=0.0, Wjk=np.zeros((3, 3)), R=2.0, Rjk=Rjk,
                           X=0j, Xkk=z, Xkkjj=np.zeros((3, 3)))


def test_limit_bracket_constant():
    s = deterministic_stats(14, 48)
    assert fourth_chaos_d3(s) == pytest.approx(4 * math.sqrt(14) / (5 * math.sqrt(3) * 48))
    assert fourth_chaos(s) == pytest.approx(fourth_chaos_d3(s))
    # the general bracket carries the 5/2 rescaling of the d = 3 rewrite
    assert fourth_chaos_bracket(s) == pytest.approx(4 / 2.5)


@given(st.sampled_from([2, 3, 5, 6, 14, 26]), st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_general_and_d3_forms_agree(n, seed):
    s = chaos_statistics(sample_draw(enumerate_frequencies(n, 3), seed))
    assert fourth_chaos(s) == pytest.approx(fourth_chaos_d3(s), rel=1e-12, abs=1e-14)


@given(st.sampled_from([5, 25, 65, 1105]), st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_d2_length_form(n, seed):
    f = enumerate_frequencies(n, 2)
    s = chaos_statistics(sample_draw(f, seed))
    assert nodal_length_fourth_chaos(s) == pytest.approx(fourth_chaos(s), rel=1e-12, abs=1e-14)
    # replacing R by its limit 2 changes the value by exactly the R deviation
    approx = math.pi * math.sqrt(n / 512) / f.N * (2 + s.W**2 - 2 * np.sum(s.Wjk**2))
    assert nodal_length_fourth_chaos(s) - approx == pytest.approx(
        math.pi * math.sqrt(n / 512) / f.N * (s.R - 2), rel=1e-9, abs=1e-14)


def test_projection_dimension_guards():
    s = chaos_statistics(sample_draw(enumerate_frequencies(5, 2), 0))
    with pytest.raises(ValueError):
        fourth_chaos_d3(s)
    s3 = chaos_statistics(sample_draw(enumerate_frequencies(5, 3), 0))
    with pytest.raises(ValueError):
        nodal_length_fourth_chaos(s3)


def test_h4_unit_draw_n1():
    assert h4_integral_identities(CoefficientDraw.constant(enumerate_frequencies(1, 3)))[0] == (
        pytest.approx(-0.5))


@pytest.mark.parametrize("n", [2, 5, 14])
def test_fourth_chaos_from_hermite_integrals(n):
    f = enumerate_frequencies(n, 3)
    dr = sample_draw(f, 7)
    s = chaos_statistics(dr)
    assert fourth_chaos_from_integrals(*h4_integral_identities(s), n, 3) == pytest.approx(
        fourth_chaos(s), rel=1e-10)


def test_fourth_chaos_moments_exact_small_n():
    # E[A4] = 0 up to Monte Carlo error; the estimate is centred
    f = enumerate_frequencies(14, 3)
    eng = engine_for(f)
    stats_ = eng.statistics_batch(sample_batch(f, range(3000)))
    v = np.array([fourth_chaos(s) for s in stats_])
    assert abs(v.mean()) < 4 * v.std() / math.sqrt(len(v))


# limits

def test_covariance_limit_entries():
    C = covariance_matrix_limit()
    assert W_ORDER[0] == (0, 0) and W_ORDER[3] == (1, 1)
    assert C[0, 0] == pytest.approx(2 / 5)
    assert C[0, 3] == pytest.approx(2 / 15)
    assert C[1, 2] == 0
    assert C[1, 1] == pytest.approx(2 / 15)
    assert np.allclose(C, C.T)


def test_exact_covariance_tends_to_limit():
    far = np.abs(covariance_matrix_exact(enumerate_frequencies(5381, 3)) - covariance_matrix_limit()).max()
    near = np.abs(covariance_matrix_exact(enumerate_frequencies(3, 3)) - covariance_matrix_limit()).max()
    assert far < 0.02 < near
    with pytest.raises(DomainError):
        covariance_matrix_exact(enumerate_frequencies(5, 2))


def test_limit_law_moments_and_cdf():
    law = limit_law()
    m, v, s = law.moments()
    assert (m, v) == (0.0, 1.0)
    assert s == pytest.approx(-1.2649, abs=1e-4)
    t = np.linspace(-4, 1.5, 30)
    ref = sps.chi2.sf(5 - math.sqrt(10) * t, 5)
    assert np.allclose(law.cdf(t), ref, atol=1e-12)
    assert law.cdf(5 / math.sqrt(10) + 0.1) == 1.0
    x = law.sample(0, 20000)
    assert abs(x.mean()) < 0.05 and abs(x.var() - 1) < 0.05


def test_d2_law():
    with pytest.raises(DomainError):
        d2_limit_law(1.5)
    for eta in (0.0, 0.3, 1.0):
        law = d2_limit_law(eta)
        x = law.sample(1, 20000)
        assert abs(x.mean()) < 0.05
        assert sps.kstest(x, law.cdf).statistic < 0.02
    assert d2_limit_law(0.0).moments()[1] == pytest.approx(1.0)
    # eta = 1 reduces to (2 - 2 X^2) / (2 sqrt 2)
    t = np.linspace(-3, 0.7, 9)
    ref = sps.chi2.sf(1 - math.sqrt(2) * t, 1)
    assert np.allclose(d2_limit_law(1.0).cdf(t), ref, atol=1e-12)


def test_theoretical_variance():
    assert theoretical_variance(14, 48) == pytest.approx(32 * 14 / (375 * 2304))
    assert theoretical_variance(14, 48) == pytest.approx(5.185e-4, rel=1e-3)
    mu = -1.0
    assert theoretical_variance(2, 4, d=2, fourier4=mu) == pytest.approx(
        (1 + mu**2) / 512 * 4 * math.pi**2 * 2 / 16)
    with pytest.raises(DomainError):
        theoretical_variance(7, 10)
    with pytest.raises(DomainError):
        theoretical_variance(5, 8, d=2)
