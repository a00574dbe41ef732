import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithwave import (
    DomainError, RangeError, enumerate_frequencies, equidistribution_trend, is_admissible,
    moment_report, multiplicity, multiplicity_by_factorization, odd_moment_sums, scan_admissible,
)


def brute_points(n, d):
    m = math.isqrt(n)
    return sorted(p for p in itertools.product(range(-m, m + 1), repeat=d)
                  if sum(c * c for c in p) == n)


def test_unit_sphere_d3():
    f = enumerate_frequencies(1, 3)
    assert f.N == 6
    assert sorted(f.as_tuples()) == sorted(
        [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])


def test_seven_is_not_a_sum_of_three_squares():
    assert enumerate_frequencies(7, 3).N == 0


def test_n5_d2():
    f = enumerate_frequencies(5, 2)
    assert f.N == 8
    assert set(f.as_tuples()) == {(a, b) for a in (-1, 1) for b in (-2, 2)} | {
        (a, b) for a in (-2, 2) for b in (-1, 1)}


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("n", list(range(1, 41)) + [50, 74, 101])
def test_matches_brute_force(n, d):
    assert enumerate_frequencies(n, d).as_tuples() == brute_points(n, d)


@given(st.integers(1, 3000), st.sampled_from([2, 3]))
@settings(max_examples=60, deadline=None)
def test_structure(n, d):
    f = enumerate_frequencies(n, d)
    pts = f.points
    assert np.all((pts**2).sum(axis=1) == n)
    assert len({tuple(p) for p in pts}) == f.N
    # closed under negation, neg_index consistent
    assert np.array_equal(pts[f.neg_index], -pts)
    # half set: exactly one of each antipodal pair
    half = {tuple(p) for p in f.half_set}
    assert 2 * len(half) == f.N
    assert all(tuple(-np.asarray(p)) not in half for p in half)
    for p in f.half_set:
        assert tuple(p) > tuple(-p)


@pytest.mark.parametrize("n,expected", [(25, 12), (3, 0), (2, 4), (1, 4), (65, 16), (1105, 32)])
def test_factorization_examples(n, expected):
    assert multiplicity_by_factorization(n) == expected


@given(st.integers(1, 20000))
@settings(max_examples=200, deadline=None)
def test_factorization_matches_enumeration(n):
    assert multiplicity_by_factorization(n) == multiplicity(n, 2)


def test_admissibility():
    assert not is_admissible(7)
    assert is_admissible(1)
    assert not is_admissible(16)
    for n in range(1, 200):
        # admissible n always has points; 4n has them iff n has
        if is_admissible(n):
            assert multiplicity(n, 3) > 0
        if n % 8 == 7:
            assert multiplicity(n, 3) == 0
    with pytest.raises(DomainError):
        is_admissible(0)


def test_errors():
    with pytest.raises(DomainError):
        enumerate_frequencies(0, 3)
    with pytest.raises(DomainError):
        enumerate_frequencies(5, 4)
    with pytest.raises(RangeError):
        enumerate_frequencies(2**40, 2)
    with pytest.raises(KeyError):
        enumerate_frequencies(1, 3).index_of((1, 1, 0))


def test_index_of_and_contains():
    f = enumerate_frequencies(6, 3)
    for i, p in enumerate(f.as_tuples()):
        assert f.index_of(p) == i
        assert p in f
    assert (1, 1, 1) not in f


def test_moment_report_examples():
    r = moment_report(enumerate_frequencies(1, 3))
    assert np.array_equal(r.quadratic, 2 * np.eye(3, dtype=int))
    r = moment_report(enumerate_frequencies(3, 3))
    assert np.allclose(r.quartic_axis, 1 / 9, rtol=0, atol=1e-15)
    r = moment_report(enumerate_frequencies(2, 2))
    assert r.fourier4 == pytest.approx(-1)


@given(st.integers(1, 5000), st.sampled_from([2, 3]))
@settings(max_examples=60, deadline=None)
def test_quadratic_identity_is_exact(n, d):
    f = enumerate_frequencies(n, d)
    if f.N == 0:
        return
    q = moment_report(f).quadratic
    # sum lam_j lam_k = (n N / d) delta_jk, as exact integers
    target = Fraction(n * f.N, d)
    assert target.denominator == 1
    assert np.array_equal(q, int(target) * np.eye(d, dtype=int))


@given(st.integers(1, 5000), st.sampled_from([2, 3]))
@settings(max_examples=40, deadline=None)
def test_odd_moments_vanish(n, d):
    f = enumerate_frequencies(n, d)
    if f.N:
        assert all(v == 0 for v in odd_moment_sums(f).values())


def test_equidistribution_examples():
    rows = dict((n, (a, c)) for n, a, c in equidistribution_trend([1, 3]))
    assert rows[1][0] == pytest.approx(2 / 15)
    assert rows[3][0] == pytest.approx(4 / 45)
    n = next(n for n, N in scan_admissible(10_000, 12_000, 200))
    assert equidistribution_trend([n])[0][1] < 0.05
    with pytest.raises(DomainError):
        equidistribution_trend([7])


def test_scan_admissible():
    rows = scan_admissible(1, 30, 1)
    assert all(is_admissible(n) and N > 0 for n, N in rows)
    assert (14, 48) in rows
    assert all(n % 8 not in (0, 4, 7) for n, _ in rows)


@pytest.mark.parametrize("n", [1, 26, 101, 1109])
def test_blocked_enumeration(monkeypatch, n):
    import arithwave.lattice as lat
    want = enumerate_frequencies(n, 3).as_tuples()
    monkeypatch.setattr(lat, "_BLOCK", 7)
    assert lat.enumerate_frequencies(n, 3).as_tuples() == want
