import csv
import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primebounds.agm import (
    AGM_CSV_COLUMNS,
    agm_rows,
    omega,
    omega_exact_mean,
    omega_floor,
    refined_upper_bounds,
    rooin_chain,
    rooin_chain_batch,
    write_agm_csv,
)
from primebounds.errors import DomainError
from primebounds.rigor import Verdict

mpmath.mp.dps = 50


def mp_chain(xs):
    xs = [mpmath.mpf(x) for x in xs]
    n = len(xs)
    A = mpmath.fsum(xs) / n
    G = mpmath.exp(mpmath.fsum(mpmath.log(x) for x in xs) / n) if min(xs) > 0 else mpmath.mpf(0)
    if n == 1:
        return A, G, mpmath.mpf(0)
    Ap = mpmath.fsum(xs[:-1]) / (n - 1)
    base = mpmath.root(xs[-1], n) - mpmath.root(Ap, n)
    S = mpmath.fsum((Ap ** (mpmath.mpf(n - k) / n) if n != k else 1) * base**k
                    for k in range(2, n + 1)) / n
    return A, G, S


def mp_omega(n, p, q):
    inv = 1 / mpmath.mpf(n)
    a = mpmath.mpf(7 * p - n) / 14
    delta = mpmath.root(p, n) - mpmath.root(a, n)
    return mpmath.fsum(mpmath.power(q, (n - k) * inv) * delta**k for k in range(2, n + 1)) / n


def _has(iv, x):
    return mpmath.mpf(iv.lo) <= x <= mpmath.mpf(iv.hi)


def test_two_point_example():
    ch = rooin_chain([4.0, 9.0])
    assert ch.arithmetic_mean.contains(6.5)
    assert ch.geometric_mean.contains(6.0)
    assert ch.refinement_sum.contains(0.5)
    assert ch.gap.contains(0.5)
    assert not ch.refuted()


def test_constant_vector_has_zero_refinement():
    ch = rooin_chain([3.0, 3.0, 3.0])
    assert ch.refinement_sum.lo == 0.0 and ch.refinement_sum.hi < 1e-12
    assert not ch.refuted()


def test_zeros_are_allowed():
    ch = rooin_chain([0.0, 0.0, 5.0])
    assert ch.geometric_mean.lo == ch.geometric_mean.hi == 0.0
    A, G, S = mp_chain([0.0, 0.0, 5.0])
    assert _has(ch.refinement_sum, S)
    assert not ch.refuted()


@pytest.mark.parametrize("bad", [[3.0, 1.0], [-1.0, 2.0], [1.0, float("inf")], []])
def test_invalid_vectors(bad):
    with pytest.raises(DomainError):
        rooin_chain(bad)


def test_chain_matches_mpmath_oracle():
    rng = np.random.default_rng(5)
    for n in (1, 2, 3, 7, 20, 64):
        for _ in range(10):
            xs = np.sort(rng.uniform(0.0, 100.0, n))
            ch = rooin_chain(xs)
            A, G, S = mp_chain(xs.tolist())
            assert _has(ch.arithmetic_mean, A)
            assert _has(ch.geometric_mean, G)
            assert _has(ch.refinement_sum, S)


def test_batch_matches_single_rows():
    rng = np.random.default_rng(6)
    X = np.sort(rng.exponential(5.0, (50, 6)), axis=1)
    batch = rooin_chain_batch(X)
    for i in range(50):
        one = rooin_chain(X[i])
        assert (one.refinement_sum.lo, one.refinement_sum.hi) == (
            batch.refinement_sum.lo[i], batch.refinement_sum.hi[i])


vectors = st.lists(st.floats(min_value=0.0, max_value=1e6, allow_nan=False), min_size=1, max_size=30)


@given(vectors)
def test_chain_never_refuted(xs):
    ch = rooin_chain(sorted(xs))
    assert not ch.refuted()
    assert ch.refinement_sum.lo >= 0.0
    assert ch.gap.hi >= ch.refinement_sum.lo


@given(st.floats(min_value=0.0, max_value=1e6), st.floats(min_value=0.0, max_value=1e6))
def test_two_point_equality(a, b):
    ch = rooin_chain(sorted([a, b]))
    assert ch.refinement_sum.overlaps(ch.gap)


def test_omega_matches_oracle(table):
    for n in (10, 11, 50, 333, 2000):
        p, q = table.p(n), table.p((n - 1) // 2)
        ov = omega(n, table)
        assert _has(ov.omega, mp_omega(n, p, q))
        floor = mpmath.mpf(p) / (2 * n) * (mpmath.root(2, n) - 1) ** n
        assert _has(ov.log_omega_floor, mpmath.log(floor))
    assert abs(omega(10, table).omega.mid - 5.20789e-3) < 1e-7


def test_omega_exact_mean_matches_oracle(table):
    n = 40
    mean = mpmath.mpf(table.sum_to(n - 1)) / (n - 1)
    assert _has(omega_exact_mean(n, table), mp_omega(n, table.p(n), mean))


def test_omega_domain(table):
    with pytest.raises(DomainError):
        omega(9, table)


def test_omega_floor_below_omega(table):
    for n in range(10, 400):
        ov = omega(n, table)
        assert ov.omega_floor.hi <= ov.omega.lo


def test_upper_bounds_at_ten(table):
    ub = refined_upper_bounds(10, table)
    p = 29
    base = mpmath.mpf(7 * p - 10) / 14
    assert _has(ub.agm, 10 * mpmath.log(base))
    assert _has(ub.omega, 10 * mpmath.log(base - mp_omega(10, p, table.p(4))))
    assert table.theta(10).hi < ub.omega.lo
    assert ub.ordering() == Verdict.HOLDS


def test_ordering_holds_up_to_5000(table):
    for n in range(10, 5001):
        assert refined_upper_bounds(n, table).ordering() == Verdict.HOLDS, n


def test_ordering_at_large_n_where_floor_underflows(table):
    ub = refined_upper_bounds(10**6, table)
    assert ub.omega_value.omega_floor.lo == 0.0
    assert ub.ordering() == Verdict.HOLDS
    assert omega_floor(10**6, table.p(10**6)).hi < 1e-300


def test_agm_csv(table):
    buf = io.StringIO()
    write_agm_csv(agm_rows(8, 30, table, stride=5), buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == AGM_CSV_COLUMNS
    assert [int(r[0]) for r in rows[1:]] == [10, 15, 20, 25, 30]
    for r in rows[1:]:
        vals = [float(v) for v in r[1:]]
        assert all(math.isfinite(v) for v in vals)
        assert all(lo <= hi for lo, hi in zip(vals[::2], vals[1::2]))
