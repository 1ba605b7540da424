import csv
import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primebounds.analytic import D_THETA
from primebounds.errors import DomainError, IndexOutOfRange
from primebounds.primorial_limit import (
    CONVERGENCE_COLUMNS,
    E,
    band_simple,
    band_threshold,
    band_valid_at,
    convergence_columns,
    convergence_table,
    exp_band_lemma,
    primorial_root,
    smallest_valid_prime_bound,
    write_convergence_csv,
)
from primebounds.rigor import Verdict

mpmath.mp.dps = 50


def _has(iv, x):
    return mpmath.mpf(iv.lo) <= x <= mpmath.mpf(iv.hi)


def test_e_encloses_e():
    assert _has(E, mpmath.e)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 100, 1000])
def test_root_matches_exact_primorial(table, n):
    P = math.prod(table.primes[:n].tolist())
    exact = mpmath.root(mpmath.mpf(P), table.p(n))
    assert _has(primorial_root(n, table), exact)


def test_root_small_values(table):
    assert primorial_root(1, table).contains(math.sqrt(2))
    assert abs(primorial_root(5, table).mid - 2.0220) < 1e-3


def test_root_near_e_at_one_million(table):
    r = primorial_root(10**6, table)
    assert r.hi < E.lo
    assert E.lo - r.hi < 2e-3


def test_band_simple_is_vacuous_at_desk_scale():
    for n in (2, 100, 10**6, 10**12):
        b = band_simple(n)
        assert not b.valid and b.upper is None
        assert b.lower.hi < 0
    with pytest.raises(DomainError):
        band_simple(1)


def test_band_lower_formula():
    n = 10**6
    b = band_simple(n)
    x = mpmath.mpf(n) * mpmath.log(n)
    expected = mpmath.e * (1 - D_THETA / mpmath.log(x) ** 4)
    assert _has(b.lower, expected)


def test_band_becomes_valid_for_huge_n():
    # n log n must pass exp(d^{1/4}) ~ 5.27e15
    b = band_simple(10**15)
    assert b.valid and b.upper is not None
    assert b.lower.hi < E.lo < b.upper.lo


def test_threshold_against_high_precision():
    lo, hi = band_threshold()
    with mpmath.workdps(120):
        exact = mpmath.exp(mpmath.root(D_THETA, 4))
        assert lo <= exact <= hi
        assert math.floor(exact) == 5270747586811032


def test_smallest_valid_prime_bound():
    p = smallest_valid_prime_bound()
    assert p == 5270747586811033
    assert band_valid_at(p)
    assert not band_valid_at(p - 1)
    assert not band_valid_at(10**6)
    assert band_valid_at(10**16)
    assert not band_valid_at(1)


@pytest.mark.parametrize("t", [1e-12, 1e-6, 0.25, 0.5, 0.999999])
def test_exp_band_lemma_points(t):
    eb = exp_band_lemma(t)
    assert eb.lower_verdict == Verdict.HOLDS and eb.upper_verdict == Verdict.HOLDS
    assert eb.lower.hi < mpmath.exp(-t) or _has(eb.lower, 1 - mpmath.mpf(t))
    assert mpmath.exp(t) < mpmath.mpf(eb.upper.hi)


@given(st.floats(min_value=1e-15, max_value=1 - 1e-9, exclude_min=True))
def test_exp_band_lemma_property(t):
    eb = exp_band_lemma(t)
    assert eb.lower_verdict == Verdict.HOLDS
    assert eb.upper_verdict == Verdict.HOLDS


@pytest.mark.parametrize("t", [0.0, 1.0, -0.5, 2.0])
def test_exp_band_lemma_domain(t):
    with pytest.raises(DomainError):
        exp_band_lemma(t)


def test_convergence_table_rows(table):
    pts = convergence_table(100_000, 10_000, table)
    assert [p.n for p in pts] == list(range(10_000, 100_001, 10_000))
    for pt in pts:
        assert pt.p_n == table.p(pt.n)
        assert pt.primorial_root.hi < E.lo
        assert not pt.band_valid and pt.band_hi is None
        assert pt.band_lo.hi < pt.primorial_root.lo
    assert pts[0].ratio_increased is None
    assert all(p.ratio_increased in (True, False, None) for p in pts[1:])


def test_convergence_columns_agree_with_scalar_path(table):
    cols = convergence_columns(5000, 7, table)
    for i in (0, 100, len(cols.n) - 1):
        n = int(cols.n[i])
        r = primorial_root(n, table)
        assert cols.root.lo[i] == r.lo and cols.root.hi[i] == r.hi
    with pytest.raises(IndexOutOfRange):
        convergence_columns(table.count + 1, 1, table)
    with pytest.raises(DomainError):
        convergence_columns(10, 0, table)


def test_convergence_csv(table):
    buf = io.StringIO()
    write_convergence_csv(convergence_table(100_000, 10_000, table), buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == CONVERGENCE_COLUMNS
    assert len(rows) == 11
    for r in rows[1:]:
        assert r[CONVERGENCE_COLUMNS.index("band_hi")] == ""
        assert r[-1] == "0"
        assert float(r[2]) <= float(r[3])


def test_ratio_theta_over_p_below_one(table):
    cols = convergence_columns(10**6, 1, table)
    # theta(p_n) < p_n throughout this range
    assert np.all(cols.ratio.hi < 1.0)
    assert np.all(cols.root.hi < E.lo)


def test_band_simple_flag_flips_at_threshold():
    with mpmath.workdps(60):
        T = mpmath.exp(mpmath.root(D_THETA, 4))
        n_star = 161120045935073
        assert (n_star - 1) * mpmath.log(n_star - 1) < T < n_star * mpmath.log(n_star)
    assert not band_simple(n_star - 1).valid
    b = band_simple(n_star)
    assert b.valid and b.upper.lo > E.hi
