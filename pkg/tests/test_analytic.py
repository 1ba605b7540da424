import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from primebounds import analytic
from primebounds.analytic import (
    D_THETA,
    EULER_GAMMA,
    constant_c,
    dusart_pi_lower,
    dusart_pi_upper,
    gap_crossover,
    gap_target,
    li,
    logpn1_upper,
    pn_floor,
    prlb_proof_sides,
    prlb_ratio,
    prlb_ratio_facts,
    refined_gap_minorant,
    rosser_pn_bounds,
    theta_band,
    theta_lower_robin,
)
from primebounds.errors import DomainError
from primebounds.prime_core import pi_many
from primebounds.rigor import Interval, IntervalArray, Verdict, certify_less

mpmath.mp.dps = 40


def pv_li(x):
    """Principal-value Li(x) by quadrature: Cauchy weight at t = 1, then plain quad."""
    def g(t):
        if t <= 0.0:
            return 0.0
        return (t - 1.0) / math.log(t) if t != 1.0 else 1.0

    head, _ = integrate.quad(g, 0.0, 2.0, weight="cauchy", wvar=1.0, epsabs=1e-13, epsrel=1e-13)
    if x == 2.0:
        return head
    edges = np.geomspace(2.0, x, 40)
    tail = sum(integrate.quad(lambda t: 1.0 / math.log(t), a, b, epsabs=0, epsrel=1e-13)[0]
               for a, b in zip(edges[:-1], edges[1:]))
    return head + tail


def test_euler_gamma_encloses_constant():
    assert mpmath.mpf(EULER_GAMMA.lo) <= mpmath.euler <= mpmath.mpf(EULER_GAMMA.hi)


@pytest.mark.parametrize("x", [1.5, 2.0, math.e, 10.0, 599.0, 358801.0, 1e6, 1e12])
def test_li_encloses_mpmath(x):
    iv = li(x)
    assert mpmath.mpf(iv.lo) <= mpmath.li(x) <= mpmath.mpf(iv.hi)
    assert iv.width < 1e-9 * max(1.0, abs(iv.mid))


def test_li_frozen_values():
    assert li(2.0).contains(1.045163780117492)
    assert abs(li(358801.0).mid - 30715.420628346) < 1e-6
    series_at_e = 0.5772156649015329 + sum(1 / (k * math.factorial(k)) for k in range(1, 30))
    assert abs(li(math.e).mid - series_at_e) < 1e-12
    assert abs(li(math.e).mid - 1.895117816355937) < 1e-12


def test_li_agrees_with_pv_quadrature():
    assert abs(li(2.0).mid - pv_li(2.0)) < 1e-10
    for x in (10.0, 1000.0, 358801.0):
        assert abs(li(x).mid - pv_li(x)) < 1e-8 * x


@given(st.floats(min_value=2.0, max_value=1e6), st.floats(min_value=2.0, max_value=1e6))
def test_li_differences_match_quadrature(a, b):
    x1, x2 = sorted((a, b))
    if x2 - x1 < 1e-6:
        return
    exact = mpmath.quad(lambda t: 1 / mpmath.log(t), [x1, x2])
    diff = li(x2) - li(x1)
    slack = mpmath.mpf(10) ** -25 * abs(exact)
    assert mpmath.mpf(diff.lo) - slack <= exact <= mpmath.mpf(diff.hi) + slack


def test_li_domain():
    with pytest.raises(DomainError):
        li(1.0)
    with pytest.raises(DomainError):
        li(0.5)


def test_constant_c():
    c = constant_c()
    assert c.width < 0.01
    assert c.contains(-47.06747557)
    assert abs(c.mid - analytic.C_APPROX) < 5e-3
    # independent replay with mpmath and with PV quadrature
    x = 599**2
    oracle = 35995 - 3 * mpmath.li(x) + x / mpmath.log(599)
    assert mpmath.mpf(c.lo) <= oracle <= mpmath.mpf(c.hi)
    quad = 35995 - 3 * pv_li(float(x)) + x / math.log(599)
    assert abs(quad - c.mid) < 1e-5


def test_constants_record():
    k = analytic.constants()
    assert k.d == D_THETA == 1717433
    assert k.c == constant_c()


def test_dusart_examples():
    assert abs(dusart_pi_lower(599).mid - 108.31) < 0.01
    assert dusart_pi_lower(599).hi <= 109
    assert abs(dusart_pi_upper(599).mid - 112.35) < 0.01
    assert abs(dusart_pi_upper(2).mid - 8.1978763) < 1e-6


def test_dusart_sampled(table):
    primes = table.primes[:100_000]
    pis = np.arange(1, primes.size + 1)
    upper = dusart_pi_upper(primes.astype(float))
    assert np.all(certify_le_arr(pis, upper))
    big = primes >= 599
    lower = dusart_pi_lower(primes[big].astype(float))
    assert np.all(lower.hi <= pis[big])


def certify_le_arr(values, iv):
    return values <= iv.lo


def test_rosser_examples():
    low, high = rosser_pn_bounds(6)
    assert abs(low.mid - 10.7506) < 1e-3 and abs(high.mid - 14.2497) < 1e-3
    assert low.hi < 13 < high.lo
    _, high10 = rosser_pn_bounds(10)
    assert abs(high10.mid - 31.3663) < 1e-3 and high10.lo > 29
    assert pn_floor(1).contains(0.0)
    with pytest.raises(DomainError):
        rosser_pn_bounds(5)


def test_rosser_sampled(table):
    ns = np.arange(6, 100_001)
    low, high = rosser_pn_bounds(ns)
    ps = table.primes[ns - 1]
    assert np.all(low.hi <= ps) and np.all(ps <= high.lo)


def test_logpn1_examples(table):
    v = logpn1_upper(53)
    assert abs(v.mid - 5.59568) < 1e-4
    assert certify_less(Interval(251.0).log(), v) == Verdict.HOLDS
    assert math.isfinite(logpn1_upper(10_000).hi)
    ns = np.arange(53, 20_000, 37)
    vals = logpn1_upper(ns)
    assert np.all(np.diff(vals.lo) > 0)


def test_theta_lower_robin_examples(table):
    v = theta_lower_robin(3)
    assert abs(v.mid - (-5.0243)) < 1e-3
    assert v.hi < math.log(30)
    for n in (100, 10**5):
        assert certify_less(theta_lower_robin(n), table.theta(n)) == Verdict.HOLDS


def test_prlb_ratio_examples():
    assert abs(prlb_ratio(2.0).mid - 19.1632 / 9) < 1e-12
    x = Interval(599.0).log()
    assert abs(prlb_ratio(x).mid - 1.73996) < 1e-4
    assert prlb_ratio_facts(x) == (Verdict.HOLDS, Verdict.HOLDS)
    with pytest.raises(DomainError):
        prlb_ratio(1.0)


def test_prlb_ratio_dense():
    xs = np.linspace(math.log(599), 50.0, 20_001)
    xs[0] = Interval(599.0).log().hi
    below, logbig = prlb_ratio_facts(xs)
    assert np.all(below == Verdict.HOLDS)
    assert np.all(logbig == Verdict.HOLDS)
    r = prlb_ratio(xs)
    assert np.all(certify_less(r, IntervalArray(xs).log()) == Verdict.HOLDS)


def test_prlb_proof_sides_finite():
    lhs, rhs = prlb_proof_sides(np.arange(3, 100))
    assert np.all(np.isfinite(lhs.lo)) and np.all(np.isfinite(rhs.hi))


def test_refined_gap_minorant_examples():
    assert certify_less(gap_target(10**5), refined_gap_minorant(10**5)) == Verdict.HOLDS
    assert certify_less(refined_gap_minorant(100), gap_target(100)) == Verdict.HOLDS
    with pytest.raises(DomainError):
        refined_gap_minorant(5)


def test_gap_crossover_both_coefficients():
    main = gap_crossover(analytic.MANDL_GAP_COEFF, 100_000)
    assert main.first_holds == 21152 and main.stable_from == 21152
    assert not main.undecided and not main.never_crosses
    alt = gap_crossover(analytic.MANDL_GAP_COEFF_ALT, 100_000)
    assert alt.first_holds is None and alt.stable_from is None
    assert alt.never_crosses


def test_gap_crossover_neighbours_with_mpmath():
    c = mpmath.mpf(35995) - 3 * mpmath.li(599**2) + mpmath.mpf(599**2) / mpmath.log(599)

    def margin(n):
        L = mpmath.log(n)
        m = c + mpmath.mpf("0.1119") * (n * L) ** 2 / mpmath.log(n * (L + mpmath.log(L))) ** 2
        return m - mpmath.mpf(n) ** 2 / 14

    assert margin(21151) < 0 < margin(21152)


def test_theta_band_examples(table):
    low, high = theta_band(math.e)
    assert abs(low.mid - (math.e - D_THETA * math.e)) < 1e-6 * D_THETA
    assert abs(high.mid - (math.e + D_THETA * math.e)) < 1e-6 * D_THETA
    ps = table.primes[:10**6].astype(float)
    low, high = theta_band(ps)
    th_lo, th_hi = table.theta_lo[1:10**6 + 1], table.theta_hi[1:10**6 + 1]
    assert np.all(low.hi < th_lo) and np.all(th_hi < high.lo)
    xs = np.geomspace(10.0, 1e15, 50)
    lo, hi = theta_band(xs)
    rel = (hi.mid - lo.mid) / xs
    assert np.allclose(rel, 2 * D_THETA / np.log(xs) ** 4, rtol=1e-9)
    assert np.all(np.diff(rel) < 0)


def test_array_and_scalar_paths_agree():
    ns = np.array([6, 50, 1000])
    arr = theta_lower_robin(ns)
    for i, n in enumerate(ns):
        s = theta_lower_robin(int(n))
        assert (s.lo, s.hi) == (arr.lo[i], arr.hi[i])


def test_pi_many_against_dusart(table):
    xs = np.arange(599, 20_000)
    counts = pi_many(table, xs)
    assert np.all(dusart_pi_lower(xs.astype(float)).hi <= counts)
