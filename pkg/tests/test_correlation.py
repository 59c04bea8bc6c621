from fractions import Fraction
from math import factorial

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from quadromer.asympt import omega_limit, omega_theorem
from quadromer.correlation import (
    CSV_COLUMNS, Method, Nu, bump_ratio_limit, finite_n_omega_b, m_nu, m_nu_naive, omega_b_factored,
    omega_b_quadruple, omega_b_record, omega_center, quadruple_sum, record_row, sort_records,
)
from quadromer.errors import ParameterError
from quadromer.hyperjacobi import m_nu_integral
from quadromer.lattice import RegionSpec, build_region
from quadromer.lgv import lgv_tiling_count
from quadromer.numerics import HiFloat, richardson_extrapolate
from quadromer.tiler import count_weighted_tilings

small = st.tuples(st.integers(1, 4), st.integers(0, 2), st.integers(1, 4), st.integers(0, 2))


def ratio_by_lgv(spec, n):
    return lgv_tiling_count(build_region(spec)) / lgv_tiling_count(build_region(RegionSpec.plain(n)))


def ratio_by_tiler(spec, n):
    count = lambda s: count_weighted_tilings(build_region(s), budget=300, memo=True).value  # noqa: E731
    return count(spec) / count(RegionSpec.plain(n))


# --- bump ratio limit -----------------------------------------------------

def test_bump_ratio_0101():
    # 1!3!1!3! / (16 * 2^4 * 0!1!1!2! * 0!^2 1!^2 * 2*3*3*4), evaluated by hand
    assert bump_ratio_limit(0, 1, 0, 1) == Fraction(36, 36864) == Fraction(1, 1024)


def test_bump_ratio_rejects_equal_indices():
    with pytest.raises(ParameterError):
        bump_ratio_limit(1, 1, 0, 1)
    with pytest.raises(ParameterError):
        bump_ratio_limit(0, 1, 2, 2)


def test_bump_ratio_finite_n_trend():
    limit = bump_ratio_limit(0, 2, 1, 2)
    assert limit == Fraction(5, 8192)
    spec = lambda n: RegionSpec.bumps(n, 0, 2, 1, 2)  # noqa: E731
    assert ratio_by_tiler(spec(3), 3) == ratio_by_lgv(spec(3), 3)
    # the finite-n ratio overshoots until n ~ 6, then falls toward the limit
    seq = [ratio_by_lgv(spec(n), n) for n in (6, 8, 10, 12)]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert all(x > limit for x in seq)
    gaps = [x - limit for x in seq]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


# --- double sums ----------------------------------------------------------

def test_m1_smallest():
    assert m_nu("one", 1, 1, 0, 0).value == Fraction(121, 384)
    assert m_nu_naive("one", 1, 1, 0, 0, reverse=True) == Fraction(121, 384)


@settings(max_examples=30, deadline=None)
@given(small, st.sampled_from(list(Nu)))
def test_m_nu_matches_naive_both_orders(p, nu):
    R1, v1, R2, v2 = p
    v = m_nu(nu, R1, R2, v1, v2)
    assert v.value == m_nu_naive(nu, R1, R2, v1, v2) == m_nu_naive(nu, R1, R2, v1, v2, reverse=True)
    assert v.u == v1 + v2 + 2


def test_m_a_only_sees_a_at_least_one():
    # weight a kills a = 0; with R1 = 1 only a = 1 survives
    R2, v1, v2 = 3, 1, 0
    u = v1 + v2 + 2
    f = factorial
    expect = Fraction(0)
    for c in range(R2 + 1):
        a = 1
        expect += Fraction(
            (-1) ** (a + c) * f(a) * f(R2 + c - 1) * f(2 * v1 + 3) * f(2 * v2 + 2 * c + 1) * a,
            f(2) * f(0) * f(2 * c + 1) * f(R2 - c) * 2 ** (2 * v1 + 2) * f(v1 + 1) * f(v1 + 2)
            * 2 ** (2 * v2 + 2 * c) * f(v2 + c) ** 2 * (u + a + c))
    assert m_nu("a", 1, R2, v1, v2).value == expect


def test_m1_sign_is_not_fixed():
    # positive on the smallest cases, negative once R2 outgrows R1; the integral
    # representation carries the same sign, so this is not a summation artifact
    assert m_nu("one", 1, 1, 0, 0).value > 0
    neg = m_nu("one", 1, 4, 0, 0).value
    assert neg == Fraction(-171, 8192)
    assert m_nu_integral("one", 1, 4, 0, 0).value == pytest.approx(float(neg), rel=1e-20)


@settings(max_examples=25, deadline=None)
@given(small)
def test_factorization_identity(p):
    R1, v1, R2, v2 = p
    m = {nu: m_nu(nu, R1, R2, v1, v2).value for nu in Nu}
    pref = R1 * R2 * (Fraction(R2) ** 2 - Fraction(1, 4))
    assert omega_b_quadruple(*p) == pref * abs(m[Nu.ONE] * m[Nu.AC] - m[Nu.A] * m[Nu.C]) / 4


@settings(max_examples=20, deadline=None)
@given(small)
def test_ordered_sum_is_quarter(p):
    assert quadruple_sum(*p, ordered=True) * 4 == quadruple_sum(*p)


def test_omega_b_small_values():
    assert omega_b_quadruple(1, 0, 1, 0) == omega_b_factored(1, 0, 1, 0) == Fraction(1, 4096)
    assert omega_b_quadruple(2, 0, 2, 0) == omega_b_factored(2, 0, 2, 0) == Fraction(465, 262144)


@settings(max_examples=30, deadline=None)
@given(small)
def test_omega_b_nonnegative(p):
    assert omega_b_factored(*p) >= 0


@pytest.mark.parametrize("bad", [(0, 0, 1, 0), (1, -1, 1, 0), (1, 0, 1, 0.5)])
def test_range_violation(bad):
    with pytest.raises(ParameterError):
        omega_b_factored(*bad)


# --- finite n -------------------------------------------------------------

def test_finite_n_3_matches_tiler():
    spec = RegionSpec.quadromers(3, 1, 0, 1, 0)
    assert finite_n_omega_b(3, 1, 0, 1, 0) == ratio_by_tiler(spec, 3) == Fraction(1, 2401)
    assert finite_n_omega_b(3, 1, 0, 1, 0, "se_nw") == Fraction(1, 2401)


def test_finite_n_4_matches_tiler():
    spec = RegionSpec.quadromers(4, 2, 0, 1, 0)
    assert finite_n_omega_b(4, 2, 0, 1, 0) == ratio_by_tiler(spec, 4) == Fraction(155, 299376)


@pytest.mark.parametrize("params", [(1, 0, 1, 0), (2, 0, 2, 0)])
def test_finite_n_approaches_limit(params):
    limit = omega_b_quadruple(*params)
    gaps = [abs(finite_n_omega_b(n, *params) - limit) for n in (3, 4, 5)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_finite_n_known_ratios():
    assert [finite_n_omega_b(n, 1, 0, 1, 0) for n in (3, 4, 5)] == [
        Fraction(1, 2401), Fraction(25, 63504), Fraction(49, 131769)]


def test_finite_n_misfit():
    with pytest.raises(ParameterError):
        finite_n_omega_b(1, 4, 0, 1, 0)


# --- correlation at the center -------------------------------------------

def test_omega_center_10_1():
    rec = omega_center(10, 1, [50, 100, 200])
    assert rec.method is Method.EXTRAPOLATED and rec.params == (10, 1)
    assert not rec.flags
    assert abs(rec.float_value.value * 412 * mp.pi**2 / 3 - 1) <= 0.15
    assert mp.almosteq(omega_theorem(10, 1).value, 3 / (412 * mp.pi**2))


@pytest.mark.parametrize("r,u", [(4, 3), (6, 2)])
def test_limit_depends_on_v1_plus_v2_only(r, u):
    grid = (50, 100, 200)
    d = richardson_extrapolate([(R, HiFloat.coerce(omega_b_factored(R + r, u - 2, R, 0))) for R in grid])
    w = richardson_extrapolate([(R, HiFloat.coerce(omega_b_factored(R + r, 0, R, u - 2))) for R in grid])
    assert abs(d.value - w.value) <= d.err + w.err
    # both are (v1, v2) with v1 + v2 + 2 = u, so the S-integral limit is taken at u
    exact = omega_limit(r, u).value
    assert abs(d.value - exact) <= d.err and abs(w.value - exact) <= w.err


@pytest.mark.parametrize("grid", [[50], [100, 50], []])
def test_omega_center_bad_grid(grid):
    with pytest.raises(ParameterError):
        omega_center(3, 1, grid)


def test_omega_center_flags_non_convergent_tail():
    rec = omega_center(0, 1, [1, 2])
    assert rec.flags == ["non_convergent_tail"] or rec.float_value.err < abs(rec.float_value.value)


# --- records --------------------------------------------------------------

def test_record_row_columns():
    rec = omega_b_record(2, 0, 2, 0, "quadruple_sum")
    row = record_row(rec)
    assert tuple(row) == CSV_COLUMNS
    assert (row["value_numerator"], row["value_denominator"]) == (465, 262144)
    assert row["r"] is None and row["flags"] == ""


def test_sort_records_deterministic():
    recs = [omega_b_record(*p) for p in [(2, 0, 1, 0), (1, 1, 1, 0), (1, 0, 2, 0)]]
    assert [r.params for r in sort_records(recs)] == [(1, 0, 2, 0), (1, 1, 1, 0), (2, 0, 1, 0)]
    assert sort_records(recs) == sort_records(list(reversed(recs)))
