from fractions import Fraction

import mpmath as mp
import pytest

from quadromer.asympt import (
    ISOTROPY_COLUMNS, EndpointProblem, M_NU_POWER, catalog, complex_pair_identity, endpoint_integral,
    fourier_endpoint_leading, fourier_hypotheses, isotropy_report, laplace_endpoint_leading, m_nu_leading,
    m_nu_leading_integral, omega_from_leading, omega_limit, omega_theorem, s_integrals, s_leading,
)
from quadromer.correlation import m_nu, omega_center
from quadromer.errors import ParameterError
from quadromer.numerics import quad_singular
from quadromer.suites import fourier73, laplace51

half = Fraction(1, 2)
theta, ident, zero = catalog("theta"), catalog("identity"), catalog("const", value=0)
one = catalog("const", value=1)


def as_mpf(x: Fraction):
    return mp.mpf(x.numerator) / x.denominator


# --- catalog and endpoint lemmas ---------------------------------------------

def test_unknown_catalog_entry():
    with pytest.raises(ParameterError):
        catalog("bessel")


def test_negative_q_rejected():
    with pytest.raises(ParameterError):
        EndpointProblem(-1, ident, zero, one, 10)


def test_theta_derivative():
    t = mp.mpf("0.3")
    assert mp.almosteq(theta.derivative(t), mp.diff(theta, t))
    assert mp.almosteq(theta(1), mp.pi / 3)


def test_toy_laplace_remainder_bounded():
    p = EndpointProblem(1, ident, zero, one, 1)
    scaled = []
    for R in (100, 200, 400):
        lead = laplace_endpoint_leading(p.at(R))
        assert mp.almosteq(lead.value(), mp.cos(R - mp.pi / 4) / (R * mp.sqrt(2)))
        scaled.append(abs(endpoint_integral(p.at(R)).value - lead.value()) * R * R)
    assert max(scaled) < 1


def test_complex_pair_identity():
    lhs, rhs = complex_pair_identity(mp.mpf("0.7"), 1, 2)
    assert abs(lhs - rhs) < mp.mpf(10) ** -25


@pytest.mark.parametrize("q", [Fraction(1, 3), Fraction(1), Fraction(5, 2)])
def test_s1_amplitude_and_phase(q):
    # h = t^(c-3/2) (4-t)^(1/2) with c = 1, alpha = theta
    p = EndpointProblem(q, theta, zero, catalog("power_sqrt", p=-half, s=half), 7)
    lead = laplace_endpoint_leading(p)
    qm = as_mpf(q)
    amp = mp.sqrt(3) / mp.sqrt(qm**2 + mp.mpf(1) / 3)
    phase = 7 * mp.pi / 3 - mp.atan(1 / (qm * mp.sqrt(3)))
    expect = amp * mp.cos(phase) / 7
    assert mp.almosteq(lead.value(), expect)
    assert mp.almosteq(lead.amplitude.value, amp)
    assert 0 <= lead.phase.value < 2 * mp.pi


def test_q0_routes_to_fourier():
    p = EndpointProblem(0, theta, zero, catalog("power_sqrt", p=half, s=half), 40)
    assert laplace_endpoint_leading(p) == fourier_endpoint_leading(p)


def test_toy_fourier_exact():
    # h/alpha' = 1 does not vanish at 0, but sin(0) = 0 hides the lower endpoint here
    p = EndpointProblem(0, ident, zero, one, 200)
    assert fourier_hypotheses(p)
    lead = fourier_endpoint_leading(p, check=False)
    assert mp.almosteq(lead.value(), mp.sin(200) / 200)
    assert abs(endpoint_integral(p).value - lead.value()) < mp.mpf(10) ** -25


@pytest.mark.parametrize("u", [2, 3])
def test_s1_q0_leading(u):
    r = 25
    sl = s_leading(0, u, r)
    assert sl.notes == ()
    # amplitude / r^order with order 1
    assert sl.S1.order == 1 and mp.almosteq(sl.S1.amplitude.value / r, mp.mpf(3) / r)
    assert mp.almosteq(sl.S1.value(), 3 * mp.cos(r * mp.pi / 3 - mp.pi / 2) / r)


def test_s1_q0_u1_is_noted():
    sl = s_leading(0, 1, 25)
    assert any(n.startswith("S1:") for n in sl.notes)
    assert mp.almosteq(sl.S1.amplitude.value, 3)


def test_fourier_rejects_inverse_sqrt():
    p = EndpointProblem(0, theta, zero, catalog("power_sqrt", p=-half, s=0), 50)
    with pytest.raises(ParameterError):
        fourier_endpoint_leading(p)


def test_catalog_instances():
    assert all(c.passed for c in laplace51())
    assert all(c.passed for c in fourier73())


# --- M_nu leading forms ------------------------------------------------------

def deviation(nu, r, v1, v2, R):
    x = m_nu(nu, R + r, R, v1, v2).value
    return abs(as_mpf(x) * mp.mpf(R) ** M_NU_POWER[nu] - m_nu_leading_integral(nu, r, v1 + v2 + 2).value)


@pytest.mark.parametrize("nu,r", [("one", 0), ("ac", 2)])
def test_m_nu_leading_deviation_decreases(nu, r):
    seq = [deviation(nu, r, 0, 0, R) for R in (50, 100, 200)]
    assert seq[0] > seq[1] > seq[2]


def test_m1_leading_integral_r0():
    ref = quad_singular("sqrt_4mx_over_x", {"power": 1}, half) / mp.pi
    assert mp.almosteq(m_nu_leading_integral("one", 0, 2).value, ref.value)


@pytest.mark.parametrize("r,u", [(0, 2), (3, 2), (5, 3)])
def test_a_and_c_leading_are_negatives(r, u):
    assert mp.almosteq(m_nu_leading_integral("a", r, u).value, -m_nu_leading_integral("c", r, u).value)


def test_m_nu_leading_scaling():
    lead = m_nu_leading("one", 1, 0, 0, 80)
    assert mp.almosteq(lead.value, m_nu_leading_integral("one", 1, 2).value / mp.mpf(80) ** 3)


# --- S-integrals -------------------------------------------------------------

@pytest.mark.parametrize("r,u", [(0, 1), (7, 2), (12, 5)])
def test_sa_is_sc(r, u):
    s = s_integrals(r, u)
    assert s["Sa"] is s["Sc"]


def test_s_limit_vs_extrapolated_center():
    rec = omega_center(10, 1, [50, 100, 200])
    limit = omega_limit(10, 2)  # (v1, v2) = (0, 0), so the S-integrals carry u = 2
    assert abs(rec.float_value.value - limit.value) <= rec.float_value.err


@pytest.mark.parametrize("u", [1, 2, 4])
def test_s1_r0_node_doubling(u):
    base = s_integrals(0, u)["S1"]
    ref = quad_singular("sqrt_4mx_over_x", {"power": u - 1}, Fraction(2 * u - 3, 2), min_panels=8, order=48)
    assert abs(base.value - ref.value) < mp.mpf(10) ** -20


def test_s_integrals_domain():
    with pytest.raises(ParameterError):
        s_integrals(-1, 2)
    with pytest.raises(ParameterError):
        s_integrals(3, 0)


def test_s_leading_q1_remainder():
    scaled = []
    for r in (30, 60, 120):
        exact = s_integrals(r, r + 1)
        sl = s_leading(1, 1, r).as_dict()
        scaled.append(max(abs(exact[k].value - sl[k].value()) * r * r for k in sl))
    assert max(scaled) / min(scaled) < 2 and max(scaled) < 5


def test_q_continuity():
    r = 30
    a, b = s_leading(Fraction(1, 10**6), 1, r), s_leading(0, 1, r)
    for k in ("S1", "Sa", "Sac"):
        x, y = getattr(a, k), getattr(b, k)
        scale = y.amplitude.value / r
        assert abs(x.amplitude.value / y.amplitude.value - 1) < 1e-4
        assert abs(x.value() - y.value()) < 1e-4 * scale
        d = abs(x.phase.value - y.phase.value)
        assert min(d, 2 * mp.pi - d) < 1e-4


def test_s_leading_domain():
    with pytest.raises(ParameterError):
        s_leading(0, 0, 10)


@pytest.mark.parametrize("q,c", [(1, 1), (Fraction(1, 3), 1), (0, 2)])
def test_rays_approach_isotropic_law(q, c):
    dev = []
    for r in (10, 20, 40, 80):
        u = q * r + c
        dev.append(abs(omega_limit(r, u).value * 4 * mp.pi**2 * as_mpf(Fraction(r * r) + 3 * Fraction(u) ** 2) / 3 - 1))
    assert all(b < a for a, b in zip(dev, dev[1:]))
    assert dev[-1] < 0.025


@pytest.mark.parametrize("q,c", [(1, 1), (Fraction(1, 3), 1), (0, 2)])
def test_phase_collapse_two_ways(q, c):
    r = 80
    direct = omega_limit(r, q * r + c).value
    closed = omega_from_leading(s_leading(q, c, r))
    assert abs(closed / direct - 1) < 0.02


# --- theorem and isotropy ----------------------------------------------------

def test_theorem_10_1():
    v = omega_theorem(10, 1).value
    assert mp.almosteq(v, 3 / (412 * mp.pi**2))
    assert abs(v / mp.mpf("7.376e-4") - 1) < 1e-3


def test_theorem_isotropic():
    assert omega_theorem(2, 4).value == omega_theorem(7, 1).value
    assert mp.almosteq(omega_theorem(7, 1).value, 3 / (4 * mp.pi**2 * 52))
    assert omega_theorem(1, 3).value == omega_theorem(5, 1).value  # 28


def test_theorem_origin_rejected():
    with pytest.raises(ParameterError):
        omega_theorem(0, 0)


def test_isotropy_singleton():
    rows = isotropy_report([(6, 1)])
    assert len(rows) == 1 and rows[0].group_max_deviation == 0
    d = rows[0].as_dict()
    assert tuple(d) == ISOTROPY_COLUMNS
    assert d["omega_theorem"] == mp.nstr(omega_theorem(6, 1).value, 20)


def test_isotropy_pair_report():
    rows = isotropy_report([(7, 1), (2, 4)])
    assert [(x.r, x.u) for x in rows] == [(2, 4), (7, 1)]
    assert rows[0].radius2 == rows[1].radius2 == 52
    assert rows[0].theorem.value == rows[1].theorem.value
    expect = float(max(x.omega.value for x in rows) / min(x.omega.value for x in rows) - 1)
    assert rows[0].group_max_deviation == rows[1].group_max_deviation == pytest.approx(expect)
    for x in rows:  # the extrapolation tracks the exact limit
        assert abs(x.omega.value - x.limit_integral.value) <= x.omega.err
