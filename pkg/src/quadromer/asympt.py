"""Endpoint asymptotics of oscillatory integrals, leading forms of the double
sums and S-integrals, and the isotropic law for the center correlation.

Integrals handled here have the shape

    int_0^1 t^(R q) h(t) cos(R alpha(t) + k(t)) dt

with alpha, k, h drawn from a catalog of closed-form functions that carry
their own derivatives, so leading terms use exact endpoint data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath as mp

from .errors import ParameterError
from .numerics import HiFloat, integrate, register_integrand, quad_singular


# ---------------------------------------------------------------------------
# catalog of analytic functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticFunction:
    name: str
    params: tuple
    f: Callable = field(compare=False, repr=False)
    df: Callable = field(compare=False, repr=False)
    endpoint_power: Fraction = Fraction(0)  # f(t) ~ t^p as t -> 0+
    sqrt_branch: bool = False  # analytic in sqrt(t) rather than t near 0

    def __call__(self, t):
        return self.f(mp.mpf(t))

    def derivative(self, t):
        return self.df(mp.mpf(t))


def _q(x) -> mp.mpf:
    x = Fraction(x)
    return mp.mpf(x.numerator) / x.denominator


def _const(value=0):
    v = _q(value)
    return AnalyticFunction("const", (("value", Fraction(value)),), lambda t: v, lambda t: mp.mpf(0))


def _pi_multiple(m=0):
    """The constant m * pi (phases)."""
    v = _q(m) * mp.pi
    return AnalyticFunction("pi_multiple", (("m", Fraction(m)),), lambda t: v, lambda t: mp.mpf(0))


def _identity():
    return AnalyticFunction("identity", (), lambda t: t, lambda t: mp.mpf(1), Fraction(1))


def _theta():
    # arccos(1 - t/2) = 2 arcsin(sqrt(t)/2)
    return AnalyticFunction(
        "theta", (), lambda t: 2 * mp.asin(mp.sqrt(t) / 2), lambda t: 1 / mp.sqrt(4 * t - t * t),
        Fraction(1, 2), True,
    )


def _power_sqrt(p=0, s=0):
    """t^p (4 - t)^s."""
    P, S = _q(p), _q(s)
    p, s = Fraction(p), Fraction(s)

    def f(t):
        return t**P * (4 - t) ** S

    def df(t):
        return P * t ** (P - 1) * (4 - t) ** S - S * t**P * (4 - t) ** (S - 1)

    return AnalyticFunction("power_sqrt", (("p", p), ("s", s)), f, df, p, p.denominator != 1)


CATALOG: dict[str, Callable[..., AnalyticFunction]] = {
    "const": _const,
    "pi_multiple": _pi_multiple,
    "identity": _identity,
    "theta": _theta,
    "power_sqrt": _power_sqrt,
}


def catalog(name: str, **params) -> AnalyticFunction:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise ParameterError(f"unknown catalog function {name!r}; known: {sorted(CATALOG)}", field="function") from None
    return factory(**params)


@dataclass(frozen=True)
class EndpointProblem:
    q: Fraction
    alpha: AnalyticFunction
    k: AnalyticFunction
    h: AnalyticFunction
    R: object

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q < 0:
            raise ParameterError(f"q must be >= 0, got {self.q}", field="q")

    def at(self, R) -> "EndpointProblem":
        return EndpointProblem(self.q, self.alpha, self.k, self.h, R)


@dataclass(frozen=True)
class LeadingTerm:
    """amplitude * cos(phase) / R**order."""

    amplitude: HiFloat
    phase: HiFloat
    order: int
    remainder_order: str
    R: object

    def value(self) -> mp.mpf:
        return self.amplitude.value * mp.cos(self.phase.value) / mp.mpf(self.R) ** self.order


def _normalized(amp, phase, R, remainder) -> LeadingTerm:
    if amp < 0:
        amp, phase = -amp, phase + mp.pi
    phase = mp.fmod(phase, 2 * mp.pi)
    if phase < 0:
        phase += 2 * mp.pi
    tiny = mp.eps * 10
    return LeadingTerm(HiFloat(amp, tiny * abs(amp)), HiFloat(phase, tiny * (1 + abs(phase))), 1, remainder, R)


def complex_pair_identity(phi, q, b) -> tuple[mp.mpf, mp.mpf]:
    """Both sides of e^(i phi)/(q + i b) + e^(-i phi)/(q - i b) = 2 cos(phi - arctan(b/q)) / sqrt(q^2 + b^2)."""
    phi, q, b = mp.mpf(phi), mp.mpf(q), mp.mpf(b)
    lhs = mp.exp(1j * phi) / (q + 1j * b) + mp.exp(-1j * phi) / (q - 1j * b)
    rhs = 2 / mp.sqrt(q * q + b * b) * mp.cos(phi - mp.atan(b / q))
    if abs(mp.im(lhs)) > mp.eps * 100 * (1 + abs(lhs)):
        raise ArithmeticError("left-hand side is not real")
    return mp.re(lhs), rhs


def laplace_endpoint_leading(p: EndpointProblem) -> LeadingTerm:
    """Leading term h(1)/(R sqrt(q^2 + alpha'(1)^2)) cos(R alpha(1) + k(1) - arctan(alpha'(1)/q)).

    q = 0 is routed to :func:`fourier_endpoint_leading`.
    """
    if p.q == 0:
        return fourier_endpoint_leading(p)
    q = _q(p.q)
    a1 = p.alpha.derivative(1)
    R = mp.mpf(p.R)
    amp = p.h(1) / mp.sqrt(q * q + a1 * a1)
    phase = R * p.alpha(1) + p.k(1) - mp.atan(a1 / q)
    return _normalized(amp, phase, p.R, "O(R^-2)")


def fourier_hypotheses(p: EndpointProblem, samples: int = 200) -> list[str]:
    """Violated hypotheses of the q = 0 lemma (empty when all hold)."""
    bad = []
    for i in range(1, samples):
        t = mp.mpf(i) / samples
        if p.alpha.derivative(t) <= 0:
            bad.append(f"alpha' <= 0 at t = {mp.nstr(t, 6)}")
            break
    # h/alpha' ~ t^(power of h - power of alpha'); must vanish at 0+
    ratio_power = p.h.endpoint_power - (p.alpha.endpoint_power - 1)
    if ratio_power <= 0:
        lim = p.h(mp.mpf("1e-30")) / p.alpha.derivative(mp.mpf("1e-30"))
        bad.append(f"h/alpha' does not vanish at 0+ (behaves like t^{ratio_power}, value {mp.nstr(lim, 6)} at t = 1e-30)")
    return bad


def fourier_endpoint_leading(p: EndpointProblem, check: bool = True) -> LeadingTerm:
    """Leading term h(1)/(R alpha'(1)) cos(R alpha(1) + k(1) - pi/2) for q = 0."""
    if p.q != 0:
        raise ParameterError(f"the q = 0 lemma needs q = 0, got {p.q}", field="q")
    if check:
        bad = fourier_hypotheses(p)
        if bad:
            raise ParameterError("hypothesis violated: " + "; ".join(bad), field="h")
    a1 = p.alpha.derivative(1)
    amp = p.h(1) / a1
    phase = mp.mpf(p.R) * p.alpha(1) + p.k(1) - mp.pi / 2
    return _normalized(amp, phase, p.R, "o(R^-1)")


def endpoint_integral(p: EndpointProblem, precision_target=None) -> HiFloat:
    """Quadrature value of the integral the lemmas approximate."""
    R = mp.mpf(p.R)
    Rq = R * _q(p.q)
    fs = (p.alpha, p.k, p.h)

    def f(t):
        return t**Rq * p.h(t) * mp.cos(R * p.alpha(t) + p.k(t))

    power = p.h.endpoint_power + Fraction(p.R) * p.q
    substitute = any(g.sqrt_branch for g in fs) or power.denominator != 1
    panels = max(1, int(R) // 4)
    return integrate(f, power, precision_target, substitute=substitute, min_panels=panels,
                     max_panels=max(1024, 16 * panels))


# ---------------------------------------------------------------------------
# integrands of the leading forms
# ---------------------------------------------------------------------------

def _theta_of(x):
    return 2 * mp.asin(mp.sqrt(x) / 2)


@register_integrand("s1", sqrt_branch=True)
def _s1(x, prm):
    return mp.sqrt((4 - x) / x) * x ** (prm["u"] - 1) * mp.cos(prm["r"] * _theta_of(x))


@register_integrand("sa", sqrt_branch=True)
def _sa(x, prm):
    return x ** (prm["u"] - 1) * mp.cos(prm["r"] * _theta_of(x) - mp.pi / 2)


@register_integrand("sac", sqrt_branch=True)
def _sac(x, prm):
    return mp.sqrt(x / (4 - x)) * x ** (prm["u"] - 1) * mp.cos(prm["r"] * _theta_of(x))


_S_ENDPOINT = {"s1": Fraction(-1, 2), "sa": Fraction(0), "sac": Fraction(1, 2)}


def _s_integral(which: str, r, u, precision_target=None) -> HiFloat:
    r, u = Fraction(r), Fraction(u)
    if r < 0 or u < 1:
        raise ParameterError(f"need r >= 0 and u >= 1, got r={r}, u={u}", field="r/u")
    prm = {"r": _q(r), "u": _q(u)}
    panels = max(1, int(r) // 4)
    return quad_singular(which, prm, _S_ENDPOINT[which] + u - 1, precision_target, min_panels=panels)


def s_integrals(r, u, precision_target=None) -> dict[str, HiFloat]:
    """The four limiting integrals; S_a and S_c have the same integrand."""
    sa = _s_integral("sa", r, u, precision_target)
    return {
        "S1": _s_integral("s1", r, u, precision_target),
        "Sa": sa,
        "Sc": sa,
        "Sac": _s_integral("sac", r, u, precision_target),
    }


def omega_limit(r, u, precision_target=None) -> HiFloat:
    """(1/(4 pi^2)) |S1 Sac + Sa Sc|: the R -> infinity limit of omega_b(R+r, v1; R, v2), u = v1 + v2 + 2."""
    S = s_integrals(r, u, precision_target)
    return abs(S["S1"] * S["Sac"] + S["Sa"] * S["Sc"]) * HiFloat(1 / (4 * mp.pi**2))


# ---------------------------------------------------------------------------
# leading forms of the double sums
# ---------------------------------------------------------------------------

M_NU_POWER = {"one": 3, "a": 2, "c": 2, "ac": 1}


def m_nu_leading_integral(nu, r, u, precision_target=None) -> HiFloat:
    """The R-free part of the leading term: R^p M_nu(R + r, R) -> this value."""
    nu = getattr(nu, "value", nu)
    if nu not in M_NU_POWER:
        raise ParameterError(f"nu must be one of {sorted(M_NU_POWER)}, got {nu!r}", field="nu")
    which = {"one": "s1", "a": "sa", "c": "sa", "ac": "sac"}[nu]
    val = _s_integral(which, r, u, precision_target) * HiFloat(1 / mp.pi)
    return -val if nu == "a" else val


def m_nu_leading(nu, r, v1: int, v2: int, R, precision_target=None) -> HiFloat:
    """Leading asymptotic value of M_nu(R + r, R)."""
    nu = getattr(nu, "value", nu)
    u = v1 + v2 + 2
    return m_nu_leading_integral(nu, r, u, precision_target) * HiFloat(mp.mpf(R) ** -M_NU_POWER[nu])


# ---------------------------------------------------------------------------
# S-integrals along u = q r + c
# ---------------------------------------------------------------------------

def s_problems(q, c_shift, r) -> dict[str, EndpointProblem]:
    """The S-integrals written as endpoint problems with R = r and u = q r + c_shift."""
    q, c = Fraction(q), Fraction(c_shift)
    theta = catalog("theta")
    zero = catalog("const", value=0)
    # q > 0 absorbs t^(qr); q = 0 keeps the whole power in h
    base = c - 1 if q > 0 else q * r + c - 1
    return {
        "S1": EndpointProblem(q, theta, zero, catalog("power_sqrt", p=base - Fraction(1, 2), s=Fraction(1, 2)), r),
        "Sa": EndpointProblem(q, theta, catalog("pi_multiple", m=Fraction(-1, 2)), catalog("power_sqrt", p=base, s=0), r),
        "Sac": EndpointProblem(q, theta, zero, catalog("power_sqrt", p=base + Fraction(1, 2), s=Fraction(-1, 2)), r),
    }


@dataclass(frozen=True)
class SLeading:
    S1: LeadingTerm
    Sa: LeadingTerm
    Sc: LeadingTerm
    Sac: LeadingTerm
    notes: tuple = ()

    def as_dict(self) -> dict[str, LeadingTerm]:
        return {"S1": self.S1, "Sa": self.Sa, "Sc": self.Sc, "Sac": self.Sac}


def s_leading(q, c_shift, r) -> SLeading:
    """Leading forms of the S-integrals; the q = 0 branch comes from the Fourier endpoint lemma.

    When a q = 0 instance violates that lemma's hypothesis h/alpha' -> 0 the
    leading term is still reported and the violation recorded in ``notes``.
    """
    q = Fraction(q)
    u = q * r + Fraction(c_shift)
    if q < 0 or u < 1 or r <= 0:
        raise ParameterError(f"need q >= 0, r > 0 and u = q r + c >= 1, got q={q}, r={r}, u={u}", field="q/c")
    probs = s_problems(q, c_shift, r)
    notes = []
    out = {}
    for name, p in probs.items():
        if q > 0:
            out[name] = laplace_endpoint_leading(p)
        else:
            for msg in fourier_hypotheses(p):
                notes.append(f"{name}: {msg}")
            out[name] = fourier_endpoint_leading(p, check=False)
    return SLeading(out["S1"], out["Sa"], out["Sa"], out["Sac"], tuple(notes))


def omega_from_leading(sl: SLeading) -> mp.mpf:
    vals = {k: v.value() for k, v in sl.as_dict().items()}
    return abs(vals["S1"] * vals["Sac"] + vals["Sa"] * vals["Sc"]) / (4 * mp.pi**2)


# ---------------------------------------------------------------------------
# the isotropic law
# ---------------------------------------------------------------------------

def omega_theorem(r, u) -> HiFloat:
    """3 / (4 pi^2 (r^2 + 3 u^2))."""
    d = Fraction(r) ** 2 + 3 * Fraction(u) ** 2
    if d <= 0:
        raise ParameterError("(r, u) = (0, 0) is not a separation", field="r/u")
    v = 3 / (4 * mp.pi**2 * _q(d))
    return HiFloat(v, mp.eps * abs(v))


ISOTROPY_COLUMNS = (
    "r", "u", "radius2", "omega", "error_estimate", "omega_limit_integral",
    "omega_theorem", "ratio", "group_max_deviation", "flags",
)


@dataclass
class IsotropyRow:
    r: int
    u: int
    omega: HiFloat
    limit_integral: HiFloat
    theorem: HiFloat
    flags: list[str] = field(default_factory=list)
    group_max_deviation: float = 0.0

    @property
    def radius2(self) -> int:
        return self.r**2 + 3 * self.u**2

    @property
    def ratio(self):
        return self.omega.value / self.theorem.value

    def as_dict(self) -> dict:
        return {
            "r": self.r, "u": self.u, "radius2": self.radius2,
            "omega": mp.nstr(self.omega.value, 20), "error_estimate": mp.nstr(self.omega.err, 6),
            "omega_limit_integral": mp.nstr(self.limit_integral.value, 20),
            "omega_theorem": mp.nstr(self.theorem.value, 20), "ratio": mp.nstr(self.ratio, 12),
            "group_max_deviation": f"{self.group_max_deviation:.6g}", "flags": ";".join(self.flags),
        }


def isotropy_report(pairs: Sequence[tuple[int, int]], R_grid=None, workers: int = 1) -> list[IsotropyRow]:
    """Extrapolated omega for each (r, u) against the isotropic law, grouped by r^2 + 3u^2.

    Within a group the deviation is max(omega)/min(omega) - 1.
    """
    from .correlation import DEFAULT_R_GRID, omega_center

    grid = DEFAULT_R_GRID if R_grid is None else R_grid
    rows = []
    for r, u in sorted(set(pairs)):
        rec = omega_center(r, u, grid, workers)
        # omega(r, u) is built from (v1, v2) = (u - 1, 0), so its limit integrals carry u + 1
        rows.append(IsotropyRow(r, u, rec.float_value, omega_limit(r, u + 1), omega_theorem(r, u), list(rec.flags)))
    groups: dict[int, list[IsotropyRow]] = {}
    for row in rows:
        groups.setdefault(row.radius2, []).append(row)
    for members in groups.values():
        vals = [m.omega.value for m in members]
        dev = float(max(vals) / min(vals) - 1) if min(vals) > 0 else float("inf")
        for m in members:
            m.group_max_deviation = dev
    return rows
