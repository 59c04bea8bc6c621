"""Terminating hypergeometric series, their reduction to Jacobi polynomials,
Darboux approximants, and the I/J integrals behind the double-sum asymptotics.

Two arithmetic modes run side by side: rational arguments give exact
``Fraction`` results, mpmath arguments give :class:`HiFloat` values.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

import mpmath as mp

from .correlation import _sum_over_denominators, _to_integers
from .errors import ParameterError
from .numerics import HiFloat, integrate

Rational = (int, Fraction)


def poch(a, k: int):
    """Rising factorial (a)_k; exact for rational a."""
    out = Fraction(1) if isinstance(a, Rational) else mp.mpf(1)
    for i in range(k):
        out *= a + i
    return out


def _is_nonpos_int(a) -> bool:
    return isinstance(a, Rational) and Fraction(a).denominator == 1 and a <= 0


def _exact(x) -> bool:
    return isinstance(x, Rational)


# ---------------------------------------------------------------------------
# terminating series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypSpec:
    """pFq[upper; lower; argument] with a non-positive integer upper parameter."""

    upper: tuple
    lower: tuple
    argument: object = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(Fraction(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(Fraction(b) for b in self.lower))
        arg = self.argument
        if isinstance(arg, HiFloat):
            arg = arg.value
        object.__setattr__(self, "argument", Fraction(arg) if _exact(arg) else mp.mpf(arg))
        if not any(_is_nonpos_int(a) for a in self.upper):
            raise ParameterError(f"series does not terminate: no non-positive integer among {self.upper}",
                                 field="upper")

    @property
    def termination_index(self) -> int:
        return int(min(-a for a in self.upper if _is_nonpos_int(a)))

    def with_argument(self, z) -> "HypSpec":
        return type(self)(self.upper, self.lower, z)


class Hyp3F2Spec(HypSpec):
    def __post_init__(self):
        super().__post_init__()
        if len(self.upper) != 3 or len(self.lower) != 2:
            raise ParameterError("a 3F2 needs 3 upper and 2 lower parameters")


class Hyp2F1Spec(HypSpec):
    def __post_init__(self):
        super().__post_init__()
        if len(self.upper) != 2 or len(self.lower) != 1:
            raise ParameterError("a 2F1 needs 2 upper and 1 lower parameter")


def _hyp_terms(spec: HypSpec):
    n = spec.termination_index
    z = spec.argument
    t = Fraction(1) if _exact(z) else mp.mpf(1)
    yield t
    for k in range(n):
        num = Fraction(1)
        for a in spec.upper:
            num *= a + k
        den = Fraction(k + 1)
        for b in spec.lower:
            if b + k == 0:
                raise ParameterError(f"lower parameter {b} reaches 0 before the series terminates", field="lower")
            den *= b + k
        if num == 0:
            return
        t = t * (num / den if _exact(z) else mp.mpf(num.numerator) / num.denominator * den.denominator / den.numerator) * z
        yield t


def hyp_terminating(spec: HypSpec):
    """Finite sum of the series: ``Fraction`` for a rational argument, else :class:`HiFloat`."""
    terms = list(_hyp_terms(spec))
    if _exact(spec.argument):
        return sum(terms, Fraction(0))
    value = mp.fsum(terms)
    return HiFloat(value, mp.eps * len(terms) * max(abs(t) for t in terms))


def hyp3f2_terminating(spec: Hyp3F2Spec):
    if not isinstance(spec, Hyp3F2Spec):
        spec = Hyp3F2Spec(spec.upper, spec.lower, spec.argument)
    return hyp_terminating(spec)


# ---------------------------------------------------------------------------
# the four single sums and their 3F2 forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesForm:
    """prefactor * x**x_power * 3F2[upper; lower; x/4]."""

    prefactor: Fraction
    x_power: int
    upper: tuple
    lower: tuple

    def spec(self, x) -> Hyp3F2Spec:
        z = Fraction(x) / 4 if _exact(x) else mp.mpf(x) / 4
        return Hyp3F2Spec(self.upper, self.lower, z)

    def evaluate(self, x):
        f = hyp3f2_terminating(self.spec(x))
        if _exact(x):
            return self.prefactor * Fraction(x) ** self.x_power * f
        return f * (mp.mpf(self.prefactor.numerator) / self.prefactor.denominator * mp.mpf(x) ** self.x_power)


def _check_Rv(R, v):
    if not isinstance(R, int) or R < 1:
        raise ParameterError(f"R must be a positive integer, got {R!r}", field="R")
    if not isinstance(v, int) or v < 0:
        raise ParameterError(f"v must be a non-negative integer, got {v!r}", field="v")


def d_series(R: int, v: int, weighted: bool = False) -> SeriesForm:
    """Sum over a of (-1)^a (R+a-1)!/((2a)!(R-a)!) (2v+2a+1)!/(2^(2v+2a)(v+a)!(v+a+1)!) x^a,
    times a when ``weighted``."""
    _check_Rv(R, v)
    f = factorial
    h = Fraction(1, 2)
    if not weighted:
        return SeriesForm(Fraction(f(2 * v + 1), R * 4**v * f(v) * f(v + 1)), 0, (-R, R, v + 3 * h), (h, v + 2))
    return SeriesForm(
        Fraction(-R * (2 * v + 3) * f(2 * v + 1), 4 ** (v + 1) * f(v) * f(v + 2)),
        1, (-R + 1, R + 1, v + 5 * h), (3 * h, v + 3),
    )


def u_series(R: int, v: int, weighted: bool = False) -> SeriesForm:
    """Sum over c of (-1)^c (R+c-1)!/((2c+1)!(R-c)!) (2v+2c+1)!/(2^(2v+2c)(v+c)!^2) x^c,
    times c when ``weighted``."""
    _check_Rv(R, v)
    f = factorial
    h = Fraction(1, 2)
    if not weighted:
        return SeriesForm(Fraction(f(2 * v + 1), R * 4**v * f(v) ** 2), 0, (-R, R, v + 3 * h), (3 * h, v + 1))
    return SeriesForm(
        Fraction(-R * (2 * v + 3) * f(2 * v + 1), 3 * 4 ** (v + 1) * f(v) * f(v + 1)),
        1, (-R + 1, R + 1, v + 5 * h), (5 * h, v + 2),
    )


def d_sum(R, v, x):
    return d_series(R, v).evaluate(x)


def u_sum(R, v, x):
    return u_series(R, v).evaluate(x)


def d_sum_weighted(R, v, x):
    return d_series(R, v, weighted=True).evaluate(x)


def u_sum_weighted(R, v, x):
    return u_series(R, v, weighted=True).evaluate(x)


def raw_single_sum(side: str, R: int, v: int, x, weighted: bool = False):
    """The single sums straight from their factorial definition (oracle for the 3F2 forms)."""
    f = factorial
    total = Fraction(0) if _exact(x) else mp.mpf(0)
    for a in range(R + 1):
        if side == "d":
            coeff = Fraction((-1) ** a * f(R + a - 1) * f(2 * v + 2 * a + 1),
                             f(2 * a) * f(R - a) * 2 ** (2 * v + 2 * a) * f(v + a) * f(v + a + 1))
        elif side == "u":
            coeff = Fraction((-1) ** a * f(R + a - 1) * f(2 * v + 2 * a + 1),
                             f(2 * a + 1) * f(R - a) * 2 ** (2 * v + 2 * a) * f(v + a) ** 2)
        else:
            raise ParameterError(f"side must be 'd' or 'u', got {side!r}", field="side")
        if weighted:
            coeff *= a
        if _exact(x):
            total += coeff * Fraction(x) ** a
        else:
            total += mp.mpf(coeff.numerator) / coeff.denominator * mp.mpf(x) ** a
    return total


# ---------------------------------------------------------------------------
# 3F2 -> sum of 2F1 (Chu-Vandermonde)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionTerm:
    """coefficient * z**z_power * 2F1[spec]."""

    coefficient: Fraction
    z_power: int
    spec: HypSpec

    def value(self):
        if self.coefficient == 0:
            return Fraction(0) if _exact(self.spec.argument) else HiFloat(0)
        z = self.spec.argument
        f = hyp_terminating(self.spec)
        if _exact(z):
            return self.coefficient * z**self.z_power * f
        return f * (mp.mpf(self.coefficient.numerator) / self.coefficient.denominator * z**self.z_power)


def _pivot(spec: HypSpec):
    # (upper index, lower index, n) with upper - lower = n >= 0; prefer a non-integer upper
    best = None
    for i, a in enumerate(spec.upper):
        for j, e in enumerate(spec.lower):
            n = a - e
            if n.denominator == 1 and n >= 0 and poch(1 - a, int(n)) != 0:
                key = (a.denominator == 1, n)
                if best is None or key < best[0]:
                    best = (key, i, j, int(n))
    if best is None:
        raise ParameterError("3F2 has no upper parameter a with a lower parameter a - n, n >= 0", field="lower")
    return best[1:]


def expand_3f2(spec: Hyp3F2Spec, pivot: tuple[int, int] | None = None) -> list[ExpansionTerm]:
    """Write 3F2[a, b, c; a - n, d; z] as a sum of n + 1 terms coefficient * z^k * 2F1[b+k, c+k; d+k; z].

    Terms whose coefficient vanishes (because b or c is a non-positive integer
    above k) are kept with coefficient 0 and a placeholder spec.
    """
    if pivot is None:
        i, j, n = _pivot(spec)
    else:
        i, j = pivot
        n = spec.upper[i] - spec.lower[j]
        if n.denominator != 1 or n < 0:
            raise ParameterError(f"pivot {pivot} does not give a non-negative integer shift", field="pivot")
        n = int(n)
    a = spec.upper[i]
    b, c = (spec.upper[t] for t in range(3) if t != i)
    d = spec.lower[1 - j]
    norm = poch(1 - a, n)
    if norm == 0:
        raise ParameterError("(1 - a)_n vanishes for this pivot", field="pivot")
    terms = []
    for k in range(n + 1):
        coeff = Fraction((-1) ** k * comb(n, k)) * poch(1 - a, n - k) / norm * poch(b, k) * poch(c, k) / poch(d, k)
        try:
            sub = Hyp2F1Spec((b + k, c + k), (d + k,), spec.argument)
        except ParameterError:
            if coeff != 0:
                raise
            sub = Hyp2F1Spec((0, 0), (1,), spec.argument)
        terms.append(ExpansionTerm(coeff, k, sub))
    return terms


def sum_expansion(terms: Sequence[ExpansionTerm]):
    vals = [t.value() for t in terms]
    if all(_exact(v) for v in vals):
        return sum(vals, Fraction(0))
    return sum((HiFloat.coerce(v) for v in vals), HiFloat(0))


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobiSpec:
    n: int
    alpha: object
    beta: object
    x: object

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ParameterError(f"Jacobi degree must be a non-negative integer, got {self.n!r}", field="n")


@dataclass(frozen=True)
class JacobiForm:
    """2F1 = factor * P_n^(alpha, beta)(y)."""

    factor: Fraction
    n: int
    alpha: Fraction
    beta: Fraction
    y: object


def hyp2f1_to_jacobi(spec: HypSpec) -> JacobiForm:
    """Match 2F1[n+alpha+beta+1, -n; 1+alpha; (1-y)/2] = n! / (alpha+1)_n * P_n(y)."""
    if len(spec.upper) != 2 or len(spec.lower) != 1:
        raise ParameterError("need a 2F1")
    idx = [i for i, a in enumerate(spec.upper) if _is_nonpos_int(a)]
    if not idx:
        raise ParameterError("2F1 is not a polynomial")
    i = min(idx, key=lambda t: -spec.upper[t])
    n = int(-spec.upper[i])
    other = spec.upper[1 - i]
    alpha = spec.lower[0] - 1
    beta = other - n - alpha - 1
    z = spec.argument
    y = 1 - 2 * z
    return JacobiForm(Fraction(factorial(n)) / poch(alpha + 1, n), n, alpha, beta, y)


def _recurrence(n, a, b, x, one):
    p0 = one
    if n == 0:
        return p0, [p0]
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    seq = [p0, p1]
    for m in range(2, n + 1):
        s = 2 * m + a + b
        den = 2 * m * (m + a + b) * (s - 2)
        if den == 0:
            return None, seq
        p2 = ((s - 1) * (s * (s - 2) * x + a * a - b * b) * p1 - 2 * (m + a - 1) * (m + b - 1) * s * p0) / den
        p0, p1 = p1, p2
        seq.append(p2)
    return p1, seq


def jacobi_via_2f1(spec: JacobiSpec):
    """P_n via its hypergeometric definition (cross-check route)."""
    n, a, b = spec.n, spec.alpha, spec.beta
    exact = all(_exact(t) for t in (a, b, spec.x))
    if exact:
        a, b, x = Fraction(a), Fraction(b), Fraction(spec.x)
        return poch(a + 1, n) / factorial(n) * hyp_terminating(HypSpec((n + a + b + 1, -n), (1 + a,), (1 - x) / 2))
    a, b, x = mp.mpf(a), mp.mpf(b), mp.mpf(spec.x)
    return mp.rf(a + 1, n) / mp.factorial(n) * mp.hyp2f1(n + a + b + 1, -n, 1 + a, (1 - x) / 2)


def jacobi_exact(n: int, alpha, beta, x) -> Fraction:
    """P_n^(alpha, beta)(x) in rational arithmetic."""
    a, b, x = Fraction(alpha), Fraction(beta), Fraction(x)
    val, _ = _recurrence(n, a, b, x, Fraction(1))
    if val is None:
        return jacobi_via_2f1(JacobiSpec(n, a, b, x))
    return val


def jacobi_poly(spec: JacobiSpec) -> HiFloat:
    """P_n^(alpha, beta)(x) by the three-term recurrence at working precision."""
    a, b, x = (mp.mpf(Fraction(t).numerator) / Fraction(t).denominator if _exact(t) else mp.mpf(t)
               for t in (spec.alpha, spec.beta, spec.x))
    val, seq = _recurrence(spec.n, a, b, x, mp.mpf(1))
    if val is None:  # a recurrence denominator vanished for these parameters
        return HiFloat(jacobi_via_2f1(JacobiSpec(spec.n, a, b, x)), mp.eps * 10)
    return HiFloat(val, mp.eps * (spec.n + 1) * max(abs(t) for t in seq))


def shifted_jacobi_coeffs(n: int, alpha, beta) -> list[Fraction]:
    """Coefficients of P_n^(alpha, beta)(1 - x/2) as a polynomial in x."""
    a, b = Fraction(alpha), Fraction(beta)
    c = poch(a + 1, n) / factorial(n)
    out = [c]
    for j in range(n):
        c = c * (-n + j) * (n + a + b + 1 + j) / ((a + 1 + j) * (j + 1) * 4)
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# Darboux approximants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DarbouxValue:
    main: HiFloat
    error_term: HiFloat


def _mpq(t):
    return mp.mpf(Fraction(t).numerator) / Fraction(t).denominator if _exact(t) else mp.mpf(t)


def darboux_main_theta(n: int, alpha, beta, theta):
    """D_n^(alpha, beta)(cos theta)."""
    a, b = _mpq(alpha), _mpq(beta)
    arg = (n + (a + b + 1) / 2) * theta - (a / 2 + mp.mpf(1) / 4) * mp.pi
    return mp.cos(arg) / (mp.sqrt(mp.pi * n) * mp.sin(theta / 2) ** (a + 0.5) * mp.cos(theta / 2) ** (b + 0.5))


def darboux(spec: JacobiSpec) -> DarbouxValue:
    x = _mpq(spec.x)
    if spec.n < 1:
        raise ParameterError("the Darboux approximant needs degree n >= 1", field="n")
    if not -1 < x < 1:
        raise ParameterError(f"need 0 < arccos(x) < pi, got x = {mp.nstr(x, 10)}", field="x")
    main = darboux_main_theta(spec.n, spec.alpha, spec.beta, mp.acos(x))
    exact = jacobi_poly(spec)
    return DarbouxValue(HiFloat(main, mp.eps * abs(main) * 10), exact - main)


# ---------------------------------------------------------------------------
# I and J integrals
# ---------------------------------------------------------------------------

class Kind(str, enum.Enum):
    PLAIN = "plain"
    A = "a"
    C = "c"
    AC = "ac"

    @classmethod
    def parse(cls, x) -> "Kind":
        x = getattr(x, "value", x)
        return cls.PLAIN if x in ("one", "1") else cls(x)

    @property
    def d_weighted(self) -> bool:
        return self in (Kind.A, Kind.AC)

    @property
    def u_weighted(self) -> bool:
        return self in (Kind.C, Kind.AC)

    @property
    def shift(self) -> int:
        return int(self.d_weighted) + int(self.u_weighted)


@dataclass(frozen=True)
class IntegralShape:
    """P_{n1}^(a1,b1)(1-x/2) P_{n2}^(a2,b2)(1-x/2) x^exponent on [0, 1]."""

    d: tuple[int, int, int]
    u: tuple[int, int, int]
    exponent: int


def integral_shape(kind, k: int, l: int, R1: int, R2: int, v1: int, v2: int) -> IntegralShape:
    kind = Kind.parse(kind)
    for name, val in (("v1", v1), ("v2", v2)):
        if val < 0:
            raise ParameterError(f"{name} must be >= 0", field=name)
    if not (0 <= k <= v1 + 1 and 0 <= l <= v2):
        raise ParameterError(f"need 0 <= k <= v1+1 and 0 <= l <= v2, got k={k}, l={l}", field="k/l")
    u = v1 + v2 + 2
    if kind.d_weighted:
        d = (R1 - k - 1, v1 + k + 2, k - v1 - 1)
    else:
        d = (R1 - k, v1 + k + 1, k - v1 - 2)
    if kind.u_weighted:
        w = (R2 - l - 1, v2 + l + 1, l - v2)
    else:
        w = (R2 - l, v2 + l, l - v2 - 1)
    if d[0] < 0 or w[0] < 0:
        raise ParameterError(f"negative Jacobi degree ({d[0]}, {w[0]})", field="R")
    return IntegralShape(d, w, k + l + u - 1 + kind.shift)


def integral_I_exact(kind, k, l, R1, R2, v1, v2) -> Fraction:
    """I-integral as an exact rational (polynomial integration)."""
    sh = integral_shape(kind, k, l, R1, R2, v1, v2)
    P, dP = _to_integers(shifted_jacobi_coeffs(*sh.d))
    Q, dQ = _to_integers(shifted_jacobi_coeffs(*sh.u))
    conv = [0] * (len(P) + len(Q) - 1)
    for i, p in enumerate(P):
        if p:
            for j, q in enumerate(Q):
                conv[i + j] += p * q
    return _sum_over_denominators(conv, sh.exponent + 1) / (dP * dQ)


def integral_I(kind, k, l, R1, R2, v1, v2, method: str = "exact", precision_target=None) -> HiFloat:
    """I-integral of the given kind.

    ``method="exact"`` integrates the polynomial integrand term by term in
    rationals; ``"quadrature"`` evaluates the Jacobi factors by recurrence at
    Gauss-Legendre nodes. Quadrature is only practical for small degrees.
    """
    sh = integral_shape(kind, k, l, R1, R2, v1, v2)
    if method == "exact":
        return HiFloat.coerce(integral_I_exact(kind, k, l, R1, R2, v1, v2))
    if method != "quadrature":
        raise ParameterError(f"unknown method {method!r}", field="method")
    (n1, a1, b1), (n2, a2, b2), e = sh.d, sh.u, sh.exponent

    def f(x):
        y = 1 - x / 2
        return jacobi_poly(JacobiSpec(n1, a1, b1, y)).value * jacobi_poly(JacobiSpec(n2, a2, b2, y)).value * x**e

    deg = n1 + n2 + e
    return integrate(f, e, precision_target, min_panels=max(1, deg // 16))


def integral_J(kind, k, l, R1, R2, v1, v2, precision_target=None) -> HiFloat:
    """I-integral with both Jacobi factors replaced by their Darboux approximants.

    Computed in s = sqrt(x), where theta = 2 arcsin(s/2) and sin(theta/2) = s/2,
    so the integrand is analytic on [0, 1].
    """
    sh = integral_shape(kind, k, l, R1, R2, v1, v2)
    (n1, a1, b1), (n2, a2, b2), e = sh.d, sh.u, sh.exponent
    if n1 < 1 or n2 < 1:
        raise ParameterError(f"Darboux approximants need degrees >= 1, got ({n1}, {n2})", field="R")
    a1m, b1m, a2m, b2m = (mp.mpf(t) for t in (a1, b1, a2, b2))
    N1, N2 = n1 + (a1m + b1m + 1) / 2, n2 + (a2m + b2m + 1) / 2
    ph1, ph2 = (a1m / 2 + mp.mpf(1) / 4) * mp.pi, (a2m / 2 + mp.mpf(1) / 4) * mp.pi
    power = 2 * e - a1 - a2  # net power of s
    const = 2 * mp.mpf(2) ** (a1m + a2m + 1) / (mp.pi * mp.sqrt(mp.mpf(n1) * n2))

    def g(s):
        th = 2 * mp.asin(s / 2)
        c = mp.sqrt(1 - s * s / 4)
        return (const * s**power * mp.cos(N1 * th - ph1) * mp.cos(N2 * th - ph2)
                / c ** (b1m + b2m + 1))

    return integrate(g, 0, precision_target, substitute=False, min_panels=max(1, (n1 + n2) // 8))


# ---------------------------------------------------------------------------
# integral representations of the double sums
# ---------------------------------------------------------------------------

def m_nu_prefactor(kind, R1: int, R2: int, v1: int, v2: int) -> Fraction:
    """Constant in front of the integral representation of M_nu."""
    kind = Kind.parse(kind)
    f = factorial
    if kind is Kind.PLAIN:
        return Fraction(f(2 * v1 + 1) * f(2 * v2 + 1), R1 * R2 * 4 ** (v1 + v2) * f(v1) * f(v1 + 1) * f(v2) ** 2)
    if kind is Kind.A:
        return -Fraction(R1 * (2 * v1 + 3) * f(2 * v1 + 1) * f(2 * v2 + 1),
                         R2 * 4 ** (v1 + v2 + 1) * f(v1) * f(v1 + 2) * f(v2) ** 2)
    if kind is Kind.C:
        return -Fraction(R2 * f(2 * v1 + 1) * f(2 * v2 + 1) * (2 * v2 + 3),
                         3 * R1 * 4 ** (v1 + v2 + 1) * f(v1) * f(v1 + 1) * f(v2) * f(v2 + 1))
    return Fraction(R1 * R2 * (2 * v1 + 3) * f(2 * v1 + 1) * (2 * v2 + 3) * f(2 * v2 + 1),
                    3 * 4 ** (v1 + v2 + 2) * f(v1) * f(v1 + 2) * f(v2) * f(v2 + 1))


def m_nu_integral(nu, R1: int, R2: int, v1: int, v2: int, precision_target=None) -> HiFloat:
    """M_nu by quadrature of the product of the two 3F2 factors."""
    kind = Kind.parse(nu)
    ds = d_series(R1, v1, kind.d_weighted)
    us = u_series(R2, v2, kind.u_weighted)
    e = v1 + v2 + 1 + kind.shift
    spec_d, spec_u = ds.spec(Fraction(0)), us.spec(Fraction(0))

    def f(x):
        z = x / 4
        return (hyp_terminating(spec_d.with_argument(z)).value
                * hyp_terminating(spec_u.with_argument(z)).value * x**e)

    deg = R1 + R2 + e
    val = integrate(f, e, precision_target, min_panels=max(1, deg // 16))
    return val * HiFloat.coerce(m_nu_prefactor(kind, R1, R2, v1, v2))


# ---------------------------------------------------------------------------
# the Jacobi expansion of M_nu and its coefficients
# ---------------------------------------------------------------------------

def c_coefficients(kind, v1: int, v2: int) -> Fraction:
    """Closed-form coefficient of the leading (k, l) = (v1+1, v2) term."""
    kind = Kind.parse(kind)
    if v1 < 0 or v2 < 0:
        raise ParameterError("v1, v2 must be >= 0", field="v")
    s = v1 + v2
    return {
        Kind.PLAIN: Fraction(2, (-4) ** (s + 1)),
        Kind.A: Fraction(2, (-4) ** (s + 2)),
        Kind.C: -Fraction(2, (-4) ** (s + 2)),
        Kind.AC: Fraction(2, (-4) ** (s + 3)),
    }[kind]


def r_structure(kind, k: int, l: int, R1: int, R2: int, v1: int, v2: int) -> Fraction:
    """R-dependent factor multiplying c_kl * I_kl in the expansion of M_nu."""
    kind = Kind.parse(kind)

    def part(top, span):
        # (-R')_j (R'')_j / (R' - j + 1)_span, zero when the series stops before j
        num = poch(Fraction(-top[0]), top[2]) * poch(Fraction(top[1]), top[2])
        return num / poch(Fraction(top[0] - top[2] + 1), span) if num else Fraction(0)

    if kind.d_weighted:
        dpart = part((R1 - 1, R1 + 1, k), v1 + k + 2)
    else:
        dpart = part((R1, R1, k), v1 + k + 1)
    if kind.u_weighted:
        upart = part((R2 - 1, R2 + 1, l), v2 + l + 1)
    else:
        upart = part((R2, R2, l), v2 + l)
    outer = {Kind.PLAIN: Fraction(1, R1 * R2), Kind.A: Fraction(R1, R2),
             Kind.C: Fraction(R2, R1), Kind.AC: Fraction(R1 * R2)}[kind]
    return outer * dpart * upart


def _side_terms(form: SeriesForm):
    """(k, coefficient of x^k * I-factor, JacobiForm) from expanding one 3F2 factor."""
    out = []
    for k, term in enumerate(expand_3f2(form.spec(Fraction(1)))):
        if term.coefficient == 0:
            out.append((k, Fraction(0), None))
            continue
        jac = hyp2f1_to_jacobi(term.spec)
        out.append((k, term.coefficient / 4**term.z_power * jac.factor, jac))
    return out


def expansion_coefficients(kind, v1: int, v2: int, R1: int | None = None, R2: int | None = None) -> dict:
    """Recover c_kl by expanding both 3F2 factors, converting to Jacobi
    polynomials and dividing out the R-dependent structure.

    The result must not depend on (R1, R2); callers check that by recovering at
    two different sizes.
    """
    kind = Kind.parse(kind)
    R1 = v1 + 3 if R1 is None else R1
    R2 = v2 + 3 if R2 is None else R2
    ds, us = d_series(R1, v1, kind.d_weighted), u_series(R2, v2, kind.u_weighted)
    pref = m_nu_prefactor(kind, R1, R2, v1, v2)
    if pref != ds.prefactor * us.prefactor:
        raise AssertionError("integral prefactor disagrees with the single-sum prefactors")
    out = {}
    for k, cd, jd in _side_terms(ds):
        for l, cu, ju in _side_terms(us):
            struct = r_structure(kind, k, l, R1, R2, v1, v2)
            if cd == 0 or cu == 0 or struct == 0:
                raise ParameterError(f"(R1, R2) = ({R1}, {R2}) too small to recover c_{k}{l}", field="R")
            sh = integral_shape(kind, k, l, R1, R2, v1, v2)
            if (jd.n, jd.alpha, jd.beta) != sh.d or (ju.n, ju.alpha, ju.beta) != sh.u:
                raise AssertionError(f"Jacobi parameters of term ({k}, {l}) do not match the I-integral")
            out[(k, l)] = pref * cd * cu / struct
    return out


def reconstruct_m_nu(kind, R1: int, R2: int, v1: int, v2: int, coeffs: dict | None = None,
                     method: str = "quadrature") -> HiFloat:
    """M_nu as sum over (k, l) of c_kl * structure * I_kl."""
    coeffs = expansion_coefficients(kind, v1, v2) if coeffs is None else coeffs
    total = HiFloat(0)
    for (k, l), ckl in coeffs.items():
        struct = r_structure(kind, k, l, R1, R2, v1, v2)
        if struct == 0:
            continue  # (-R)_k vanishes: the 3F2 has no such term
        total = total + integral_I(kind, k, l, R1, R2, v1, v2, method=method) * HiFloat.coerce(ckl * struct)
    return total


def leading_coefficient(kind, v1: int, v2: int) -> Fraction:
    """Mechanically recovered constant of the leading (v1+1, v2) term once the
    R-structure is replaced by its large-R sign (-1)^(k+l) and power of R."""
    c = expansion_coefficients(kind, v1, v2)[(v1 + 1, v2)]
    return c * (-1) ** (v1 + 1 + v2)
