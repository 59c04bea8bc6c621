"""High-precision numerical substrate: error-carrying floats, endpoint-singular
Gauss-Legendre quadrature with node doubling, and Richardson extrapolation in 1/R.

All floating work goes through mpmath at a package-wide working precision
(``DEFAULT_DPS`` decimal digits) so that quadrature and asymptotic comparisons
keep 30+ significant digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import mpmath as mp

from .errors import ParameterError, ToleranceError

DEFAULT_DPS = 40
DEFAULT_TARGET = mp.mpf("1e-25")


def set_precision(dps: int) -> None:
    """Set the working precision (decimal digits) used by every mpmath call."""
    if dps < 16:
        raise ParameterError(f"working precision must be at least 16 digits, got {dps}")
    mp.mp.dps = dps
    _gl_rule.cache_clear()


class QuadratureError(ToleranceError):
    """Quadrature did not reach its target within the node budget."""

    def __init__(self, message: str, achieved):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class HiFloat:
    """A high-precision value with a non-negative absolute error estimate."""

    value: mp.mpf
    err: mp.mpf = mp.mpf(0)

    def __post_init__(self):
        object.__setattr__(self, "value", mp.mpf(self.value))
        err = mp.mpf(self.err)
        if not mp.isfinite(err) or err < 0:
            raise ValueError(f"error estimate must be finite and >= 0, got {err}")
        object.__setattr__(self, "err", err)

    @classmethod
    def coerce(cls, x) -> "HiFloat":
        if isinstance(x, HiFloat):
            return x
        if isinstance(x, Fraction):
            return cls(mp.mpf(x.numerator) / x.denominator)
        return cls(mp.mpf(x))

    def __add__(self, other):
        other = HiFloat.coerce(other)
        return HiFloat(self.value + other.value, self.err + other.err)

    __radd__ = __add__

    def __sub__(self, other):
        other = HiFloat.coerce(other)
        return HiFloat(self.value - other.value, self.err + other.err)

    def __rsub__(self, other):
        return HiFloat.coerce(other) - self

    def __mul__(self, other):
        other = HiFloat.coerce(other)
        err = abs(self.value) * other.err + abs(other.value) * self.err + self.err * other.err
        return HiFloat(self.value * other.value, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = HiFloat.coerce(other)
        if abs(other.value) <= other.err:
            raise ZeroDivisionError("divisor is indistinguishable from zero")
        q = self.value / other.value
        err = (self.err + abs(q) * other.err) / (abs(other.value) - other.err)
        return HiFloat(q, err)

    def __rtruediv__(self, other):
        return HiFloat.coerce(other) / self

    def __neg__(self):
        return HiFloat(-self.value, self.err)

    def __abs__(self):
        return HiFloat(abs(self.value), self.err)

    def __float__(self):
        return float(self.value)

    @property
    def rel_err(self):
        if self.value == 0:
            return mp.inf if self.err else mp.mpf(0)
        return self.err / abs(self.value)

    def agrees_with(self, x, slack=1) -> bool:
        return abs(self.value - HiFloat.coerce(x).value) <= slack * self.err

    def __repr__(self):
        return f"HiFloat({mp.nstr(self.value, 20)} ± {mp.nstr(self.err, 3)})"


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Integrand:
    name: str
    func: Callable[[mp.mpf, Mapping], mp.mpf]
    sqrt_branch: bool = False  # integrand is analytic in sqrt(x), not in x


INTEGRANDS: dict[str, Integrand] = {}


def register_integrand(name: str, sqrt_branch: bool = False):
    """Decorator registering ``func(x, params)`` under ``name``."""

    def deco(func):
        if name in INTEGRANDS:
            raise ValueError(f"integrand {name!r} already registered")
        INTEGRANDS[name] = Integrand(name, func, sqrt_branch)
        return func

    return deco


@lru_cache(maxsize=64)
def _gl_rule(order: int):
    # nodes/weights mapped to [0, 1]
    xs, ws = mp.gauss_quadrature(order, "legendre")
    return tuple((x + 1) / 2 for x in xs), tuple(w / 2 for w in ws)


set_precision(DEFAULT_DPS)


def _composite_gl(f, panels: int, order: int):
    xs, ws = _gl_rule(order)
    h = mp.mpf(1) / panels
    total = mp.mpf(0)
    for p in range(panels):
        a = p * h
        total += h * mp.fsum(w * f(a + h * x) for x, w in zip(xs, ws))
    return total


def _as_fraction(p) -> Fraction:
    return p if isinstance(p, Fraction) else Fraction(p).limit_denominator(10**6)


def integrate(
    f: Callable[[mp.mpf], mp.mpf],
    endpoint_power=0,
    precision_target=None,
    order: int = 24,
    min_panels: int = 1,
    max_panels: int = 1024,
    substitute: bool | None = None,
) -> HiFloat:
    """Integrate ``f`` over [0, 1] where ``f(x) ~ x**endpoint_power`` as x -> 0+.

    A half-integer endpoint power (or ``substitute=True``) triggers the change of
    variables x = s**2, which turns square-root endpoint behaviour into an
    analytic integrand. Panels are doubled until two successive composite
    Gauss-Legendre sums differ by less than ``precision_target``.
    """
    p = _as_fraction(endpoint_power)
    if p <= -1:
        raise ParameterError(f"integrand is not integrable at 0: endpoint power {p}")
    target = DEFAULT_TARGET if precision_target is None else mp.mpf(precision_target)
    if substitute is None:
        substitute = p.denominator != 1
    g = (lambda s: 2 * s * f(s * s)) if substitute else f

    panels = max(1, min_panels)
    prev = _composite_gl(g, panels, order)
    delta = mp.inf
    while panels < max_panels:
        panels *= 2
        cur = _composite_gl(g, panels, order)
        delta = abs(cur - prev)
        prev = cur
        if delta < target:
            return HiFloat(cur, delta)
    raise QuadratureError(
        f"node budget exhausted at {panels} panels x {order} nodes (|delta| = {mp.nstr(delta, 3)})",
        HiFloat(prev, delta if mp.isfinite(delta) else abs(prev)),
    )


def quad_singular(integrand_id: str, params: Mapping, endpoint_power=0, precision_target=None, **kw) -> HiFloat:
    """Integrate a registered integrand over [0, 1]; see :func:`integrate`."""
    try:
        entry = INTEGRANDS[integrand_id]
    except KeyError:
        raise ParameterError(f"unknown integrand {integrand_id!r}; known: {sorted(INTEGRANDS)}", field="integrand") from None
    kw.setdefault("substitute", True if entry.sqrt_branch else None)
    return integrate(lambda x: entry.func(x, params), endpoint_power, precision_target, **kw)


@register_integrand("power")
def _power(x, params):
    p = _as_fraction(params["p"])
    return mp.power(x, mp.mpf(p.numerator) / p.denominator)


@register_integrand("sqrt_4mx_over_x", sqrt_branch=True)
def _sqrt_ratio(x, params):
    return mp.sqrt((4 - x) / x) * x ** params.get("power", 0)


# ---------------------------------------------------------------------------
# Extrapolation
# ---------------------------------------------------------------------------

def richardson_extrapolate(samples: Sequence[tuple], model_power: int = 1) -> HiFloat:
    """Extrapolate ``value(R)`` to R -> infinity assuming an expansion in powers
    of ``R**-model_power``.

    Neville's tableau in h = R**-model_power evaluated at h = 0. The error
    estimate is the largest gap between the top entry and the entries of the
    previous level (a single gap undershoots when the tail oscillates).
    """
    if len(samples) < 2:
        raise ParameterError("need at least two samples to extrapolate")
    Rs = [mp.mpf(R) for R, _ in samples]
    if len(set(Rs)) != len(Rs):
        raise ParameterError(f"duplicate R in samples: {[R for R, _ in samples]}")
    if any(b <= a for a, b in zip(Rs, Rs[1:])):
        raise ParameterError("sample R values must be increasing")
    hs = [R ** (-model_power) for R in Rs]
    vals = [HiFloat.coerce(v).value for _, v in samples]
    errs = [HiFloat.coerce(v).err for _, v in samples]
    # tab[j][i]: extrapolant through samples i-j..i
    tab = [list(vals)]
    for j in range(1, len(vals)):
        prev = tab[-1]
        row = [None] * len(vals)
        for i in range(j, len(vals)):
            row[i] = prev[i] + (prev[i] - prev[i - 1]) * hs[i] / (hs[i - j] - hs[i])
        tab.append(row)
    best = tab[-1][-1]
    err = max(abs(best - t) for t in tab[-2] if t is not None) + max(errs)
    return HiFloat(best, err)


def arccos_bound_gap(samples: int = 10_000):
    """Smallest value of arccos(x) - sqrt(2)*sqrt(1-x) over an even grid on [0, 1]."""
    worst = mp.inf
    for i in range(samples + 1):
        x = mp.mpf(i) / samples
        worst = min(worst, mp.acos(x) - mp.sqrt(2) * mp.sqrt(1 - x))
    return worst


def loglog_slope(xs: Sequence, ys: Sequence) -> float:
    """Least-squares slope of log|y| against log x."""
    lx = [math.log(float(x)) for x in xs]
    ly = [math.log(abs(float(y))) for y in ys]
    n = len(lx)
    mx, my = sum(lx) / n, sum(ly) / n
    sxx = sum((a - mx) ** 2 for a in lx)
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sxx
