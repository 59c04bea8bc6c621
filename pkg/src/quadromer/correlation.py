"""Exact quadromer correlations.

Everything here is exact rational arithmetic. The summands are alternating
ratios of large factorials; evaluating them in floating point loses all
significant digits long before R reaches the sizes used for extrapolation.
Per-index coefficient tables are built from term ratios, so no factorial is
ever recomputed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd, lcm
from typing import Iterable, Sequence

import mpmath as mp

from .errors import ParameterError
from .numerics import HiFloat, richardson_extrapolate


class Method(str, enum.Enum):
    QUADRUPLE_SUM = "quadruple_sum"
    FACTORED = "factored"
    FINITE_N = "finite_n"
    EXTRAPOLATED = "extrapolated"
    ASYMPTOTIC = "asymptotic"


class Nu(str, enum.Enum):
    """Weight inserted into the double sum: 1, a, c or a*c."""

    ONE = "one"
    A = "a"
    C = "c"
    AC = "ac"

    def weight(self, a: int, c: int) -> int:
        return {"one": 1, "a": a, "c": c, "ac": a * c}[self.value]


@dataclass
class CorrelationRecord:
    """One correlation value with its provenance.

    ``params`` is either ``(R1, v1, R2, v2)`` or ``(r, u)``.
    """

    params: tuple
    float_value: HiFloat
    method: Method
    exact_value: Fraction | None = None
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.exact_value is not None and self.exact_value < 0:
            raise ValueError("correlation values are non-negative")

    @property
    def R1v1R2v2(self):
        return self.params if len(self.params) == 4 else (None,) * 4

    @property
    def ru(self):
        return self.params if len(self.params) == 2 else (None, None)


@dataclass(frozen=True)
class MNuValue:
    nu: Nu
    R1: int
    R2: int
    v1: int
    v2: int
    value: Fraction

    @property
    def u(self) -> int:
        return self.v1 + self.v2 + 2


def _check_params(R1, v1, R2, v2):
    for name, val, lo in (("R1", R1, 1), ("R2", R2, 1), ("v1", v1, 0), ("v2", v2, 0)):
        if not isinstance(val, int) or val < lo:
            raise ParameterError(f"{name} must be an integer >= {lo}, got {val!r}", field=name)


# ---------------------------------------------------------------------------
# n -> infinity ratio for bump removals
# ---------------------------------------------------------------------------

def bump_ratio_limit(k1: int, k2: int, l1: int, l2: int) -> Fraction:
    """Limit of M(P_n[k1,k2;l1,l2]) / M(P_n) as n -> infinity."""
    if not (0 <= k1 < k2):
        raise ParameterError(f"need 0 <= k1 < k2, got k1={k1}, k2={k2}")
    if not (0 <= l1 < l2):
        raise ParameterError(f"need 0 <= l1 < l2, got l1={l1}, l2={l2}")
    f = factorial
    num = f(2 * k1 + 1) * f(2 * k2 + 1) * f(2 * l1 + 1) * f(2 * l2 + 1) * (k2 - k1) * (l2 - l1)
    den = (
        16
        * 2 ** (2 * (k1 + k2 + l1 + l2))
        * f(k1) * f(k1 + 1) * f(k2) * f(k2 + 1) * f(l1) ** 2 * f(l2) ** 2
        * (k1 + l1 + 2) * (k1 + l2 + 2) * (k2 + l1 + 2) * (k2 + l2 + 2)
    )
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# single-index coefficient tables
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def down_coeffs(R: int, v: int) -> tuple[Fraction, ...]:
    """Signed a-dependent factor of the summand, a = 0..R (down-quadromer side).

    (-1)^a (R+a-1)! / ((2a)! (R-a)!) * (2v+2a+1)! / (2^(2v+2a) (v+a)! (v+a+1)!)
    """
    first = Fraction(factorial(2 * v + 1), R * 4**v * factorial(v) * factorial(v + 1))
    out = [first]
    for a in range(R):
        ratio = Fraction(
            -(R + a) * (R - a) * (2 * v + 2 * a + 3) * (2 * v + 2 * a + 2),
            (2 * a + 1) * (2 * a + 2) * 4 * (v + a + 1) * (v + a + 2),
        )
        out.append(out[-1] * ratio)
    return tuple(out)


@lru_cache(maxsize=256)
def up_coeffs(R: int, v: int) -> tuple[Fraction, ...]:
    """Signed c-dependent factor of the summand, c = 0..R (up-quadromer side).

    (-1)^c (R+c-1)! / ((2c+1)! (R-c)!) * (2v+2c+1)! / (2^(2v+2c) (v+c)!^2)
    """
    first = Fraction(factorial(2 * v + 1), R * 4**v * factorial(v) ** 2)
    out = [first]
    for c in range(R):
        ratio = Fraction(
            -(R + c) * (R - c) * (2 * v + 2 * c + 3) * (2 * v + 2 * c + 2),
            (2 * c + 2) * (2 * c + 3) * 4 * (v + c + 1) ** 2,
        )
        out.append(out[-1] * ratio)
    return tuple(out)


def _to_integers(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = 1
    for q in coeffs:
        den = lcm(den, q.denominator)
    return [q.numerator * (den // q.denominator) for q in coeffs], den


def _sum_over_denominators(numerators: Sequence[int], offset: int) -> Fraction:
    """Exact sum of numerators[s] / (offset + s)."""
    den = 1
    for s in range(len(numerators)):
        den = lcm(den, offset + s)
    total = sum(n * (den // (offset + s)) for s, n in enumerate(numerators))
    return Fraction(total, den)


# ---------------------------------------------------------------------------
# the four double sums
# ---------------------------------------------------------------------------

def m_nu(nu: Nu | str, R1: int, R2: int, v1: int, v2: int) -> MNuValue:
    """Exact double sum over a = 0..R1, c = 0..R2 of A_a C_c nu(a, c) / (u + a + c)."""
    nu = Nu(nu)
    _check_params(R1, v1, R2, v2)
    u = v1 + v2 + 2
    A, dA = _to_integers(down_coeffs(R1, v1))
    C, dC = _to_integers(up_coeffs(R2, v2))
    if nu in (Nu.A, Nu.AC):
        A = [a * x for a, x in enumerate(A)]
    if nu in (Nu.C, Nu.AC):
        C = [c * y for c, y in enumerate(C)]
    # group by s = a + c so that 1/(u+s) is applied once per anti-diagonal
    conv = [0] * (R1 + R2 + 1)
    for a, x in enumerate(A):
        if x:
            for c, y in enumerate(C):
                conv[a + c] += x * y
    value = _sum_over_denominators(conv, u) / (dA * dC)
    return MNuValue(nu, R1, R2, v1, v2, value)


def m_nu_naive(nu: Nu | str, R1: int, R2: int, v1: int, v2: int, reverse: bool = False) -> Fraction:
    """Term-by-term evaluation straight from the factorial formula; test oracle."""
    nu = Nu(nu)
    f = factorial
    u = v1 + v2 + 2
    total = Fraction(0)
    pairs = [(a, c) for a in range(R1 + 1) for c in range(R2 + 1)]
    if reverse:
        pairs.reverse()
    for a, c in pairs:
        w = nu.weight(a, c)
        if not w:
            continue
        term = Fraction(
            (-1) ** (a + c) * f(R1 + a - 1) * f(R2 + c - 1) * f(2 * v1 + 2 * a + 1) * f(2 * v2 + 2 * c + 1) * w,
            f(2 * a) * f(R1 - a) * f(2 * c + 1) * f(R2 - c)
            * 2 ** (2 * v1 + 2 * a) * f(v1 + a) * f(v1 + a + 1)
            * 2 ** (2 * v2 + 2 * c) * f(v2 + c) ** 2
            * (u + a + c),
        )
        total += term
    return total


def _prefactor(R1, R2) -> Fraction:
    return R1 * R2 * (Fraction(R2) - Fraction(1, 2)) * (Fraction(R2) + Fraction(1, 2))


def omega_b_factored(R1: int, v1: int, R2: int, v2: int) -> Fraction:
    """Boundary-influenced correlation from the four double sums:
    R1 R2 (R2^2 - 1/4) |M_1 M_ac - M_a M_c| / 4."""
    _check_params(R1, v1, R2, v2)
    m = {nu: m_nu(nu, R1, R2, v1, v2).value for nu in Nu}
    return _prefactor(R1, R2) * abs(m[Nu.ONE] * m[Nu.AC] - m[Nu.A] * m[Nu.C]) / 4


def quadruple_sum(R1: int, v1: int, R2: int, v2: int, ordered: bool = False) -> Fraction:
    """Signed quadruple sum over a, b <= R1 and c, d <= R2.

    With ``ordered=True`` only a < b, c < d is summed; by symmetry of the
    summand that restricted sum is one quarter of the full one.
    """
    _check_params(R1, v1, R2, v2)
    u = v1 + v2 + 2
    A = down_coeffs(R1, v1)
    C = up_coeffs(R2, v2)
    total = Fraction(0)
    for a in range(R1 + 1):
        for b in range(a + 1 if ordered else 0, R1 + 1):
            if a == b:
                continue
            ab = A[a] * A[b] * (b - a) ** 2
            for c in range(R2 + 1):
                for d in range(c + 1 if ordered else 0, R2 + 1):
                    if c == d:
                        continue
                    total += ab * C[c] * C[d] * (d - c) ** 2 / (
                        (u + a + c) * (u + a + d) * (u + b + c) * (u + b + d)
                    )
    return total


def omega_b_quadruple(R1: int, v1: int, R2: int, v2: int) -> Fraction:
    """Boundary-influenced correlation as the full quadruple sum,
    R1 R2 (R2^2 - 1/4) |sum| / 16."""
    return _prefactor(R1, R2) * abs(quadruple_sum(R1, v1, R2, v2)) / 16


# ---------------------------------------------------------------------------
# finite n
# ---------------------------------------------------------------------------

def finite_n_omega_b(n: int, R1: int, v1: int, R2: int, v2: int, direction: str = "sw_ne") -> Fraction:
    """Exact M(P_n(R1,v1;R2,v2)) / M(P_n) via LGV determinants."""
    from .lattice import RegionSpec, build_region
    from .lgv import lgv_tiling_count

    _check_params(R1, v1, R2, v2)
    punctured = build_region(RegionSpec.quadromers(n, R1, v1, R2, v2))
    plain = build_region(RegionSpec.plain(n))
    return lgv_tiling_count(punctured, direction) / lgv_tiling_count(plain, direction)


# ---------------------------------------------------------------------------
# correlation at the center
# ---------------------------------------------------------------------------

DEFAULT_R_GRID = (50, 100, 200)


def _omega_b_point(args):
    R, r, u = args
    return omega_b_factored(R + r, u - 1, R, 0)


def omega_b_center_samples(r: int, u: int, R_grid: Sequence[int], workers: int = 1) -> list[tuple[int, Fraction]]:
    """Exact omega_b(R + r, u - 1; R, 0) for each R in the grid."""
    jobs = [(R, r, u) for R in R_grid]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_omega_b_point, jobs))
    else:
        values = [_omega_b_point(j) for j in jobs]
    return list(zip(R_grid, values))


def omega_center(r: int, u: int, R_grid: Sequence[int] = DEFAULT_R_GRID, workers: int = 1) -> CorrelationRecord:
    """Correlation at the center, omega(r, u), by Richardson extrapolation in 1/R
    of exact omega_b(R + r, u - 1; R, 0) values."""
    if r < 0 or u < 1:
        raise ParameterError(f"need r >= 0 and u >= 1, got r={r}, u={u}")
    R_grid = list(R_grid)
    if len(R_grid) < 2:
        raise ParameterError("R_grid needs at least two entries to extrapolate")
    if any(b <= a for a, b in zip(R_grid, R_grid[1:])) or R_grid[0] < 1:
        raise ParameterError(f"R_grid must be positive and increasing, got {R_grid}")
    samples = omega_b_center_samples(r, u, R_grid, workers)
    est = richardson_extrapolate([(R, HiFloat.coerce(v)) for R, v in samples])
    flags = []
    if est.err >= abs(est.value):
        flags.append("non_convergent_tail")
    return CorrelationRecord((r, u), est, Method.EXTRAPOLATED, None, flags)


def omega_b_record(R1: int, v1: int, R2: int, v2: int, method: Method | str = Method.FACTORED) -> CorrelationRecord:
    method = Method(method)
    fn = {Method.FACTORED: omega_b_factored, Method.QUADRUPLE_SUM: omega_b_quadruple}[method]
    value = fn(R1, v1, R2, v2)
    return CorrelationRecord((R1, v1, R2, v2), HiFloat.coerce(value), method, value)


CSV_COLUMNS = (
    "method", "R1", "v1", "R2", "v2", "r", "u",
    "value_numerator", "value_denominator", "float_value", "error_estimate", "flags",
)


def record_row(rec: CorrelationRecord) -> dict:
    R1, v1, R2, v2 = rec.R1v1R2v2
    r, u = rec.ru
    ex = rec.exact_value
    return {
        "method": rec.method.value,
        "R1": R1, "v1": v1, "R2": R2, "v2": v2, "r": r, "u": u,
        "value_numerator": ex.numerator if ex is not None else None,
        "value_denominator": ex.denominator if ex is not None else None,
        "float_value": mp.nstr(rec.float_value.value, 25),
        "error_estimate": mp.nstr(rec.float_value.err, 6),
        "flags": ";".join(rec.flags),
    }


def sort_records(records: Iterable[CorrelationRecord]) -> list[CorrelationRecord]:
    return sorted(records, key=lambda rec: (rec.method.value, tuple(x if x is not None else -1 for x in rec.params)))
