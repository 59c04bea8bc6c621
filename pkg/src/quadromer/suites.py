"""Named verification suites shared by the CLI ``verify`` command and the tests.

Each suite returns a list of :class:`CheckResult`; a suite passes when every
check does.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator

from .errors import ParameterError
from .lattice import (
    Region, RegionSpec, admissible_quadromer_params, build_region, pn_cells, up_quadromer,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f" :: {self.detail}" if self.detail else "")


def _u_fits(n: int, R2: int, v2: int) -> bool:
    base = pn_cells(n)
    return all(c in base for c in up_quadromer(R2, v2).cells)


def oracle_regions(n_max: int = 3) -> Iterator[tuple[str, Region]]:
    """Every region family of the oracle-equivalence suite for n <= n_max."""
    for n in range(1, n_max + 1):
        yield f"P_{n}", build_region(RegionSpec.plain(n))
        for R1, v1, R2, v2 in admissible_quadromer_params(n):
            yield f"P_{n}({R1},{v1};{R2},{v2})", build_region(RegionSpec.quadromers(n, R1, v1, R2, v2))
        pairs = list(combinations(range(n), 2))
        for k1, k2 in pairs:
            for l1, l2 in pairs:
                yield f"P_{n}[{k1},{k2};{l1},{l2}]", build_region(RegionSpec.bumps(n, k1, k2, l1, l2))
        # monomer regions: labels only enter through v + a, so v1 = v2 = 0 covers them
        for a, b in pairs:
            for R2 in range(1, 2 * n + 2):
                for v2 in range(n + 1):
                    if not _u_fits(n, R2, v2):
                        continue
                    try:
                        region = build_region(RegionSpec.monomers_d(n, 0, a, b, R2, v2))
                    except ParameterError:
                        continue  # U overlaps a removed monomer
                    yield f"P_{n}^[{a},{b}]({R2},{v2})", region
            for c, d in pairs:
                yield f"P_{n}^[{a},{b}][{c},{d}]", build_region(RegionSpec.monomers_du(n, 0, a, b, 0, c, d))


def lgv_vs_brute(n_max: int = 3, plain_budget: int = 60) -> list[CheckResult]:
    """Tiler count (memoized, and plain DFS when small) against |det| in both directions."""
    from .lgv import lgv_tiling_count
    from .tiler import count_weighted_tilings

    out = []
    for name, region in oracle_regions(n_max):
        brute = count_weighted_tilings(region, budget=len(region.cells), memo=True).value
        values = {"memo": brute}
        if len(region.cells) <= plain_budget:
            values["plain"] = count_weighted_tilings(region, budget=plain_budget).value
        for d in ("sw_ne", "se_nw"):
            values[d] = lgv_tiling_count(region, d)
        ok = len(set(values.values())) == 1
        out.append(CheckResult(name, ok, "" if ok else ", ".join(f"{k}={v}" for k, v in values.items()),
                               {"count": brute}))
    return out


def quad_vs_factored(R_max: int = 6, v_max: int = 2) -> list[CheckResult]:
    """Quadruple bump sum against the factored double-sum form, as exact rationals."""
    from .correlation import omega_b_factored, omega_b_quadruple

    out = []
    for R1 in range(1, R_max + 1):
        for R2 in range(1, R_max + 1):
            for v1 in range(v_max + 1):
                for v2 in range(v_max + 1):
                    q = omega_b_quadruple(R1, v1, R2, v2)
                    f = omega_b_factored(R1, v1, R2, v2)
                    out.append(CheckResult(f"omega_b({R1},{v1};{R2},{v2})", q == f,
                                           "" if q == f else f"quadruple={q} factored={f}", {"value": f}))
    return out


def eq212(n: int = 3) -> list[CheckResult]:
    """Determinant count of P_n(R1,v1;R2,v2) against its expansion over bump-pair regions.

    Terms whose bump indices leave [0, n-1] would need regions that do not
    exist; they are skipped and reported in ``data``.
    """
    from .lgv import Side, bump_pair_det, lgv_tiling_count
    from .tiler import count_weighted_tilings

    cache: dict = {}

    def bump_count(k1, k2, l1, l2):
        key = (k1, k2, l1, l2)
        if key not in cache:
            region = build_region(RegionSpec.bumps(n, *key))
            cache[key] = count_weighted_tilings(region, budget=len(region.cells), memo=True).value
        return cache[key]

    out = []
    for R1, v1, R2, v2 in admissible_quadromer_params(n):
        lhs = lgv_tiling_count(build_region(RegionSpec.quadromers(n, R1, v1, R2, v2)))
        total, skipped = Fraction(0), 0
        for a, b in combinations(range(R1 + 1), 2):
            for c, d in combinations(range(R2 + 1), 2):
                if v1 + b > n - 1 or v2 + d > n - 1:
                    skipped += 1
                    continue
                total += ((-1) ** (a + b + c + d) * bump_pair_det(Side.D, a, b, R1)
                          * bump_pair_det(Side.U, c, d, R2) * bump_count(v1 + a, v1 + b, v2 + c, v2 + d))
        rhs = abs(total)
        out.append(CheckResult(f"P_{n}({R1},{v1};{R2},{v2})", lhs == rhs,
                               "" if lhs == rhs else f"det={lhs} expansion={rhs}",
                               {"count": lhs, "skipped_terms": skipped}))
    return out


LEMMA42_INSTANCES = (
    # kind, k, l, v1, v2, r
    ("plain", 1, 0, 0, 0, 2),
    ("a", 1, 0, 0, 0, 2),
    ("c", 1, 0, 0, 0, 2),
    ("ac", 1, 0, 0, 0, 2),
    ("plain", 0, 0, 1, 0, 1),
    ("plain", 2, 1, 1, 1, 3),
)


def _strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def _fmt(xs) -> str:
    import mpmath as mp

    return "[" + ", ".join(mp.nstr(x, 4) for x in xs) + "]"


def lemma42(instances=LEMMA42_INSTANCES, R_grid=(100, 200, 400, 800)) -> list[CheckResult]:
    """R |I - J| strictly decreasing along the grid, final below half the initial value."""
    import mpmath as mp

    from .hyperjacobi import integral_I, integral_J

    out = []
    for kind, k, l, v1, v2, r in instances:
        seq = []
        for R in R_grid:
            I = integral_I(kind, k, l, R + r, R, v1, v2)
            J = integral_J(kind, k, l, R + r, R, v1, v2, precision_target=mp.mpf("1e-20"))
            seq.append(R * abs(I.value - J.value))
        ok = _strictly_decreasing(seq) and seq[-1] < seq[0] / 2
        out.append(CheckResult(f"{kind}(k={k},l={l},v1={v1},v2={v2},r={r})", ok, f"R|I-J| = {_fmt(seq)}",
                               {"sequence": seq}))
    return out


def darboux_slope(v_max: int = 2, ns=(50, 100, 200, 400, 800), x=Fraction(1, 2), tol: float = 0.15) -> list[CheckResult]:
    """Log-log slope of the Darboux error over ``ns`` is -1.5 within ``tol``."""
    from .hyperjacobi import JacobiSpec, darboux
    from .numerics import loglog_slope

    out = []
    for v in range(v_max + 1):
        for k in range(v + 2):
            a, b = v + k + 1, k - v - 2
            errs = [darboux(JacobiSpec(n, a, b, x)).error_term.value for n in ns]
            slope = loglog_slope(ns, errs)
            out.append(CheckResult(f"(alpha,beta)=({a},{b})", abs(slope + 1.5) <= tol, f"slope = {slope:.4f}",
                                   {"slope": slope}))
    return out


def _endpoint_instances():
    from .asympt import EndpointProblem, catalog

    theta, zero = catalog("theta"), catalog("const", value=0)
    shift = catalog("pi_multiple", m=Fraction(-1, 2))
    h = lambda p, s: catalog("power_sqrt", p=Fraction(p), s=Fraction(s))  # noqa: E731
    laplace = {
        "S1(q=1,c=1)": EndpointProblem(1, theta, zero, h(Fraction(-1, 2), Fraction(1, 2)), 1),
        "Sa(q=1,c=0)": EndpointProblem(1, theta, shift, h(-1, 0), 1),
        "Sac(q=1,c=1)": EndpointProblem(1, theta, zero, h(Fraction(1, 2), Fraction(-1, 2)), 1),
    }
    fourier = {
        "S1(q=0,c=2)": EndpointProblem(0, theta, zero, h(Fraction(1, 2), Fraction(1, 2)), 1),
        "Sa(q=0,c=2)": EndpointProblem(0, theta, shift, h(1, 0), 1),
        "Sac(q=0,c=1)": EndpointProblem(0, theta, zero, h(Fraction(1, 2), Fraction(-1, 2)), 1),
    }
    return laplace, fourier


def laplace51(R_grid=(100, 200, 400), bound: float = 4.0) -> list[CheckResult]:
    """R^2 |quadrature - leading| stays within a factor ``bound`` along the grid."""
    from .asympt import endpoint_integral, laplace_endpoint_leading

    out = []
    for name, p in _endpoint_instances()[0].items():
        seq = []
        for R in R_grid:
            pr = p.at(R)
            seq.append(abs(endpoint_integral(pr).value - laplace_endpoint_leading(pr).value()) * R * R)
        ratio = max(seq) / min(seq) if min(seq) > 0 else float("inf")
        out.append(CheckResult(name, ratio < bound, f"R^2|rem| = {_fmt(seq)}, max/min = {float(ratio):.3f}",
                               {"sequence": seq}))
    return out


def fourier73(R_grid=(100, 200, 400)) -> list[CheckResult]:
    """R |quadrature - leading| strictly decreasing along the grid."""
    from .asympt import endpoint_integral, fourier_endpoint_leading

    out = []
    for name, p in _endpoint_instances()[1].items():
        seq = []
        for R in R_grid:
            pr = p.at(R)
            seq.append(abs(endpoint_integral(pr).value - fourier_endpoint_leading(pr).value()) * R)
        out.append(CheckResult(name, _strictly_decreasing(seq), f"R|rem| = {_fmt(seq)}", {"sequence": seq}))
    return out


def m_nu_leading_decay(R_grid=(50, 100, 200), r_max: int = 4, u_max: int = 3) -> list[CheckResult]:
    """|R^p M_nu(R + r, R) - leading integral| strictly decreasing along the grid."""
    import mpmath as mp

    from .asympt import M_NU_POWER, m_nu_leading_integral
    from .correlation import m_nu

    out = []
    for nu, p in M_NU_POWER.items():
        for r in range(r_max + 1):
            for u in range(2, u_max + 1):
                for v1 in range(u - 1):
                    v2 = u - 2 - v1
                    lead = m_nu_leading_integral(nu, r, u).value
                    seq = []
                    for R in R_grid:
                        x = m_nu(nu, R + r, R, v1, v2).value
                        seq.append(abs(mp.mpf(x.numerator) / x.denominator * mp.mpf(R) ** p - lead))
                    out.append(CheckResult(f"{nu}(r={r},v1={v1},v2={v2})", _strictly_decreasing(seq),
                                           f"deviation = {_fmt(seq)}", {"sequence": seq}))
    return out


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "quad-vs-factored": quad_vs_factored,
    "lgv-vs-brute": lgv_vs_brute,
    "eq212": eq212,
    "lemma42": lemma42,
    "darboux-slope": darboux_slope,
    "laplace51": laplace51,
    "fourier73": fourier73,
}


def run_suite(name: str) -> list[CheckResult]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ParameterError(f"unknown suite {name!r}; known: {sorted(SUITES)}", field="suite") from None
    return fn()
