"""Command-line front end.

Every subcommand emits a table (CSV with one header row, or one JSON document
with a ``records`` array). Records are sorted by their parameter tuple so that
identical configurations produce byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

import mpmath as mp

from . import numerics
from .errors import ParameterError, QuadromerError

OUTPUT_DIR_ENV = "QUADROMER_OUTPUT_DIR"

COLUMNS = {
    "count": ("region", "n", "method", "value_numerator", "value_denominator", "value_decimal"),
    "omega-b": None,  # filled below from correlation.CSV_COLUMNS
    "omega": None,
    "verify": ("suite", "check", "passed", "detail"),
    "isotropy": None,  # asympt.ISOTROPY_COLUMNS
    "dump-region": ("row", "col", "orientation", "half_weight_with"),
}


def _columns(command: str) -> tuple:
    if command in ("omega-b", "omega"):
        from .correlation import CSV_COLUMNS
        return CSV_COLUMNS
    if command == "isotropy":
        from .asympt import ISOTROPY_COLUMNS
        return ISOTROPY_COLUMNS
    return COLUMNS[command]


COLUMN_HELP = """\
output columns
  count        region, n, method, value_numerator, value_denominator, value_decimal
  omega-b      method, R1, v1, R2, v2, r, u, value_numerator, value_denominator,
  omega          float_value, error_estimate, flags
               (omega fills r, u and leaves the exact fields empty)
  verify       suite, check, passed, detail
  isotropy     r, u, radius2 (= r^2 + 3u^2), omega, error_estimate,
               omega_limit_integral, omega_theorem, ratio (= omega / omega_theorem),
               group_max_deviation (max/min - 1 within equal radius2), flags
  dump-region  row, col, orientation, half_weight_with (JSON output gives the full region)

exit codes: 0 ok, 2 bad parameter, 3 numerical tolerance or failed check, 4 budget exceeded

Options common to all commands may be given before or after the command name.

config file: flat "key = value" lines ('#' starts a comment); keys are the long
option names with '-' replaced by '_'. Command-line flags win over the file.
The only environment variable read is QUADROMER_OUTPUT_DIR, which relocates
relative --output paths.
"""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value', got {raw!r}", field=f"line {lineno}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParameterError(f"config line {lineno}: empty key", field=f"line {lineno}")
        out[key.replace("-", "_")] = value
    return out


def format_config_text(values: dict) -> str:
    return "".join(f"{k} = {values[k]}\n" for k in sorted(values))


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    output_format: str = "csv"
    dps: int = numerics.DEFAULT_DPS
    R_grid: tuple = ()

    def to_text(self) -> str:
        vals = {"command": self.command, "format": self.output_format, "dps": self.dps}
        if self.output_path:
            vals["output"] = self.output_path
        if self.R_grid:
            vals["R_grid"] = ",".join(map(str, self.R_grid))
        vals.update(self.parameters)
        return format_config_text(vals)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        vals = parse_config_text(text)
        try:
            command = vals.pop("command")
        except KeyError:
            raise ParameterError("config has no 'command' key", field="command") from None
        fmt = vals.pop("format", "csv")
        dps = int(vals.pop("dps", numerics.DEFAULT_DPS))
        out = vals.pop("output", None)
        grid = tuple(_int_list(vals.pop("R_grid"))) if "R_grid" in vals else ()
        return cls(command, vals, out, fmt, dps, grid)


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------

def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in str(s).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _pairs(s: str) -> list[tuple[int, int]]:
    out = []
    for item in str(s).split(","):
        try:
            a, b = item.split(":")
            out.append((int(a), int(b)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected r:u pairs like 2:4,7:1, got {item!r}") from None
    return out


def _suites(s: str) -> list[str]:
    from .suites import SUITES

    names = list(SUITES) if s == "all" else [x.strip() for x in s.split(",") if x.strip()]
    for n in names:
        if n not in SUITES:
            raise argparse.ArgumentTypeError(f"unknown suite {n!r}; choose from {', '.join(SUITES)} or 'all'")
    return names


def _add_region_args(p):
    p.add_argument("--region", choices=("pn", "quadromers", "bumps", "monomers-d", "monomers-du"), default="pn")
    p.add_argument("--n", type=int, required=False, default=None, help="side parameter of P_n")
    for name in ("R1", "v1", "R2", "v2", "k1", "k2", "l1", "l2", "a", "b", "c", "d"):
        p.add_argument(f"--{name}", type=int, default=None)


SHARED_DEFAULTS = {"config": None, "format": "csv", "output": None, "dps": numerics.DEFAULT_DPS, "workers": 1}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=argparse.SUPPRESS, help="flat key = value file; flags override it")
    shared.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS, help="output format (csv)")
    shared.add_argument("--output", "-o", default=argparse.SUPPRESS, help="output file (default stdout)")
    shared.add_argument("--dps", type=int, default=argparse.SUPPRESS, help=f"working decimal digits ({numerics.DEFAULT_DPS})")
    shared.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="process pool size for independent points (1)")
    parser = argparse.ArgumentParser(
        prog="quadromer",
        description="Exact tiling counts, boundary and center correlations of removed quadromers, and their asymptotics.",
        epilog=COLUMN_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[shared],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("count", help="exact weighted tiling count of a region", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter, parents=[shared])
    _add_region_args(p)
    p.add_argument("--method", choices=("tiler", "lgv", "both"), default="lgv")
    p.add_argument("--budget", type=int, default=None, help="tiler cell budget (default: plain 60, memo = cell count)")
    p.add_argument("--memo", action="store_true", help="memoized tiler")

    p = sub.add_parser("omega-b", help="exact boundary-influenced correlation", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter, parents=[shared])
    for name in ("R1", "v1", "R2", "v2"):
        p.add_argument(f"--{name}", type=_int_list, default=None, help="integer or comma list (required)")
    p.add_argument("--method", choices=("factored", "quadruple_sum"), default="factored")

    p = sub.add_parser("omega", help="center correlation by extrapolation in 1/R", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter, parents=[shared])
    p.add_argument("--r", type=_int_list, default=None, help="integer or comma list (required)")
    p.add_argument("--u", type=_int_list, default=None, help="integer or comma list (required)")
    p.add_argument("--R-grid", dest="R_grid", type=_int_list, default=None)

    p = sub.add_parser("verify", help="run named identity suites", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter, parents=[shared])
    p.add_argument("--suites", type=_suites, default=None, help="comma list of suites, or 'all' (required)")

    p = sub.add_parser("isotropy", help="extrapolated omega against the isotropic law", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter, parents=[shared])
    p.add_argument("--pairs", type=_pairs, default=None, help="r:u pairs, e.g. 2:4,7:1 (required)")
    p.add_argument("--R-grid", dest="R_grid", type=_int_list, default=None)

    p = sub.add_parser("dump-region", help="cells and weights of a region", epilog=COLUMN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter, parents=[shared])
    _add_region_args(p)
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        what = f"--region {args.region}" if hasattr(args, "region") else args.command
        raise ParameterError(f"{what} needs --{', --'.join(m.replace('_', '-') for m in missing)}", field=missing[0])
    return [getattr(args, n) for n in names]


def _region_spec(args):
    from .lattice import RegionSpec

    (n,) = _need(args, "n")
    kind = args.region
    if kind == "pn":
        return RegionSpec.plain(n), f"P_{n}"
    if kind == "quadromers":
        R1, v1, R2, v2 = _need(args, "R1", "v1", "R2", "v2")
        return RegionSpec.quadromers(n, R1, v1, R2, v2), f"P_{n}({R1},{v1};{R2},{v2})"
    if kind == "bumps":
        k1, k2, l1, l2 = _need(args, "k1", "k2", "l1", "l2")
        return RegionSpec.bumps(n, k1, k2, l1, l2), f"P_{n}[{k1},{k2};{l1},{l2}]"
    if kind == "monomers-d":
        v1, a, b, R2, v2 = _need(args, "v1", "a", "b", "R2", "v2")
        return RegionSpec.monomers_d(n, v1, a, b, R2, v2), f"P_{n}^[{a},{b}]({R2},{v2})"
    v1, a, b, v2, c, d = _need(args, "v1", "a", "b", "v2", "c", "d")
    return RegionSpec.monomers_du(n, v1, a, b, v2, c, d), f"P_{n}^[{a},{b}][{c},{d}]"


def _decimal(x: Fraction, digits: int = 25) -> str:
    return mp.nstr(mp.mpf(x.numerator) / x.denominator, digits)


def cmd_count(args) -> list[dict]:
    from .lattice import build_region
    from .lgv import lgv_tiling_count
    from .tiler import DEFAULT_BUDGET, count_weighted_tilings

    spec, label = _region_spec(args)
    region = build_region(spec)
    rows = []
    if args.method in ("tiler", "both"):
        budget = args.budget if args.budget is not None else (len(region.cells) if args.memo else DEFAULT_BUDGET)
        rows.append(("tiler", count_weighted_tilings(region, budget=budget, memo=args.memo).value))
    if args.method in ("lgv", "both"):
        rows.append(("lgv", lgv_tiling_count(region)))
    return [
        {"region": label, "n": args.n, "method": m, "value_numerator": v.numerator,
         "value_denominator": v.denominator, "value_decimal": _decimal(v)}
        for m, v in sorted(rows)
    ]


def _omega_b_job(job):
    from .correlation import omega_b_record

    return omega_b_record(*job)


def _pool_map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_omega_b(args) -> list[dict]:
    from .correlation import record_row, sort_records

    _need(args, "R1", "v1", "R2", "v2")
    jobs = [(R1, v1, R2, v2, args.method) for R1, v1, R2, v2 in product(args.R1, args.v1, args.R2, args.v2)]
    return [record_row(r) for r in sort_records(_pool_map(_omega_b_job, jobs, args.workers))]


def cmd_omega(args) -> list[dict]:
    from .correlation import DEFAULT_R_GRID, omega_center, record_row, sort_records

    _need(args, "r", "u")
    grid = args.R_grid or list(DEFAULT_R_GRID)
    recs = [omega_center(r, u, grid, args.workers) for r, u in product(args.r, args.u)]
    return [record_row(r) for r in sort_records(recs)]


def cmd_verify(args) -> list[dict]:
    from .suites import run_suite

    _need(args, "suites")
    rows = []
    for name in sorted(set(args.suites)):
        for res in run_suite(name):
            rows.append({"suite": name, "check": res.name, "passed": res.passed, "detail": res.detail})
    return sorted(rows, key=lambda d: (d["suite"], d["check"]))


def cmd_isotropy(args) -> list[dict]:
    from .asympt import isotropy_report

    _need(args, "pairs")
    return [row.as_dict() for row in isotropy_report(args.pairs, args.R_grid, args.workers)]


def cmd_dump_region(args):
    from .lattice import build_region, region_to_dict

    spec, _ = _region_spec(args)
    region = build_region(spec)
    partner = {}
    for pos in region.half_weight_positions:
        partner[pos.cell_a] = pos.cell_b
        partner[pos.cell_b] = pos.cell_a
    rows = []
    for c in region.sorted_cells():
        other = partner.get(c)
        rows.append({"row": c.row, "col": c.col, "orientation": c.orientation.value,
                     "half_weight_with": "" if other is None else f"{other.row}:{other.col}"})
    return rows, region_to_dict(region)


COMMANDS = {
    "count": cmd_count,
    "omega-b": cmd_omega_b,
    "omega": cmd_omega,
    "verify": cmd_verify,
    "isotropy": cmd_isotropy,
}


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def render(command: str, rows: list[dict], fmt: str, extra: dict | None = None) -> str:
    cols = list(_columns(command))
    if fmt == "json":
        doc = {"command": command, "columns": cols, "records": rows}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in cols})
    return buf.getvalue()


def _output_path(path: str | None) -> Path | None:
    if not path:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _apply_config(parser: argparse.ArgumentParser, argv) -> dict:
    """Install config-file values as defaults; returns the values for the shared options."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        text = Path(known.config).read_text()
    except OSError as exc:
        raise ParameterError(f"cannot read config {known.config}: {exc}", field="config") from None
    values = parse_config_text(text)
    values.pop("command", None)
    values.pop("config", None)
    shared = {k: values.pop(k) for k in list(values) if k in SHARED_DEFAULTS}
    for k in ("dps", "workers"):
        if k in shared:
            try:
                shared[k] = int(shared[k])
            except ValueError:
                raise ParameterError(f"config {k} must be an integer, got {shared[k]!r}", field=k) from None
    if shared.get("format", "csv") not in ("csv", "json"):
        raise ParameterError(f"config format must be csv or json, got {shared['format']!r}", field="format")
    parser.set_defaults(**values)
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        for sp in action.choices.values():
            sp.set_defaults(**values)
    return shared


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        shared = {**SHARED_DEFAULTS, **_apply_config(parser, argv)}
        args = parser.parse_args(argv)
        for k, v in shared.items():
            if not hasattr(args, k):
                setattr(args, k, v)
        if args.dps < 20:
            raise ParameterError("--dps must be at least 20", field="dps")
        numerics.set_precision(args.dps)
        extra = None
        if args.command == "dump-region":
            rows, full = cmd_dump_region(args)
            extra = {"region": full}
        else:
            rows = COMMANDS[args.command](args)
        text = render(args.command, rows, args.format, extra)
        path = _output_path(args.output)
        if path is None:
            sys.stdout.write(text)
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        if args.command == "verify" and not all(r["passed"] for r in rows):
            failed = sum(not r["passed"] for r in rows)
            print(f"quadromer: {failed} check(s) failed", file=sys.stderr)
            return 3
        return 0
    except QuadromerError as exc:
        where = f" [{exc.field}]" if getattr(exc, "field", None) else ""
        print(f"quadromer: error{where}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
