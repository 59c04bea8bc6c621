"""Dimer coverings as non-intersecting lattice paths, LGV matrices and exact determinants.

For a lattice direction d every unit triangle has exactly one side parallel
to d. The lattice edges parallel to d ("segments") become the points of a
square grid; a rhombus with two sides parallel to d joins its two d-sides and
becomes a unit step. Segments with a region cell on one side only are path
endpoints.

Grid coordinates:

* ``sw_ne``: segment from vertex (i, j) to (i, j+1) -> point (i + j, -j);
  steps go east and southeast in the plane.
* ``se_nw``: segment from (i+1, j) to (i, j+1) -> point (i, j);
  steps go east and northeast.

Both map to unit steps (1, 0) and (0, 1).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, lcm
from typing import Mapping, Sequence

from .errors import EncodingError, ParameterError
from .lattice import HALF, Region, TriCell

Point = tuple[int, int]


class Direction(str, enum.Enum):
    SW_NE = "sw_ne"
    SE_NW = "se_nw"


@dataclass
class PathProblem:
    starts: list[Point]
    ends: list[Point]
    edge_weights: dict[tuple[Point, Point], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.starts) != len(self.ends):
            raise EncodingError(f"{len(self.starts)} starting points but {len(self.ends)} ending points")
        bad = [w for w in self.edge_weights.values() if w not in (1, HALF)]
        if bad:
            raise EncodingError(f"edge weights must be 1 or 1/2, found {bad[0]}")


# cell -> (grid point of its d-side, True if paths leave the cell through it)
def _d_side(cell: TriCell, direction: Direction) -> tuple[Point, bool]:
    i, j = cell.i, cell.row
    if direction is Direction.SW_NE:
        if cell.is_up:  # left side, entry
            return (i + j, -j), False
        return (i + 1 + j, -j), True  # right side of down(i, j), exit
    if cell.is_up:  # right side, exit
        return (i, j), True
    return (i, j), False  # left side of down(i, j), entry


def _path_cells(cell: TriCell, direction: Direction) -> list[TriCell]:
    """Partners of an entry cell in rhombi parallel to ``direction``."""
    i, j = cell.i, cell.row
    if direction is Direction.SW_NE:  # entry cells are up cells
        return [TriCell.down(i, j), TriCell.down(i, j - 1)]
    return [TriCell.up(i + 1, j), TriCell.up(i, j + 1)]


def _encode(region: Region, direction: Direction):
    entry: dict[Point, TriCell] = {}
    exit_: dict[Point, TriCell] = {}
    for c in region.cells:
        p, leaving = _d_side(c, direction)
        (exit_ if leaving else entry)[p] = c
    edges: dict[tuple[Point, Point], Fraction] = {}
    step_positions = set()
    for p, c in entry.items():
        for d in _path_cells(c, direction):
            if d in region.cells:
                q, _ = _d_side(d, direction)
                edges[(p, q)] = region.weight(c, d)
                step_positions.add(frozenset((c, d)))
    # a half-weight rhombus that is not a path step would drop out of the weight
    for pos in region.half_weight_positions:
        if pos.cells not in step_positions:
            raise EncodingError(f"half-weight position {pos.cell_a}/{pos.cell_b} is not parallel to {direction.value}")
    starts = sorted(p for p in entry if p not in exit_)
    ends = sorted(p for p in exit_ if p not in entry)
    return starts, ends, edges


def encode_path_problem(region: Region, direction: Direction | str = Direction.SW_NE) -> PathProblem:
    """Translate the dimer coverings of ``region`` into a non-intersecting path problem.

    Starting and ending points are listed in sorted grid order; only |det| is
    ever used, so the ordering is immaterial.
    """
    return PathProblem(*_encode(region, Direction(direction)))


def count_paths_between(p: Point, q: Point, weights: Mapping | None = None, default=1) -> Fraction:
    """Weighted count of lattice paths p -> q with unit steps (1, 0) and (0, 1).

    ``weights`` maps a step ``(a, b)`` to its weight; steps absent from it get
    ``default`` (``None`` means the step does not exist).
    """
    weights = weights or {}
    dx, dy = q[0] - p[0], q[1] - p[1]
    if dx < 0 or dy < 0:
        return Fraction(0)
    table = [[Fraction(0)] * (dy + 1) for _ in range(dx + 1)]
    table[0][0] = Fraction(1)
    for x in range(dx + 1):
        for y in range(dy + 1):
            if x == y == 0:
                continue
            here = (p[0] + x, p[1] + y)
            acc = Fraction(0)
            for sx, sy in ((1, 0), (0, 1)):
                if x - sx < 0 or y - sy < 0:
                    continue
                src = (here[0] - sx, here[1] - sy)
                w = weights.get((src, here), default)
                if w is not None and table[x - sx][y - sy]:
                    acc += w * table[x - sx][y - sy]
            table[x][y] = acc
    return table[dx][dy]


def path_matrix(problem: PathProblem) -> list[list[Fraction]]:
    """Matrix of weighted path counts from each start to each end, restricted to the problem's edges."""
    succ: dict[Point, list[tuple[Point, Fraction]]] = {}
    for (a, b), w in problem.edge_weights.items():
        succ.setdefault(a, []).append((b, w))
    nodes = set(succ) | {b for lst in succ.values() for b, _ in lst} | set(problem.starts) | set(problem.ends)
    order = sorted(nodes, key=lambda t: t[0] + t[1])  # every step raises the coordinate sum
    col = {e: k for k, e in enumerate(problem.ends)}
    rows = []
    for s in problem.starts:
        acc = {s: Fraction(1)}
        row = [Fraction(0)] * len(problem.ends)
        for node in order:
            val = acc.get(node)
            if not val:
                continue
            if node in col:
                row[col[node]] += val
            for b, w in succ.get(node, ()):
                acc[b] = acc.get(b, Fraction(0)) + val * w
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# exact determinants
# ---------------------------------------------------------------------------

def _bareiss(m: list[list[int]]) -> int:
    a = [row[:] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_exact(m: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a square rational matrix (fraction-free Bareiss after
    clearing each row's denominators)."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ParameterError("determinant needs a square matrix")
    if n == 0:
        return Fraction(1)
    scale = 1
    ints = []
    for row in m:
        row = [Fraction(x) for x in row]
        d = 1
        for x in row:
            d = lcm(d, x.denominator)
        scale *= d
        ints.append([x.numerator * (d // x.denominator) for x in row])
    return Fraction(_bareiss(ints), scale)


def det_cofactor(m: Sequence[Sequence]) -> Fraction:
    """Determinant by first-row cofactor expansion; O(n!) reference oracle."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(m[0][0])
    total = Fraction(0)
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * Fraction(m[0][j]) * det_cofactor(minor)
    return total


def lgv_tiling_count(region: Region, direction: Direction | str = Direction.SW_NE) -> Fraction:
    """Weighted count of dimer coverings as |det| of the LGV matrix."""
    starts, ends, edges = _encode(region, Direction(direction))
    if len(starts) != len(ends):
        return Fraction(0)  # paths cannot pair up, so no covering exists
    if not starts:
        # every cell pairs with its neighbour across its d-side: one covering of weight 1
        return Fraction(1)
    return abs(det_exact(path_matrix(PathProblem(starts, ends, edges))))


# ---------------------------------------------------------------------------
# closed forms for the 2 x 2 minors and Laplace expansion
# ---------------------------------------------------------------------------

class Side(str, enum.Enum):
    D = "D_side"
    U = "U_side"


def bump_pair_det(kind: Side | str, i: int, j: int, R: int) -> Fraction:
    """Closed form of the 2 x 2 minor of path counts from the two free segments of
    a removed quadromer to boundary segments i and j."""
    kind = Side(kind)
    if R < 1 or not (0 <= i <= R and 0 <= j <= R):
        raise ParameterError(f"need R >= 1 and 0 <= i, j <= R, got i={i}, j={j}, R={R}")
    f = factorial
    if kind is Side.D:
        return Fraction(2 * R * (j - i) * f(R + i - 1) * f(R + j - 1), f(2 * i) * f(R - i) * f(2 * j) * f(R - j))
    return (
        2 * R * (Fraction(R) - HALF) * (Fraction(R) + HALF)
        * Fraction((j - i) * f(R + i - 1) * f(R + j - 1), f(2 * i + 1) * f(R - i) * f(2 * j + 1) * f(R - j))
    )


def bump_pair_matrix(kind: Side | str, i: int, j: int, R: int) -> list[list[Fraction]]:
    """The same 2 x 2 matrix assembled from path counts on the open grid.

    The two quadromer segments sit at (0, 0) and (-1, 1). Boundary segment k is
    at (R-1-k, 2k) on the down side and (R-1-k, 2k+1) on the up side, where
    the last (0, 1) step into it crosses a half-weight rhombus.
    """
    kind = Side(kind)
    if kind is Side.D:
        target = lambda k: (R - 1 - k, 2 * k)
        weights = {}
    else:
        target = lambda k: (R - 1 - k, 2 * k + 1)
        weights = {((R - 1 - k, 2 * k), (R - 1 - k, 2 * k + 1)): HALF for k in range(R + 1)}
    starts = [(0, 0), (-1, 1)]
    return [[count_paths_between(s, target(k), weights) for k in (i, j)] for s in starts]


@dataclass(frozen=True)
class LaplaceTerm:
    cols: tuple[int, int]
    sign: int
    minor2: Fraction
    complementary_minor: Fraction

    @property
    def value(self) -> Fraction:
        return self.sign * self.minor2 * self.complementary_minor


def laplace_expand(m: Sequence[Sequence], rows: tuple[int, int], cols: Sequence[int] | None = None) -> list[LaplaceTerm]:
    """Expansion of det(m) along two rows; ``cols`` restricts the column pairs."""
    n = len(m)
    r1, r2 = rows
    if n < 2 or r1 == r2 or not (0 <= r1 < n and 0 <= r2 < n):
        raise ParameterError(f"invalid row pair {rows} for a {n} x {n} matrix")
    r1, r2 = sorted(rows)
    pool = range(n) if cols is None else sorted(cols)
    rest_rows = [r for r in range(n) if r not in (r1, r2)]
    terms = []
    for c1, c2 in combinations(pool, 2):
        minor2 = det_exact([[m[r1][c1], m[r1][c2]], [m[r2][c1], m[r2][c2]]])
        rest_cols = [c for c in range(n) if c not in (c1, c2)]
        comp = det_exact([[m[r][c] for c in rest_cols] for r in rest_rows]) if minor2 else Fraction(0)
        sign = -1 if (r1 + r2 + c1 + c2) % 2 else 1
        terms.append(LaplaceTerm((c1, c2), sign, minor2, comp))
    return terms


def binomial(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0
