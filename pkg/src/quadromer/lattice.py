"""Triangular-lattice regions: the base region P_n and its punctured variants.

Coordinates
-----------
Lattice vertices are integer pairs ``(i, j)`` standing for ``i*e1 + j*e2`` with
``e1 = (1, 0)`` and ``e2 = (1/2, sqrt(3)/2)``; ``j`` indexes horizontal lattice
lines. The strip between lines ``j`` and ``j + 1`` holds

* ``up(i, j)``   with corners (i, j), (i+1, j), (i, j+1)      -> TriCell(j, 2i, up)
* ``down(i, j)`` with corners (i+1, j), (i+1, j+1), (i, j+1)  -> TriCell(j, 2i+1, down)

so within a row up and down cells alternate with integer ``col`` (even = up).

The origin O is the vertex (0, 0). The eastern boundary of P_n is the zig-zag
L_u going up from O (alternately NE, NW), the unit segment O O' with
O' = (0, -1), and the zig-zag L_d going down from O' (alternately SE, SW).
Bumps on both zig-zags are labelled 0, 1, ... starting next to O.

Quadromer placement, as pure functions of (R, v):

* D(R, v): down-pointing, horizontal side on line j = -2v-2 centred at
  x = -R, i.e. the quadromer around ``up(v-R+1, -2v-3)``;
* U(R, v): up-pointing, horizontal side on line j = 2v centred at x = -R,
  i.e. the quadromer around ``down(-R-1-v, 2v)``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import ParameterError

HALF = Fraction(1, 2)


class Orientation(str, enum.Enum):
    UP = "up"
    DOWN = "down"

    @property
    def opposite(self) -> "Orientation":
        return Orientation.DOWN if self is Orientation.UP else Orientation.UP


@dataclass(frozen=True, order=True)
class TriCell:
    row: int
    col: int
    orientation: Orientation

    def __post_init__(self):
        want = Orientation.UP if self.col % 2 == 0 else Orientation.DOWN
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        if self.orientation is not want:
            raise ParameterError(f"cell ({self.row}, {self.col}) must be {want.value}", cell=self)

    @classmethod
    def up(cls, i: int, j: int) -> "TriCell":
        return cls(j, 2 * i, Orientation.UP)

    @classmethod
    def down(cls, i: int, j: int) -> "TriCell":
        return cls(j, 2 * i + 1, Orientation.DOWN)

    @property
    def i(self) -> int:
        return self.col // 2

    @property
    def is_up(self) -> bool:
        return self.orientation is Orientation.UP

    def neighbors(self) -> tuple["TriCell", "TriCell", "TriCell"]:
        r, c = self.row, self.col
        if self.is_up:
            return (_cell(r, c - 1), _cell(r, c + 1), _cell(r - 1, c + 1))
        return (_cell(r, c - 1), _cell(r, c + 1), _cell(r + 1, c - 1))

    def vertices(self) -> tuple[tuple[int, int], ...]:
        """Corners in counter-clockwise order."""
        i, j = self.i, self.row
        if self.is_up:
            return ((i, j), (i + 1, j), (i, j + 1))
        return ((i + 1, j), (i + 1, j + 1), (i, j + 1))

    def centroid(self) -> tuple[Fraction, Fraction]:
        i, j = self.i, self.row
        t = Fraction(1, 3) if self.is_up else Fraction(2, 3)
        return (i + t, j + t)

    def as_list(self) -> list:
        return [self.row, self.col, self.orientation.value]


def _cell(row: int, col: int) -> TriCell:
    return TriCell(row, col, Orientation.UP if col % 2 == 0 else Orientation.DOWN)


def adjacent(a: TriCell, b: TriCell) -> bool:
    return b in a.neighbors()


@dataclass(frozen=True, order=True)
class DimerPos:
    """A rhombus position; ``cell_a`` is the up cell, ``cell_b`` the down cell."""

    cell_a: TriCell
    cell_b: TriCell
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        a, b = self.cell_a, self.cell_b
        if not a.is_up:
            a, b = b, a
            object.__setattr__(self, "cell_a", a)
            object.__setattr__(self, "cell_b", b)
        if a.orientation is b.orientation or not adjacent(a, b):
            raise ParameterError(f"cells {a} and {b} do not form a rhombus")
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight not in (1, HALF):
            raise ParameterError(f"dimer weight must be 1 or 1/2, got {self.weight}")

    @property
    def cells(self) -> frozenset[TriCell]:
        return frozenset((self.cell_a, self.cell_b))


@dataclass(frozen=True)
class Quadromer:
    apex_cell: TriCell
    orientation: Orientation
    cells: tuple[TriCell, ...]

    def __post_init__(self):
        if len(set(self.cells)) != 4:
            raise ParameterError("a quadromer has four distinct cells")
        ups = sum(c.is_up for c in self.cells)
        if ups != (3 if self.orientation is Orientation.UP else 1):
            raise ParameterError(f"orientation census {ups} up cells does not match {self.orientation.value}")


def quadromer_around(center: TriCell) -> Quadromer:
    """The side-two triangle made of ``center`` and its three neighbours."""
    return Quadromer(center, center.orientation.opposite, (center,) + center.neighbors())


def down_quadromer(R: int, v: int) -> Quadromer:
    return quadromer_around(TriCell.up(v - R + 1, -2 * v - 3))


def up_quadromer(R: int, v: int) -> Quadromer:
    return quadromer_around(TriCell.down(-R - 1 - v, 2 * v))


def ld_bump_quadromer(k: int) -> Quadromer:
    return quadromer_around(TriCell.up(k, -2 - 2 * k))


def lu_bump_quadromer(l: int) -> Quadromer:
    return quadromer_around(TriCell.down(-l - 1, 2 * l))


def ld_boundary_monomer(k: int) -> TriCell:
    """The cell of P_n carrying the L_d segment of bump ``k``."""
    return TriCell.down(k, -3 - 2 * k)


def lu_boundary_monomer(l: int) -> TriCell:
    """The cell of P_n carrying the L_u segment of bump ``l``."""
    return TriCell.up(-l - 1, 2 * l + 1)


# ---------------------------------------------------------------------------
# the base region
# ---------------------------------------------------------------------------

def pn_boundary(n: int) -> list[tuple[int, int]]:
    """Corner vertices of P_n, counter-clockwise, starting at O."""
    pts = [(0, 0)]
    for k in range(n):
        pts += [(-k, 2 * k + 1), (-k - 1, 2 * k + 2)]
    pts += [(-2 * n, 2 * n), (-2 * n, -1), (0, -2 * n - 1), (n, -2 * n - 1)]
    ld = [(0, -1)]
    for k in range(n):
        ld += [(k + 1, -2 - 2 * k), (k + 1, -3 - 2 * k)]
    pts += ld[::-1][1:]
    return pts


def _inside(pt, poly) -> bool:
    x, y = pt
    inside = False
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * Fraction(x2 - x1, y2 - y1)
            if x < xc:
                inside = not inside
    return inside


@lru_cache(maxsize=64)
def pn_cells(n: int) -> frozenset[TriCell]:
    poly = pn_boundary(n)
    cells = set()
    for j in range(-2 * n - 2, 2 * n + 1):
        for i in range(-2 * n - 2 - abs(j), n + 2 + abs(j)):
            for c in (TriCell.up(i, j), TriCell.down(i, j)):
                if _inside(c.centroid(), poly):
                    cells.add(c)
    return frozenset(cells)


def pn_half_weight_positions(n: int) -> frozenset[DimerPos]:
    """The n rhombi filling the notches of L_u, each of weight 1/2."""
    return frozenset(
        DimerPos(TriCell.up(-k - 1, 2 * k + 1), TriCell.down(-k - 1, 2 * k), HALF) for k in range(n)
    )


# ---------------------------------------------------------------------------
# removals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadromerRemoval:
    kind: str  # "D" (down-pointing) or "U" (up-pointing)
    R: int
    v: int

    def to_dict(self):
        return {"type": "quadromer", "kind": self.kind, "R": self.R, "v": self.v}


@dataclass(frozen=True)
class BumpRemoval:
    side: str  # "d" (L_d) or "u" (L_u)
    index: int

    def to_dict(self):
        return {"type": "bump", "side": self.side, "index": self.index}


@dataclass(frozen=True)
class MonomerRemoval:
    side: str
    index: int

    def to_dict(self):
        return {"type": "monomer", "side": self.side, "index": self.index}


Removal = QuadromerRemoval | BumpRemoval | MonomerRemoval


def removal_from_dict(d: dict) -> Removal:
    t = d.get("type")
    if t == "quadromer":
        return QuadromerRemoval(d["kind"], int(d["R"]), int(d["v"]))
    if t == "bump":
        return BumpRemoval(d["side"], int(d["index"]))
    if t == "monomer":
        return MonomerRemoval(d["side"], int(d["index"]))
    raise ParameterError(f"unknown removal type {t!r}", field="type")


@dataclass(frozen=True)
class RegionSpec:
    n: int
    removals: tuple = ()

    @classmethod
    def plain(cls, n: int) -> "RegionSpec":
        return cls(n)

    @classmethod
    def quadromers(cls, n: int, R1: int, v1: int, R2: int, v2: int) -> "RegionSpec":
        """P_n(R1, v1; R2, v2)."""
        return cls(n, (QuadromerRemoval("D", R1, v1), QuadromerRemoval("U", R2, v2)))

    @classmethod
    def bumps(cls, n: int, k1: int, k2: int, l1: int, l2: int) -> "RegionSpec":
        """P_n[k1, k2; l1, l2]."""
        for name, lo, hi in (("k", k1, k2), ("l", l1, l2)):
            if not lo < hi:
                raise ParameterError(f"need {name}1 < {name}2, got {lo}, {hi}", field=name)
        return cls(n, (BumpRemoval("d", k1), BumpRemoval("d", k2), BumpRemoval("u", l1), BumpRemoval("u", l2)))

    @classmethod
    def monomers_d(cls, n: int, v1: int, a: int, b: int, R2: int, v2: int) -> "RegionSpec":
        """P_n^{[a,b]}(R2, v2): U(R2, v2) removed plus the L_d cells of
        segments a, b counted from bump v1."""
        return cls(n, (MonomerRemoval("d", v1 + a), MonomerRemoval("d", v1 + b), QuadromerRemoval("U", R2, v2)))

    @classmethod
    def monomers_du(cls, n: int, v1: int, a: int, b: int, v2: int, c: int, d: int) -> "RegionSpec":
        """P_n^{[a,b][c,d]}: two L_d cells and two L_u cells removed."""
        return cls(
            n,
            (
                MonomerRemoval("d", v1 + a), MonomerRemoval("d", v1 + b),
                MonomerRemoval("u", v2 + c), MonomerRemoval("u", v2 + d),
            ),
        )

    def to_dict(self):
        return {"n": self.n, "removals": [r.to_dict() for r in self.removals]}

    @classmethod
    def from_dict(cls, d: dict) -> "RegionSpec":
        return cls(int(d["n"]), tuple(removal_from_dict(r) for r in d.get("removals", ())))


@dataclass(frozen=True)
class Region:
    cells: frozenset
    half_weight_positions: frozenset = frozenset()
    meta: RegionSpec | None = None

    def __post_init__(self):
        for pos in self.half_weight_positions:
            if not pos.cells <= self.cells:
                raise ParameterError("half-weight position leaves the region", cell=pos.cell_a)

    def weight(self, a: TriCell, b: TriCell) -> Fraction:
        pos = DimerPos(a, b, HALF)
        return HALF if pos in self.half_weight_positions else Fraction(1)

    def __len__(self):
        return len(self.cells)

    def __contains__(self, cell):
        return cell in self.cells

    def sorted_cells(self) -> list[TriCell]:
        return sorted(self.cells)

    @property
    def n(self):
        return self.meta.n if self.meta else None

    def with_weights(self, half_weight_positions) -> "Region":
        return Region(self.cells, frozenset(half_weight_positions), self.meta)


def _removal_cells(rem: Removal, n: int, base: frozenset) -> list[TriCell]:
    if isinstance(rem, QuadromerRemoval):
        if rem.R < 1 or rem.v < 0:
            raise ParameterError(f"quadromer needs R >= 1 and v >= 0, got R={rem.R}, v={rem.v}", field="R/v")
        if rem.kind == "D":
            q = down_quadromer(rem.R, rem.v)
        elif rem.kind == "U":
            q = up_quadromer(rem.R, rem.v)
        else:
            raise ParameterError(f"quadromer kind must be 'D' or 'U', got {rem.kind!r}", field="kind")
        for c in q.cells:
            if c not in base:
                raise ParameterError(f"quadromer {rem.kind}({rem.R},{rem.v}) does not fit in P_{n}", cell=c)
        return list(q.cells)
    if rem.side not in ("d", "u"):
        raise ParameterError(f"side must be 'd' or 'u', got {rem.side!r}", field="side")
    if not 0 <= rem.index <= n - 1:
        raise ParameterError(f"bump index must lie in [0, {n - 1}], got {rem.index}", field="index")
    if isinstance(rem, BumpRemoval):
        q = ld_bump_quadromer(rem.index) if rem.side == "d" else lu_bump_quadromer(rem.index)
        inside = [c for c in q.cells if c in base]
        assert len(inside) == 3
        return inside
    return [ld_boundary_monomer(rem.index) if rem.side == "d" else lu_boundary_monomer(rem.index)]


def build_region(spec: RegionSpec) -> Region:
    """Build P_n with the removals of ``spec`` applied."""
    if not isinstance(spec.n, int) or spec.n < 1:
        raise ParameterError(f"n must be a positive integer, got {spec.n!r}", field="n")
    base = pn_cells(spec.n)
    removed: set[TriCell] = set()
    for rem in spec.removals:
        for c in _removal_cells(rem, spec.n, base):
            if c in removed:
                raise ParameterError(f"removal {rem} overlaps an earlier removal", cell=c)
            removed.add(c)
    cells = base - removed
    half = frozenset(p for p in pn_half_weight_positions(spec.n) if p.cells <= cells)
    return Region(frozenset(cells), half, spec)


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------

def _boundary_edges(cells: frozenset) -> list[tuple]:
    out = []
    for c in cells:
        vs = c.vertices()
        # edge k of the ccw vertex list pairs with this neighbour
        across = _edge_neighbors(c)
        for k in range(3):
            if across[k] not in cells:
                out.append((vs[k], vs[(k + 1) % 3]))
    return out


def _edge_neighbors(c: TriCell):
    i, j = c.i, c.row
    if c.is_up:
        return (TriCell.down(i, j - 1), TriCell.down(i, j), TriCell.down(i - 1, j))
    return (TriCell.up(i + 1, j), TriCell.up(i, j + 1), TriCell.up(i, j))


def boundary_cycles(region: Region) -> list[list[tuple[int, int]]]:
    """Boundary as closed vertex cycles, each traversed with the region on the left."""
    edges = _boundary_edges(region.cells)
    out_of: dict = {}
    for e in edges:
        out_of.setdefault(e[0], []).append(e)
    for lst in out_of.values():
        lst.sort()
    used = set()
    cycles = []
    for start in sorted(edges):
        if start in used:
            continue
        cyc = []
        e = start
        while e not in used:
            used.add(e)
            cyc.append(e[0])
            nxt = [f for f in out_of[e[1]] if f not in used]
            if not nxt:
                break
            e = nxt[0]
        cycles.append(cyc)
    return cycles


@dataclass(frozen=True)
class RegionStats:
    up_count: int
    down_count: int
    half_weight_count: int
    boundary_trace: list = field(default_factory=list)


def region_stats(region: Region) -> RegionStats:
    ups = sum(c.is_up for c in region.cells)
    return RegionStats(ups, len(region.cells) - ups, len(region.half_weight_positions), boundary_cycles(region))


def region_to_dict(region: Region) -> dict:
    return {
        "spec": region.meta.to_dict() if region.meta else None,
        "cells": [c.as_list() for c in region.sorted_cells()],
        "half_weight_positions": [
            [p.cell_a.as_list(), p.cell_b.as_list()] for p in sorted(region.half_weight_positions)
        ],
    }


def region_from_dict(d: dict) -> Region:
    cells = frozenset(TriCell(r, c, Orientation(o)) for r, c, o in d["cells"])
    half = frozenset(DimerPos(_cell(*a[:2]), _cell(*b[:2]), HALF) for a, b in d["half_weight_positions"])
    meta = RegionSpec.from_dict(d["spec"]) if d.get("spec") else None
    return Region(cells, half, meta)


def dump_region_json(region: Region) -> str:
    return json.dumps(region_to_dict(region), indent=1, sort_keys=True)


def region_from_cells(cells: Iterable[TriCell], half_weight: Iterable[tuple] = ()) -> Region:
    """Ad hoc region (not derived from P_n), mainly for tests."""
    cells = frozenset(cells)
    return Region(cells, frozenset(DimerPos(a, b, HALF) for a, b in half_weight))


def admissible_quadromer_params(n: int) -> Iterator[tuple[int, int, int, int]]:
    """All (R1, v1, R2, v2) for which P_n(R1, v1; R2, v2) can be built."""
    base = pn_cells(n)
    for R1 in range(1, 2 * n + 2):
        for v1 in range(0, n + 1):
            if not all(c in base for c in down_quadromer(R1, v1).cells):
                continue
            for R2 in range(1, 2 * n + 2):
                for v2 in range(0, n + 1):
                    q = up_quadromer(R2, v2).cells
                    if all(c in base for c in q) and not set(q) & set(down_quadromer(R1, v1).cells):
                        yield (R1, v1, R2, v2)
