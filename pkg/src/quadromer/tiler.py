"""Brute-force weighted dimer counting; the ground truth for every exact identity."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetError
from .lattice import Region

DEFAULT_BUDGET = 60


@dataclass(frozen=True)
class TilingCount:
    value: Fraction
    tilings_enumerated: int


def _adjacency(region: Region):
    cells = region.sorted_cells()
    index = {c: k for k, c in enumerate(cells)}
    nbrs = []
    for c in cells:
        row = []
        for d in c.neighbors():
            k = index.get(d)
            if k is not None:
                row.append((k, region.weight(c, d)))
        nbrs.append(row)
    return cells, nbrs


def count_weighted_tilings(region: Region, budget: int = DEFAULT_BUDGET, memo: bool = False) -> TilingCount:
    """Sum over dimer coverings of the product of position weights.

    Depth-first: always match the lowest-indexed uncovered cell. With
    ``memo=True`` partial results are cached by the covered-cell bitmask,
    which is what makes regions of a few hundred cells feasible.
    """
    n_cells = len(region.cells)
    if n_cells > budget:
        raise BudgetError(f"region has {n_cells} cells, enumeration budget is {budget}")
    ups = sum(c.is_up for c in region.cells)
    if 2 * ups != n_cells:
        return TilingCount(Fraction(0), 0)
    if n_cells == 0:
        return TilingCount(Fraction(1), 1)
    _, nbrs = _adjacency(region)
    full = (1 << n_cells) - 1

    def first_free(mask):
        return ((~mask) & (mask + 1)).bit_length() - 1

    if memo:
        cache: dict[int, tuple[Fraction, int]] = {}

        def go(mask):
            if mask == full:
                return Fraction(1), 1
            hit = cache.get(mask)
            if hit is not None:
                return hit
            k = first_free(mask)
            total, count = Fraction(0), 0
            for j, w in nbrs[k]:
                bit = 1 << j
                if not mask & bit:
                    t, c = go(mask | (1 << k) | bit)
                    total += w * t
                    count += c
            cache[mask] = (total, count)
            return total, count

        value, count = go(0)
        return TilingCount(value, count)

    # plain enumeration: accumulate the weight of each complete tiling
    acc = [Fraction(0), 0]

    def walk(mask, weight):
        if mask == full:
            acc[0] += weight
            acc[1] += 1
            return
        k = first_free(mask)
        for j, w in nbrs[k]:
            bit = 1 << j
            if not mask & bit:
                walk(mask | (1 << k) | bit, weight * w)

    walk(0, Fraction(1))
    return TilingCount(acc[0], acc[1])
