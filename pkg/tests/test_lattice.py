import json

import pytest
from hypothesis import given, strategies as st

from quadromer.errors import ParameterError
from quadromer.lattice import (
    BumpRemoval, Orientation, RegionSpec, TriCell, admissible_quadromer_params, adjacent, boundary_cycles,
    build_region, down_quadromer, dump_region_json, lu_bump_quadromer, ld_bump_quadromer,
    pn_cells, quadromer_around, region_from_dict, region_stats, region_to_dict, up_quadromer,
)
from quadromer.tiler import count_weighted_tilings

cells = st.builds(lambda r, c: TriCell(r, c, Orientation.UP if c % 2 == 0 else Orientation.DOWN),
                  st.integers(-50, 50), st.integers(-100, 100))


@given(cells)
def test_three_distinct_neighbours_of_opposite_orientation(c):
    nb = c.neighbors()
    assert len(set(nb)) == 3
    for d in nb:
        assert d.orientation is c.orientation.opposite
        assert adjacent(d, c)  # symmetric


@given(cells)
def test_quadromer_census(c):
    q = quadromer_around(c)
    assert len(set(q.cells)) == 4
    ups = sum(x.is_up for x in q.cells)
    assert ups == (3 if q.orientation is Orientation.UP else 1)


def test_mismatched_orientation_rejected():
    with pytest.raises(ParameterError):
        TriCell(0, 1, Orientation.UP)


def test_p4_cell_count_and_tileable():
    region = build_region(RegionSpec.plain(4))
    assert len(region) == 216
    assert count_weighted_tilings(region, budget=len(region), memo=True).value > 0


@pytest.mark.parametrize("n,size", [(1, 18), (2, 60), (3, 126), (4, 216)])
def test_pn_sizes(n, size):
    assert len(pn_cells(n)) == size


def test_empty_removals_is_plain():
    assert build_region(RegionSpec(3, ())).cells == pn_cells(3)


def test_p4_with_d30_u21():
    region = build_region(RegionSpec.quadromers(4, 3, 0, 2, 1))
    s = region_stats(region)
    assert s.up_count == s.down_count == 104
    removed = pn_cells(4) - region.cells
    assert removed == set(down_quadromer(3, 0).cells) | set(up_quadromer(2, 1).cells)


def test_half_weight_count_p1():
    assert region_stats(build_region(RegionSpec.plain(1))).half_weight_count == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_plain_balanced(n):
    s = region_stats(build_region(RegionSpec.plain(n)))
    assert s.up_count == s.down_count
    assert s.half_weight_count == n


@pytest.mark.parametrize("params", list(admissible_quadromer_params(3)))
def test_quadromer_pairs_balanced(params):
    s = region_stats(build_region(RegionSpec.quadromers(3, *params)))
    assert s.up_count == s.down_count == 63 - 4


def test_boundary_trace_is_single_closed_cycle():
    cyc = region_stats(build_region(RegionSpec.plain(2))).boundary_trace
    assert len(cyc) == 1
    # a hole gives a second cycle
    assert len(boundary_cycles(build_region(RegionSpec.quadromers(3, 2, 0, 2, 1)))) == 3


@pytest.mark.parametrize("side,k", [("d", 0), ("d", 2), ("u", 0), ("u", 2)])
def test_bump_removal_removes_three_cells(side, k):
    region = build_region(RegionSpec(3, (BumpRemoval(side, k),)))
    removed = pn_cells(3) - region.cells
    quad = ld_bump_quadromer(k) if side == "d" else lu_bump_quadromer(k)
    assert len(removed) == 3 and removed < set(quad.cells)


def test_deterministic():
    spec = RegionSpec.quadromers(3, 2, 1, 1, 0)
    assert build_region(spec) == build_region(spec)
    assert dump_region_json(build_region(spec)) == dump_region_json(build_region(spec))


def test_json_round_trip():
    region = build_region(RegionSpec.bumps(3, 0, 2, 1, 2))
    doc = json.loads(dump_region_json(region))
    back = region_from_dict(doc)
    assert back.cells == region.cells
    assert back.half_weight_positions == region.half_weight_positions
    assert back.meta == region.meta
    assert region_to_dict(back) == doc


@pytest.mark.parametrize("spec", [
    RegionSpec(0),
    RegionSpec.quadromers(2, 0, 0, 1, 0),
    RegionSpec.quadromers(2, 1, -1, 1, 0),
    RegionSpec.quadromers(1, 9, 0, 1, 0),  # leaves P_1
])
def test_bad_parameters(spec):
    with pytest.raises(ParameterError):
        build_region(spec)


def test_bad_bump_order():
    with pytest.raises(ParameterError):
        RegionSpec.bumps(3, 1, 1, 0, 1)
    with pytest.raises(ParameterError):
        build_region(RegionSpec.bumps(2, 0, 2, 0, 1))


def test_overlap_reports_cell():
    with pytest.raises(ParameterError) as info:
        build_region(RegionSpec.monomers_du(3, 0, 0, 0, 0, 0, 1))
    assert info.value.cell is not None
