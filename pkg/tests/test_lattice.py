import math

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowxing.lattice import (
    NEIGHBOR_OFFSETS,
    Domain,
    SiteCoord,
    boundary_inner,
    boundary_outer,
    graph_distance,
    half_annulus,
    half_disc,
    neighbors,
    ring,
)

coords = st.integers(-30, 30)
sites = st.builds(SiteCoord, coords, st.integers(0, 30))


def lattice_graph(dom):
    g = nx.Graph()
    g.add_nodes_from(dom.sites)
    for s in dom.sites:
        for w in neighbors(s, dom):
            g.add_edge(s, w)
    return g


def test_neighbor_offsets_are_unit_distance():
    for dq, dr in NEIGHBOR_OFFSETS:
        x, y = SiteCoord(dq, dr).cartesian
        assert math.isclose(math.hypot(x, y), 1.0)


@given(sites, sites)
def test_distance_is_a_metric(u, v):
    assert graph_distance(u, v) == graph_distance(v, u)
    assert (graph_distance(u, v) == 0) == (u == v)


@given(sites, sites, sites)
def test_triangle_inequality(u, v, w):
    assert graph_distance(u, w) <= graph_distance(u, v) + graph_distance(v, w)


def test_distance_matches_bfs():
    # the half-plane is convex for lattice geodesics, so BFS inside it agrees
    dom = Domain(4, 2.0)
    g = lattice_graph(dom)
    src = SiteCoord(2, 0)
    for s, d in nx.single_source_shortest_path_length(g, src).items():
        assert d == graph_distance(s, src)


@pytest.mark.parametrize("n,kf,center,max_row", [
    (2, 1.5, None, None), (3, 4 / 3, None, 2), (8, 4.0, None, None), (16, 2.0, 0, None),
])
def test_index_roundtrip(n, kf, center, max_row):
    dom = Domain(n, kf, center=center, max_row=max_row)
    assert len(dom.sites) == dom.site_count
    for i, s in enumerate(dom.sites):
        assert dom.index(s) == i
        assert dom.site(i) == s
    assert Domain.from_dict(dom.to_dict()) == dom


def test_domain_shape_and_errors():
    dom = Domain(4, 2.0)
    assert dom.radius == 8 and dom.center == 2
    for s in dom.sites:
        assert graph_distance(s, SiteCoord(dom.center, 0)) < dom.radius
    assert dom.site_count == len(half_disc(SiteCoord(2, 0), 8, Domain(4, 4.0)))
    with pytest.raises(ValueError):
        Domain(0)
    with pytest.raises(ValueError):
        Domain(4, 0.5)  # axis would not reach past B
    with pytest.raises(KeyError):
        dom.index(SiteCoord(0, -1))


@given(st.integers(1, 12))
def test_half_disc_size(n):
    # rows r = 0..n-1 of a half hexagon hold 2n-1-r sites
    dom = Domain(n, 3.0)
    v = SiteCoord(dom.center, 0)
    assert len(half_disc(v, n, dom)) == n * (2 * n - 1) - n * (n - 1) // 2


@given(st.integers(2, 10), st.data())
def test_annulus_and_ring_partition(n, data):
    m = data.draw(st.integers(1, n - 1))
    dom = Domain(n, 3.0)
    v = SiteCoord(dom.center, 0)
    disc, inner = half_disc(v, n, dom), half_disc(v, m, dom)
    assert half_annulus(v, n, m, dom) == disc - inner
    rings = [ring(v, d, dom) for d in range(n)]
    assert frozenset().union(*rings) == disc
    assert sum(map(len, rings)) == len(disc)


def test_annulus_rejects_bad_radii():
    dom = Domain(4)
    with pytest.raises(ValueError):
        half_annulus(SiteCoord(0, 0), 3, 3, dom)


@given(st.integers(1, 8))
def test_disc_boundaries(n):
    dom = Domain(n, 3.0)
    v = SiteCoord(dom.center, 0)
    disc = half_disc(v, n, dom)
    assert boundary_inner(disc, dom) == ring(v, n - 1, dom)
    assert boundary_outer(disc, dom) == ring(v, n, dom)


def test_neighbors_symmetric_and_edge_mask():
    dom = Domain(3, 2.0)
    for s in dom.sites:
        for w in neighbors(s, dom):
            assert s in neighbors(w, dom)
    full = {s for s in dom.sites if len(neighbors(s, dom)) == (6 if s.r > 0 else 4)}
    for i, s in enumerate(dom.sites):
        assert bool(dom.edge_mask[i]) == (s not in full)


def test_axis_pieces():
    dom = Domain(4, 2.0)
    assert [s.q for s in dom.ab_sites] == [0, 1, 2, 3, 4]
    assert max(s.q for s in dom.ell_sites) == -1
    assert min(s.q for s in dom.r_sites) == 5
    assert len(dom.ell_sites) + len(dom.ab_sites) + len(dom.r_sites) == 2 * dom.radius - 1
