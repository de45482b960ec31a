import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowxing.connectivity import StateFilter, disjoint_path_count, exists_path, reachable
from lowxing.lattice import Domain, neighbors
from lowxing.sampling import from_bits

DOM = Domain(3, 2.0)
bits = st.lists(st.integers(0, 1), min_size=DOM.site_count, max_size=DOM.site_count)


def state_graph(cfg, state, region=None):
    dom = cfg.domain
    keep = {s for s in dom.sites if cfg.is_occupied(s) == bool(state)}
    if region is not None:
        keep &= set(region)
    g = nx.Graph()
    g.add_nodes_from(keep)
    for s in keep:
        for w in neighbors(s, dom):
            if w in keep:
                g.add_edge(s, w)
    return g


def vertex_disjoint(g, sources, targets):
    # node splitting gives every site unit capacity
    flow = nx.DiGraph()
    for v in g:
        flow.add_edge(("in", v), ("out", v), capacity=1)
        for w in g[v]:
            flow.add_edge(("out", v), ("in", w), capacity=1)
    for s in sources:
        if s in g:
            flow.add_edge("S", ("in", s), capacity=1)
    for t in targets:
        if t in g:
            flow.add_edge(("out", t), "T", capacity=1)
    if "S" not in flow or "T" not in flow:
        return 0
    return nx.maximum_flow_value(flow, "S", "T")


@given(bits, st.sampled_from([StateFilter.OCCUPIED, StateFilter.VACANT]))
def test_reachable_matches_components(b, state):
    cfg = from_bits(DOM, b)
    g = state_graph(cfg, state)
    src = DOM.ell_sites
    want = set()
    for s in src:
        if s in g:
            want |= nx.node_connected_component(g, s)
    assert reachable(cfg, state, src) == want
    assert exists_path(cfg, state, src, DOM.r_sites) == bool(want & set(DOM.r_sites))


@given(bits, st.integers(1, 4))
def test_disjoint_path_count_matches_maxflow(b, cap):
    cfg = from_bits(DOM, b)
    g = state_graph(cfg, StateFilter.OCCUPIED)
    want = vertex_disjoint(g, DOM.ell_sites, DOM.r_sites)
    got = disjoint_path_count(cfg, "occupied", DOM.ell_sites, DOM.r_sites, cap=cap)
    assert got == min(cap, want)


@given(bits)
def test_region_restriction(b):
    cfg = from_bits(DOM, b)
    region = [s for s in DOM.sites if s.r <= 1]
    g = state_graph(cfg, 1, region)
    want = any(
        nx.has_path(g, a, c) for a in DOM.ell_sites if a in g for c in DOM.r_sites if c in g
    )
    assert exists_path(cfg, 1, DOM.ell_sites, DOM.r_sites, region=region) == want


def test_filter_coercion_and_cap_bounds():
    assert StateFilter.coerce("vacant") is StateFilter.VACANT
    assert StateFilter.coerce(1) is StateFilter.OCCUPIED
    cfg = from_bits(DOM, [1] * DOM.site_count)
    with pytest.raises(ValueError):
        disjoint_path_count(cfg, 1, DOM.ell_sites, DOM.r_sites, cap=5)
    assert not exists_path(cfg, 1, DOM.ell_sites, [])
