"""
Path and disjoint-path queries over a configuration.

A path "in state s" uses only sites whose occupancy is ``s``; paths are
site sequences and "disjoint" means vertex-disjoint, endpoints included.
"""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels as K
from .sampling import Configuration, workspace

__all__ = ["StateFilter", "reachable", "exists_path", "disjoint_path_count"]

_NONE = np.zeros(0, dtype=np.uint8)


class StateFilter(enum.IntEnum):
    VACANT = 0
    OCCUPIED = 1

    @classmethod
    def coerce(cls, value) -> "StateFilter":
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


def _region_mask(domain, region):
    if region is None:
        return np.ones(domain.site_count, dtype=np.uint8)
    return domain.mask(region)


def reachable(config: Configuration, filter, sources, region=None) -> frozenset:
    """
    Region sites joined to some source by a path of ``filter``-state
    region sites.  Sources in the wrong state contribute nothing.

    ``region=None`` means the whole domain.
    """
    want = StateFilter.coerce(filter)
    dom = config.domain
    ws = workspace(dom)
    ws.load(config)
    count, _ = K.bfs(
        ws.geom, ws.qs, ws.rs, *ws.state_args(), int(want),
        _region_mask(dom, region), dom.indices(sources), _NONE, K.NO_SKIP, False,
        ws.vis, ws.next_vcur(), ws.queue,
    )
    return frozenset(dom.site(int(i)) for i in ws.queue[:count])


def exists_path(config: Configuration, filter, S1, S2, region=None) -> bool:
    """True iff a ``filter``-state path inside ``region`` starts in ``S1`` and ends in ``S2``."""
    want = StateFilter.coerce(filter)
    dom = config.domain
    target = dom.mask(S2)
    if not target.any():
        return False
    ws = workspace(dom)
    ws.load(config)
    _, hit = K.bfs(
        ws.geom, ws.qs, ws.rs, *ws.state_args(), int(want),
        _region_mask(dom, region), dom.indices(S1), target, K.NO_SKIP, False,
        ws.vis, ws.next_vcur(), ws.queue,
    )
    return hit >= 0


def disjoint_path_count(config: Configuration, filter, sources, targets, region=None,
                        cap: int = 2) -> int:
    """
    ``min(cap, max number of vertex-disjoint filter-state paths)`` from
    ``sources`` to ``targets`` within ``region``.

    Computed by unit-vertex-capacity augmenting paths (at most ``cap``
    breadth-first augmentation rounds).
    """
    if not 1 <= cap <= 4:
        raise ValueError("cap must be between 1 and 4")
    want = StateFilter.coerce(filter)
    dom = config.domain
    ws = workspace(dom)
    ws.load(config)
    group = dom.mask(targets)
    return int(
        K.disjoint_paths(
            ws.geom, ws.qs, ws.rs, *ws.state_args(), int(want),
            _region_mask(dom, region), dom.indices(sources), group,
            K._BIG_CAP, K._BIG_CAP, False, K.NO_SKIP, cap,
            ws.on_path, ws.pred, ws.pvis, ws.parent, ws.fqueue, ws.ctr,
        )
    )
