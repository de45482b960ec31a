"""
The lowest occupied crossing and its observables.

A crossing is a self-avoiding occupied path whose first site lies on
``ell`` (axis, ``q < 0``), whose last site lies on ``r_side`` (axis,
``q > n``) and whose other sites lie on neither half-line.  Its
*below-region* is the set of sites weakly enclosed by the path and the
axis stretch between its endpoints.  The lowest crossing is the one whose
below-region is contained in that of every other crossing; among
crossings sharing the same below-region, it is the one whose strictly
enclosed part (below-region minus path) is smallest, i.e. the one that
hugs the vacant region underneath.

Extraction does not enumerate crossings.  Give the virtual row under the
axis the states "vacant" below ``-1..n+1`` and "occupied" elsewhere; the
vacant sites attached to that floor form the region the lowest crossing
must pass over.  A right-hand wall-follower started on the left wall
traces the occupied boundary of this region and stops on the right wall.
Loop erasure of its trace, cut to the stretch between the half-lines, is
the lowest crossing.  The walk only inspects sites next to that boundary,
which keeps Monte Carlo cost proportional to the hull rather than to the
domain.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .lattice import Domain, SiteCoord, neighbors
from .sampling import Configuration, workspace

__all__ = [
    "CrossingResult",
    "lowest_crossing",
    "min_distance_to_AB",
    "visited_disc_count",
    "first_intersection",
    "below_region",
    "path_csv",
]


@dataclass(frozen=True)
class CrossingResult:
    """Lowest crossing ``path`` (left to right) with derived observables."""

    path: tuple[SiteCoord, ...]
    n: int
    min_distance_to_AB: int
    contact_points: tuple[SiteCoord, ...]
    touched_truncation: bool
    m: int | None = None
    visited_discs: frozenset[int] | None = None
    first_intersection: SiteCoord | None = None

    @property
    def X(self) -> int | None:
        return None if self.visited_discs is None else len(self.visited_discs)


def _distance_to_segment(q: int, r: int, n: int) -> int:
    # sites at distance r from (q, r) on the axis fill q..q+r
    if q + r < 0:
        return -q
    if q > n:
        return q - n + r
    return r


def _extract(config: Configuration, mirror: bool = False, wired: bool = False):
    dom = config.domain
    ws = workspace(dom)
    ws.load(config)
    codes, touched, ws.wq, ws.wr = K.extract_crossing(
        ws.geom, dom.n, ws.qs, ws.rs, *ws.state_args(), mirror, wired,
        ws.wq, ws.wr, ws.pos, ws.pstamp, ws.next_pcur(), dom.edge_mask,
    )
    geom = ws.geom
    path = []
    for c in codes:
        q, r = K.decode(int(c), geom, ws.qs, ws.rs)
        path.append(SiteCoord(int(q), int(r)))
    return path, bool(touched)


def lowest_crossing(config: Configuration, m: int | None = None,
                    wired: bool = False) -> CrossingResult | None:
    """
    Extract the lowest crossing, or ``None`` when ``ell`` and ``r_side``
    are not joined by an occupied path inside the domain.

    With ``m`` given, the disc observables (``visited_discs`` and
    ``first_intersection``) are filled in as well.

    ``wired=True`` treats every half-plane site outside the domain as
    occupied.  A crossing then always exists; it coincides with the
    infinite-half-plane lowest crossing whenever that one stays inside
    the domain, and otherwise runs along the outside of the domain edge
    (and ``touched_truncation`` is set).
    """
    path, touched = _extract(config, wired=wired)
    if not path:
        return None
    n = config.domain.n
    result = CrossingResult(
        path=tuple(path),
        n=n,
        min_distance_to_AB=min(_distance_to_segment(q, r, n) for q, r in path),
        contact_points=tuple(s for s in path if s.r == 0 and 0 <= s.q <= n),
        touched_truncation=touched,
    )
    if m is not None:
        _, visited = visited_disc_count(result, n, m)
        result = CrossingResult(
            **{**result.__dict__, "m": m, "visited_discs": visited,
               "first_intersection": first_intersection(result, n, m)}
        )
    return result


def min_distance_to_AB(result: CrossingResult, n: int) -> int:
    """Smallest graph distance from a path site to an axis site in ``0..n``."""
    return min(_distance_to_segment(q, r, n) for q, r in result.path)


def _check_m(n: int, m: int):
    if m < 1 or n % m:
        raise ValueError(f"m={m} must be a positive divisor of n={n}")


def _discs_of(site, n: int, m: int):
    # axis points j with |site - j| < m lie in (q + r - m, q + m)
    q, r = site
    if r >= m:
        return range(0)
    lo = q + r - m + 1
    hi = q + m - 1
    k_lo = max(0, -((-lo) // m))
    k_hi = min(n // m, hi // m)
    return range(k_lo, k_hi + 1)


def visited_disc_count(result: CrossingResult | None, n: int, m: int):
    """
    ``(X, visited)``: the indices ``k`` in ``0..n/m`` with the path meeting
    the half-disc of radius ``m`` around axis site ``k*m``.  An absent
    crossing counts as ``X = 0``.
    """
    _check_m(n, m)
    if result is None:
        return 0, frozenset()
    visited = set()
    for s in result.path:
        visited.update(_discs_of(s, n, m))
    return len(visited), frozenset(visited)


def first_intersection(result: CrossingResult | None, n: int, m: int) -> SiteCoord | None:
    """First path site lying in the union of the half-discs ``H_m(km)``."""
    _check_m(n, m)
    if result is None:
        return None
    for s in result.path:
        if len(_discs_of(s, n, m)):
            return s
    return None


def below_region(path, domain: Domain) -> frozenset[SiteCoord]:
    """
    Sites weakly enclosed between ``path`` and the axis stretch joining its
    endpoints.

    Everything reachable from the domain edge or from the axis outside that
    stretch without stepping on the path or the stretch lies outside.
    """
    path = list(path)
    a, b = sorted((path[0].q, path[-1].q))
    wall = set(path) | {SiteCoord(q, 0) for q in range(a, b + 1)}
    seeds = [
        s for s in domain.sites
        if s not in wall and ((s.r == 0 and not a <= s.q <= b) or domain.edge_mask[domain.index(s)])
    ]
    outside = set(seeds)
    stack = list(seeds)
    while stack:
        v = stack.pop()
        for w in neighbors(v, domain):
            if w not in wall and w not in outside:
                outside.add(w)
                stack.append(w)
    return frozenset(s for s in domain.sites if s not in outside)


def path_csv(result: CrossingResult) -> str:
    """The path as ``q,r`` rows in path order, for plotting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "r"])
    for s in result.path:
        w.writerow([s.q, s.r])
    return buf.getvalue()

