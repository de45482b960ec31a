"""
Triangular-lattice geometry on the closed upper half-plane.

Sites are addressed by axial coordinates ``(q, r)``.  Row ``r = 0`` is the
horizontal axis; axis site ``k`` has ``q = k``.  The Cartesian embedding is
``(q + r/2, r*sqrt(3)/2)`` so that neighbouring sites sit at distance one.

A :class:`Domain` is the finite piece of the half-plane a simulation lives
on: all sites with ``r >= 0`` whose graph distance from the axis site
``center`` is smaller than ``truncation_factor * n``.  The segment ``AB``
is the axis stretch ``0..n``; ``ell`` is the axis to the left of ``0`` and
``r_side`` the axis to the right of ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "NEIGHBOR_OFFSETS",
    "SiteCoord",
    "Domain",
    "neighbors",
    "graph_distance",
    "half_disc",
    "half_annulus",
    "boundary_inner",
    "boundary_outer",
    "ring",
]

# counterclockwise, starting east; the hull walk relies on this order
NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

_SQRT3_2 = math.sqrt(3.0) / 2.0


class SiteCoord(NamedTuple):
    """A lattice site in axial coordinates."""

    q: int
    r: int

    def shifted(self, dq: int, dr: int) -> "SiteCoord":
        return SiteCoord(self.q + dq, self.r + dr)

    @property
    def cartesian(self) -> tuple[float, float]:
        return (self.q + 0.5 * self.r, self.r * _SQRT3_2)

    @property
    def on_axis(self) -> bool:
        return self.r == 0


def graph_distance(u: SiteCoord, v: SiteCoord) -> int:
    """Shortest-path length between two sites of the triangular lattice."""
    dq = u[0] - v[0]
    dr = u[1] - v[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


@dataclass(frozen=True)
class Domain:
    """
    Truncated half-plane region hosting one experiment.

    Parameters
    ----------
    n : int
        Length of the segment ``AB`` (``A`` is axis site 0, ``B`` is axis
        site ``n``).
    truncation_factor : float
        The domain keeps the sites at graph distance ``< truncation_factor * n``
        from ``center``.
    center : int, optional
        Axis coordinate of the truncation centre, ``n // 2`` by default.
    max_row : int, optional
        Additionally drop all rows above ``max_row``.  Only used to build
        very small domains for exhaustive enumeration.

    Notes
    -----
    Sites are indexed densely in lexicographic ``(r, q)`` order.  Row ``r``
    holds ``q = q_min .. q_min + 2*radius - 2 - r`` where
    ``q_min = center - radius + 1``, so the index is a closed-form function
    of the coordinates; the compiled kernels rely on that.
    """

    n: int
    truncation_factor: float = 4.0
    center: int | None = None
    max_row: int | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not self.truncation_factor > 0:
            raise ValueError("truncation_factor must be positive")
        if self.center is None:
            object.__setattr__(self, "center", self.n // 2)
        if self.max_row is not None and self.max_row < 0:
            raise ValueError("max_row must be nonnegative")
        lo, hi = self.axis_range
        if lo > -1 or hi < self.n + 1:
            raise ValueError(
                f"domain axis {lo}..{hi} must contain -1..{self.n + 1} "
                "(AB plus at least one site of each half-line)"
            )

    # geometry ---------------------------------------------------------

    @cached_property
    def radius(self) -> int:
        """Sites satisfy ``graph_distance(site, center) < radius``."""
        # rounding guards against 4/3 * 3 = 3.9999999
        return math.ceil(round(self.truncation_factor * self.n, 9))

    @cached_property
    def top_row(self) -> int:
        top = self.radius - 1
        return top if self.max_row is None else min(top, self.max_row)

    @property
    def q_min(self) -> int:
        return self.center - self.radius + 1

    @property
    def axis_range(self) -> tuple[int, int]:
        return self.q_min, self.center + self.radius - 1

    def row_bounds(self, r: int) -> tuple[int, int]:
        return self.q_min, self.q_min + 2 * self.radius - 2 - r

    @property
    def geom(self) -> tuple[int, int, int]:
        """``(q_min, radius, top_row)``, the kernel-side description."""
        return self.q_min, self.radius, self.top_row

    @cached_property
    def site_count(self) -> int:
        t = self.top_row
        return self._row_offset(t + 1)

    def _row_offset(self, r: int) -> int:
        return r * (2 * self.radius - 1) - r * (r - 1) // 2

    def __contains__(self, site) -> bool:
        q, r = site
        if r < 0 or r > self.top_row:
            return False
        lo, hi = self.row_bounds(r)
        return lo <= q <= hi

    def index(self, site) -> int:
        """Dense index of ``site``; raises ``KeyError`` outside the domain."""
        if site not in self:
            raise KeyError(f"{tuple(site)} is not in {self}")
        q, r = site
        return self._row_offset(r) + q - self.q_min

    def site(self, index: int) -> SiteCoord:
        return SiteCoord(int(self.qs[index]), int(self.rs[index]))

    @cached_property
    def qs(self) -> np.ndarray:
        q, _ = self._coords
        return q

    @cached_property
    def rs(self) -> np.ndarray:
        _, r = self._coords
        return r

    @cached_property
    def _coords(self):
        R = self.radius
        rows = np.arange(self.top_row + 1)
        lengths = 2 * R - 1 - rows
        rs = np.repeat(rows, lengths).astype(np.int64)
        starts = np.repeat(np.cumsum(lengths) - lengths, lengths)
        qs = (np.arange(rs.size) - starts + self.q_min).astype(np.int64)
        qs.setflags(write=False)
        rs.setflags(write=False)
        return qs, rs

    @cached_property
    def sites(self) -> tuple[SiteCoord, ...]:
        return tuple(SiteCoord(int(q), int(r)) for q, r in zip(self.qs, self.rs))

    def indices(self, sites: Iterable) -> np.ndarray:
        return np.fromiter((self.index(s) for s in sites), dtype=np.int64)

    def mask(self, sites: Iterable) -> np.ndarray:
        m = np.zeros(self.site_count, dtype=np.uint8)
        idx = self.indices(sites)
        m[idx] = 1
        return m

    @cached_property
    def edge_mask(self) -> np.ndarray:
        """Sites with a half-plane neighbour outside the domain."""
        qs, rs = self.qs, self.rs
        lo, _ = self.row_bounds(0)
        hi = self.q_min + 2 * self.radius - 2 - rs
        edge = (qs == lo) | (qs == hi)
        edge |= rs == self.top_row
        out = edge.astype(np.uint8)
        out.setflags(write=False)
        return out

    # the three axis pieces --------------------------------------------

    @property
    def ell_sites(self) -> list[SiteCoord]:
        lo, _ = self.axis_range
        return [SiteCoord(q, 0) for q in range(lo, 0)]

    @property
    def r_sites(self) -> list[SiteCoord]:
        _, hi = self.axis_range
        return [SiteCoord(q, 0) for q in range(self.n + 1, hi + 1)]

    @property
    def ab_sites(self) -> list[SiteCoord]:
        return [SiteCoord(q, 0) for q in range(self.n + 1)]

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "truncation_factor": self.truncation_factor,
            "site_count": self.site_count,
        }
        if self.center != self.n // 2:
            out["center"] = self.center
        if self.max_row is not None:
            out["max_row"] = self.max_row
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Domain":
        dom = cls(
            n=int(d["n"]),
            truncation_factor=float(d.get("truncation_factor", 4.0)),
            center=d.get("center"),
            max_row=d.get("max_row"),
        )
        if "site_count" in d and int(d["site_count"]) != dom.site_count:
            raise ValueError("site_count does not match the domain parameters")
        return dom


def neighbors(v, domain: Domain) -> list[SiteCoord]:
    """Neighbours of ``v`` inside ``domain``, counterclockwise from east."""
    q, r = v
    out = []
    for dq, dr in NEIGHBOR_OFFSETS:
        w = SiteCoord(q + dq, r + dr)
        if w in domain:
            out.append(w)
    return out


def _ball(v, radius: int, domain: Domain):
    q0, r0 = v
    for r in range(max(0, r0 - radius), min(domain.top_row, r0 + radius) + 1):
        lo, hi = domain.row_bounds(r)
        for q in range(max(lo, q0 - radius - radius), min(hi, q0 + radius + radius) + 1):
            u = SiteCoord(q, r)
            yield u, graph_distance(u, v)


def half_disc(v, n: int, domain: Domain) -> frozenset[SiteCoord]:
    """Domain sites at graph distance ``< n`` from ``v``."""
    return frozenset(u for u, d in _ball(v, n - 1, domain) if d < n)


def half_annulus(v, n: int, m: int, domain: Domain) -> frozenset[SiteCoord]:
    """Domain sites ``u`` with ``m <= |u - v| < n``."""
    if not 1 <= m < n:
        raise ValueError(f"half_annulus needs 1 <= m < n, got m={m}, n={n}")
    return frozenset(u for u, d in _ball(v, n - 1, domain) if m <= d < n)


def ring(v, d: int, domain: Domain) -> frozenset[SiteCoord]:
    """Domain sites at graph distance exactly ``d`` from ``v``."""
    return frozenset(u for u, du in _ball(v, d, domain) if du == d)


def boundary_inner(S, domain: Domain) -> frozenset[SiteCoord]:
    """Sites of ``S`` with a neighbour outside ``S`` (within ``domain``)."""
    S = frozenset(S)
    return frozenset(u for u in S if any(w not in S for w in neighbors(u, domain)))


def boundary_outer(S, domain: Domain) -> frozenset[SiteCoord]:
    """Domain sites outside ``S`` with a neighbour in ``S``."""
    S = frozenset(S)
    out = set()
    for u in S:
        for w in neighbors(u, domain):
            if w not in S:
                out.add(w)
    return frozenset(out)
