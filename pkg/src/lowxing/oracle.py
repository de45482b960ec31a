"""
Exhaustive ground truth on tiny domains.

Nothing here shares code with the production detectors beyond the lattice
geometry: paths are enumerated one self-avoiding walk at a time, stored as
bitmasks over the domain's site indices, and an event on a configuration
(also a bitmask) holds when some stored mask is contained in it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import Domain, SiteCoord, neighbors
from .sampling import Configuration, from_bits

__all__ = [
    "MAX_ENUM_SITES",
    "ExactProbability",
    "enumerate_probability",
    "all_configurations",
    "config_from_int",
    "simple_paths",
    "path_masks",
    "disjoint_pair_masks",
    "holds",
    "crossings",
    "below_mask",
    "brute_lowest_crossing",
    "lowest_crossing_table",
    "envelope",
    "direct_event",
]

MAX_ENUM_SITES = 25


@dataclass(frozen=True)
class ExactProbability:
    """``numerator / 2**log2_denominator``, exact at ``p = 1/2``."""

    numerator: int
    log2_denominator: int

    def __post_init__(self):
        if not 0 <= self.numerator <= 1 << self.log2_denominator:
            raise ValueError("numerator out of range")

    @property
    def denominator(self) -> int:
        return 1 << self.log2_denominator

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def float_value(self) -> float:
        return self.numerator / self.denominator

    def to_json(self) -> str:
        return json.dumps(
            {"numerator": str(self.numerator), "log2_denominator": self.log2_denominator}
        )

    @classmethod
    def from_json(cls, text: str) -> "ExactProbability":
        d = json.loads(text)
        return cls(int(d["numerator"]), int(d["log2_denominator"]))


def _check_size(domain: Domain):
    if domain.site_count > MAX_ENUM_SITES:
        raise ValueError(
            f"domain has {domain.site_count} sites; exhaustive enumeration is "
            f"capped at {MAX_ENUM_SITES}"
        )


def all_configurations(domain: Domain) -> np.ndarray:
    """Every configuration as an integer; bit ``i`` is site index ``i``."""
    _check_size(domain)
    return np.arange(1 << domain.site_count, dtype=np.int64)


def config_from_int(domain: Domain, c: int) -> Configuration:
    bits = (int(c) >> np.arange(domain.site_count)) & 1
    return from_bits(domain, bits)


def enumerate_probability(domain: Domain, predicate) -> ExactProbability:
    """
    Exact probability at ``p = 1/2`` that ``predicate(config)`` holds.

    ``predicate`` receives a :class:`Configuration`.  It may instead
    expose ``evaluate_all(domain) -> bool array`` over all configurations
    (in integer order), which is used when present.
    """
    _check_size(domain)
    k = domain.site_count
    if hasattr(predicate, "evaluate_all"):
        hits = int(np.count_nonzero(predicate.evaluate_all(domain)))
    else:
        hits = sum(1 for c in range(1 << k) if predicate(config_from_int(domain, c)))
    return ExactProbability(hits, k)


# --- path enumeration ----------------------------------------------------


def simple_paths(domain: Domain, starts, ends, region=None, forbid=()):
    """
    All self-avoiding walks that begin in ``starts``, stay in ``region``
    and stop at their first site in ``ends``.

    Sites in ``forbid`` may not appear except as the first or last site.
    Returns a list of site tuples.
    """
    region = set(domain.sites) if region is None else set(region)
    ends = set(ends)
    forbid = set(forbid)
    out = []

    def extend(path, seen):
        v = path[-1]
        for w in neighbors(v, domain):
            if w in seen or w not in region:
                continue
            if w in ends:
                out.append(tuple(path) + (w,))
                continue
            if w in forbid:
                continue
            seen.add(w)
            path.append(w)
            extend(path, seen)
            path.pop()
            seen.discard(w)

    for s in starts:
        if s not in region:
            continue
        if s in ends:
            out.append((s,))
            continue
        extend([s], {s})
    return out


def _mask(domain: Domain, sites) -> int:
    m = 0
    for s in sites:
        m |= 1 << domain.index(s)
    return m


def path_masks(domain: Domain, paths) -> list[int]:
    """Inclusion-minimal site masks of ``paths``."""
    masks = sorted({_mask(domain, p) for p in paths}, key=lambda m: bin(m).count("1"))
    kept: list[int] = []
    for m in masks:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def disjoint_pair_masks(domain: Domain, paths_a, paths_b) -> list[int]:
    """Union masks of vertex-disjoint pairs, one path from each family."""
    ma = path_masks(domain, paths_a)
    mb = path_masks(domain, paths_b)
    return path_masks_from_ints([a | b for a in ma for b in mb if a & b == 0])


def path_masks_from_ints(masks) -> list[int]:
    masks = sorted(set(masks), key=lambda m: bin(m).count("1"))
    kept: list[int] = []
    for m in masks:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def holds(configs: np.ndarray, masks, state: int = 1) -> np.ndarray:
    """For each configuration, whether some mask is entirely in ``state``."""
    src = configs if state == 1 else ~configs
    ok = np.zeros(configs.shape, dtype=bool)
    for m in masks:
        ok |= (src & m) == m
    return ok


# --- lowest crossing by enumeration -----------------------------------------


def crossings(domain: Domain, occupied=None):
    """
    All crossings (first site on ``ell``, last on ``r_side``, no other
    half-line sites), optionally restricted to an occupied site set.
    """
    ell = domain.ell_sites
    rr = domain.r_sites
    region = set(domain.sites) if occupied is None else set(occupied)
    return simple_paths(
        domain, [s for s in ell if s in region], rr, region=region, forbid=set(ell) | set(rr)
    )


def below_mask(domain: Domain, path) -> int:
    """Bitmask form of :func:`lowxing.crossing.below_region`."""
    a, b = sorted((path[0].q, path[-1].q))
    wall = set(path) | {SiteCoord(q, 0) for q in range(a, b + 1)}
    outside = set()
    stack = []
    for s in domain.sites:
        if s in wall:
            continue
        if (s.r == 0 and not a <= s.q <= b) or len(neighbors(s, domain)) < _full_degree(s):
            outside.add(s)
            stack.append(s)
    while stack:
        v = stack.pop()
        for w in neighbors(v, domain):
            if w not in wall and w not in outside:
                outside.add(w)
                stack.append(w)
    return _mask(domain, (s for s in domain.sites if s not in outside))


def _full_degree(s: SiteCoord) -> int:
    return 4 if s.r == 0 else 6


def _unique_minimum(below: list[int], masks: list[int]):
    # product order: weak region first, then the region strictly inside
    strict = [b & ~m for b, m in zip(below, masks)]
    meet_w = below[0]
    meet_s = strict[0]
    for b, s in zip(below[1:], strict[1:]):
        meet_w &= b
        meet_s &= s
    return [i for i, (b, s) in enumerate(zip(below, strict)) if b == meet_w and s == meet_s]


def brute_lowest_crossing(config: Configuration):
    """
    The crossing lowest in the product order (weak below-region, then the
    below-region minus the path) among all occupied crossings.  ``None`` when there is no
    crossing; ``RuntimeError`` if no unique minimum exists.
    """
    dom = config.domain
    _check_size(dom)
    paths = crossings(dom, config.occupied_sites())
    if not paths:
        return None
    below = [below_mask(dom, p) for p in paths]
    hits = _unique_minimum(below, [_mask(dom, p) for p in paths])
    if len(hits) != 1:
        raise RuntimeError(f"no unique lowest crossing ({len(hits)} candidates)")
    return paths[hits[0]]


def lowest_crossing_table(domain: Domain):
    """
    Lowest crossing of every configuration at once.

    Returns ``(paths, index)`` where ``index[c]`` is the position in
    ``paths`` of the lowest crossing of configuration ``c`` (-1 if none,
    -2 if the minimum is not unique).
    """
    _check_size(domain)
    paths = crossings(domain)
    configs = all_configurations(domain)
    masks = np.array([_mask(domain, p) for p in paths], dtype=np.int64)
    below = np.array([below_mask(domain, p) for p in paths], dtype=np.int64)
    strict = below & ~masks
    full = (1 << domain.site_count) - 1
    meet = np.full(configs.shape, full, dtype=np.int64)
    meet_s = np.full(configs.shape, full, dtype=np.int64)
    any_ok = np.zeros(configs.shape, dtype=bool)
    for m, b, s in zip(masks, below, strict):
        ok = (configs & m) == m
        meet[ok] &= b
        meet_s[ok] &= s
        any_ok |= ok
    index = np.full(configs.shape, -1, dtype=np.int64)
    nhit = np.zeros(configs.shape, dtype=np.int64)
    for i, (m, b, s) in enumerate(zip(masks, below, strict)):
        sel = ((configs & m) == m) & (meet == b) & (meet_s == s)
        index[sel] = i
        nhit += sel
    index[any_ok & (nhit != 1)] = -2
    return paths, index


def envelope(path1, path2, config: Configuration):
    """
    The lowest crossing made of sites of ``path1`` and ``path2``; it lies
    weakly below both inputs.
    """
    dom = config.domain
    for p in (path1, path2):
        if not all(config.is_occupied(s) for s in p):
            raise ValueError("envelope inputs must be occupied crossings")
    union = set(path1) | set(path2)
    paths = crossings(dom, union)
    below = [below_mask(dom, p) for p in paths]
    hits = _unique_minimum(below, [_mask(dom, p) for p in paths])
    if len(hits) != 1:
        raise RuntimeError("envelope has no unique minimum")
    return paths[hits[0]]


# --- events straight from their definitions ----------------------------------


def _axis(domain: Domain, pred):
    return [s for s in domain.sites if s.r == 0 and pred(s.q)]


def direct_event(spec, domain: Domain) -> np.ndarray:
    """
    Truth table of an event over every configuration of ``domain``.

    Built only from enumerated self-avoiding paths and the lattice sets:
    an event holds when some witness (a path, or a disjoint pair of paths)
    is entirely in the required state.  ``spec`` is an
    :class:`lowxing.events.EventSpec` or its string form.
    """
    from .events import EventSpec
    from .lattice import half_annulus, half_disc, ring

    if isinstance(spec, str):
        spec = EventSpec.parse(spec)
    _check_size(domain)
    configs = all_configurations(domain)
    kind = spec.kind
    n = spec.n
    if kind == "D":
        v = SiteCoord(spec.v, 0)
        paths = simple_paths(domain, ring(v, 1, domain), ring(v, n - 1, domain))
        return holds(configs, disjoint_pair_masks(domain, paths, paths))
    if kind in ("D_annulus", "G", "F"):
        v = SiteCoord(spec.v, 0)
        region = half_annulus(v, n, spec.m, domain)
        if kind == "F":
            left = [s for s in region if s.r == 0 and s.q < spec.v]
            right = [s for s in region if s.r == 0 and s.q > spec.v]
            paths = simple_paths(domain, left, right, region=region)
            return holds(configs, path_masks(domain, paths), state=int(spec.state))
        paths = simple_paths(
            domain, ring(v, spec.m, domain), ring(v, n - 1, domain), region=region
        )
        if kind == "G":
            return holds(configs, path_masks(domain, paths))
        return holds(configs, disjoint_pair_masks(domain, paths, paths))
    if kind in ("P", "Q", "P_union"):
        L = _axis(domain, lambda q: q < -n)
        R = _axis(domain, lambda q: q > n)
        ks = [spec.k] if kind != "P_union" else [
            k for k in range(-n, n) if -n / 2 <= k <= n / 2 - 1
        ]
        out = np.zeros(configs.shape, dtype=bool)
        for k in ks:
            left = simple_paths(domain, [SiteCoord(k, 0)], L)
            right = simple_paths(domain, [SiteCoord(k + 1, 0)], R)
            if kind == "Q":
                out |= holds(configs, disjoint_pair_masks(domain, left, right))
            else:
                out |= holds(configs, path_masks(domain, left)) & holds(
                    configs, path_masks(domain, right), state=0
                )
        return out
    paths = crossings(domain)
    if kind == "crossing_exists":
        return holds(configs, path_masks(domain, paths))
    # A: some crossing meets the union of the relevant discs
    ks = range(n // spec.m + 1) if spec.k is None else [spec.k]
    U = set()
    for k in ks:
        U |= half_disc(SiteCoord(k * spec.m, 0), spec.m, domain)
    return holds(configs, path_masks(domain, [p for p in paths if U.intersection(p)]))
