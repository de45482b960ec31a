"""
Detectors for the named percolation events.

Each detector compiles the event into a small kernel program (opcode plus
site sets) bound to one domain, and evaluates it on a configuration.  The
same program drives exhaustive enumeration (``evaluate_all``) and the
Monte Carlo loops in :mod:`lowxing.experiments`, so the three paths can
never disagree about what an event means.

Geometry conventions
--------------------
``H_n(v)`` is :func:`~lowxing.lattice.half_disc`.  Its inner boundary
``dH_n(v)`` is the ring at distance ``n - 1`` and the outer boundary of
``H_m(v)`` is the ring at distance ``m`` (both in the untruncated
half-plane; detectors reject domains that clip the sets they use).  The
half-lines ``(-inf, -n)`` and ``(n, inf)`` are the axis sites with
``q < -n`` and ``q > n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .connectivity import StateFilter
from .lattice import Domain, SiteCoord
from .sampling import Configuration, workspace

__all__ = [
    "EventSpec",
    "EventProgram",
    "compile_event",
    "event_domain",
    "event_D",
    "event_D_annulus",
    "event_F",
    "event_G",
    "event_P",
    "event_Q",
    "event_A",
    "crossing_exists",
    "P_union",
]

KINDS = ("D", "D_annulus", "F", "G", "P", "Q", "A", "crossing_exists", "P_union")

# canonical parameter order per kind
_FIELDS = {
    "D": ("n", "v"),
    "D_annulus": ("n", "m", "v"),
    "F": ("n", "m", "v", "state"),
    "G": ("n", "m", "v"),
    "P": ("k", "n"),
    "Q": ("k", "n"),
    "A": ("n", "m", "k"),
    "crossing_exists": ("n",),
    "P_union": ("n",),
}
_OPTIONAL = {"A": ("k",)}

_SPEC_RE = re.compile(r"^\s*([A-Za-z_]+)\s*\((.*)\)\s*$")


@dataclass(frozen=True)
class EventSpec:
    """
    Event name plus parameters, e.g. ``EventSpec("D", n=32, v=0)``.

    ``str(spec)`` is the canonical form used in result records, and
    :meth:`parse` inverts it.  ``A`` without ``k`` means the union over
    all ``0 <= k <= n/m``.
    """

    kind: str
    n: int
    v: int | None = None
    m: int | None = None
    k: int | None = None
    state: StateFilter | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}; expected one of {KINDS}")
        need = _FIELDS[self.kind]
        optional = _OPTIONAL.get(self.kind, ())
        for name in ("v", "m", "k", "state"):
            val = getattr(self, name)
            if name in need and val is None and name not in optional:
                raise ValueError(f"event {self.kind} needs parameter {name}")
            if name not in need and val is not None:
                raise ValueError(f"event {self.kind} takes no parameter {name}")
        if self.state is not None:
            object.__setattr__(self, "state", StateFilter.coerce(self.state))
        for name in ("n", "v", "m", "k"):
            val = getattr(self, name)
            if val is not None:
                if int(val) != val:
                    raise ValueError(f"{name} must be an integer")
                object.__setattr__(self, name, int(val))

    def __str__(self):
        parts = []
        for name in _FIELDS[self.kind]:
            val = getattr(self, name)
            if val is None:
                continue
            if name == "state":
                val = val.name.lower()
            parts.append(f"{name}={val}")
        return f"{self.kind}({','.join(parts)})"

    @classmethod
    def parse(cls, text: str) -> "EventSpec":
        match = _SPEC_RE.match(text)
        if not match:
            raise ValueError(f"cannot parse event {text!r}; expected e.g. 'D(n=32,v=0)'")
        kind, body = match.groups()
        kwargs = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            if "=" not in item:
                raise ValueError(f"malformed parameter {item!r} in {text!r}")
            key, val = (s.strip() for s in item.split("=", 1))
            if key not in ("n", "v", "m", "k", "state"):
                raise ValueError(f"unknown parameter {key!r} in {text!r}")
            if key in kwargs:
                raise ValueError(f"parameter {key!r} given twice in {text!r}")
            kwargs[key] = val if key == "state" else _int(val, key)
        if "n" not in kwargs:
            raise ValueError(f"event {text!r} needs n")
        return cls(kind, **kwargs)

    def record_fields(self) -> dict:
        """``n, m, k`` for result records, -1 where inapplicable."""
        return {
            "n": self.n,
            "m": -1 if self.m is None else self.m,
            "k": -1 if self.k is None else self.k,
        }


def _int(text, name):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"parameter {name} must be an integer, got {text!r}") from None


def event_domain(spec: EventSpec, truncation_factor: float = 4.0) -> Domain:
    """
    The domain an estimate of ``spec`` runs on.

    Disc events are centred on ``v``; the ``P``/``Q`` family is centred on
    the origin so that both target half-lines exist; crossing events use
    the default domain around ``AB``.
    """
    if spec.kind in ("D", "D_annulus", "F", "G"):
        return Domain(spec.n, truncation_factor, center=spec.v)
    if spec.kind in ("P", "Q", "P_union"):
        return Domain(spec.n, truncation_factor, center=0)
    return Domain(spec.n, truncation_factor)


# --- compiled programs ---------------------------------------------------


@dataclass(eq=False)
class EventProgram:
    """An event bound to a domain, ready for the kernels."""

    spec: EventSpec
    domain: Domain
    op: int
    want: int = 1
    need: int = 1
    cap_a: int = K._BIG_CAP
    cap_b: int = K._BIG_CAP
    absorb: bool = True
    region: np.ndarray = None
    src1: np.ndarray = None
    src2: np.ndarray = None
    extra: np.ndarray = None
    mask1: np.ndarray = None
    mask2: np.ndarray = None
    group: np.ndarray = None
    region_no_r: np.ndarray = field(default=None, repr=False)
    region_no_l: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        N = self.domain.site_count
        z8 = np.zeros(N, dtype=np.uint8)
        e64 = np.zeros(0, dtype=np.int64)
        if self.region is None:
            self.region = np.ones(N, dtype=np.uint8)
        for name, default in (("src1", e64), ("src2", e64), ("extra", e64)):
            if getattr(self, name) is None:
                setattr(self, name, default)
        for name in ("mask1", "mask2", "group"):
            if getattr(self, name) is None:
                setattr(self, name, z8)
        if self.region_no_r is None:
            self.region_no_r = self.region & (1 - self.mask2)
        if self.region_no_l is None:
            self.region_no_l = self.region & (1 - self.mask1)
        # sites whose evaluation means the observable reached the domain edge
        self.edge_idx = np.flatnonzero(self.domain.edge_mask & self.region).astype(np.int64)

    def args(self):
        return (
            self.op, self.want, self.need, self.cap_a, self.cap_b, self.absorb,
            self.region, self.region_no_r, self.region_no_l, self.src1, self.src2,
            self.extra, self.mask1, self.mask2, self.group,
        )

    def __call__(self, config: Configuration) -> bool:
        if config.domain != self.domain:
            raise ValueError("configuration belongs to a different domain")
        ws = workspace(self.domain)
        ws.load(config)
        return bool(
            K.eval_program(
                *self.args(), ws.geom, ws.qs, ws.rs, *ws.state_args(),
                *ws.search_buffers(),
            )
        )

    def evaluate_all(self, domain: Domain | None = None) -> np.ndarray:
        """Value on every configuration of the domain, in integer order."""
        if domain is not None and domain != self.domain:
            raise ValueError("program compiled for a different domain")
        from .oracle import MAX_ENUM_SITES

        N = self.domain.site_count
        if N > MAX_ENUM_SITES:
            raise ValueError(f"{N} sites is too many to enumerate")
        ws = workspace(self.domain)
        return K.run_enumeration(
            0, 1 << N, *self.args(), ws.geom, ws.qs, ws.rs, ws.stamp, ws.cache,
            *ws.search_buffers(),
        )

    def count_trials(self, master_seed: int, t0: int, t1: int, p: float):
        """``(successes, touched)`` over trials ``t0 <= t < t1``."""
        from .sampling import _seed64

        ws = workspace(self.domain)
        s, t = K.run_trials(
            _seed64(master_seed), t0, t1, K.threshold(p), *self.args(),
            ws.geom, ws.qs, ws.rs, ws.stamp, ws.cache, *ws.search_buffers(),
            self.edge_idx,
        )
        return int(s), int(t)


def _dist(domain: Domain, v: int) -> np.ndarray:
    dq = domain.qs - v
    dr = domain.rs
    return (np.abs(dq) + np.abs(dr) + np.abs(dq + dr)) // 2


def _half_disc_size(n: int) -> int:
    # row r of H_n(v) in the untruncated half-plane holds 2n - 1 - r sites
    return n * (2 * n - 1) - n * (n - 1) // 2


def _require_disc(domain: Domain, v: int, n: int, what: str):
    if not np.count_nonzero(_dist(domain, v) < n) == _half_disc_size(n):
        raise ValueError(
            f"{what}: H_{n}({v}) is clipped by the domain truncation "
            f"({domain.to_dict()}); enlarge truncation_factor"
        )


def _axis_mask(domain: Domain, pred) -> np.ndarray:
    return ((domain.rs == 0) & pred(domain.qs)).astype(np.uint8)


def _idx(mask) -> np.ndarray:
    return np.flatnonzero(mask).astype(np.int64)


def _check_pq(domain: Domain, k: int, n: int, what: str):
    if not -n / 2 <= k <= n / 2 - 1:
        raise ValueError(f"{what}: need -n/2 <= k <= n/2 - 1, got k={k}, n={n}")
    lo, hi = domain.axis_range
    if lo > -n - 1 or hi < n + 1:
        raise ValueError(
            f"{what}: the domain axis {lo}..{hi} must reach beyond -{n} and {n}; "
            "centre the domain at 0 with truncation_factor >= 2"
        )


def _check_disc_params(n: int, m: int, what: str):
    if not 1 <= m < n:
        raise ValueError(f"{what}: need 1 <= m < n, got m={m}, n={n}")


def _build(spec: EventSpec, dom: Domain) -> EventProgram:
    kind = spec.kind
    n = spec.n
    if kind == "D":
        if n < 2:
            raise ValueError("D: n must be at least 2")
        _require_disc(dom, spec.v, n, str(spec))
        d = _dist(dom, spec.v)
        return EventProgram(
            spec, dom, K.OP_FLOW, need=2, region=(d < n).astype(np.uint8),
            src1=_idx(d == 1), group=(d == n - 1).astype(np.uint8),
        )
    if kind in ("D_annulus", "G", "F"):
        _check_disc_params(n, spec.m, str(spec))
        _require_disc(dom, spec.v, n, str(spec))
        d = _dist(dom, spec.v)
        region = ((d >= spec.m) & (d < n)).astype(np.uint8)
        if kind == "F":
            left = region & _axis_mask(dom, lambda q: q < spec.v)
            right = region & _axis_mask(dom, lambda q: q > spec.v)
            if not left.any() or not right.any():
                raise ValueError(f"{spec}: an axis piece of the annulus is empty")
            return EventProgram(
                spec, dom, K.OP_PATH, want=int(spec.state), region=region,
                src1=_idx(left), mask1=right,
            )
        src = _idx(d == spec.m)
        tgt = (d == n - 1).astype(np.uint8)
        if kind == "G":
            return EventProgram(spec, dom, K.OP_PATH, region=region, src1=src, mask1=tgt)
        return EventProgram(spec, dom, K.OP_FLOW, need=2, region=region, src1=src, group=tgt)
    if kind in ("P", "Q", "P_union"):
        if kind != "P_union":
            _check_pq(dom, spec.k, n, str(spec))
        else:
            _check_pq(dom, -(n // 2), n, str(spec))
        L = _axis_mask(dom, lambda q: q < -n)
        Rm = _axis_mask(dom, lambda q: q > n)
        if kind == "P":
            return EventProgram(
                spec, dom, K.OP_P, src1=dom.indices([(spec.k, 0)]), mask1=L,
                src2=dom.indices([(spec.k + 1, 0)]), mask2=Rm,
            )
        if kind == "Q":
            return EventProgram(
                spec, dom, K.OP_FLOW, need=2, cap_a=1, cap_b=1,
                src1=dom.indices([(spec.k, 0), (spec.k + 1, 0)]),
                group=(L + 2 * Rm).astype(np.uint8),
            )
        ks = range(-(n // 2), (n + 1) // 2)
        ks = [k for k in ks if -n / 2 <= k <= n / 2 - 1]
        pairs = np.array(
            [dom.index((k + j, 0)) for k in ks for j in (0, 1)], dtype=np.int64
        )
        return EventProgram(spec, dom, K.OP_PUNION, src1=_idx(L), src2=_idx(Rm), extra=pairs)
    ell = _axis_mask(dom, lambda q: q < 0)
    rr = _axis_mask(dom, lambda q: q > n)
    if kind == "crossing_exists":
        return EventProgram(spec, dom, K.OP_PATH, src1=_idx(ell), mask1=rr, absorb=False)
    # A
    m = spec.m
    if m < 1 or n % m:
        raise ValueError(f"{spec}: m must be a positive divisor of n")
    ks = range(n // m + 1) if spec.k is None else [spec.k]
    if spec.k is not None and not 0 <= spec.k <= n // m:
        raise ValueError(f"{spec}: need 0 <= k <= n/m")
    U = np.zeros(dom.site_count, dtype=bool)
    for k in ks:
        _require_disc(dom, k * m, m, str(spec))
        U |= _dist(dom, k * m) < m
    return EventProgram(
        spec, dom, K.OP_A, src1=_idx(ell), mask1=ell, mask2=rr,
        group=(ell + 2 * rr).astype(np.uint8), extra=_idx(U),
    )


@lru_cache(maxsize=64)
def _compile_cached(spec: EventSpec, domain: Domain) -> EventProgram:
    return _build(spec, domain)


def compile_event(spec, domain: Domain) -> EventProgram:
    """
    Bind ``spec`` (an :class:`EventSpec` or its string form) to ``domain``.

    Raises ``ValueError`` when the parameters are inadmissible or the
    event's sets do not fit in the domain.
    """
    if isinstance(spec, str):
        spec = EventSpec.parse(spec)
    return _compile_cached(spec, domain)


# --- detectors -----------------------------------------------------------


def _axis_v(v) -> int:
    if isinstance(v, tuple):
        if v[1] != 0:
            raise ValueError("v must be an axis site")
        return int(v[0])
    return int(v)


def event_D(config: Configuration, v, n: int) -> bool:
    """Two disjoint occupied paths from the neighbours of ``v`` to ``dH_n(v)``."""
    return compile_event(EventSpec("D", n=n, v=_axis_v(v)), config.domain)(config)


def event_D_annulus(config: Configuration, v, n: int, m: int) -> bool:
    """Two disjoint occupied paths from the ring at ``m`` to ``dH_n(v)`` in the annulus."""
    return compile_event(EventSpec("D_annulus", n=n, m=m, v=_axis_v(v)), config.domain)(config)


def event_F(config: Configuration, v, n: int, m: int, state=StateFilter.OCCUPIED) -> bool:
    """A ``state`` half-circuit: the annulus's two axis pieces joined inside it."""
    spec = EventSpec("F", n=n, m=m, v=_axis_v(v), state=state)
    return compile_event(spec, config.domain)(config)


def event_G(config: Configuration, v, n: int, m: int) -> bool:
    """One occupied path from the ring at ``m`` to ``dH_n(v)`` in the annulus."""
    return compile_event(EventSpec("G", n=n, m=m, v=_axis_v(v)), config.domain)(config)


def event_P(config: Configuration, k: int, n: int) -> bool:
    """
    ``k`` joined to ``q < -n`` by an occupied path and ``k + 1`` joined to
    ``q > n`` by a vacant path.
    """
    return compile_event(EventSpec("P", n=n, k=k), config.domain)(config)


def event_Q(config: Configuration, k: int, n: int) -> bool:
    """
    Disjoint occupied paths from ``k`` to ``q < -n`` and from ``k + 1`` to
    ``q > n``.

    One max-flow with a unit-capacity sink per side: two disjoint paths
    from ``{k, k+1}`` with one ending on each side.  By planarity the
    path ending on the left is the one starting at ``k``.
    """
    return compile_event(EventSpec("Q", n=n, k=k), config.domain)(config)


def event_A(config: Configuration, n: int, m: int, k: int | None) -> bool:
    """
    Some occupied crossing from ``ell`` to ``r_side`` meets ``H_m(km)``
    (``k=None``: meets some ``H_m(jm)``).

    For each candidate site ``u`` of the disc the test is exact: ``u`` on
    a half-line needs one crossing started (or ended) at ``u``; any other
    ``u`` needs two disjoint paths from its neighbours, one to each
    half-line, which is a paired max-flow.
    """
    return compile_event(EventSpec("A", n=n, m=m, k=k), config.domain)(config)


def crossing_exists(config: Configuration) -> bool:
    """An occupied path joins the two half-lines inside the domain."""
    return compile_event(EventSpec("crossing_exists", n=config.domain.n), config.domain)(config)


def P_union(config: Configuration, n: int) -> bool:
    """Some ``P_{k,n}`` with ``-n/2 <= k <= n/2 - 1`` occurs."""
    return compile_event(EventSpec("P_union", n=n), config.domain)(config)
