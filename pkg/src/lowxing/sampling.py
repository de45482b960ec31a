"""
Reproducible site-percolation configurations.

Every site's state is a Bernoulli(p) draw computed from a 64-bit hash of
``(master_seed, trial_index, site_index)``.  Nothing is advanced
sequentially, so a trial can be regenerated in isolation and the result
never depends on how trials are spread over workers.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels as K
from .lattice import Domain, SiteCoord

__all__ = [
    "Configuration",
    "sample",
    "from_bits",
    "to_bits",
    "config_to_json",
    "config_from_json",
]

_SEED_MASK = (1 << 64) - 1


def _seed64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & _SEED_MASK)


@dataclass(frozen=True, eq=False)
class Configuration:
    """
    One occupancy assignment over a domain.

    ``occupancy[i]`` is 1 when the site with index ``i`` is occupied.  For
    explicit configurations (built from bits rather than sampled) ``p``,
    ``master_seed`` and ``trial_index`` are ``None``.
    """

    domain: Domain
    occupancy: np.ndarray = field(repr=False)
    p: float | None = None
    master_seed: int | None = None
    trial_index: int | None = None

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancy, dtype=np.uint8)
        if occ.shape != (self.domain.site_count,):
            raise ValueError(
                f"occupancy has shape {occ.shape}, expected ({self.domain.site_count},)"
            )
        if occ.size and occ.max() > 1:
            raise ValueError("occupancy entries must be 0 or 1")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @property
    def explicit(self) -> bool:
        return self.p is None

    def is_occupied(self, site) -> bool:
        return bool(self.occupancy[self.domain.index(site)])

    def occupied_sites(self) -> frozenset[SiteCoord]:
        return frozenset(self.domain.site(int(i)) for i in np.flatnonzero(self.occupancy))

    def complement(self) -> "Configuration":
        """Swap occupied and vacant everywhere (an explicit configuration)."""
        return Configuration(self.domain, 1 - self.occupancy)

    def with_states(self, states: dict) -> "Configuration":
        """Copy with the given ``{site: 0/1}`` overrides (explicit)."""
        occ = self.occupancy.copy()
        for s, v in states.items():
            occ[self.domain.index(s)] = 1 if v else 0
        return Configuration(self.domain, occ)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.occupancy, other.occupancy)

    __hash__ = None


def sample(domain: Domain, p: float, master_seed: int, trial_index: int) -> Configuration:
    """Draw the configuration of trial ``trial_index`` under ``master_seed``."""
    if trial_index < 0:
        raise ValueError("trial_index must be nonnegative")
    bits = K.sample_bits(
        _seed64(master_seed), np.uint64(trial_index), K.threshold(p), domain.site_count
    )
    return Configuration(domain, bits, float(p), int(master_seed), int(trial_index))


def from_bits(domain: Domain, bits) -> Configuration:
    """Explicit configuration; bit ``i`` is the site with index ``i``."""
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size != domain.site_count:
        raise ValueError(
            f"got {arr.size} bits for a domain with {domain.site_count} sites"
        )
    return Configuration(domain, arr)


def to_bits(config: Configuration) -> np.ndarray:
    return config.occupancy.copy()


def config_to_json(config: Configuration) -> str:
    d = config.domain.to_dict()
    d.pop("site_count")
    if config.explicit:
        packed = np.packbits(config.occupancy, bitorder="little").tobytes()
        d["bits"] = base64.b64encode(packed).decode("ascii")
    else:
        d.update(p=config.p, master_seed=config.master_seed, trial_index=config.trial_index)
    return json.dumps(d, sort_keys=True)


def config_from_json(text: str) -> Configuration:
    d = json.loads(text)
    domain = Domain.from_dict(d)
    if "bits" in d:
        raw = np.frombuffer(base64.b64decode(d["bits"]), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[: domain.site_count]
        if bits.size != domain.site_count:
            raise ValueError("bit string too short for the domain")
        return from_bits(domain, bits)
    return sample(domain, float(d["p"]), int(d["master_seed"]), int(d["trial_index"]))


class Workspace:
    """
    Scratch buffers for the compiled kernels on one domain.

    Holds the stamped state cache plus search, flow and walk buffers; the
    larger ones are allocated on first use.  ``ctr`` carries the stamp
    counters ``[flow, flow_search, search, state, path]`` so kernels can
    advance them in place.  Not shareable between threads; each worker
    process builds its own.
    """

    def __init__(self, domain: Domain):
        self.domain = domain
        N = domain.site_count
        self.N = N
        self.geom = np.array(domain.geom, dtype=np.int64)
        self.qs = domain.qs
        self.rs = domain.rs
        self.stamp = np.zeros(N, dtype=np.int64)
        self.cache = np.zeros(N, dtype=np.uint8)
        self.ctr = np.zeros(5, dtype=np.int64)
        self.key = np.uint64(0)
        self.thresh = np.uint64(0)
        self.wq = np.zeros(4096, dtype=np.int64)
        self.wr = np.zeros(4096, dtype=np.int64)

    @cached_property
    def vis(self):
        return np.zeros(self.N, dtype=np.int64)

    @cached_property
    def queue(self):
        return np.zeros(max(self.N, 1), dtype=np.int64)

    @cached_property
    def on_path(self):
        return np.zeros(self.N, dtype=np.int64)

    @cached_property
    def pred(self):
        return np.zeros(self.N, dtype=np.int64)

    @cached_property
    def pvis(self):
        return np.zeros(2 * self.N + 2, dtype=np.int64)

    @cached_property
    def parent(self):
        return np.zeros(2 * self.N + 2, dtype=np.int64)

    @cached_property
    def fqueue(self):
        return np.zeros(2 * self.N + 2, dtype=np.int64)

    @cached_property
    def pos(self):
        return np.zeros(K.code_space(self.domain.geom, self.N), dtype=np.int64)

    @cached_property
    def pstamp(self):
        return np.zeros(K.code_space(self.domain.geom, self.N), dtype=np.int64)

    @property
    def cur(self) -> int:
        return int(self.ctr[3])

    def search_buffers(self):
        return (self.vis, self.queue, self.on_path, self.pred, self.pvis,
                self.parent, self.fqueue, self.ctr)

    def load(self, config: Configuration):
        if config.domain != self.domain:
            raise ValueError("configuration belongs to a different domain")
        self.ctr[3] += 1
        self.stamp[:] = self.ctr[3]
        self.cache[:] = config.occupancy
        self.key = np.uint64(0)
        self.thresh = np.uint64(0)

    def begin_trial(self, master_seed: int, trial_index: int, p: float):
        self.ctr[3] += 1
        self.key = K.trial_key(_seed64(master_seed), np.uint64(trial_index))
        self.thresh = K.threshold(p)

    def state_args(self):
        return self.stamp, self.cache, self.cur, self.key, self.thresh

    def next_vcur(self) -> int:
        self.ctr[2] += 1
        return int(self.ctr[2])

    def next_pcur(self) -> int:
        self.ctr[4] += 1
        return int(self.ctr[4])


_WORKSPACES: dict = {}


def workspace(domain: Domain) -> Workspace:
    ws = _WORKSPACES.get(domain)
    if ws is None:
        if len(_WORKSPACES) > 16:
            _WORKSPACES.clear()
        ws = _WORKSPACES[domain] = Workspace(domain)
    return ws
