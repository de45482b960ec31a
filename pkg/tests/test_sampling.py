import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lowxing.lattice import Domain
from lowxing.sampling import (
    Configuration,
    config_from_json,
    config_to_json,
    from_bits,
    sample,
    to_bits,
)

DOM = Domain(8, 2.0)


@given(st.integers(0, 2**63), st.integers(0, 10**9))
def test_sampling_is_deterministic(seed, trial):
    a = sample(DOM, 0.5, seed, trial)
    b = sample(DOM, 0.5, seed, trial)
    assert a == b


def test_trials_and_seeds_differ():
    base = sample(DOM, 0.5, 1, 0)
    assert base != sample(DOM, 0.5, 1, 1)
    assert base != sample(DOM, 0.5, 2, 0)


def test_extreme_p():
    assert sample(DOM, 1.0, 3, 4).occupancy.all()
    assert not sample(DOM, 0.0, 3, 4).occupancy.any()
    with pytest.raises(ValueError):
        sample(DOM, 1.5, 0, 0)
    with pytest.raises(ValueError):
        sample(DOM, 0.5, 0, -1)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_occupation_frequency(p):
    dom = Domain(64, 4.0)
    occ = np.concatenate([sample(dom, p, 11, t).occupancy for t in range(5)])
    se = np.sqrt(p * (1 - p) / occ.size)
    assert abs(occ.mean() - p) < 5 * se


def test_sites_uncorrelated():
    dom = Domain(64, 4.0)
    occ = sample(dom, 0.5, 5, 0).occupancy.astype(float) - 0.5
    corr = np.mean(occ[1:] * occ[:-1]) / 0.25
    assert abs(corr) < 5 / np.sqrt(occ.size)


def test_monotone_coupling():
    lo = sample(DOM, 0.3, 9, 2).occupancy
    hi = sample(DOM, 0.7, 9, 2).occupancy
    assert np.all(lo <= hi)


@given(st.lists(st.integers(0, 1), min_size=DOM.site_count, max_size=DOM.site_count))
def test_bits_and_json_roundtrip(bits):
    cfg = from_bits(DOM, bits)
    assert list(to_bits(cfg)) == bits
    assert config_from_json(config_to_json(cfg)) == cfg
    assert cfg.complement().complement() == cfg


def test_sampled_json_roundtrip():
    cfg = sample(DOM, 0.5, 42, 17)
    back = config_from_json(config_to_json(cfg))
    assert back == cfg and back.trial_index == 17


def test_configuration_validation():
    with pytest.raises(ValueError):
        from_bits(DOM, [0, 1])
    with pytest.raises(ValueError):
        Configuration(DOM, np.full(DOM.site_count, 2))
    cfg = from_bits(DOM, np.zeros(DOM.site_count))
    s = DOM.sites[3]
    assert cfg.with_states({s: 1}).is_occupied(s)
    assert cfg.with_states({s: 1}).occupied_sites() == {s}
