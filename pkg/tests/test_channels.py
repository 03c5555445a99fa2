import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mnbp.channels import (
    ChannelOutput,
    ChannelSpec,
    awgn_hard_decision,
    bsc_symbol_prior,
    noise_priors,
    noise_symbol_prior,
    transmit,
)
from mnbp.gf import bits_to_symbols


def test_spec_validation():
    for kind, p in [("BSC", 0.5), ("BSC", 0.0), ("BEC", 1.0), ("BIAWGN", 0.0), ("QSC", 0.1)]:
        with pytest.raises(ValueError):
            ChannelSpec(kind, p)
    assert ChannelSpec("bi-awgn", 1.0).kind == "BIAWGN"


def test_bsc_tiny_flip_rate(rng):
    t = rng.integers(0, 2, 10_000).astype(np.uint8)
    out = transmit(t, ChannelSpec("BSC", 1e-12), rng)
    assert np.array_equal(out.filled_bits, t)
    assert np.all(out.bit_flip_prob == 1e-12)


def test_bec_never_flips(rng):
    t = rng.integers(0, 2, 10_000).astype(np.uint8)
    out = transmit(t, ChannelSpec("BEC", 0.4), rng)
    known = out.bit_flip_prob == 0
    assert np.array_equal(out.filled_bits[known], t[known])
    assert set(np.unique(out.bit_flip_prob)) <= {0.0, 0.5}
    assert not out.filled_bits[~known].any()


def test_awgn_zero_observation():
    hard, p = awgn_hard_decision(np.array([0.0, 2.0, -2.0]), 1.0)
    assert p[0] == 0.5
    assert hard.tolist() == [0, 0, 1]
    assert p[1] == pytest.approx(1 / (1 + np.exp(4.0)))


def test_awgn_flip_prob_range(rng):
    out = transmit(np.zeros(5000, np.uint8), ChannelSpec("BIAWGN", 0.8), rng)
    assert np.all(out.bit_flip_prob > 0) and np.all(out.bit_flip_prob <= 0.5)


@pytest.mark.parametrize("kind,p", [("BSC", 0.155), ("BEC", 0.3)])
def test_empirical_rates(rng, kind, p):
    n = 200_000
    t = rng.integers(0, 2, n).astype(np.uint8)
    out = transmit(t, ChannelSpec(kind, p), rng)
    if kind == "BSC":
        frac = np.mean(out.filled_bits != t)
    else:
        frac = np.mean(out.bit_flip_prob == 0.5)
    assert abs(frac - p) < 3 * np.sqrt(p * (1 - p) / n)


def test_awgn_flip_prob_is_calibrated(rng):
    # the reported probability of a wrong hard decision should match reality
    n = 200_000
    t = rng.integers(0, 2, n).astype(np.uint8)
    out = transmit(t, ChannelSpec("BIAWGN", 0.9), rng)
    wrong = out.filled_bits != t
    assert abs(wrong.mean() - out.bit_flip_prob.mean()) < 4 * np.sqrt(0.1 / n) + 1e-3


def test_bsc_prior_example():
    out = ChannelOutput(np.zeros(3, np.uint8), np.full(3, 0.1))
    prior = noise_symbol_prior(out, 0, 8)
    assert prior[3] == pytest.approx(0.1**2 * 0.9)
    assert np.allclose(prior, bsc_symbol_prior(0.1, 8))


def test_bec_erased_symbol_uniform():
    out = ChannelOutput(np.zeros(4, np.uint8), np.array([0.0, 0.0, 0.5, 0.5]))
    assert np.allclose(noise_symbol_prior(out, 1, 4), [0.25] * 4)
    assert noise_symbol_prior(out, 0, 4).tolist() == [1.0, 0.0, 0.0, 0.0]


def test_single_bit_prior():
    out = ChannelOutput(np.zeros(1, np.uint8), np.array([0.2]))
    assert np.allclose(noise_symbol_prior(out, 0, 2), [0.8, 0.2])


def test_index_out_of_range():
    out = ChannelOutput(np.zeros(6, np.uint8), np.full(6, 0.1))
    with pytest.raises(IndexError):
        noise_symbol_prior(out, 2, 8)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["BSC", "BEC", "BIAWGN"]), st.sampled_from([2, 4, 8]),
       st.integers(0, 2**32 - 1))
def test_priors_normalised_and_truth_supported(kind, q, seed):
    rng = np.random.default_rng(seed)
    m = q.bit_length() - 1
    param = {"BSC": 0.2, "BEC": 0.6, "BIAWGN": 1.2}[kind]
    t = rng.integers(0, 2, 30 * m).astype(np.uint8)
    out = transmit(t, ChannelSpec(kind, param), rng)
    pri = noise_priors(out.bit_flip_prob, q)
    assert np.allclose(pri.sum(axis=1), 1.0, atol=1e-12)
    n_true = bits_to_symbols(out.filled_bits ^ t, m)
    assert np.all(pri[np.arange(30), n_true] > 0)
