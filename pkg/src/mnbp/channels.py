"""Binary channels and GF(q) noise-symbol likelihoods.

Every channel is reduced to the same form: a filled-in received bit vector
plus, per bit, the probability that the noise bit there is 1. The BEC fills
erasures with 0 at probability 1/2; the BI-AWGN channel takes the hard
decision and the posterior probability that it is wrong.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import popcount_table

KINDS = ("BSC", "BEC", "BIAWGN")
_ALIASES = {"BI-AWGN": "BIAWGN", "AWGN": "BIAWGN"}


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    param: float

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.upper(), self.kind.upper())
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "param", float(self.param))
        p = self.param
        if kind == "BSC" and not 0 < p < 0.5:
            raise ValueError(f"BSC flip rate must be in (0, 0.5), got {p}")
        if kind == "BEC" and not 0 < p < 1:
            raise ValueError(f"BEC erasure rate must be in (0, 1), got {p}")
        if kind == "BIAWGN" and not p > 0:
            raise ValueError(f"BI-AWGN sigma must be positive, got {p}")
        if kind not in KINDS:
            raise ValueError(f"unknown channel {self.kind!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class ChannelOutput:
    filled_bits: np.ndarray
    bit_flip_prob: np.ndarray

    @property
    def n_bits(self) -> int:
        return self.filled_bits.shape[-1]


def transmit(t_bits, spec: ChannelSpec, rng: np.random.Generator) -> ChannelOutput:
    """Send a bit array (any shape) through the channel."""
    t = np.asarray(t_bits, dtype=np.uint8)
    if spec.kind == "BSC":
        flips = (rng.random(t.shape) < spec.param).astype(np.uint8)
        return ChannelOutput(t ^ flips, np.full(t.shape, spec.param))
    if spec.kind == "BEC":
        erased = rng.random(t.shape) < spec.param
        filled = np.where(erased, 0, t).astype(np.uint8)
        return ChannelOutput(filled, np.where(erased, 0.5, 0.0))
    sigma = spec.param
    y = 1.0 - 2.0 * t + sigma * rng.standard_normal(t.shape)
    return ChannelOutput(*awgn_hard_decision(y, sigma))


def awgn_hard_decision(y, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Hard decisions (y < 0 -> 1) and their error probabilities."""
    y = np.asarray(y, dtype=float)
    hard = (y < 0).astype(np.uint8)
    # 1 / (1 + exp(2|y|/sigma^2)), written to stay finite for large |y|
    p_wrong = np.exp(-np.logaddexp(0.0, 2.0 * np.abs(y) / sigma**2))
    return hard, p_wrong


def noise_symbol_prior(output: ChannelOutput, j: int, q: int) -> np.ndarray:
    """Likelihood vector of noise symbol ``j`` (bits ``j*m .. j*m+m-1``)."""
    m = q.bit_length() - 1
    n_sym = output.n_bits // m
    if not 0 <= j < n_sym:
        raise IndexError(f"noise symbol {j} out of range [0, {n_sym})")
    return noise_priors(output.bit_flip_prob[j * m:(j + 1) * m], q)[0]


def noise_priors(bit_flip_prob, q: int) -> np.ndarray:
    """Product-measure priors for all noise symbols, shape ``(n_sym, q)``.

    ``Q^a = prod_k (p_k if bit k of a is set else 1 - p_k)``; for a BSC this
    is ``f^L (1-f)^(m-L)`` with L the popcount of a.
    """
    m = q.bit_length() - 1
    p = np.asarray(bit_flip_prob, dtype=float).reshape(-1, m)
    a_bits = (np.arange(q)[:, None] >> np.arange(m)) & 1        # (q, m)
    factors = np.where(a_bits[None, :, :] == 1, p[:, None, :], 1.0 - p[:, None, :])
    return factors.prod(axis=-1)


def bsc_symbol_prior(f: float, q: int) -> np.ndarray:
    """Closed form ``f^L (1-f)^(log2 q - L)`` for a BSC."""
    m = q.bit_length() - 1
    L = popcount_table(q)
    return f**L * (1.0 - f) ** (m - L)
