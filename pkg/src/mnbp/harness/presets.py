"""Noise levels calibrated for the default construction (N_bits = 1002, rate 1/3,
column weight 3).

Each level was found with :func:`calibrate` (40 trials, base seed 1000, target
mean PUS load of 45 iterations) and then frozen here so reference runs do not
repeat the bisection.
"""
from __future__ import annotations

from .config import ExperimentConfig

SOURCE_FOR_Q = {2: "iid", 4: "markov4s", 8: "markov2s"}

CALIBRATED_NOISE = {
    ("BSC", 2): 0.12526,
    ("BSC", 4): 0.2112,
    ("BSC", 8): 0.29649,
    ("BEC", 2): 0.58679,
    ("BEC", 4): 0.76169,
    ("BEC", 8): 0.88694,
    ("BIAWGN", 2): 1.0759,
    ("BIAWGN", 4): 1.5188,
    ("BIAWGN", 8): 2.3573,
}


def reference_config(channel: str, q: int, **overrides) -> ExperimentConfig:
    """Config for one of the nine reference settings at its calibrated noise."""
    kw = dict(q=q, channel=channel, source=SOURCE_FOR_Q[q],
              noise=[CALIBRATED_NOISE[channel, q]])
    kw.update(overrides)
    return ExperimentConfig(**kw)
