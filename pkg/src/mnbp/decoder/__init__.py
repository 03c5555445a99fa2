from .core import (
    DEFAULT_MAX_ITERS,
    ContradictoryMessagesError,
    DecodeResult,
    MessageSet,
    TannerGraph,
    check_node_update,
    compute_posterior,
    decode,
    decode_pus,
    decode_sus,
    init_messages,
    messages_from_priors,
    tanner_graph,
    update_markov_priors,
    variable_node_update,
)
from .kernels import get_backend

__all__ = [
    "DEFAULT_MAX_ITERS",
    "ContradictoryMessagesError",
    "DecodeResult",
    "MessageSet",
    "TannerGraph",
    "check_node_update",
    "compute_posterior",
    "decode",
    "decode_pus",
    "decode_sus",
    "get_backend",
    "init_messages",
    "messages_from_priors",
    "tanner_graph",
    "update_markov_priors",
    "variable_node_update",
]
