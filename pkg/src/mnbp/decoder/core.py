"""Belief-propagation decoding of MN codes over GF(q).

The decoder recovers ``x = [s; n]`` from the syndrome ``z = H x``. Two
schedules are provided:

``decode_pus``
    flooding: every check message is recomputed from the previous
    iteration's variable messages, then every variable message.
``decode_sus``
    sequential: columns are swept in order; each column first refreshes the
    check messages it receives (using the freshest variable messages of the
    other columns) and then its own outgoing messages.

For Markov sources the source-symbol priors are re-estimated after every
iteration from the neighbouring posteriors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channels import ChannelOutput, noise_priors
from ..code import SparseCode, check_solution
from ..gf import popcount_table
from ..source import MarkovModel
from . import _pykernels
from .kernels import get_backend

DEFAULT_MAX_ITERS = 200


class ContradictoryMessagesError(ArithmeticError):
    """A variable's incoming evidence multiplies to the zero vector."""


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Edge-indexed view of H shared by both kernel backends."""

    q: int
    n_checks: int
    n_vars: int
    row_ptr: np.ndarray
    edge_row: np.ndarray
    edge_col: np.ndarray
    edge_h: np.ndarray
    col_ptr: np.ndarray
    col_edges: np.ndarray
    mul: np.ndarray

    @classmethod
    def from_code(cls, code: SparseCode) -> "TannerGraph":
        H = code.H
        colptr, _, _, csr_pos = H.csc()
        edge_row = np.repeat(np.arange(H.rows, dtype=np.int64), np.diff(H.indptr))
        return cls(
            q=code.q,
            n_checks=H.rows,
            n_vars=H.cols,
            row_ptr=np.ascontiguousarray(H.indptr, dtype=np.int64),
            edge_row=edge_row,
            edge_col=np.ascontiguousarray(H.indices, dtype=np.int64),
            edge_h=np.ascontiguousarray(H.data, dtype=np.uint8),
            col_ptr=np.ascontiguousarray(colptr, dtype=np.int64),
            col_edges=np.ascontiguousarray(csr_pos, dtype=np.int64),
            mul=np.ascontiguousarray(code.tables.mul),
        )

    @property
    def n_edges(self) -> int:
        return len(self.edge_col)

    def edge(self, i: int, j: int) -> int:
        lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
        k = lo + np.searchsorted(self.edge_col[lo:hi], j)
        if k >= hi or self.edge_col[k] != j:
            raise KeyError(f"H[{i}, {j}] is zero")
        return int(k)


def tanner_graph(code: SparseCode) -> TannerGraph:
    """Cached :class:`TannerGraph` of a code."""
    g = code.__dict__.get("_tanner")
    if g is None:
        g = TannerGraph.from_code(code)
        object.__setattr__(code, "_tanner", g)
    return g


@dataclass
class MessageSet:
    """``q_msg``/``r_msg`` per edge of H, ``prior``/``post`` per variable."""

    q_msg: np.ndarray
    r_msg: np.ndarray
    prior: np.ndarray
    post: np.ndarray

    def copy(self) -> "MessageSet":
        return MessageSet(self.q_msg.copy(), self.r_msg.copy(), self.prior.copy(), self.post.copy())


@dataclass
class DecodeResult:
    converged: bool
    iterations: int
    x_hat: np.ndarray
    correct_source_fraction_per_iter: list[float] = field(default_factory=list)
    contradiction: bool = False


def messages_from_priors(code: SparseCode, prior) -> MessageSet:
    """Messages with every outgoing q on variable j equal to its prior."""
    g = tanner_graph(code)
    prior = np.array(prior, dtype=float).reshape(code.n_vars, code.q)
    q_msg = np.ascontiguousarray(prior[g.edge_col])
    r_msg = np.full((g.n_edges, code.q), 1.0 / code.q)
    return MessageSet(q_msg, r_msg, prior, prior.copy())


def init_messages(code: SparseCode, channel_output: ChannelOutput,
                  source_model: MarkovModel) -> MessageSet:
    """Source priors from the stationary law, noise priors from the channel."""
    if source_model.q < code.q:
        source_model = source_model.embed(code.q)
    if source_model.q != code.q:
        raise ValueError(f"source alphabet {source_model.q} does not match GF({code.q})")
    if channel_output.n_bits != code.M_len * code.m:
        raise ValueError(f"channel output has {channel_output.n_bits} bits, "
                         f"expected {code.M_len * code.m}")
    prior = np.empty((code.n_vars, code.q))
    prior[: code.N] = source_model.pi
    prior[code.N:] = noise_priors(channel_output.bit_flip_prob, code.q)
    return messages_from_priors(code, prior)


def check_node_update(code: SparseCode, msgs: MessageSet, i: int, j: int, z_i: int) -> np.ndarray:
    """r message from check i to variable j (direct convolution)."""
    g = tanner_graph(code)
    e = g.edge(i, j)
    z = np.zeros(g.n_checks, dtype=np.uint8)
    z[i] = z_i
    return _pykernels.check_update_edge(g.row_ptr, g.edge_h, msgs.q_msg, z, g.mul, i, e)


def _column_product(code, msgs, j, skip_edge=None):
    g = tanner_graph(code)
    acc = msgs.prior[j].copy()
    for e in g.col_edges[g.col_ptr[j]:g.col_ptr[j + 1]]:
        if e == skip_edge:
            continue
        acc *= msgs.r_msg[e]
        mx = acc.max()
        if mx > 0:
            acc /= mx
    total = acc.sum()
    if not total > 0:
        raise ContradictoryMessagesError(f"zero evidence at variable {j}")
    return acc / total


def variable_node_update(code: SparseCode, msgs: MessageSet, i: int, j: int) -> np.ndarray:
    """q message from variable j to check i: prior times the other checks' r."""
    return _column_product(code, msgs, j, skip_edge=tanner_graph(code).edge(i, j))


def compute_posterior(code: SparseCode, msgs: MessageSet, j: int) -> np.ndarray:
    """Pseudo-posterior of variable j: prior times all incoming r."""
    return _column_product(code, msgs, j)


def update_markov_priors(msgs: MessageSet, model: MarkovModel, N: int) -> None:
    """Re-estimate source priors from neighbouring posteriors, in place.

    ``p_i(b) ~ [sum_a Q_{i-1}(a) T[a,b]] * [sum_c T[b,c] Q_{i+1}(c)]``, with
    only the available factor at either end of the block. All factors are
    taken from a snapshot of the posteriors.
    """
    if N < 2:
        return
    T = model.T
    Q = msgs.post[:N].copy()
    left = Q[:-1] @ T             # left[k] is the factor for symbol k + 1
    right = Q[1:] @ T.T           # right[k] is the factor for symbol k
    new = np.empty_like(Q)
    new[0] = right[0]
    new[-1] = left[-1]
    new[1:-1] = left[:-1] * right[1:]
    tot = new.sum(axis=1, keepdims=True)
    if not np.all(tot > 0):
        raise ContradictoryMessagesError("Markov prior update produced a zero vector")
    msgs.prior[:N] = new / tot


def _source_bit_errors(x_hat, truth_src, N, pop):
    return int(pop[np.bitwise_xor(x_hat[:N], truth_src)].sum())


def _decode(schedule, code, z, msgs, max_iters, truth, source_model, early_stop,
            order, backend):
    kern = get_backend(backend)
    g = tanner_graph(code)
    z = np.ascontiguousarray(z, dtype=np.uint8)
    if z.shape != (code.M_len,):
        raise ValueError(f"syndrome length {z.shape} != ({code.M_len},)")
    markov = source_model is not None and not source_model.is_iid
    if markov and source_model.q < code.q:
        source_model = source_model.embed(code.q)
    if order is None:
        order = np.arange(code.n_vars, dtype=np.int64)
    else:
        order = np.ascontiguousarray(order, dtype=np.int64)

    N = code.N
    pop = popcount_table(code.q)
    n_src_bits = N * code.m
    truth_src = None if truth is None else np.asarray(truth, dtype=np.uint8)[:N]

    x_hat = np.argmax(msgs.post, axis=1).astype(np.uint8)
    traj: list[float] = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        if schedule == "pus":
            kern.horizontal_pass(g.row_ptr, g.edge_h, msgs.q_msg, msgs.r_msg, z, g.mul)
            status = kern.vertical_pass(g.col_ptr, g.col_edges, msgs.prior, msgs.r_msg,
                                        msgs.q_msg, msgs.post)
        else:
            status = kern.sus_sweep(g.row_ptr, g.edge_row, g.edge_h, g.col_ptr, g.col_edges,
                                    order, msgs.prior, msgs.q_msg, msgs.r_msg, msgs.post,
                                    z, g.mul)
        if status:
            return DecodeResult(False, it, x_hat, traj, contradiction=True)
        x_hat = np.argmax(msgs.post, axis=1).astype(np.uint8)
        if truth_src is not None and n_src_bits:
            traj.append(1.0 - _source_bit_errors(x_hat, truth_src, N, pop) / n_src_bits)
        converged = check_solution(code, x_hat, z)
        if converged and early_stop:
            break
        if markov:
            try:
                update_markov_priors(msgs, source_model, N)
            except ContradictoryMessagesError:
                return DecodeResult(False, it, x_hat, traj, contradiction=True)
    return DecodeResult(converged, it, x_hat, traj)


def decode_pus(code: SparseCode, z, msgs: MessageSet, max_iters: int = DEFAULT_MAX_ITERS,
               truth=None, *, source_model: MarkovModel | None = None,
               early_stop: bool = True, backend=None) -> DecodeResult:
    """Flooding-schedule BP. ``msgs`` is updated in place.

    Stops at the first iteration whose hard decisions satisfy ``H x = z``
    unless ``early_stop`` is false, in which case exactly ``max_iters``
    iterations run. ``truth`` (the true ``x``) enables the per-iteration
    correct-source-bit trajectory.
    """
    return _decode("pus", code, z, msgs, max_iters, truth, source_model, early_stop,
                   None, backend)


def decode_sus(code: SparseCode, z, msgs: MessageSet, max_iters: int = DEFAULT_MAX_ITERS,
               truth=None, *, source_model: MarkovModel | None = None,
               early_stop: bool = True, order=None, rng=None, backend=None) -> DecodeResult:
    """Sequential-schedule BP; columns swept in natural order by default.

    Passing ``rng`` instead draws one random column order, kept for all
    iterations.
    """
    if order is None and rng is not None:
        order = rng.permutation(code.n_vars)
    return _decode("sus", code, z, msgs, max_iters, truth, source_model, early_stop,
                   order, backend)


def decode(schedule: str, *args, **kwargs) -> DecodeResult:
    schedule = schedule.lower()
    if schedule == "pus":
        return decode_pus(*args, **kwargs)
    if schedule == "sus":
        return decode_sus(*args, **kwargs)
    raise ValueError(f"unknown schedule {schedule!r}; expected 'pus' or 'sus'")
