"""i.i.d. and Markov sources over GF(q) alphabets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

MARKOV_2S = np.array([
    [0.89, 0.11],
    [0.11, 0.89],
])

MARKOV_4S = np.array([
    [0.808022, 0.0883281, 0.0130689, 0.0905813],
    [0.128676, 0.0514706, 0.0772059, 0.742647],
    [0.755814, 0.108527, 0.0116279, 0.124031],
    [0.866667, 0.0151111, 0.091556, 0.0266659],
])

# Published matrices are rounded; rows are renormalised if within this of 1.
_ROW_SUM_SLACK = 1e-4


class NotIrreducibleError(ValueError):
    """The chain has no unique stationary distribution."""


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """Row-stochastic transition matrix ``T[a, b] = Pr(next=b | current=a)``."""

    T: np.ndarray
    pi: np.ndarray
    name: str = "custom"

    @classmethod
    def from_matrix(cls, T, name: str = "custom", pi=None) -> "MarkovModel":
        T = np.array(T, dtype=float)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] < 1:
            raise ValueError(f"transition matrix must be square, got shape {T.shape}")
        if np.any(T < 0):
            raise ValueError("transition probabilities must be non-negative")
        dev = np.abs(T.sum(axis=1) - 1.0)
        if np.any(dev >= _ROW_SUM_SLACK):
            raise ValueError(f"rows must sum to 1 (max deviation {dev.max():.3g})")
        T = T / T.sum(axis=1, keepdims=True)
        pi = stationary_distribution(T) if pi is None else np.asarray(pi, dtype=float)
        T.setflags(write=False)
        pi.setflags(write=False)
        return cls(T, pi, name)

    @property
    def q(self) -> int:
        return self.T.shape[0]

    @property
    def is_iid(self) -> bool:
        return bool(np.allclose(self.T, self.T[0], atol=0, rtol=1e-12))

    @property
    def entropy_rate(self) -> float:
        return entropy_rate(self)

    def embed(self, q: int) -> "MarkovModel":
        """The same chain on the first ``self.q`` symbols of a size-q alphabet.

        Unused symbols get a self-loop (keeping rows stochastic) and zero
        stationary mass, so they are never emitted.
        """
        k = self.q
        if q == k:
            return self
        if q < k:
            raise ValueError(f"cannot embed a {k}-symbol source in GF({q})")
        T = np.eye(q)
        T[:k, :k] = self.T
        pi = np.zeros(q)
        pi[:k] = self.pi
        return MarkovModel.from_matrix(T, name=self.name, pi=pi)


def _is_irreducible(T: np.ndarray) -> bool:
    n, _ = connected_components(T > 0, directed=True, connection="strong")
    return n == 1


def stationary_distribution(T: np.ndarray, tol: float = 1e-15, max_iter: int = 100_000) -> np.ndarray:
    """Power iteration on the lazy chain ``(I + T) / 2`` (same fixed point, aperiodic)."""
    T = np.asarray(T, dtype=float)
    if not _is_irreducible(T):
        raise NotIrreducibleError("transition matrix is not irreducible")
    lazy = 0.5 * (np.eye(len(T)) + T)
    pi = np.full(len(T), 1.0 / len(T))
    for _ in range(max_iter):
        nxt = pi @ lazy
        nxt /= nxt.sum()
        if np.abs(nxt - pi).max() < tol:
            pi = nxt
            break
        pi = nxt
    return pi


def entropy_rate(model: MarkovModel) -> float:
    """``-sum_a pi_a sum_b T[a,b] log2 T[a,b]`` in bits per symbol."""
    if not _is_irreducible(model.T):
        raise NotIrreducibleError("entropy rate needs a unique stationary distribution")
    T = model.T
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(T > 0, T * np.log2(np.where(T > 0, T, 1.0)), 0.0)
    return float(-(model.pi[:, None] * terms).sum())


def builtin_model(name: str, q: int | None = None) -> MarkovModel:
    """``markov2s``, ``markov4s`` or ``iid`` (the latter needs ``q``)."""
    key = name.lower()
    if key == "markov2s":
        return MarkovModel.from_matrix(MARKOV_2S, name="markov2s")
    if key == "markov4s":
        return MarkovModel.from_matrix(MARKOV_4S, name="markov4s")
    if key == "iid":
        if q is None:
            raise ValueError("the iid model needs an alphabet size q")
        return MarkovModel.from_matrix(np.full((q, q), 1.0 / q), name="iid")
    raise ValueError(f"unknown source model {name!r}; expected markov2s, markov4s or iid")


def load_model(path) -> MarkovModel:
    """Read ``q`` on the first line, then q rows of q probabilities."""
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty transition-matrix file")
    try:
        q = int(lines[0][0])
        rows = [[float(v) for v in ln] for ln in lines[1:]]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed transition-matrix file ({exc})") from None
    if len(rows) != q or any(len(r) != q for r in rows):
        raise ValueError(f"{path}: expected {q} rows of {q} values")
    return MarkovModel.from_matrix(rows, name=str(path))


def resolve_model(name_or_path: str, q: int) -> MarkovModel:
    """Built-in name or matrix file, embedded into GF(q)."""
    try:
        model = builtin_model(name_or_path, q)
    except ValueError:
        model = load_model(name_or_path)
    return model.embed(q)


def generate(model: MarkovModel, N: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a length-N sequence: first symbol from pi, then along T."""
    if N < 1:
        raise ValueError("N must be at least 1")
    u = rng.random(N)
    out = np.empty(N, dtype=np.uint8)
    if model.is_iid:
        cdf = np.cumsum(model.T[0])
        out[:] = np.searchsorted(cdf / cdf[-1], u, side="right")
        return out
    cdf = np.cumsum(model.T, axis=1)
    cdf /= cdf[:, -1:]
    pi_cdf = np.cumsum(model.pi)
    pi_cdf /= pi_cdf[-1]
    state = int(np.searchsorted(pi_cdf, u[0], side="right"))
    out[0] = state
    for k in range(1, N):
        state = int(np.searchsorted(cdf[state], u[k], side="right"))
        out[k] = state
    return out
