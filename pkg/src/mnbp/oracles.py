"""Brute-force reference computations used by the self-test and test suite.

Nothing here touches the log/antilog tables or the decoder kernels: field
products are carry-less polynomial multiplications reduced by hand, and
marginals come from exhaustive enumeration.
"""
from __future__ import annotations

import itertools

import numpy as np

from .code import SparseCode, SparseMatrix


def poly_mul(x: int, y: int, poly: int, m: int) -> int:
    """Carry-less product of two GF(2) polynomials reduced modulo ``poly``."""
    acc = 0
    for k in range(m):
        if (y >> k) & 1:
            acc ^= x << k
    for k in range(2 * m - 2, m - 1, -1):
        if (acc >> k) & 1:
            acc ^= poly << (k - m)
    return acc


def poly_mul_table(q: int, poly: int) -> np.ndarray:
    m = q.bit_length() - 1
    return np.array([[poly_mul(a, b, poly, m) for b in range(q)] for a in range(q)], dtype=np.int64)


def check_message_enumerate(h, msgs, z: int, excluded: int, q: int, poly: int) -> np.ndarray:
    """Check-to-variable message by summing over every local configuration.

    ``h``: coefficients of the check's variables; ``msgs``: their incoming
    distributions (row ``excluded`` ignored).
    """
    m = q.bit_length() - 1
    others = [k for k in range(len(h)) if k != excluded]
    out = np.zeros(q)
    for a in range(q):
        base = poly_mul(h[excluded], a, poly, m)
        for cfg in itertools.product(range(q), repeat=len(others)):
            acc = base
            w = 1.0
            for k, xk in zip(others, cfg):
                acc ^= poly_mul(h[k], xk, poly, m)
                w *= msgs[k][xk]
            if acc == z:
                out[a] += w
    return out


def exact_marginals(code: SparseCode, prior, z, poly: int) -> np.ndarray:
    """Marginals of ``prod_j prior_j(x_j)`` restricted to ``H x = z``."""
    q, V = code.q, code.n_vars
    table = poly_mul_table(q, poly)
    prior = np.asarray(prior, dtype=float)
    configs = np.array(list(itertools.product(range(q), repeat=V)), dtype=np.int64)
    ok = np.ones(len(configs), dtype=bool)
    dense = code.H.to_dense().astype(np.int64)
    for i in range(code.M_len):
        acc = np.zeros(len(configs), dtype=np.int64)
        for j in np.flatnonzero(dense[i]):
            acc ^= table[dense[i, j], configs[:, j]]
        ok &= acc == int(z[i])
    sat = configs[ok]
    w = np.ones(len(sat))
    for j in range(V):
        w *= prior[j, sat[:, j]]
    marg = np.zeros((V, q))
    for j in range(V):
        np.add.at(marg[j], sat[:, j], w)
    return marg / marg.sum(axis=1, keepdims=True)


def random_tree_code(q: int, n_src: int, n_chk: int, rng: np.random.Generator) -> SparseCode:
    """Random cycle-free MN code: A is a bipartite forest, B is diagonal plus
    subdiagonal entries that only ever join two different components."""
    parent = list(range(n_src + n_chk))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    a_entries = []
    nodes = [("s", j) for j in range(n_src)] + [("c", i) for i in range(n_chk)]
    placed = {"s": [], "c": []}
    for kind, idx in (nodes[k] for k in rng.permutation(len(nodes))):
        other = placed["c" if kind == "s" else "s"]
        if other and rng.random() < 0.85:
            nb = other[rng.integers(len(other))]
            j, i = (idx, nb) if kind == "s" else (nb, idx)
            a_entries.append((i, j, int(rng.integers(1, q))))
            parent[find(j)] = find(n_src + i)
        placed[kind].append(idx)

    b_entries = [(i, i, int(rng.integers(1, q))) for i in range(n_chk)]
    for i in range(1, n_chk):
        ri, rp = find(n_src + i), find(n_src + i - 1)
        if ri != rp and rng.random() < 0.5:
            b_entries.append((i, i - 1, int(rng.integers(1, q))))
            parent[ri] = rp
    A = SparseMatrix.from_entries(q, n_chk, n_src, a_entries)
    B = SparseMatrix.from_entries(q, n_chk, n_chk, b_entries)
    return SparseCode(q, A, B)


def is_cycle_free(H: SparseMatrix) -> bool:
    """Union-find over the Tanner graph: an edge closing a loop means a cycle."""
    parent = list(range(H.rows + H.cols))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for i, j, _ in H.entries():
        a, b = find(i), find(H.rows + j)
        if a == b:
            return False
        parent[a] = b
    return True


def tree_diameter_bound(code: SparseCode) -> int:
    return code.n_vars + code.M_len
