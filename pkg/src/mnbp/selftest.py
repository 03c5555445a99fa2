"""Quick oracle checks runnable from the CLI (``mnbp selftest``)."""
from __future__ import annotations

import itertools

import numpy as np

from . import oracles
from .decoder import _pykernels, decode_pus, decode_sus, messages_from_priors
from .decoder.kernels import BACKENDS
from .gf import GfTables


def field_axioms(q: int) -> bool:
    t = GfTables(q)
    mul = t.mul.astype(np.int64)
    ref = oracles.poly_mul_table(q, t.prim_poly)
    if not np.array_equal(mul, ref):
        return False
    for a, b, c in itertools.product(range(q), repeat=3):
        if mul[mul[a, b], c] != mul[a, mul[b, c]]:
            return False
        if mul[a, b ^ c] != mul[a, b] ^ mul[a, c]:
            return False
        if mul[a, b] != mul[b, a]:
            return False
    return all(mul[a, t.inv[a]] == 1 for a in range(1, q))


def check_node_enumeration(rng, instances: int = 100, tol: float = 1e-12) -> float:
    """Largest deviation of the direct convolution from exhaustive enumeration."""
    worst = 0.0
    for _ in range(instances):
        q = int(rng.choice([2, 4, 8]))
        d = int(rng.integers(1, 5))
        t = GfTables(q)
        h = rng.integers(1, q, size=d).astype(np.uint8)
        msgs = rng.dirichlet(np.ones(q), size=d)
        zi = int(rng.integers(q))
        row_ptr = np.array([0, d], dtype=np.int64)
        z = np.array([zi], dtype=np.uint8)
        r_all = np.empty((d, q))
        for name, kern in BACKENDS.items():
            kern.horizontal_pass(row_ptr, h, msgs, r_all, z, t.mul)
            for e in range(d):
                ref = oracles.check_message_enumerate(h.tolist(), msgs, zi, e, q, t.prim_poly)
                single = _pykernels.check_update_edge(row_ptr, h, msgs, z, t.mul, 0, e)
                worst = max(worst, np.abs(r_all[e] - ref).max(), np.abs(single - ref).max())
    return worst


def tree_exactness(rng, codes: int = 20) -> float:
    worst = 0.0
    for k in range(codes):
        q = (2, 4)[k % 2]
        cap = 12 if q == 2 else 9
        n_src = int(rng.integers(1, cap // 2))
        n_chk = int(rng.integers(1, cap - n_src + 1))
        code = oracles.random_tree_code(q, n_src, n_chk, rng)
        prior = rng.dirichlet(np.ones(q), size=code.n_vars)
        x = rng.integers(0, q, size=code.n_vars)
        z = code.H.matvec(x)
        exact = oracles.exact_marginals(code, prior, z, code.tables.prim_poly)
        iters = oracles.tree_diameter_bound(code)
        for dec in (decode_pus, decode_sus):
            for name in BACKENDS:
                msgs = messages_from_priors(code, prior)
                dec(code, z, msgs, iters, early_stop=False, backend=name)
                worst = max(worst, np.abs(msgs.post - exact).max())
    return worst


def run_selftest(seed: int = 0) -> int:
    rng = np.random.default_rng(seed)
    results = []
    for q in (2, 4, 8):
        results.append((f"field axioms GF({q})", field_axioms(q), ""))
    dev = check_node_enumeration(rng)
    results.append(("check-node enumeration", dev <= 1e-12, f"max dev {dev:.2e}"))
    dev = tree_exactness(rng)
    results.append(("tree exactness", dev <= 1e-9, f"max dev {dev:.2e}"))
    print(f"kernel backends: {', '.join(BACKENDS)}")
    for name, ok, info in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {info}".rstrip())
    return 0 if all(ok for _, ok, _ in results) else 1
