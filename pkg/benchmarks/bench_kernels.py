"""Time one BP iteration with the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--n-bits 1002] [--repeat 5]
"""
import argparse
import time

import numpy as np

from mnbp.code import build_code
from mnbp.decoder import tanner_graph
from mnbp.decoder.kernels import BACKENDS


def _state(q, n_bits, seed=0):
    m = q.bit_length() - 1
    code = build_code(q, n_bits // m, "1/3", 3, rng_seed=seed)
    g = tanner_graph(code)
    rng = np.random.default_rng(seed)
    return dict(
        code=code, g=g,
        q_msg=rng.dirichlet(np.ones(q), size=g.n_edges),
        r_msg=rng.dirichlet(np.ones(q), size=g.n_edges),
        prior=rng.dirichlet(np.ones(q), size=code.n_vars),
        z=rng.integers(0, q, code.M_len).astype(np.uint8),
        order=np.arange(code.n_vars, dtype=np.int64),
    )


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(q, n_bits, repeat):
    s = _state(q, n_bits)
    g = s["g"]
    rows = {}
    for name, k in BACKENDS.items():
        qm, rm, post = s["q_msg"].copy(), s["r_msg"].copy(), s["prior"].copy()

        def pus():
            k.horizontal_pass(g.row_ptr, g.edge_h, qm, rm, s["z"], g.mul)
            k.vertical_pass(g.col_ptr, g.col_edges, s["prior"], rm, qm, post)

        def sus():
            k.sus_sweep(g.row_ptr, g.edge_row, g.edge_h, g.col_ptr, g.col_edges, s["order"],
                        s["prior"], qm, rm, post, s["z"], g.mul)

        rows[name] = (_best_of(pus, repeat), _best_of(sus, repeat))
    return s["code"], rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-bits", type=int, default=1002)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'q':>3} {'edges':>6} {'backend':>9} {'PUS iter [ms]':>14} {'SUS iter [ms]':>14}")
    for q in (2, 4, 8):
        code, rows = bench(q, args.n_bits, args.repeat)
        edges = code.H.nnz
        for name, (tp, ts) in rows.items():
            print(f"{q:>3} {edges:>6} {name:>9} {tp * 1e3:>14.3f} {ts * 1e3:>14.3f}")
        if "compiled" in rows:
            sp = [p / c for p, c in zip(rows["python"], rows["compiled"])]
            print(f"{'':>3} {'':>6} {'speedup':>9} {sp[0]:>13.0f}x {sp[1]:>13.0f}x")


if __name__ == "__main__":
    main()
