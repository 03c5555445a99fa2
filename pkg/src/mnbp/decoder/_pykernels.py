"""Pure numpy BP kernels; same signatures as the compiled ``_ckernels``.

Array conventions shared by both backends:

* edges are numbered in CSR (row-major) order of H;
* ``row_ptr`` (M+1) delimits each check's edges, ``edge_row``/``edge_h``
  give the check index and H entry of every edge;
* ``col_ptr`` (V+1) and ``col_edges`` list each variable's edges in
  increasing check order;
* ``q_msg``/``r_msg`` are (E, q) float64, ``prior``/``post`` (V, q);
* ``mul`` is the (q, q) uint8 GF product table.

Vertical updates return 0 on success or ``1 + j`` for the first variable
``j`` whose incoming evidence multiplies to the zero vector.
"""
import numpy as np

name = "python"


def _xor_index(q):
    a = np.arange(q)
    return a[:, None] ^ a[None, :]


def xor_convolve(a, b):
    """``out[..., s] = sum_x a[..., x] * b[..., x ^ s]``."""
    q = a.shape[-1]
    return np.einsum("...x,...xs->...s", a, b[..., _xor_index(q)])


def scale_by_coeff(msg, h, mul):
    """Distribution of ``h*x`` given the distribution ``msg`` of ``x``."""
    out = np.zeros_like(msg)
    np.put_along_axis(out, mul[h].astype(np.intp), msg, axis=-1)
    return out


def horizontal_pass(row_ptr, edge_h, q_msg, r_msg, z, mul):
    """Update every r message from the current q messages (flooding)."""
    q = q_msg.shape[1]
    deg = np.diff(row_ptr)
    delta = np.zeros(q)
    delta[0] = 1.0
    for d in np.unique(deg):
        if d == 0:
            continue
        rows = np.flatnonzero(deg == d)
        edges = row_ptr[rows][:, None] + np.arange(d)
        h = edge_h[edges]
        y = scale_by_coeff(q_msg[edges], h, mul)             # (R, d, q)
        fwd = np.empty((len(rows), d + 1, q))
        bwd = np.empty((len(rows), d + 1, q))
        fwd[:, 0] = delta
        bwd[:, d] = delta
        for k in range(d):
            fwd[:, k + 1] = xor_convolve(fwd[:, k], y[:, k])
            bwd[:, d - 1 - k] = xor_convolve(bwd[:, d - k], y[:, d - 1 - k])
        excl = xor_convolve(fwd[:, :d], bwd[:, 1:])          # (R, d, q)
        target = z[rows].astype(np.intp)[:, None, None] ^ mul[h].astype(np.intp)
        r_msg[edges] = np.take_along_axis(excl, target, axis=-1)


def check_update_edge(row_ptr, edge_h, q_msg, z, mul, i, e):
    """r message on edge ``e`` of check ``i`` from that check's other edges."""
    q = q_msg.shape[1]
    acc = np.zeros(q)
    acc[0] = 1.0
    for k in range(row_ptr[i], row_ptr[i + 1]):
        if k != e:
            acc = xor_convolve(acc, scale_by_coeff(q_msg[k], edge_h[k], mul))
    return acc[z[i] ^ mul[edge_h[e]].astype(np.intp)]


def _leave_one_out(prior, r):
    """``prior * prod_{l != k} r[l]`` for every k, plus the full product.

    Each partial product is rescaled by its maximum so long products do not
    underflow; only an exact all-zero vector survives as zero.
    """
    d = r.shape[-2]
    out = np.empty(r.shape)
    for k in range(d + 1):
        acc = prior.copy()
        for l in range(d):
            if l == k:
                continue
            acc *= r[..., l, :]
            mx = acc.max(axis=-1, keepdims=True)
            np.divide(acc, mx, out=acc, where=mx > 0)
        if k < d:
            out[..., k, :] = acc
        else:
            full = acc
    return out, full


def _normalise(v):
    s = v.sum(axis=-1, keepdims=True)
    bad = ~(s > 0)
    np.divide(v, s, out=v, where=~bad)
    return bad.reshape(bad.shape[:-1])


def vertical_pass(col_ptr, col_edges, prior, r_msg, q_msg, post):
    """Update every q message and posterior from the current r messages."""
    deg = np.diff(col_ptr)
    first_bad = None
    for d in np.unique(deg):
        cols = np.flatnonzero(deg == d)
        if d == 0:
            tmp = prior[cols].copy()
            bad = _normalise(tmp)
            post[cols] = tmp
        else:
            edges = col_edges[col_ptr[cols][:, None] + np.arange(d)]
            loo, full = _leave_one_out(prior[cols], r_msg[edges])
            bad_q = _normalise(loo).any(axis=-1)
            bad = _normalise(full) | bad_q
            q_msg[edges] = loo
            post[cols] = full
        if bad.any():
            j = int(cols[np.argmax(bad)])
            first_bad = j if first_bad is None else min(first_bad, j)
    return 0 if first_bad is None else first_bad + 1


def vertical_update_column(col_ptr, col_edges, prior, r_msg, q_msg, post, j):
    edges = col_edges[col_ptr[j]:col_ptr[j + 1]]
    loo, full = _leave_one_out(prior[j], r_msg[edges])
    bad = _normalise(full)
    if len(edges):
        bad = bad | _normalise(loo).any()
        q_msg[edges] = loo
    post[j] = full
    return j + 1 if bad else 0


def sus_sweep(row_ptr, edge_row, edge_h, col_ptr, col_edges, order,
              prior, q_msg, r_msg, post, z, mul):
    """One sequential iteration: per column, refresh its r's then its q's."""
    for j in order:
        for e in col_edges[col_ptr[j]:col_ptr[j + 1]]:
            r_msg[e] = check_update_edge(row_ptr, edge_h, q_msg, z, mul, edge_row[e], e)
        status = vertical_update_column(col_ptr, col_edges, prior, r_msg, q_msg, post, j)
        if status:
            return status
    return 0


def wht(v):
    """Unnormalised Walsh-Hadamard transform along the last axis."""
    v = np.array(v, dtype=float)
    q = v.shape[-1]
    h = 1
    while h < q:
        v = v.reshape(*v.shape[:-1], q // (2 * h), 2, h)
        a, b = v[..., 0, :].copy(), v[..., 1, :].copy()
        v[..., 0, :], v[..., 1, :] = a + b, a - b
        v = v.reshape(*v.shape[:-3], q)
        h *= 2
    return v


def horizontal_pass_wht(row_ptr, edge_h, q_msg, r_msg, z, mul):
    """Transform-domain flooding check update (XOR convolution becomes a product)."""
    q = q_msg.shape[1]
    deg = np.diff(row_ptr)
    for d in np.unique(deg):
        if d == 0:
            continue
        rows = np.flatnonzero(deg == d)
        edges = row_ptr[rows][:, None] + np.arange(d)
        h = edge_h[edges]
        spec = wht(scale_by_coeff(q_msg[edges], h, mul))
        excl = np.empty_like(spec)
        for k in range(d):
            excl[:, k] = np.prod(np.delete(spec, k, axis=1), axis=1) if d > 1 else 1.0
        dist = wht(excl) / q
        target = z[rows].astype(np.intp)[:, None, None] ^ mul[h].astype(np.intp)
        r_msg[edges] = np.take_along_axis(dist, target, axis=-1)
