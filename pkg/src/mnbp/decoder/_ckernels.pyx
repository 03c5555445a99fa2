# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled BP kernels. Mirrors ``_pykernels`` (see there for array layout)."""
import numpy as np

cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t idx_t
ctypedef cnp.uint8_t sym_t

name = "compiled"


cdef inline void _conv_scaled(double* out, const double* acc, const double* msg,
                              const sym_t* mulrow, int q) noexcept nogil:
    # out[s] = sum_x msg[x] * acc[s ^ (h*x)]
    cdef int s, x, hx
    cdef double w
    for s in range(q):
        out[s] = 0.0
    for x in range(q):
        w = msg[x]
        if w == 0.0:
            continue
        hx = mulrow[x]
        for s in range(q):
            out[s] += w * acc[s ^ hx]


cdef inline void _emit_r(double* r, const double* left, const double* right,
                         const sym_t* mulrow, int zi, int q, double* tmp) noexcept nogil:
    # tmp = left (xor-conv) right, then r[a] = tmp[z ^ h*a]
    cdef int s, u
    cdef double w
    for s in range(q):
        tmp[s] = 0.0
    for u in range(q):
        w = left[u]
        if w == 0.0:
            continue
        for s in range(q):
            tmp[s] += w * right[u ^ s]
    for s in range(q):
        r[s] = tmp[zi ^ mulrow[s]]


cdef void _row_update(idx_t lo, idx_t hi, const sym_t* edge_h, const double* qm,
                      double* rm, int zi, const sym_t* mul, int q,
                      double* fwd, double* bwd, double* tmp) noexcept nogil:
    cdef idx_t d = hi - lo
    cdef idx_t k
    cdef int s
    for s in range(q):
        fwd[s] = 0.0
        bwd[d * q + s] = 0.0
    fwd[0] = 1.0
    bwd[d * q] = 1.0
    for k in range(d):
        _conv_scaled(&fwd[(k + 1) * q], &fwd[k * q], &qm[(lo + k) * q],
                     &mul[edge_h[lo + k] * q], q)
        _conv_scaled(&bwd[(d - 1 - k) * q], &bwd[(d - k) * q], &qm[(hi - 1 - k) * q],
                     &mul[edge_h[hi - 1 - k] * q], q)
    for k in range(d):
        _emit_r(&rm[(lo + k) * q], &fwd[k * q], &bwd[(k + 1) * q],
                &mul[edge_h[lo + k] * q], zi, q, tmp)


cdef void _edge_update(idx_t lo, idx_t hi, idx_t e, const sym_t* edge_h,
                       const double* qm, double* rm, int zi, const sym_t* mul, int q,
                       double* a, double* b, double* tmp) noexcept nogil:
    cdef idx_t k
    cdef int s
    cdef double* t
    for s in range(q):
        a[s] = 0.0
        b[s] = 0.0
    a[0] = 1.0
    b[0] = 1.0
    # b stays the point mass at 0; the last convolution is folded into _emit_r
    for k in range(lo, hi):
        if k == e:
            continue
        _conv_scaled(tmp, a, &qm[k * q], &mul[edge_h[k] * q], q)
        t = a
        a = tmp
        tmp = t
    _emit_r(&rm[e * q], a, b, &mul[edge_h[e] * q], zi, q, tmp)


cdef idx_t _column_update(idx_t j, const idx_t* col_ptr, const idx_t* col_edges,
                          const double* prior, const double* rm, double* qm,
                          double* post, int q, double* acc) noexcept nogil:
    cdef idx_t lo = col_ptr[j]
    cdef idx_t hi = col_ptr[j + 1]
    cdef idx_t k, l, e
    cdef int a
    cdef double mx, tot
    cdef double* out
    # k == hi produces the posterior (product over all edges)
    for k in range(lo, hi + 1):
        for a in range(q):
            acc[a] = prior[j * q + a]
        for l in range(lo, hi):
            if l == k:
                continue
            e = col_edges[l]
            mx = 0.0
            for a in range(q):
                acc[a] *= rm[e * q + a]
                if acc[a] > mx:
                    mx = acc[a]
            if mx > 0.0:
                for a in range(q):
                    acc[a] /= mx
        tot = 0.0
        for a in range(q):
            tot += acc[a]
        if not tot > 0.0:
            return j + 1
        out = &post[j * q] if k == hi else &qm[col_edges[k] * q]
        for a in range(q):
            out[a] = acc[a] / tot
    return 0


def horizontal_pass(const idx_t[::1] row_ptr, const sym_t[::1] edge_h,
                    const double[:, ::1] q_msg, double[:, ::1] r_msg,
                    const sym_t[::1] z, const sym_t[:, ::1] mul):
    cdef idx_t n_rows = row_ptr.shape[0] - 1
    cdef int q = q_msg.shape[1]
    cdef idx_t i, maxdeg = 0
    for i in range(n_rows):
        if row_ptr[i + 1] - row_ptr[i] > maxdeg:
            maxdeg = row_ptr[i + 1] - row_ptr[i]
    if r_msg.shape[0] == 0:
        return
    cdef double* work = <double*> malloc((2 * (maxdeg + 1) + 1) * q * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double* fwd = work
    cdef double* bwd = work + (maxdeg + 1) * q
    cdef double* tmp = work + 2 * (maxdeg + 1) * q
    with nogil:
        for i in range(n_rows):
            if row_ptr[i + 1] > row_ptr[i]:
                _row_update(row_ptr[i], row_ptr[i + 1], &edge_h[0], &q_msg[0, 0],
                            &r_msg[0, 0], z[i], &mul[0, 0], q, fwd, bwd, tmp)
    free(work)


def vertical_pass(const idx_t[::1] col_ptr, const idx_t[::1] col_edges,
                  const double[:, ::1] prior, const double[:, ::1] r_msg,
                  double[:, ::1] q_msg, double[:, ::1] post):
    cdef idx_t n_vars = col_ptr.shape[0] - 1
    cdef int q = prior.shape[1]
    cdef idx_t j, status = 0
    cdef double[::1] acc = np.empty(q)
    cdef const idx_t* ce = &col_edges[0] if col_edges.shape[0] else NULL
    cdef const double* rp = &r_msg[0, 0] if r_msg.shape[0] else NULL
    cdef double* qp = &q_msg[0, 0] if q_msg.shape[0] else NULL
    with nogil:
        for j in range(n_vars):
            status = _column_update(j, &col_ptr[0], ce, &prior[0, 0], rp, qp,
                                    &post[0, 0], q, &acc[0])
            if status:
                break
    return status


def sus_sweep(const idx_t[::1] row_ptr, const idx_t[::1] edge_row, const sym_t[::1] edge_h,
              const idx_t[::1] col_ptr, const idx_t[::1] col_edges, const idx_t[::1] order,
              const double[:, ::1] prior, double[:, ::1] q_msg, double[:, ::1] r_msg,
              double[:, ::1] post, const sym_t[::1] z, const sym_t[:, ::1] mul):
    cdef int q = prior.shape[1]
    cdef idx_t n = order.shape[0]
    cdef idx_t t, j, l, e, i, status = 0
    cdef double[::1] work = np.empty(4 * q)
    if q_msg.shape[0] == 0:
        return vertical_pass(col_ptr, col_edges, prior, r_msg, q_msg, post)
    with nogil:
        for t in range(n):
            j = order[t]
            for l in range(col_ptr[j], col_ptr[j + 1]):
                e = col_edges[l]
                i = edge_row[e]
                _edge_update(row_ptr[i], row_ptr[i + 1], e, &edge_h[0], &q_msg[0, 0],
                             &r_msg[0, 0], z[i], &mul[0, 0], q,
                             &work[0], &work[q], &work[2 * q])
            status = _column_update(j, &col_ptr[0], &col_edges[0], &prior[0, 0],
                                    &r_msg[0, 0], &q_msg[0, 0], &post[0, 0], q, &work[3 * q])
            if status:
                break
    return status
