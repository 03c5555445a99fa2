import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mnbp.code import (
    InfeasibleCodeError,
    MatrixFormatError,
    SparseCode,
    SparseMatrix,
    build_code,
    check_solution,
    encode,
    forward_substitute,
    load_code,
    load_matrix,
    save_matrix,
    syndrome,
)
from mnbp.gf import gf_tables
from mnbp.oracles import poly_mul


def dense_matvec(D, x, q):
    """Row-by-row polynomial multiply-and-add, independent of the tables."""
    m = q.bit_length() - 1
    poly = gf_tables(q).prim_poly
    out = []
    for row in D:
        acc = 0
        for a, b in zip(row, x):
            acc ^= poly_mul(int(a), int(b), poly, m)
        out.append(acc)
    return np.array(out, dtype=np.uint8)


def dense_inverse(D, q):
    """Gauss-Jordan over GF(q)."""
    t = gf_tables(q)
    n = len(D)
    aug = np.concatenate([D.astype(np.int64), np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r, c])
        aug[[c, p]] = aug[[p, c]]
        aug[c] = t.mul[t.inv[aug[c, c]], aug[c]]
        for r in range(n):
            if r != c and aug[r, c]:
                aug[r] ^= t.mul[aug[r, c], aug[c]]
    return aug[:, n:]


def test_small_code_row_weights():
    code = build_code(2, 4, "1/2", col_weight=2, rng_seed=3)
    assert code.A.shape == (8, 4)
    assert code.A.col_weights().tolist() == [2, 2, 2, 2]
    assert code.A.row_weights().tolist() == [1] * 8


@pytest.mark.parametrize("q,N,rate,w", [(2, 60, "1/3", 3), (4, 50, "1/2", 3), (8, 33, "1/3", 4),
                                        (8, 100, 0.5, 2)])
def test_construction_invariants(q, N, rate, w):
    code = build_code(q, N, rate, w, rng_seed=7)
    A = code.A
    assert (A.col_weights() == w).all()
    rw = A.row_weights()
    assert rw.max() - rw.min() <= 1
    assert A.data.min() >= 1 and A.data.max() <= q - 1
    B = code.B.to_dense()
    assert (np.diag(B) == 1).all()
    assert (np.diag(B, -1) != 0).all()
    assert np.count_nonzero(B) == 2 * code.M_len - 1
    H = code.H
    assert (H.row_weights() > 0).all() and (H.col_weights() > 0).all()
    assert np.array_equal(H.to_dense(), np.hstack([A.to_dense(), B]))


def test_construction_deterministic():
    a = build_code(4, 40, "1/3", 3, rng_seed=11)
    b = build_code(4, 40, "1/3", 3, rng_seed=11)
    c = build_code(4, 40, "1/3", 3, rng_seed=12)
    assert a.A == b.A and a.B == b.B
    assert not (a.A == c.A and a.B == c.B)


def test_four_cycle_avoidance_when_easy():
    code = build_code(2, 100, "1/3", 3, rng_seed=0)
    seen = set()
    for j in range(code.N):
        rows = [i for i, _ in code.A.column(j)]
        for pair in itertools.combinations(rows, 2):
            assert pair not in seen
            seen.add(pair)


def test_infeasible_parameters():
    with pytest.raises(InfeasibleCodeError):
        build_code(2, 4, 2, col_weight=3)        # M_len = 2 < col_weight
    with pytest.raises(ValueError):
        build_code(2, 10, "1/3", col_weight=1)
    with pytest.raises(ValueError):
        build_code(2, 10, "3/7")                  # non-integer M_len


def test_forward_substitution_matches_dense_inverse(rng):
    for q in (2, 4, 8):
        code = build_code(q, 5, "1/3", 2, rng_seed=int(rng.integers(1000)))
        y = rng.integers(0, q, code.M_len).astype(np.uint8)
        Binv = dense_inverse(code.B.to_dense(), q)
        assert np.array_equal(forward_substitute(code.B, y), dense_matvec(Binv, y, q))
        assert np.array_equal(code.B.matvec(forward_substitute(code.B, y)), y)


def test_encode_zero_and_defining_relation(rng):
    code = build_code(8, 30, "1/3", 3, rng_seed=1)
    assert not encode(code, np.zeros(30, np.uint8)).any()
    s = rng.integers(0, 8, 30)
    t = encode(code, s)
    assert np.array_equal(code.B.matvec(t), code.A.matvec(s))


def test_encode_identity_B_hand_multiply():
    q = 4
    Ad = np.array([[1, 0, 2, 0], [0, 3, 0, 1], [2, 2, 0, 0], [0, 0, 3, 3]])
    A = SparseMatrix.from_dense(Ad, q)
    B = SparseMatrix.from_dense(np.eye(4, dtype=int), q)
    code = SparseCode(q, A, B)
    s = np.array([3, 1, 2, 2])
    # hand-computed with x^2+x+1: row0 = 3 + 2*2 = 3^3 = 0; row1 = 3*1 + 1*2 = 3^2 = 1
    # row2 = 2*3 + 2*1 = 1^2 = 3; row3 = 3*2 + 3*2 = 0
    assert encode(code, s).tolist() == [0, 1, 3, 0]
    assert np.array_equal(encode(code, s), dense_matvec(Ad, s, q))


def test_encode_dimension_errors():
    code = build_code(2, 6, "1/2", 2)
    with pytest.raises(ValueError):
        encode(code, np.zeros(5))
    with pytest.raises(ValueError):
        syndrome(code, np.zeros(3))
    with pytest.raises(ValueError):
        encode(code, np.full(6, 2))


def test_syndrome_examples(rng):
    code = build_code(4, 20, "1/3", 3, rng_seed=2)
    s = rng.integers(0, 4, 20)
    t = encode(code, s)
    z = syndrome(code, t)
    assert np.array_equal(z, code.A.matvec(s))
    assert check_solution(code, np.concatenate([s, np.zeros(60, np.uint8)]), z)
    assert not syndrome(code, np.zeros(60, np.uint8)).any()
    r = rng.integers(0, 4, 60)
    assert np.array_equal(syndrome(code, r), dense_matvec(code.B.to_dense(), r, 4))


def test_check_solution_examples(rng):
    code = build_code(8, 12, "1/3", 3, rng_seed=4)
    s = rng.integers(0, 8, 12)
    n = rng.integers(0, 8, 36)
    z = code.H.matvec(np.concatenate([s, n]))
    x = np.concatenate([s, n]).astype(np.uint8)
    assert check_solution(code, x, z)
    bad = x.copy()
    bad[5] ^= 3
    assert not check_solution(code, bad, z)
    Hd = code.H.to_dense()
    for _ in range(20):
        xr = rng.integers(0, 8, code.n_vars)
        assert check_solution(code, xr, z) == np.array_equal(dense_matvec(Hd, xr, 8), z)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 4, 8]), st.integers(0, 2**32 - 1))
def test_pipeline_identity_property(q, seed):
    rng = np.random.default_rng(seed)
    code = build_code(q, 9, "1/3", 3, rng_seed=seed % 97)
    s = rng.integers(0, q, code.N)
    n = rng.integers(0, q, code.M_len)
    r = encode(code, s) ^ n
    x = np.concatenate([s, n])
    assert np.array_equal(syndrome(code, r), code.H.matvec(x))


def test_matrix_roundtrip(tmp_path):
    code = build_code(8, 30, "1/3", 3, rng_seed=9)
    save_matrix(code.A, tmp_path / "A.mtx")
    save_matrix(code.B, tmp_path / "B.mtx")
    assert load_matrix(tmp_path / "A.mtx") == code.A
    loaded = load_code(tmp_path / "A.mtx", tmp_path / "B.mtx")
    assert loaded.H == code.H


def test_load_any_order(tmp_path):
    p = tmp_path / "m.mtx"
    p.write_text("4 2 3 3\n1 2 3\n0 0 1\n1 0 2\n")
    m = load_matrix(p)
    assert m.to_dense().tolist() == [[1, 0, 0], [2, 0, 3]]


@pytest.mark.parametrize("text,match", [
    ("4 2 2 1\n0 0 4\n", "outside the field"),
    ("4 2 2 0\n", "no entries"),
    ("", "no entries"),
    ("4 2 2 2\n0 0 1\n0 0 2\n", "duplicate"),
    ("4 2 2 1\n0 5 1\n", "outside"),
    ("4 2 2 1\n0 x 1\n", "non-integer"),
    ("4 2 2 2\n0 0 1\n", "announces"),
    ("4 2 2\n", "header"),
])
def test_load_errors(tmp_path, text, match):
    p = tmp_path / "bad.mtx"
    p.write_text(text)
    with pytest.raises(MatrixFormatError, match=match):
        load_matrix(p)


def test_load_error_reports_line_number(tmp_path):
    p = tmp_path / "bad.mtx"
    p.write_text("8 3 3 2\n0 0 1\n2 1 9\n")
    with pytest.raises(MatrixFormatError) as info:
        load_matrix(p)
    assert info.value.lineno == 3


def test_B_must_be_lower_triangular():
    A = SparseMatrix.from_dense(np.ones((2, 2), int), 2)
    with pytest.raises(ValueError, match="lower triangular"):
        SparseCode(2, A, SparseMatrix.from_dense(np.array([[1, 1], [0, 1]]), 2))
    with pytest.raises(ValueError, match="diagonal"):
        SparseCode(2, A, SparseMatrix.from_dense(np.array([[1, 0], [1, 0]]), 2))
