"""MacKay-Neal code matrices: construction, encoding, syndromes, file I/O.

A code is a pair of sparse GF(q) matrices ``A`` (M x N) and ``B`` (M x M,
lower triangular with a nonzero diagonal). A source block ``s`` is encoded
as ``t = B^-1 A s``; the receiver forms ``z = B r`` which, for ``r = t + n``,
equals ``H x`` with ``H = [A B]`` and ``x = [s; n]``.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gf import GfTables, gf_tables


class InfeasibleCodeError(ValueError):
    """Raised when the requested construction parameters cannot be met."""


class MatrixFormatError(ValueError):
    """Malformed matrix file; carries the offending line number if known."""

    def __init__(self, msg: str, lineno: int | None = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {msg}" if where else msg)
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Sparse GF(q) matrix in CSR layout with a lazily built CSC view.

    ``indptr``/``indices``/``data`` follow the scipy CSR convention, column
    indices sorted within each row.
    """

    q: int
    rows: int
    cols: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    _csc: tuple = field(default=None, repr=False, compare=False)

    @classmethod
    def from_entries(cls, q: int, rows: int, cols: int, entries) -> "SparseMatrix":
        """Build from an iterable of ``(row, col, value)`` triples."""
        ent = np.array(list(entries), dtype=np.int64).reshape(-1, 3)
        r, c, v = ent[:, 0], ent[:, 1], ent[:, 2]
        if ent.size:
            if r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols:
                raise ValueError("entry position out of range")
            if v.min() < 1 or v.max() >= q:
                raise ValueError(f"entry values must lie in [1, {q - 1}]")
        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], v[order]
        if len(r) > 1 and np.any((r[1:] == r[:-1]) & (c[1:] == c[:-1])):
            raise ValueError("duplicate matrix position")
        indptr = np.zeros(rows + 1, dtype=np.int64)
        np.add.at(indptr, r + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(q, rows, cols, indptr, c.astype(np.int64), v.astype(np.uint8))

    @classmethod
    def from_dense(cls, dense, q: int) -> "SparseMatrix":
        d = np.asarray(dense)
        r, c = np.nonzero(d)
        return cls.from_entries(q, d.shape[0], d.shape[1], zip(r, c, d[r, c]))

    @property
    def nnz(self) -> int:
        return len(self.indices)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def entries(self):
        """Yield ``(row, col, value)`` in row-major order."""
        for i in range(self.rows):
            for k in range(self.indptr[i], self.indptr[i + 1]):
                yield i, int(self.indices[k]), int(self.data[k])

    def row(self, i: int) -> list[tuple[int, int]]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.data[lo:hi].tolist()))

    def csc(self):
        """Column view ``(colptr, row_indices, values, csr_positions)``."""
        if self._csc is None:
            row_of = np.repeat(np.arange(self.rows), np.diff(self.indptr))
            order = np.lexsort((row_of, self.indices))
            colptr = np.zeros(self.cols + 1, dtype=np.int64)
            np.add.at(colptr, self.indices + 1, 1)
            np.cumsum(colptr, out=colptr)
            view = (colptr, row_of[order], self.data[order], order)
            object.__setattr__(self, "_csc", view)
        return self._csc

    def column(self, j: int) -> list[tuple[int, int]]:
        colptr, rows, vals, _ = self.csc()
        lo, hi = colptr[j], colptr[j + 1]
        return list(zip(rows[lo:hi].tolist(), vals[lo:hi].tolist()))

    def row_weights(self) -> np.ndarray:
        return np.diff(self.indptr)

    def col_weights(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.cols)

    def to_dense(self) -> np.ndarray:
        d = np.zeros((self.rows, self.cols), dtype=np.uint8)
        row_of = np.repeat(np.arange(self.rows), np.diff(self.indptr))
        d[row_of, self.indices] = self.data
        return d

    def matvec(self, x, tables: GfTables | None = None) -> np.ndarray:
        """GF(q) product ``self @ x``; ``x`` may carry leading batch axes."""
        tables = tables or gf_tables(self.q)
        x = np.asarray(x, dtype=np.uint8)
        if x.shape[-1] != self.cols:
            raise ValueError(f"vector length {x.shape[-1]} != {self.cols} columns")
        prods = tables.mul[self.data, x[..., self.indices]]
        out = np.zeros(x.shape[:-1] + (self.rows,), dtype=np.uint8)
        nonempty = np.flatnonzero(np.diff(self.indptr))
        if len(nonempty):
            red = np.bitwise_xor.reduceat(prods, self.indptr[nonempty], axis=-1)
            out[..., nonempty] = red
        return out

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.rows != other.rows or self.q != other.q:
            raise ValueError("incompatible matrices")
        ents = itertools.chain(
            self.entries(),
            ((i, j + self.cols, v) for i, j, v in other.entries()),
        )
        return SparseMatrix.from_entries(self.q, self.rows, self.cols + other.cols, ents)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.q == other.q
            and self.shape == other.shape
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SparseCode:
    """An MN code: ``A`` (M x N), ``B`` (M x M, invertible), ``H = [A B]``."""

    q: int
    A: SparseMatrix
    B: SparseMatrix
    H: SparseMatrix = field(init=False, repr=False)

    def __post_init__(self):
        if self.A.q != self.q or self.B.q != self.q:
            raise ValueError("matrix field sizes disagree with code q")
        if self.B.rows != self.B.cols or self.B.rows != self.A.rows:
            raise ValueError(f"B must be {self.A.rows}x{self.A.rows}, got {self.B.shape}")
        _check_lower_triangular(self.B)
        object.__setattr__(self, "H", self.A.hstack(self.B))

    @property
    def N(self) -> int:
        return self.A.cols

    @property
    def M_len(self) -> int:
        return self.A.rows

    @property
    def n_vars(self) -> int:
        return self.N + self.M_len

    @property
    def m(self) -> int:
        return self.q.bit_length() - 1

    @property
    def rate(self) -> Fraction:
        return Fraction(self.N, self.M_len)

    @property
    def tables(self) -> GfTables:
        return gf_tables(self.q)


def _check_lower_triangular(B: SparseMatrix) -> None:
    row_of = np.repeat(np.arange(B.rows), np.diff(B.indptr))
    if np.any(B.indices > row_of):
        raise ValueError("B must be lower triangular")
    diag = np.zeros(B.rows, dtype=bool)
    diag[row_of[B.indices == row_of]] = True
    if not diag.all():
        raise ValueError("B must have a nonzero diagonal")


def _as_fraction(rate) -> Fraction:
    if isinstance(rate, str):
        return Fraction(rate.strip())
    if isinstance(rate, float):
        return Fraction(rate).limit_denominator(1000)
    return Fraction(rate)


def block_lengths(N: int, rate) -> tuple[int, int]:
    """``(N, M_len)`` for a rate given as Fraction, float or ``"p/q"`` string."""
    R = _as_fraction(rate)
    if R <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    M = N / R
    if M.denominator != 1:
        raise ValueError(f"N={N} at rate {R} does not give an integer block length")
    return N, int(M)


def build_code(q: int, N: int, rate, col_weight: int = 3, rng_seed: int = 0,
               max_retries: int = 100) -> SparseCode:
    """Random MN code with column-regular ``A`` and bidiagonal ``B``.

    ``A`` has exactly ``col_weight`` nonzeros per column and row weights
    differing by at most one. Each column's row set is redrawn up to
    ``max_retries`` times to avoid sharing a pair of rows with an earlier
    column (a 4-cycle); if no such set is found the last draw is kept.
    ``B`` is the identity plus a random nonzero subdiagonal.
    """
    _, M = block_lengths(N, rate)
    if col_weight < 2:
        raise ValueError("col_weight must be at least 2")
    if N < col_weight:
        raise ValueError("N must be at least col_weight")
    if col_weight > M:
        raise InfeasibleCodeError(
            f"cannot place {col_weight} distinct entries per column in {M} rows")
    rng = np.random.default_rng(rng_seed)

    total = N * col_weight
    cap = np.full(M, total // M, dtype=np.int64)
    cap[rng.permutation(M)[: total % M]] += 1

    used_pairs: set[tuple[int, int]] = set()
    a_rows: list[np.ndarray] = []
    for j in range(N):
        remaining = N - j
        tight = np.flatnonzero(cap == remaining)
        free = np.flatnonzero((cap > 0) & (cap < remaining))
        need = col_weight - len(tight)
        if need < 0 or need > len(free):
            raise InfeasibleCodeError("row capacities became infeasible")
        chosen = None
        for _ in range(max(1, max_retries)):
            pick = np.sort(np.concatenate([tight, rng.choice(free, need, replace=False)]))
            pairs = list(itertools.combinations(pick.tolist(), 2))
            chosen = pick
            if not any(p in used_pairs for p in pairs):
                break
        used_pairs.update(itertools.combinations(chosen.tolist(), 2))
        cap[chosen] -= 1
        a_rows.append(chosen)

    a_vals = rng.integers(1, q, size=(N, col_weight))
    A = SparseMatrix.from_entries(
        q, M, N,
        ((int(i), j, int(v)) for j in range(N) for i, v in zip(a_rows[j], a_vals[j])),
    )
    sub = rng.integers(1, q, size=max(M - 1, 0))
    b_entries = [(i, i, 1) for i in range(M)] + [(i, i - 1, int(sub[i - 1])) for i in range(1, M)]
    B = SparseMatrix.from_entries(q, M, M, b_entries)
    return SparseCode(q, A, B)


def forward_substitute(B: SparseMatrix, y, tables: GfTables | None = None) -> np.ndarray:
    """Solve ``B t = y`` for lower-triangular ``B``; batch axes allowed."""
    tables = tables or gf_tables(B.q)
    y = np.asarray(y, dtype=np.uint8)
    if y.shape[-1] != B.rows:
        raise ValueError(f"vector length {y.shape[-1]} != {B.rows}")
    t = np.zeros_like(y)
    mul = tables.mul
    for i in range(B.rows):
        acc = y[..., i].copy()
        diag = 0
        for k in range(B.indptr[i], B.indptr[i + 1]):
            c, v = B.indices[k], B.data[k]
            if c == i:
                diag = v
            else:
                acc ^= mul[v, t[..., c]]
        t[..., i] = mul[tables.inv[diag], acc]
    return t


def encode(code: SparseCode, s) -> np.ndarray:
    """Codeword ``t = B^-1 A s``."""
    s = np.asarray(s, dtype=np.uint8)
    if s.shape[-1] != code.N:
        raise ValueError(f"source length {s.shape[-1]} != N={code.N}")
    if s.size and s.max() >= code.q:
        raise ValueError(f"source symbols must be < {code.q}")
    return forward_substitute(code.B, code.A.matvec(s, code.tables), code.tables)


def syndrome(code: SparseCode, r) -> np.ndarray:
    """``z = B r``."""
    r = np.asarray(r, dtype=np.uint8)
    if r.shape[-1] != code.M_len:
        raise ValueError(f"received length {r.shape[-1]} != M_len={code.M_len}")
    if r.size and r.max() >= code.q:
        raise ValueError(f"received symbols must be < {code.q}")
    return code.B.matvec(r, code.tables)


def check_solution(code: SparseCode, x_hat, z) -> bool:
    """True iff ``H x_hat = z`` holds in every row."""
    x_hat = np.asarray(x_hat, dtype=np.uint8)
    z = np.asarray(z, dtype=np.uint8)
    if x_hat.shape[-1] != code.n_vars or z.shape[-1] != code.M_len:
        raise ValueError("length mismatch")
    return bool(np.array_equal(code.H.matvec(x_hat, code.tables), z))


def save_matrix(m: SparseMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{m.q} {m.rows} {m.cols} {m.nnz}\n")
        for i, j, v in m.entries():
            fh.write(f"{i} {j} {v}\n")


def load_matrix(path) -> SparseMatrix:
    """Read the ``q rows cols nnz`` + ``row col value`` text format."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read matrix file: {exc}", path=path) from exc

    body = [(n, ln.split()) for n, ln in enumerate(lines, 1) if ln.strip()]
    if not body:
        raise MatrixFormatError("empty file, no entries", path=path)
    lineno, head = body[0]
    if len(head) != 4:
        raise MatrixFormatError("header must be 'q rows cols nnz'", lineno, path)
    try:
        q, rows, cols, nnz = (int(t) for t in head)
    except ValueError:
        raise MatrixFormatError("non-integer header field", lineno, path) from None
    m = q.bit_length() - 1
    if q < 2 or (1 << m) != q or rows < 0 or cols < 0:
        raise MatrixFormatError(f"bad header values {head}", lineno, path)
    if nnz == 0:
        raise MatrixFormatError("no entries", lineno, path)
    if len(body) - 1 != nnz:
        raise MatrixFormatError(f"header announces {nnz} entries, found {len(body) - 1}",
                                lineno, path)

    seen = set()
    entries = []
    for lineno, tok in body[1:]:
        if len(tok) != 3:
            raise MatrixFormatError("entry must be 'row col value'", lineno, path)
        try:
            i, j, v = (int(t) for t in tok)
        except ValueError:
            raise MatrixFormatError("non-integer entry field", lineno, path) from None
        if not (0 <= i < rows and 0 <= j < cols):
            raise MatrixFormatError(f"position ({i}, {j}) outside {rows}x{cols}", lineno, path)
        if not 1 <= v < q:
            raise MatrixFormatError(f"value {v} outside the field range [1, {q - 1}]",
                                    lineno, path)
        if (i, j) in seen:
            raise MatrixFormatError(f"duplicate position ({i}, {j})", lineno, path)
        seen.add((i, j))
        entries.append((i, j, v))
    return SparseMatrix.from_entries(q, rows, cols, entries)


def load_code(a_path: str | os.PathLike, b_path: str | os.PathLike) -> SparseCode:
    A = load_matrix(a_path)
    B = load_matrix(b_path)
    if A.q != B.q:
        raise MatrixFormatError(f"A is over GF({A.q}) but B is over GF({B.q})")
    return SparseCode(A.q, A, B)
