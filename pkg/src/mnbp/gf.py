"""Arithmetic over GF(2^m) using log/antilog tables.

Field elements are plain integers in ``[0, q)`` whose bits are the
coefficients of a polynomial over GF(2), least-significant bit being the
constant term. Addition is XOR; multiplication goes through the tables.
Every table-backed operation also accepts numpy integer arrays.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

# Standard primitive polynomials, indexed by degree m.
PRIMITIVE_POLYS = {
    1: 0b11,          # x + 1
    2: 0b111,         # x^2 + x + 1
    3: 0b1011,        # x^3 + x + 1
    4: 0b10011,       # x^4 + x + 1
    5: 0b100101,      # x^5 + x^2 + 1
    6: 0b1000011,     # x^6 + x + 1
    7: 0b10001001,    # x^7 + x^3 + 1
    8: 0b100011101,   # x^8 + x^4 + x^3 + x^2 + 1
}


class GfTables:
    """Immutable log/antilog tables for GF(q), q = 2**m.

    Besides ``exp_table`` (length q-1) and ``log_table`` (length q, entry 0
    unused), a full q x q product table ``mul`` and an inverse table ``inv``
    are precomputed; at q <= 256 they are small and make vectorised
    products a single fancy-index.
    """

    def __init__(self, q: int, prim_poly: int | None = None):
        m = q.bit_length() - 1
        if q < 2 or (1 << m) != q or m not in PRIMITIVE_POLYS:
            raise ValueError(f"q must be a power of two in [2, 256], got {q}")
        self.q = q
        self.m = m
        self.prim_poly = PRIMITIVE_POLYS[m] if prim_poly is None else prim_poly
        if self.prim_poly >> m != 1:
            raise ValueError(f"reduction polynomial {self.prim_poly:#b} is not of degree {m}")

        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            if log[x] != -1:
                raise ValueError(f"polynomial {self.prim_poly:#b} is not primitive for GF({q})")
            exp[k] = x
            log[x] = k
            x <<= 1
            if x & q:
                x ^= self.prim_poly
        self.exp_table = exp
        self.log_table = log

        mul = np.zeros((q, q), dtype=np.uint8)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        inv = np.zeros(q, dtype=np.uint8)
        inv[1:] = exp[(-log[nz]) % (q - 1)]
        for arr in (exp, log, mul, inv):
            arr.setflags(write=False)
        self.mul = mul
        self.inv = inv

    def __repr__(self) -> str:
        return f"GfTables(q={self.q}, prim_poly={self.prim_poly:#b})"


@lru_cache(maxsize=None)
def gf_tables(q: int) -> GfTables:
    """Shared tables for GF(q) with the default primitive polynomial."""
    return GfTables(q)


def gf_add(x, y):
    return np.bitwise_xor(x, y) if isinstance(x, np.ndarray) or isinstance(y, np.ndarray) else x ^ y


def gf_mul(x, y, tables: GfTables):
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return tables.mul[np.asarray(x, dtype=np.intp), np.asarray(y, dtype=np.intp)]
    return int(tables.mul[x, y])


def gf_inv(x, tables: GfTables):
    """Multiplicative inverse; raises ZeroDivisionError for 0."""
    if isinstance(x, np.ndarray):
        if np.any(x == 0):
            raise ZeroDivisionError("zero has no inverse in GF(q)")
        return tables.inv[x.astype(np.intp)]
    if x == 0:
        raise ZeroDivisionError("zero has no inverse in GF(q)")
    return int(tables.inv[x])


def gf_div(x, y, tables: GfTables):
    return gf_mul(x, gf_inv(y, tables), tables)


def symbol_to_bits(x: int, m: int) -> list[int]:
    """LSB-first binary expansion of a symbol, padded to m bits."""
    if not 0 <= x < (1 << m):
        raise ValueError(f"symbol {x} does not fit in {m} bits")
    return [(x >> k) & 1 for k in range(m)]


def bits_to_symbol(bits) -> int:
    return sum(int(b) << k for k, b in enumerate(bits))


def symbols_to_bits(symbols, m: int) -> np.ndarray:
    """Vectorised :func:`symbol_to_bits`; the last axis grows by a factor m."""
    s = np.asarray(symbols, dtype=np.uint8)
    bits = (s[..., None] >> np.arange(m, dtype=np.uint8)) & 1
    return bits.reshape(*s.shape[:-1], s.shape[-1] * m) if s.ndim else bits


def bits_to_symbols(bits, m: int) -> np.ndarray:
    b = np.asarray(bits, dtype=np.uint8)
    if b.shape[-1] % m:
        raise ValueError(f"bit count {b.shape[-1]} is not a multiple of {m}")
    b = b.reshape(*b.shape[:-1], b.shape[-1] // m, m)
    weights = (1 << np.arange(m)).astype(np.uint8)
    return (b * weights).sum(axis=-1).astype(np.uint8)


def popcount_table(q: int) -> np.ndarray:
    """Number of set bits of every symbol in [0, q)."""
    return np.array([bin(a).count("1") for a in range(q)], dtype=np.int64)
