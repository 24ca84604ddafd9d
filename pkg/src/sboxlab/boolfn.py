"""Boolean and vectorial Boolean function primitives.

Conventions used throughout the package:

* an input ``x`` is an n-bit integer, bit 0 is the least significant;
* coordinate ``f_i`` of an S-box is bit ``i`` of each output word;
* Walsh spectra use the sign form ``W_f(w) = sum_x (-1)^(f(x) ^ w.x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_VARS = 16


class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _log2_exact(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise InvalidInput(f"length {length} is not a power of two")
    return length.bit_length() - 1


def parity(values) -> np.ndarray:
    """Bitwise parity of each (non-negative) integer in ``values``."""
    return (np.bitwise_count(np.asarray(values, dtype=np.uint64)) & 1).astype(np.uint8)


def popcount(values) -> np.ndarray:
    return np.bitwise_count(np.asarray(values, dtype=np.uint64)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class TruthTable:
    """A single n-variable Boolean function, ``bits[x] = f(x)``."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VARS:
            raise InvalidInput(f"n={self.n} outside [0, {MAX_VARS}]")
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.shape != (1 << self.n,):
            raise InvalidInput(f"expected {1 << self.n} bits, got shape {bits.shape}")
        if bits.size and bits.max() > 1:
            raise InvalidInput("truth table values must be 0 or 1")
        object.__setattr__(self, "bits", _readonly(bits))

    @classmethod
    def from_bits(cls, bits) -> TruthTable:
        bits = np.asarray(bits, dtype=np.uint8)
        return cls(_log2_exact(bits.size), bits)

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __xor__(self, other: TruthTable) -> TruthTable:
        if self.n != other.n:
            raise InvalidInput("variable counts differ")
        return TruthTable(self.n, self.bits ^ other.bits)

    def __repr__(self):
        return f"TruthTable(n={self.n}, bits={''.join(map(str, self.bits.tolist()))})"

    @property
    def weight(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True, eq=False)
class SBoxTable:
    """An (n, m)-function stored as its lookup table."""

    n: int
    m: int
    entries: np.ndarray

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VARS or not 1 <= self.m <= MAX_VARS:
            raise InvalidInput(f"unsupported dimensions n={self.n}, m={self.m}")
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.shape != (1 << self.n,):
            raise InvalidInput(f"expected {1 << self.n} entries, got shape {entries.shape}")
        if entries.size and (entries.min() < 0 or entries.max() >= 1 << self.m):
            raise InvalidInput(f"entries must lie in [0, {1 << self.m})")
        object.__setattr__(self, "entries", _readonly(entries))

    @classmethod
    def from_list(cls, entries, m: int | None = None) -> SBoxTable:
        """Build a table inferring ``n`` from the length and ``m`` (default ``m = n``)."""
        entries = np.asarray(entries, dtype=np.int64)
        n = _log2_exact(entries.size)
        if m is None:
            m = max(n, int(entries.max()).bit_length()) if entries.size else n
        return cls(n, m, entries)

    def __eq__(self, other):
        if not isinstance(other, SBoxTable):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.n, self.m, self.entries.tobytes()))

    def __len__(self):
        return self.entries.size

    def __getitem__(self, x):
        return int(self.entries[x])

    def __repr__(self):
        return f"SBoxTable(n={self.n}, m={self.m}, entries={self.entries.tolist()})"

    def tolist(self) -> list[int]:
        return self.entries.tolist()

    def coordinate(self, i: int) -> TruthTable:
        if not 0 <= i < self.m:
            raise InvalidInput(f"coordinate {i} out of range for m={self.m}")
        return TruthTable(self.n, (self.entries >> i) & 1)

    def is_permutation(self) -> bool:
        return self.n == self.m and np.array_equal(np.sort(self.entries), np.arange(1 << self.n))


@dataclass(frozen=True)
class BinaryMatrix:
    """Square or rectangular GF(2) matrix; ``rows[i]`` is a bitmask over ``ncols`` columns."""

    rows: tuple[int, ...]
    ncols: int = field(default=-1)

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        ncols = self.ncols if self.ncols >= 0 else len(rows)
        if ncols > MAX_VARS:
            raise InvalidInput(f"at most {MAX_VARS} columns supported")
        if any(r < 0 or r >> ncols for r in rows):
            raise InvalidInput(f"row masks must lie in [0, {1 << ncols})")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls(tuple(1 << i for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and gf2_rank(self) == self.ncols


@dataclass(frozen=True, eq=False)
class DifferenceTable:
    """``counts[a, z] = #{x : S(x) ^ S(x ^ a) = z}``."""

    counts: np.ndarray

    @property
    def max_nontrivial(self) -> int:
        """Largest entry outside row ``a = 0``."""
        return int(self.counts[1:].max()) if self.counts.shape[0] > 1 else 0

    @property
    def zero_column_hits(self) -> int:
        """Nonzero entries of column ``z = 0`` ignoring row ``a = 0``."""
        return int(np.count_nonzero(self.counts[1:, 0]))


# transforms


def _butterfly_sign(a: np.ndarray) -> np.ndarray:
    """In-place-style Walsh-Hadamard butterfly along the last axis."""
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, -1, 2, h)
        x = v[..., 0, :]
        y = v[..., 1, :]
        a = np.stack((x + y, x - y), axis=-2).reshape(*lead, size)
        h *= 2
    return a


def fwht(values) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform of integer data along the last axis."""
    a = np.asarray(values, dtype=np.int64)
    _log2_exact(a.shape[-1])
    return _butterfly_sign(a)


def walsh_transform(f: TruthTable) -> np.ndarray:
    """Sign Walsh spectrum ``W_f(w)`` for every mask ``w``, in O(n 2^n)."""
    return _butterfly_sign(1 - 2 * f.bits.astype(np.int64))


def walsh_batch(bits: np.ndarray) -> np.ndarray:
    """Sign Walsh spectra of a stack of truth tables (one per row)."""
    return _butterfly_sign(1 - 2 * np.asarray(bits, dtype=np.int64))


def moebius_transform(bits) -> np.ndarray:
    """Binary Moebius transform (truth table <-> ANF); it is its own inverse."""
    a = np.asarray(bits, dtype=np.uint8)
    if a.ndim != 1:
        raise InvalidInput("expected a one-dimensional bit sequence")
    size = a.size
    _log2_exact(size)
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        a = np.stack((v[:, 0, :], v[:, 0, :] ^ v[:, 1, :]), axis=1).reshape(size)
        h *= 2
    return a


def anf(f: TruthTable) -> np.ndarray:
    return moebius_transform(f.bits)


def degree(f: TruthTable) -> int:
    """Algebraic degree; the zero function gets degree 0."""
    coeffs = anf(f)
    support = np.flatnonzero(coeffs)
    return int(popcount(support).max()) if support.size else 0


def component(S: SBoxTable, v: int) -> TruthTable:
    """Component function ``x -> parity(v & S(x))``."""
    if not 0 <= v < 1 << S.m:
        raise InvalidInput(f"mask {v} out of range for m={S.m}")
    return TruthTable(S.n, parity(S.entries & v))


def all_components(S: SBoxTable) -> np.ndarray:
    """Truth tables of all 2^m components stacked by mask, shape (2^m, 2^n)."""
    masks = np.arange(1 << S.m, dtype=np.int64)
    return parity(masks[:, None] & S.entries[None, :])


def derivative(S: SBoxTable, a: int) -> SBoxTable:
    """``x -> S(x) ^ S(x ^ a)``."""
    if not 0 <= a < 1 << S.n:
        raise InvalidInput(f"shift {a} out of range for n={S.n}")
    x = np.arange(1 << S.n)
    return SBoxTable(S.n, S.m, S.entries ^ S.entries[x ^ a])


def autocorrelation_from_walsh(spectra: np.ndarray) -> np.ndarray:
    """Autocorrelation spectra from Walsh spectra (last axis), exact in integers."""
    spectra = np.asarray(spectra, dtype=np.int64)
    return _butterfly_sign(spectra * spectra) >> (spectra.shape[-1].bit_length() - 1)


def autocorrelation(f: TruthTable) -> np.ndarray:
    """``r(alpha) = sum_x (-1)^(f(x) ^ f(x ^ alpha))`` for every shift."""
    return autocorrelation_from_walsh(walsh_transform(f))


def ddt(S: SBoxTable) -> DifferenceTable:
    N = 1 << S.n
    x = np.arange(N)
    out = S.entries[None, :] ^ S.entries[x[:, None] ^ x[None, :]]
    idx = (x[:, None] << S.m) + out
    counts = np.bincount(idx.ravel(), minlength=N << S.m).reshape(N, 1 << S.m)
    return DifferenceTable(_readonly(counts))


# GF(2) linear algebra


def gf2_rank_rows(rows) -> int:
    """Rank of a list of integer bit-rows over GF(2)."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        r = int(r)
        while r:
            top = r.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = r
                rank += 1
                break
            r ^= p
    return rank


def gf2_rank(M: BinaryMatrix) -> int:
    return gf2_rank_rows(M.rows)


def gf2_rank_dense(matrix: np.ndarray) -> int:
    """Rank of a dense 0/1 matrix by row reduction on bit-packed rows."""
    a = np.asarray(matrix, dtype=np.uint8)
    if a.ndim != 2:
        raise InvalidInput("expected a 2-d matrix")
    if a.size == 0:
        return 0
    packed = np.packbits(a, axis=1)
    rows = [int.from_bytes(r.tobytes(), "big") for r in packed]
    return gf2_rank_rows(rows)


def apply_mix(S: SBoxTable, M: BinaryMatrix) -> SBoxTable:
    """Output-side linear mix: coordinate ``i`` of the result is ``component(S, M.rows[i])``."""
    if M.ncols != S.m:
        raise InvalidInput(f"matrix has {M.ncols} columns, S-box has m={S.m}")
    if M.nrows < 1:
        raise InvalidInput("matrix has no rows")
    out = np.zeros(1 << S.n, dtype=np.int64)
    for i, row in enumerate(M.rows):
        out |= parity(S.entries & row).astype(np.int64) << i
    return SBoxTable(S.n, M.nrows, out)


def invert(S: SBoxTable) -> SBoxTable:
    if not S.is_permutation():
        raise InvalidInput("S-box is not a permutation")
    inv = np.empty_like(S.entries)
    inv[S.entries] = np.arange(1 << S.n)
    return SBoxTable(S.n, S.n, inv)


def random_bijection(n: int, rng: np.random.Generator) -> SBoxTable:
    return SBoxTable(n, n, rng.permutation(1 << n))


def random_invertible_matrix(n: int, rng: np.random.Generator) -> BinaryMatrix:
    while True:
        rows = tuple(int(r) for r in rng.integers(0, 1 << n, size=n))
        if gf2_rank_rows(rows) == n:
            return BinaryMatrix(rows, n)
