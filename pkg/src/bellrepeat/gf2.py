"""Packed-bit linear algebra over GF(2).

Bit strings are Python integers with an explicit length, so vectors of any
size work without a separate multi-word path.  For Pauli labels of ``N``
qubits, qubit ``n`` lives at bits ``2n`` (Z component) and ``2n + 1``
(X component); the symbol ``(z, x)`` then indexes the single-copy Bell
distribution as ``p[2*z + x]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class LengthMismatch(ValueError):
    pass


def _pair_mask(n_bits: int) -> int:
    # 0b...0101: the Z bit of every qubit
    return int("01" * (n_bits // 2), 2) if n_bits >= 2 else 0


def swap_pairs(value: int, n_bits: int) -> int:
    """Apply the pairwise swap ``P`` (exchange Z and X bit of each qubit)."""
    mask = _pair_mask(n_bits)
    return ((value & mask) << 1) | ((value >> 1) & mask)


def parity(value: int) -> int:
    return bin(value).count("1") & 1


def lex_less(a: int, b: int) -> bool:
    """Lexicographic order of bit tuples ``(bit0, bit1, ...)``.

    The first differing position is the lowest set bit of ``a ^ b``; the
    string holding a 0 there is the smaller one.
    """
    d = a ^ b
    if d == 0:
        return False
    low = d & -d
    return not (a & low)


@dataclass(frozen=True)
class BitString:
    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value:#x} does not fit in {self.length} bits")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError(f"not a bit: {b!r}")
            if b:
                value |= 1 << i
        return cls(value, len(bits))

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(0, length)

    @classmethod
    def from_hex(cls, text: str, length: int) -> "BitString":
        return cls(int(text, 16) if text else 0, length)

    def to_hex(self) -> str:
        digits = max(1, (self.length + 3) // 4)
        return format(self.value, f"0{digits}x")

    def bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.length)]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __len__(self) -> int:
        return self.length

    def _check(self, other: "BitString") -> None:
        if self.length != other.length:
            raise LengthMismatch(f"lengths differ: {self.length} vs {other.length}")

    def __xor__(self, other: "BitString") -> "BitString":
        self._check(other)
        return BitString(self.value ^ other.value, self.length)

    __add__ = __xor__

    def __and__(self, other: "BitString") -> "BitString":
        self._check(other)
        return BitString(self.value & other.value, self.length)

    def dot(self, other: "BitString") -> int:
        self._check(other)
        return parity(self.value & other.value)

    def weight(self) -> int:
        return bin(self.value).count("1")

    def symbols(self) -> list[int]:
        """Per-qubit Bell index ``2*z + x`` for a length-2N Pauli label."""
        if self.length % 2:
            raise ValueError("Pauli labels have even length")
        out = []
        for n in range(self.length // 2):
            z = (self.value >> (2 * n)) & 1
            x = (self.value >> (2 * n + 1)) & 1
            out.append(2 * z + x)
        return out

    @classmethod
    def from_symbols(cls, symbols: Sequence[int]) -> "BitString":
        value = 0
        for n, s in enumerate(symbols):
            if not 0 <= s < 4:
                raise ValueError(f"symbol out of range: {s}")
            z, x = s >> 1, s & 1
            value |= (z << (2 * n)) | (x << (2 * n + 1))
        return cls(value, 2 * len(symbols))

    def __repr__(self) -> str:
        return f"BitString({''.join(map(str, self.bits()))})"


def symplectic_product(u: BitString, v: BitString) -> int:
    """``u^T P v`` = sum over qubits of ``u_z v_x + u_x v_z`` (mod 2)."""
    if u.length != v.length:
        raise LengthMismatch(f"lengths differ: {u.length} vs {v.length}")
    if u.length % 2:
        raise ValueError("symplectic product needs even length")
    return parity(u.value & swap_pairs(v.value, v.length))


@dataclass(frozen=True)
class GF2Matrix:
    rows: tuple[int, ...]
    n_cols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        for r in self.rows:
            if r < 0 or r >> self.n_cols:
                raise ValueError(f"row {r:#x} wider than {self.n_cols} columns")

    @classmethod
    def from_bitstrings(cls, rows: Sequence[BitString], n_cols: int | None = None) -> "GF2Matrix":
        if n_cols is None:
            if not rows:
                raise ValueError("n_cols required for an empty matrix")
            n_cols = rows[0].length
        for r in rows:
            if r.length != n_cols:
                raise LengthMismatch(f"row length {r.length} != {n_cols}")
        return cls(tuple(r.value for r in rows), n_cols)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], n_cols: int | None = None) -> "GF2Matrix":
        return cls.from_bitstrings([BitString.from_bits(r) for r in rows], n_cols)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "GF2Matrix":
        return cls((0,) * n_rows, n_cols)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> BitString:
        return BitString(self.rows[i], self.n_cols)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.n_cols)] for r in self.rows]

    def swap_columns_pairwise(self) -> "GF2Matrix":
        """``M P``: swap columns ``2n`` and ``2n + 1``."""
        return GF2Matrix(tuple(swap_pairs(r, self.n_cols) for r in self.rows), self.n_cols)


def rref(M: GF2Matrix) -> tuple[GF2Matrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Columns are scanned from bit 0 upward, so each pivot is the lowest set
    bit of its row and rows come out ordered by pivot.
    """
    rows = list(M.rows)
    pivots: list[int] = []
    r = 0
    for col in range(M.n_cols):
        bit = 1 << col
        for i in range(r, len(rows)):
            if rows[i] & bit:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        for j in range(len(rows)):
            if j != r and rows[j] & bit:
                rows[j] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return GF2Matrix(tuple(rows[:r]), M.n_cols), pivots


def rank(M: GF2Matrix) -> int:
    return len(rref(M)[1])


def kernel_basis(M: GF2Matrix) -> GF2Matrix:
    """Basis of ``{x : M x = 0}``, one row per free column of the RREF."""
    R, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for free in range(M.n_cols):
        if free in pivot_set:
            continue
        x = 1 << free
        for row, p in zip(R.rows, pivots):
            if (row >> free) & 1:
                x |= 1 << p
        basis.append(x)
    return GF2Matrix(tuple(basis), M.n_cols)


def mat_vec(M: GF2Matrix, x: BitString) -> BitString:
    if x.length != M.n_cols:
        raise LengthMismatch(f"vector length {x.length} != {M.n_cols} columns")
    out = 0
    for i, r in enumerate(M.rows):
        out |= parity(r & x.value) << i
    return BitString(out, M.n_rows)


def in_span(rows: Sequence[int], v: int) -> bool:
    """Whether ``v`` lies in the row space spanned by ``rows``."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    for b in basis:
        v = min(v, v ^ b)
    return v == 0


def solve(M: GF2Matrix, b: BitString) -> BitString | None:
    """One solution ``x`` of ``M x = b``, or ``None`` when inconsistent."""
    if b.length != M.n_rows:
        raise LengthMismatch(f"rhs length {b.length} != {M.n_rows} rows")
    # eliminate on augmented rows; bit n_cols holds the rhs
    aug = [r | (((b.value >> i) & 1) << M.n_cols) for i, r in enumerate(M.rows)]
    pivots = []
    r = 0
    for col in range(M.n_cols):
        bit = 1 << col
        for i in range(r, len(aug)):
            if aug[i] & bit:
                break
        else:
            continue
        aug[r], aug[i] = aug[i], aug[r]
        for j in range(len(aug)):
            if j != r and aug[j] & bit:
                aug[j] ^= aug[r]
        pivots.append(col)
        r += 1
    for row in aug[r:]:
        if row >> M.n_cols:
            return None
    x = 0
    for row, p in zip(aug, pivots):
        if (row >> M.n_cols) & 1:
            x |= 1 << p
    return BitString(x, M.n_cols)
