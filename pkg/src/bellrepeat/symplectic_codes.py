"""Symplectic self-dual subspaces of F_2^{2N} and their syndromes.

A code is stored through its ``N x 2N`` generator matrix ``G``.  Membership
and syndromes both go through ``G P m``, because self-duality makes
``ker(G P) = C``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np

from .gf2 import (
    BitString,
    GF2Matrix,
    LengthMismatch,
    in_span,
    kernel_basis,
    parity,
    rank,
    rref,
    swap_pairs,
)

MAX_ENUMERATE_N = 3


class CodeError(ValueError):
    pass


class ChoiceNotInDual(CodeError):
    pass


class ChoiceAlreadyInSpan(CodeError):
    pass


@dataclass(frozen=True, eq=False)
class SelfDualCode:
    n_qubits: int
    generators: GF2Matrix

    def __post_init__(self):
        N, G = self.n_qubits, self.generators
        if N < 1:
            raise CodeError("n_qubits must be >= 1")
        if G.n_rows != N or G.n_cols != 2 * N:
            raise CodeError(f"generator matrix must be {N}x{2 * N}, got {G.n_rows}x{G.n_cols}")
        if rank(G) != N:
            raise CodeError("generators are not independent")
        for i, j in itertools.combinations(range(N), 2):
            if parity(G.rows[i] & swap_pairs(G.rows[j], 2 * N)):
                raise CodeError(f"generators {i} and {j} anticommute")

    @classmethod
    def from_rows(cls, rows: Sequence[int], n_qubits: int) -> "SelfDualCode":
        return cls(n_qubits, GF2Matrix(tuple(rows), 2 * n_qubits))

    @property
    def rows(self) -> tuple[int, ...]:
        return self.generators.rows

    def canonical(self) -> "SelfDualCode":
        R, _ = rref(self.generators)
        return SelfDualCode(self.n_qubits, R)

    @property
    def key(self) -> tuple[int, ...]:
        return rref(self.generators)[0].rows

    def __eq__(self, other):
        if not isinstance(other, SelfDualCode):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self.key == other.key

    def __hash__(self):
        return hash((self.n_qubits, self.key))

    def check_rows(self) -> tuple[int, ...]:
        """Rows of ``G P``; bit ``i`` of a syndrome is ``parity(row_i & m)``."""
        return self.generators.swap_columns_pairwise().rows

    def to_dict(self) -> dict:
        canon = self.canonical()
        return {
            "n_qubits": self.n_qubits,
            "generators": [BitString(r, 2 * self.n_qubits).to_hex() for r in canon.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SelfDualCode":
        N = int(data["n_qubits"])
        rows = [BitString.from_hex(h, 2 * N).value for h in data["generators"]]
        return cls.from_rows(rows, N)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SelfDualCode":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        hexes = ",".join(BitString(r, 2 * self.n_qubits).to_hex() for r in self.rows)
        return f"SelfDualCode(N={self.n_qubits}, [{hexes}])"


def _dual_basis(rows: Sequence[int], n_bits: int) -> GF2Matrix:
    # v in C^perp  <=>  (P g) . v = 0 for every generator g
    return kernel_basis(GF2Matrix(tuple(swap_pairs(r, n_bits) for r in rows), n_bits))


def build_incremental(choices: Sequence[BitString]) -> SelfDualCode:
    """Grow ``C_0 = {0} < C_1 < ... < C_N`` from explicit basis choices.

    Each choice must lie in the symplectic dual of the span so far and
    outside the span itself.
    """
    if not choices:
        raise CodeError("need at least one choice")
    n_bits = choices[0].length
    if n_bits % 2:
        raise CodeError("vectors must have even length 2N")
    N = n_bits // 2
    if len(choices) != N:
        raise CodeError(f"expected {N} choices for N={N}, got {len(choices)}")
    rows: list[int] = []
    for k, s in enumerate(choices):
        if s.length != n_bits:
            raise LengthMismatch(f"choice {k} has length {s.length}, expected {n_bits}")
        for r in rows:
            if parity(r & swap_pairs(s.value, n_bits)):
                raise ChoiceNotInDual(f"choice {k} anticommutes with an earlier generator")
        if in_span(rows, s.value):
            raise ChoiceAlreadyInSpan(f"choice {k} is already in the span")
        rows.append(s.value)
    return SelfDualCode.from_rows(rows, N)


def sample_uniform(N: int, rng: np.random.Generator | int | None = None) -> SelfDualCode:
    """Draw a code uniformly from all symplectic self-dual subspaces.

    Every ordered basis is produced with equal probability and every
    subspace has the same number of ordered bases, so the span is uniform.
    """
    if N < 1:
        raise CodeError("N must be >= 1")
    rng = np.random.default_rng(rng)
    n_bits = 2 * N
    rows: list[int] = []
    for _ in range(N):
        dual = _dual_basis(rows, n_bits).rows
        while True:
            coeffs = rng.integers(0, 2, size=len(dual))
            s = 0
            for c, b in zip(coeffs, dual):
                if c:
                    s ^= b
            if s and not in_span(rows, s):
                break
        rows.append(s)
    return SelfDualCode.from_rows(rows, N)


def count_self_dual(N: int) -> int:
    if N < 1:
        raise ValueError("N must be >= 1")
    num = prod(2 ** (2 * N - n) - 2**n for n in range(N))
    den = prod(2**N - 2**n for n in range(N))
    q, r = divmod(num, den)
    assert r == 0
    return q


def count_containing(N: int) -> int:
    """Number of self-dual codes that contain a fixed nonzero vector."""
    if N < 1:
        raise ValueError("N must be >= 1")
    num = prod(2 ** (2 * N - n) - 2**n for n in range(1, N))
    den = prod(2**N - 2**n for n in range(1, N))
    q, r = divmod(num, den)
    assert r == 0
    return q


def containing_ratio(N: int) -> Fraction:
    return Fraction(count_containing(N), count_self_dual(N))


def _rref_matrices(n_rows: int, n_cols: int):
    """Every ``n_rows``-dim subspace of F_2^{n_cols}, once, as RREF rows."""
    for pivots in itertools.combinations(range(n_cols), n_rows):
        # free slots: columns right of the row's pivot that are not pivots
        slots = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, n_cols) if c not in pivots]
        for fill in itertools.product((0, 1), repeat=len(slots)):
            rows = [1 << p for p in pivots]
            for (i, c), f in zip(slots, fill):
                if f:
                    rows[i] |= 1 << c
            yield tuple(rows)


def enumerate_all(N: int) -> list[SelfDualCode]:
    """All self-dual codes for small ``N``, found by scanning every subspace."""
    if not 1 <= N <= MAX_ENUMERATE_N:
        raise CodeError(f"enumerate_all supports 1 <= N <= {MAX_ENUMERATE_N}, got {N}")
    n_bits = 2 * N
    out = []
    for rows in _rref_matrices(N, n_bits):
        if all(
            not parity(a & swap_pairs(b, n_bits)) for a, b in itertools.combinations(rows, 2)
        ):
            out.append(SelfDualCode.from_rows(rows, N))
    return out


def syndrome(code: SelfDualCode, m: BitString) -> BitString:
    """``G P m``; bit ``i`` is the commutation of error ``m`` with generator ``i``."""
    n_bits = 2 * code.n_qubits
    if m.length != n_bits:
        raise LengthMismatch(f"error length {m.length} != {n_bits}")
    pm = swap_pairs(m.value, n_bits)
    s = 0
    for i, g in enumerate(code.rows):
        s |= parity(g & pm) << i
    return BitString(s, code.n_qubits)


def contains(code: SelfDualCode, c: BitString) -> bool:
    return syndrome(code, c).value == 0


def codewords(code: SelfDualCode) -> list[int]:
    """All ``2^N`` elements of the code (small N only)."""
    words = [0]
    for g in code.rows:
        words += [w ^ g for w in words]
    return words
