"""Probability model of the N-fold Bell ensemble and its entropy bounds.

All entropies and log-probabilities are in bits.  Sequences with the same
symbol counts share one probability, so sums over the ``4^N`` labels are
done over type classes (``O(N^3)`` of them) instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .gf2 import BitString

PROB_TOL = 1e-12
SEPARABLE_TOL = 1e-12
CRITICAL_TOL = 1e-6
MAX_TYPE_CLASS_N = 64


@dataclass(frozen=True)
class ProbVec4:
    """Single-copy distribution ``(p00, p01, p10, p11)`` over I, X, Z, Y."""

    p: tuple[float, float, float, float]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) != 4:
            raise ValueError(f"need 4 probabilities, got {len(p)}")
        if any(not math.isfinite(x) or x < 0 for x in p):
            raise ValueError(f"probabilities must be finite and non-negative: {p}")
        if abs(math.fsum(p) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(p)!r}, not 1")
        object.__setattr__(self, "p", p)

    @classmethod
    def of(cls, *p: float) -> "ProbVec4":
        if len(p) == 1:
            p = tuple(p[0])
        return cls(tuple(p))

    @classmethod
    def uniform(cls) -> "ProbVec4":
        return cls((0.25, 0.25, 0.25, 0.25))

    @classmethod
    def from_st(cls, s: float, t: float) -> "ProbVec4":
        return cls((s, t, 1.0 - s - t, 0.0))

    def __getitem__(self, i: int) -> float:
        return self.p[i]

    def __iter__(self):
        return iter(self.p)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.p) if x > 0)

    @cached_property
    def log2p(self) -> tuple[float, ...]:
        return tuple(math.log2(x) if x > 0 else -math.inf for x in self.p)


def as_prob(p) -> ProbVec4:
    return p if isinstance(p, ProbVec4) else ProbVec4(tuple(p))


@dataclass(frozen=True)
class TypeClass:
    """All labels with symbol counts ``(k00, k01, k10, k11)``."""

    counts: tuple[int, int, int, int]
    log_prob: float  # log2 of the shared probability

    @property
    def N(self) -> int:
        return sum(self.counts)

    @property
    def multiplicity(self) -> int:
        N, out = self.N, 1
        for k in self.counts:
            out *= math.comb(N, k)
            N -= k
        return out

    def prob(self, p: ProbVec4) -> float:
        # pow of exactly representable p keeps e.g. 4^-N exact
        return math.prod(x**k for x, k in zip(p.p, self.counts) if k)


def type_classes(p, N: int, support_only: bool = True) -> list[TypeClass]:
    p = as_prob(p)
    if N < 0:
        raise ValueError("N must be non-negative")
    symbols = p.support if support_only else (0, 1, 2, 3)
    out = []
    for counts in _compositions(N, len(symbols)):
        full = [0, 0, 0, 0]
        for s, k in zip(symbols, counts):
            full[s] = k
        lp = math.fsum(k * p.log2p[s] for s, k in enumerate(full) if k)
        out.append(TypeClass(tuple(full), lp))
    return out


def _compositions(N: int, parts: int):
    if parts == 1:
        yield (N,)
        return
    for k in range(N + 1):
        for rest in _compositions(N - k, parts - 1):
            yield (k,) + rest


def product_prob(p, m: BitString) -> float:
    """``q_m``, the product of per-qubit probabilities."""
    p = as_prob(p)
    lp = math.fsum(p.log2p[s] for s in m.symbols())
    return 2.0**lp


def entropy(p) -> float:
    p = as_prob(p)
    return -math.fsum(x * math.log2(x) for x in p.p if x > 0)


@dataclass(frozen=True)
class TailParams:
    """Hoeffding parameters for the typical-set tail.

    ``Delta`` is the log-probability range over the support, floored at
    ``delta_floor`` so it stays positive.
    """

    epsilon: float
    delta_floor: float = 1.0
    Delta: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta_floor <= 0 or self.Delta <= 0:
            raise ValueError("delta_floor and Delta must be positive")

    @classmethod
    def for_prob(cls, p, epsilon: float, delta_floor: float = 1.0) -> "TailParams":
        return cls(epsilon, delta_floor, log_prob_range(p, delta_floor))


def log_prob_range(p, delta_floor: float = 1.0) -> float:
    p = as_prob(p)
    logs = [p.log2p[s] for s in p.support]
    return max(max(logs) - min(logs), delta_floor)


def aep_tail_bound(params: TailParams, N: int) -> float:
    """``2 exp(-2 eps^2 N / Delta^2)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 2.0 * math.exp(-2.0 * params.epsilon**2 * N / params.Delta**2)


def exact_tail(p, N: int, epsilon: float) -> float:
    """Mass of support sequences with ``|-(1/N) log q - H| >= epsilon``."""
    p = as_prob(p)
    if N < 1:
        raise ValueError("N must be >= 1")
    H = entropy(p)
    terms = []
    for tc in type_classes(p, N):
        if abs(-tc.log_prob / N - H) >= epsilon:
            terms.append(tc.multiplicity * tc.prob(p))
    return math.fsum(terms)


def sorted_classes(p, N: int) -> list[TypeClass]:
    """Support type classes by decreasing probability (ties by counts)."""
    classes = type_classes(p, N)
    classes.sort(key=lambda tc: (-tc.log_prob, tc.counts))
    return classes


def top_k_sum(p, N: int, K: int) -> float:
    """Sum of the ``K`` largest values of ``q_m`` over all ``4^N`` labels."""
    p = as_prob(p)
    if not 0 <= N <= MAX_TYPE_CLASS_N:
        raise ValueError(f"N must be in [0, {MAX_TYPE_CLASS_N}]")
    K = int(K)
    if not 0 <= K <= 4**N:
        raise ValueError(f"K={K} outside [0, 4^N]")
    remaining = K
    terms = []
    for tc in sorted_classes(p, N):
        if remaining == 0:
            break
        take = min(remaining, tc.multiplicity)
        terms.append(take * tc.prob(p))
        remaining -= take
    # remaining labels (if any) have probability zero
    return math.fsum(terms)


def gamma_upper_bound(p, N: int) -> float:
    """Best sum of ``2^N`` label probabilities; bounds LOCC success."""
    return top_k_sum(p, N, 2**N)


def typical_set_bound(p, N: int, epsilon: float, delta_floor: float = 1.0) -> float:
    """``2^{N(1 - H + eps)} + 2 exp(-2 eps^2 N / Delta^2)``."""
    p = as_prob(p)
    tail = aep_tail_bound(TailParams.for_prob(p, epsilon, delta_floor), N)
    return 2.0 ** (N * (1.0 - entropy(p) + epsilon)) + tail


def gamma1_single(p) -> float:
    p = as_prob(p)
    a, b = sorted(p.p, reverse=True)[:2]
    return a + b


def is_separable(p) -> bool:
    """Bell-diagonal state is separable iff no weight exceeds 1/2."""
    return max(as_prob(p).p) <= 0.5 + SEPARABLE_TOL


def entropy_identity_gap(p) -> float:
    p = as_prob(p)
    lhs = math.fsum(x * math.log2(2 * x) for x in p.p if x > 0)
    return abs(lhs - (1.0 - entropy(p)))


class PhaseLabel(str, enum.Enum):
    BOUNDARY_PERFECT = "BOUNDARY_PERFECT"
    CONVERGES_TO_ZERO = "CONVERGES_TO_ZERO"
    CONVERGES_TO_ONE = "CONVERGES_TO_ONE"
    CRITICAL = "CRITICAL"


@dataclass(frozen=True)
class Phase:
    s: float
    t: float
    entropy: float
    separable: bool
    label: PhaseLabel


def classify_phase(s: float, t: float, critical_tol: float = CRITICAL_TOL) -> Phase:
    """Region of ``p = (s, t, 1 - s - t, 0)`` in the triangle picture."""
    u = 1.0 - s - t
    if s < -PROB_TOL or t < -PROB_TOL or u < -PROB_TOL:
        raise ValueError(f"(s, t) = ({s}, {t}) lies outside the simplex")
    s, t, u = max(s, 0.0), max(t, 0.0), max(u, 0.0)
    p = ProbVec4((s, t, u, 0.0))
    H = entropy(p)
    if min(s, t, u) <= PROB_TOL:
        label = PhaseLabel.BOUNDARY_PERFECT
    elif abs(H - 1.0) <= critical_tol:
        label = PhaseLabel.CRITICAL
    elif H > 1.0:
        label = PhaseLabel.CONVERGES_TO_ZERO
    else:
        label = PhaseLabel.CONVERGES_TO_ONE
    return Phase(s, t, H, is_separable(p), label)


def simplex_grid(resolution: float) -> list[tuple[float, float]]:
    """Grid points ``(s, t)`` with ``s + t <= 1`` at the given spacing."""
    steps = round(1.0 / resolution)
    if steps < 1 or abs(steps * resolution - 1.0) > 1e-9:
        raise ValueError(f"resolution must divide 1, got {resolution}")
    return [(i / steps, j / steps) for i in range(steps + 1) for j in range(steps + 1 - i)]


def check_satprob_lemma(a: Sequence[float], lam: Sequence[float], K_tilde: int) -> bool:
    """Check ``sum lam_k a_k <= max_{|X| = K_tilde} sum_{k in X} lam_k``.

    Preconditions: ``a_k`` in [0, 1], ``lam`` a probability vector and
    ``sum(a) <= K_tilde <= len(a)``.
    """
    a = np.asarray(a, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if a.shape != lam.shape or a.ndim != 1:
        raise ValueError("a and lambda must be 1-d of equal length")
    if np.any(a < 0) or np.any(a > 1):
        raise ValueError("a_k must lie in [0, 1]")
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-9:
        raise ValueError("lambda must be a probability vector")
    if not (a.sum() <= K_tilde + 1e-12 and 0 <= K_tilde <= len(a)):
        raise ValueError("need sum(a) <= K_tilde <= K")
    lhs = math.fsum(lam * a)
    rhs = math.fsum(np.sort(lam)[::-1][:K_tilde])
    return lhs <= rhs + 1e-12
