"""One-way LOCC discrimination through stabilizer measurements.

Alice measures in a stabilizer basis and announces the outcome; Bob's
remaining task is to identify the Pauli error ``m`` from its syndrome
``G P m``.  The best guess for a syndrome is its coset leader (the most
likely label in ``m + C``), and the protocol succeeds exactly when the
sampled label is the leader of its own coset.

Ties between equally likely labels go to the lexicographically smallest
bit tuple; the same rule is used by every evaluator here.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .ensemble_stats import (
    ProbVec4,
    TailParams,
    aep_tail_bound,
    as_prob,
    entropy,
    gamma1_single,
    gamma_upper_bound,
    sorted_classes,
)
from .gf2 import BitString, GF2Matrix, LengthMismatch, solve
from .symplectic_codes import SelfDualCode, sample_uniform, syndrome

MAX_EXACT_N = 12
MAX_LEADER_TABLE_N = 14
MAX_MC_N = 26
MC_CHUNK = 256


def _tol(N: int) -> float:
    return 1e-12 * N


def resolve_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    return int(seed)


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


@dataclass(frozen=True)
class DecoderResult:
    code: SelfDualCode
    eta: float
    method: str  # "exact", "monte_carlo" or "bracket"
    stderr: float = 0.0
    n_samples: int = 0
    seed: int | None = None
    eta_upper: float | None = None
    trial_scores: tuple[float, ...] = ()
    elapsed: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.eta <= 1 + 1e-12:
            raise ValueError(f"eta={self.eta} outside [0, 1]")
        if self.method == "exact" and self.stderr != 0:
            raise ValueError("exact results carry no standard error")

    def ci95(self) -> tuple[float, float]:
        return self.eta - 1.96 * self.stderr, self.eta + 1.96 * self.stderr

    def to_dict(self) -> dict:
        out = {
            "code": self.code.to_dict(),
            "eta": self.eta,
            "method": self.method,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }
        if self.eta_upper is not None:
            out["eta_upper"] = self.eta_upper
        if self.trial_scores:
            out["trial_scores"] = list(self.trial_scores)
        return out


class _Tables:
    """Lookup tables for one (code, p) pair."""

    def __init__(self, code: SelfDualCode, p: ProbVec4):
        N = code.n_qubits
        if N > K.MAX_KERNEL_N:
            raise ValueError(f"N={N} exceeds the packed-word limit {K.MAX_KERNEL_N}")
        self.N = N
        self.T = K.logprob_table(p.log2p, N)
        self.S = K.syndrome_table(code.check_rows(), N)
        self.gens = np.array(code.rows, dtype=np.uint64)
        self.tol = _tol(N)


def leader_table(code: SelfDualCode, p) -> tuple[np.ndarray, np.ndarray]:
    """Coset leader and its log2 probability for every syndrome."""
    p = as_prob(p)
    if code.n_qubits > MAX_LEADER_TABLE_N:
        raise ValueError(f"full leader table needs N <= {MAX_LEADER_TABLE_N}")
    t = _Tables(code, p)
    best_lq, leader = K.exact_sweep(t.N, t.T, t.S, t.tol)
    return leader, best_lq


def _syndrome_preimage(code: SelfDualCode, a: BitString) -> int:
    GP = GF2Matrix(code.check_rows(), 2 * code.n_qubits)
    x = solve(GP, a)
    assert x is not None  # G P has full row rank
    return x.value


def coset_leader(code: SelfDualCode, a: BitString, p) -> BitString:
    """Most likely label with syndrome ``a`` (Bob's optimal guess)."""
    p = as_prob(p)
    N = code.n_qubits
    if a.length != N:
        raise LengthMismatch(f"syndrome length {a.length} != {N}")
    t = _Tables(code, p)
    best = K.coset_best(np.uint64(_syndrome_preimage(code, a)), t.gens, t.T, t.tol)
    return BitString(int(best), 2 * N)


def _leader_probs(leader: np.ndarray, p: ProbVec4, N: int) -> list[float]:
    # linear-space products keep e.g. uniform p exact
    out = []
    for m in leader.tolist():
        q = 1.0
        for n in range(N):
            z = (m >> (2 * n)) & 1
            x = (m >> (2 * n + 1)) & 1
            q *= p.p[2 * z + x]
        out.append(q)
    return out


def eta_exact(code: SelfDualCode, p) -> DecoderResult:
    """Success probability summed over all syndromes' leaders."""
    p = as_prob(p)
    N = code.n_qubits
    if N > MAX_EXACT_N:
        raise ValueError(f"eta_exact supports N <= {MAX_EXACT_N}, got {N}")
    t0 = time.perf_counter()
    leader, _ = leader_table(code, p)
    eta = math.fsum(_leader_probs(leader, p, N))
    return DecoderResult(code, min(eta, 1.0), "exact", elapsed=time.perf_counter() - t0)


def sample_labels(p, N: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` labels drawn from the product distribution, packed as ``uint64``."""
    p = as_prob(p)
    sym = rng.choice(4, size=(n, N), p=np.asarray(p.p))
    z = (sym >> 1).astype(np.uint64)
    x = (sym & 1).astype(np.uint64)
    shifts = np.arange(N, dtype=np.uint64) * np.uint64(2)
    return np.bitwise_or.reduce((z << shifts) | (x << (shifts + np.uint64(1))), axis=1) if N else np.zeros(n, np.uint64)


def _chunks(n_samples: int) -> list[tuple[int, int]]:
    return [(c, min(MC_CHUNK, n_samples - c * MC_CHUNK)) for c in range((n_samples + MC_CHUNK - 1) // MC_CHUNK)]


def _map_chunks(fn, chunks, threads: int):
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def eta_mc(code: SelfDualCode, p, n_samples: int, seed=None, threads: int = 1) -> DecoderResult:
    """Monte-Carlo estimate: fraction of sampled labels that lead their coset.

    Samples come in fixed-size chunks, each with its own stream derived
    from ``(seed, chunk index)``, so the estimate does not depend on
    ``threads``.
    """
    p = as_prob(p)
    N = code.n_qubits
    if N > MAX_MC_N:
        raise ValueError(f"eta_mc supports N <= {MAX_MC_N}, got {N}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    seed = resolve_seed(seed)
    t0 = time.perf_counter()
    t = _Tables(code, p)

    def run(chunk):
        c, size = chunk
        ms = sample_labels(p, N, size, _chunk_rng(seed, c))
        return K.count_unbeaten(ms, t.gens, t.T, t.tol)

    wins = sum(_map_chunks(run, _chunks(n_samples), threads))
    eta = wins / n_samples
    stderr = math.sqrt(eta * (1.0 - eta) / n_samples)
    return DecoderResult(
        code, eta, "monte_carlo", stderr, n_samples, seed, elapsed=time.perf_counter() - t0
    )


def eta_bracket(code: SelfDualCode, p, max_labels: int = 20_000_000, min_mass: float = 1.0) -> DecoderResult:
    """Deterministic bounds on eta from the most likely type classes.

    Labels are visited class by class in decreasing probability; the first
    label to reach a syndrome is that syndrome's leader.  Visiting stops
    once ``min_mass`` of probability is covered or the next class would
    exceed ``max_labels``.  ``eta`` is then a lower bound and ``eta_upper``
    adds the unvisited mass.
    """
    p = as_prob(p)
    N = code.n_qubits
    if N > 30:
        raise ValueError("eta_bracket needs a 2^N syndrome bitmap; N <= 30")
    t0 = time.perf_counter()
    chosen, visited = [], 0
    covered = []
    for tc in sorted_classes(p, N):
        mult = tc.multiplicity
        if visited + mult > max_labels or math.fsum(covered) >= min_mass:
            break
        chosen.append(tc)
        visited += mult
        covered.append(mult * tc.prob(p))
    syms = np.array(
        [sorted(s for s in range(4) for _ in range(tc.counts[s])) for tc in chosen],
        dtype=np.int8,
    ).reshape(len(chosen), N)
    seen = np.zeros(1 << N, dtype=np.bool_)
    S = K.syndrome_table(code.check_rows(), N)
    new = K.first_in_syndrome_counts(syms, S, seen)
    lower = math.fsum(int(k) * tc.prob(p) for k, tc in zip(new, chosen))
    upper = min(1.0, lower + max(0.0, 1.0 - math.fsum(covered)))
    return DecoderResult(
        code, min(lower, 1.0), "bracket", n_samples=visited, eta_upper=upper,
        elapsed=time.perf_counter() - t0,
    )


def code_search(
    p,
    N: int,
    trials: int,
    seed=None,
    eval_budget: int = 64,
    rank_by: str = "auto",
    final_samples: int | None = None,
    threads: int = 1,
) -> DecoderResult:
    """Best of ``trials`` uniformly sampled codes.

    ``rank_by`` is ``"exact"`` (``N <= 12``), ``"mc"`` (``eval_budget``
    samples per code) or ``"bracket"``; ``"auto"`` picks exact when it fits
    and mc otherwise.  For non-exact ranking the winner is re-scored with
    ``final_samples`` fresh Monte-Carlo samples so its estimate carries no
    selection bias.
    """
    p = as_prob(p)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = resolve_seed(seed)
    if rank_by == "auto":
        rank_by = "exact" if N <= MAX_EXACT_N else "mc"
    if rank_by not in ("exact", "mc", "bracket"):
        raise ValueError(f"unknown rank_by {rank_by!r}")
    t0 = time.perf_counter()
    ss = np.random.SeedSequence(seed)
    code_seed, eval_seed, final_seed = ss.spawn(3)
    code_rng = np.random.default_rng(code_seed)
    eval_seeds = eval_seed.generate_state(trials, dtype=np.uint64)

    best, best_score, scores = None, -1.0, []
    for k in range(trials):
        code = sample_uniform(N, code_rng)
        if rank_by == "exact":
            score = eta_exact(code, p).eta
        elif rank_by == "mc":
            score = eta_mc(code, p, eval_budget, int(eval_seeds[k]), threads).eta
        else:
            score = eta_bracket(code, p, max_labels=eval_budget).eta
        scores.append(score)
        if score > best_score:
            best, best_score = code, score

    if rank_by == "exact":
        res = DecoderResult(best, best_score, "exact", seed=seed)
    else:
        n_final = final_samples or eval_budget
        fin = eta_mc(best, p, n_final, int(final_seed.generate_state(1, dtype=np.uint64)[0]), threads)
        res = DecoderResult(best, fin.eta, "monte_carlo", fin.stderr, fin.n_samples, seed)
    return DecoderResult(
        res.code, res.eta, res.method, res.stderr, res.n_samples, seed,
        trial_scores=tuple(scores), elapsed=time.perf_counter() - t0,
    )


def failure_bound(p, N: int, epsilon: float, delta_floor: float = 1.0) -> float:
    """Random-coding bound on the mean failure ``1 - eta`` over codes."""
    p = as_prob(p)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if len(p.support) < 2:
        raise ValueError("need at least two symbols in the support")
    tail = aep_tail_bound(TailParams.for_prob(p, epsilon, delta_floor), N)
    return 2.0 ** (N * (entropy(p) + epsilon - 1.0)) + tail


@dataclass(frozen=True)
class GameRun:
    """Outcome of simulating the repeated game with one fixed code."""

    wins: int
    trials: int
    seed: int
    alice_outcomes: tuple[int, ...] = ()

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials

    @property
    def stderr(self) -> float:
        w = self.win_rate
        return math.sqrt(w * (1.0 - w) / self.trials)


def game_simulate(
    p, N: int, code: SelfDualCode, trials: int, seed=None, sample_alice: bool = False
) -> GameRun:
    """Play ``trials`` rounds of the N-fold game with a stabilizer strategy.

    Each round the referee draws ``m``; Bob learns its syndrome, guesses
    the coset leader, and the players win iff the guess equals ``m``.
    With ``sample_alice`` Alice's outcome ``a`` is drawn uniformly and Bob
    recovers the syndrome as ``a XOR b``; the first outcomes are recorded.
    """
    p = as_prob(p)
    if code.n_qubits != N:
        raise ValueError("code size does not match N")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = resolve_seed(seed)
    rng = np.random.default_rng(seed)
    ms = sample_labels(p, N, trials, rng)
    t = _Tables(code, p)
    if N <= MAX_EXACT_N:
        leader, _ = leader_table(code, p)
        syn = np.zeros(trials, dtype=np.uint64)
        for b in range(t.S.shape[0]):
            syn ^= t.S[b][((ms >> np.uint64(8 * b)) & np.uint64(0xFF)).astype(np.intp)]
        outcomes: tuple[int, ...] = ()
        if sample_alice:
            a = rng.integers(0, 1 << N, size=trials, dtype=np.uint64)
            bob = a ^ syn
            syn = a ^ bob
            outcomes = tuple(int(x) for x in a[:16])
        guesses = leader[syn.astype(np.intp)]
        wins = int(np.count_nonzero(guesses == ms))
    else:
        outcomes = ()
        wins = 0
        for m in ms:
            s = syndrome(code, BitString(int(m), 2 * N))
            g = K.coset_best(np.uint64(_syndrome_preimage(code, s)), t.gens, t.T, t.tol)
            wins += int(g == m)
    return GameRun(wins, trials, seed, outcomes)


@dataclass(frozen=True)
class GameReport:
    p: ProbVec4
    N: int
    gamma1: float
    eta_best: float
    eta_stderr: float
    upper_bound: float
    code: SelfDualCode
    method: str
    seed: int
    game: GameRun | None = None
    extra: dict = field(default_factory=dict)

    @property
    def counterexample_flag(self) -> bool:
        return self.eta_best > self.gamma1 and self.gamma1 < 1 - 1e-9

    @property
    def eta_ci95(self) -> tuple[float, float]:
        return self.eta_best - 1.96 * self.eta_stderr, self.eta_best + 1.96 * self.eta_stderr

    def to_dict(self) -> dict:
        out = {
            "p": list(self.p.p),
            "N": self.N,
            "gamma1": self.gamma1,
            "eta_best": self.eta_best,
            "eta_stderr": self.eta_stderr,
            "eta_ci95": list(self.eta_ci95),
            "upper_bound": self.upper_bound,
            "counterexample_flag": self.counterexample_flag,
            "method": self.method,
            "seed": self.seed,
            "code": self.code.to_dict(),
        }
        if self.game is not None:
            out["game"] = {
                "wins": self.game.wins,
                "trials": self.game.trials,
                "win_rate": self.game.win_rate,
                "stderr": self.game.stderr,
                "seed": self.game.seed,
            }
        out.update(self.extra)
        return out


def chi_report(
    p,
    N: int,
    trials: int,
    seed=None,
    eval_budget: int = 64,
    final_samples: int | None = None,
    game_trials: int = 0,
    rank_by: str = "auto",
    threads: int = 1,
) -> GameReport:
    """Single-game value, a constructive lower bound and the upper bound for N copies."""
    p = as_prob(p)
    seed = resolve_seed(seed)
    search_seed, game_seed = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
    res = code_search(
        p, N, trials, int(search_seed), eval_budget, rank_by, final_samples, threads
    )
    game = None
    if game_trials:
        game = game_simulate(p, N, res.code, game_trials, int(game_seed))
    return GameReport(
        p=p,
        N=N,
        gamma1=gamma1_single(p),
        eta_best=res.eta,
        eta_stderr=res.stderr,
        upper_bound=gamma_upper_bound(p, N),
        code=res.code,
        method=res.method,
        seed=seed,
        game=game,
    )
