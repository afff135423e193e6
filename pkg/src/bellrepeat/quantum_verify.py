"""Dense state-vector checks of the stabilizer discrimination protocol.

Everything here is brute force on ``2^N`` (or ``4^N``) amplitudes and is
only meant for ``N <= 4``.  Qubit 0 is the most significant tensor factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble_stats import as_prob
from .gf2 import BitString, LengthMismatch
from .symplectic_codes import SelfDualCode, syndrome

MAX_STATE_N = 6
MAX_CHECK_N = 4

# indexed by the Bell symbol 2*z + x: I, X, Z, Y
PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
)


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude vector has the wrong size")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _check_n(N: int, limit: int) -> None:
    if N > limit:
        raise ValueError(f"dense simulation limited to N <= {limit}, got {N}")


def _apply_local(ops, vec: np.ndarray, N: int) -> np.ndarray:
    psi = vec.reshape((2,) * N)
    for n, op in enumerate(ops):
        if op is PAULI[0]:
            continue
        psi = np.moveaxis(np.tensordot(op, psi, axes=([1], [n])), 0, n)
    return psi.reshape(-1)


def pauli_ops(m: BitString) -> list[np.ndarray]:
    return [PAULI[s] for s in m.symbols()]


def apply_pauli(m: BitString, psi: DenseState) -> DenseState:
    """``sigma_m |psi>`` with ``Y|x> = (-1)^x i |1-x>``."""
    if m.length != 2 * psi.n_qubits:
        raise LengthMismatch(f"label length {m.length} != 2 * {psi.n_qubits}")
    return DenseState(_apply_local(pauli_ops(m), psi.amplitudes, psi.n_qubits), psi.n_qubits)


def stabilizer_state(code: SelfDualCode, a: BitString) -> DenseState:
    """State with ``g_n |psi> = (-1)^{a_n} |psi>`` for every generator ``g_n``.

    Projectors ``(I + (-1)^{a_n} g_n) / 2`` are applied to computational
    basis seeds until one survives with non-negligible norm.
    """
    N = code.n_qubits
    _check_n(N, MAX_STATE_N)
    if a.length != N:
        raise LengthMismatch(f"sign vector length {a.length} != {N}")
    gens = [BitString(g, 2 * N) for g in code.rows]
    for seed in range(1 << N):
        vec = np.zeros(1 << N, dtype=complex)
        vec[seed] = 1.0
        for n, g in enumerate(gens):
            sign = -1.0 if a[n] else 1.0
            vec = 0.5 * (vec + sign * _apply_local(pauli_ops(g), vec, N))
        nrm = np.linalg.norm(vec)
        if nrm > 1e-12:
            return DenseState(vec / nrm, N)
    raise RuntimeError("no seed survived projection; generators are not a valid stabilizer")


def stabilizer_basis(code: SelfDualCode) -> list[DenseState]:
    N = code.n_qubits
    return [stabilizer_state(code, BitString(a, N)) for a in range(1 << N)]


def verify_lemma1(code: SelfDualCode, tol: float = 1e-9) -> bool:
    """``sigma_m |psi_a>`` equals ``|psi_{a + GPm}>`` up to a phase, for all a, m."""
    N = code.n_qubits
    _check_n(N, MAX_CHECK_N)
    basis = stabilizer_basis(code)
    for mv in range(1 << (2 * N)):
        m = BitString(mv, 2 * N)
        s = syndrome(code, m).value
        for a, psi in enumerate(basis):
            moved = apply_pauli(m, psi)
            if abs(abs(basis[a ^ s].overlap(moved)) - 1.0) > tol:
                return False
    return True


def bell_product_state(m: BitString) -> np.ndarray:
    """``|Psi_m>`` on ``2N`` qubits ordered Alice ``1..N`` then Bob ``1..N``.

    Built as the product of pairs ``(I x sigma_{m_n}) |Phi_00>`` in the
    natural ``A1 B1 A2 B2 ...`` order, then permuted.
    """
    N = m.length // 2
    phi00 = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    vec = np.ones(1, dtype=complex)
    for s in m.symbols():
        vec = np.kron(vec, np.kron(PAULI[0], PAULI[s]) @ phi00)
    order = [2 * n for n in range(N)] + [2 * n + 1 for n in range(N)]
    return vec.reshape((2,) * (2 * N)).transpose(order).reshape(-1)


def bell_reduction_check(code: SelfDualCode, p=None, tol: float = 1e-9) -> bool:
    """Alice projecting on ``|phi_a> = conj(|psi_a>)`` leaves Bob ``2^{-N/2} sigma_m |psi_a>``.

    Checked for every ``a`` and ``m``, up to global phase.  The identity does
    not involve ``p``; it is accepted so all checks share one call shape.
    """
    N = code.n_qubits
    _check_n(N, MAX_CHECK_N)
    d = 1 << N
    basis = stabilizer_basis(code)
    for mv in range(1 << (2 * N)):
        m = BitString(mv, 2 * N)
        Psi = bell_product_state(m).reshape(d, d)
        for psi in basis:
            phi = psi.amplitudes.conj()
            residual = phi.conj() @ Psi
            target = apply_pauli(m, psi).amplitudes / math.sqrt(d)
            if abs(np.linalg.norm(residual) - 1 / math.sqrt(d)) > tol:
                return False
            if abs(abs(np.vdot(target, residual)) - 1.0 / d) > tol:
                return False
    return True


def _label_probs(p, N: int) -> np.ndarray:
    p = as_prob(p)
    q = np.ones(1 << (2 * N))
    for mv in range(1 << (2 * N)):
        for s in BitString(mv, 2 * N).symbols():
            q[mv] *= p.p[s]
    return q


def optimal_success_quantum(code: SelfDualCode, p, decoder: str = "bayes") -> float:
    """Success of Bob measuring ``sigma_m |xi>`` in the stabilizer basis.

    ``decoder="bayes"`` lets Bob guess, for each outcome ``a``, the label
    maximising ``q_m |<psi_a| sigma_m |xi>|^2`` straight from the amplitudes.
    ``decoder="coset"`` instead credits only ``m`` equal to the coset
    leader of ``a``.  Both give the protocol's success probability.
    """
    from .discriminator import leader_table

    N = code.n_qubits
    _check_n(N, MAX_CHECK_N)
    basis = stabilizer_basis(code)
    xi = basis[0]
    q = _label_probs(p, N)
    A = np.array([b.amplitudes for b in basis])  # rows: <psi_a| after conj
    moved = np.array([apply_pauli(BitString(mv, 2 * N), xi).amplitudes for mv in range(len(q))])
    probs = np.abs(A.conj() @ moved.T) ** 2  # probs[a, m]
    if decoder == "bayes":
        return float(np.sum(np.max(q[None, :] * probs, axis=1)))
    if decoder == "coset":
        leader, _ = leader_table(code, p)
        return math.fsum(
            q[mv] * probs[syndrome(code, BitString(mv, 2 * N)).value, mv]
            for mv in range(len(q))
            if int(leader[syndrome(code, BitString(mv, 2 * N)).value]) == mv
        )
    raise ValueError(f"unknown decoder {decoder!r}")


def one_way_protocol_success(code: SelfDualCode, p) -> float:
    """Full two-party simulation: Alice measures ``{conj |psi_a>}``, Bob ``{|psi_b>}``.

    Bob guesses the most likely label given both outcomes, so the result is
    the best success this pair of local measurements can give.
    """
    N = code.n_qubits
    _check_n(N, MAX_CHECK_N)
    d = 1 << N
    q = _label_probs(p, N)
    B = np.array([b.amplitudes for b in stabilizer_basis(code)])
    Aconj = B.conj()
    # amp[a, b, m] = (<phi_a| x <psi_b|) |Psi_m>
    joint = np.empty((d, d, len(q)))
    for mv in range(len(q)):
        Psi = bell_product_state(BitString(mv, 2 * N)).reshape(d, d)
        joint[:, :, mv] = np.abs(Aconj.conj() @ Psi @ B.conj().T) ** 2
    return float(np.sum(np.max(q[None, None, :] * joint, axis=2)))
