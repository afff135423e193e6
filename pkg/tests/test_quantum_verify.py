import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellrepeat.discriminator import eta_exact
from bellrepeat.ensemble_stats import ProbVec4
from bellrepeat.gf2 import BitString, LengthMismatch
from bellrepeat.quantum_verify import (
    DenseState,
    apply_pauli,
    bell_product_state,
    bell_reduction_check,
    one_way_protocol_success,
    optimal_success_quantum,
    stabilizer_basis,
    stabilizer_state,
    verify_lemma1,
)
from bellrepeat.symplectic_codes import SelfDualCode, enumerate_all, sample_uniform

BELL_CODE = SelfDualCode.from_rows([0b0101, 0b1010], 2)  # Z Z and X X


def test_bell_code_ground_state():
    psi = stabilizer_state(BELL_CODE, BitString(0, 2))
    ref = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert abs(abs(np.vdot(ref, psi.amplitudes)) - 1) < 1e-12


def test_z_code_states():
    z = SelfDualCode.from_rows([0b01], 1)
    up, down = stabilizer_basis(z)
    assert abs(up.amplitudes[0]) == pytest.approx(1)
    assert abs(down.amplitudes[1]) == pytest.approx(1)


def test_y_convention():
    zero = DenseState(np.array([1, 0], dtype=complex), 1)
    y = apply_pauli(BitString.from_symbols([3]), zero)
    assert np.allclose(y.amplitudes, [0, 1j])
    with pytest.raises(LengthMismatch):
        apply_pauli(BitString(0, 4), zero)


def test_bell_pair_state_layout():
    # single pair: (I x X)|Phi00> = (|01> + |10>)/sqrt2 with Alice first
    vec = bell_product_state(BitString.from_symbols([1]))
    assert np.allclose(vec, np.array([0, 1, 1, 0]) / math.sqrt(2))
    # two pairs with identity: Alice qubits first then Bob's
    vec = bell_product_state(BitString(0, 4)).reshape(4, 4)
    assert np.allclose(vec, np.eye(4) / 2)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_basis_is_orthonormal(N):
    for code in enumerate_all(N)[::11]:
        B = np.array([s.amplitudes for s in stabilizer_basis(code)])
        assert np.allclose(B.conj() @ B.T, np.eye(1 << N), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_paulis_are_involutions(N, seed):
    rng = np.random.default_rng(seed)
    psi = DenseState(rng.normal(size=1 << N) + 1j * rng.normal(size=1 << N), N)
    m = BitString(int(rng.integers(4**N)), 2 * N)
    assert np.allclose(apply_pauli(m, apply_pauli(m, psi)).amplitudes, psi.amplitudes)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_paulis_permute_basis_states(N):
    for seed in range(3):
        assert verify_lemma1(sample_uniform(N, seed))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_bell_reduction(N):
    for seed in range(2):
        assert bell_reduction_check(sample_uniform(N, seed))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_quantum_routes_agree_with_classical(N):
    rng = np.random.default_rng(N)
    for _ in range(3):
        code = sample_uniform(N, rng)
        p = ProbVec4(tuple(rng.dirichlet(np.ones(4))))
        ref = eta_exact(code, p).eta
        assert optimal_success_quantum(code, p, "bayes") == pytest.approx(ref, abs=1e-9)
        assert optimal_success_quantum(code, p, "coset") == pytest.approx(ref, abs=1e-9)
        assert one_way_protocol_success(code, p) == pytest.approx(ref, abs=1e-9)


def test_bell_code_success_examples():
    assert optimal_success_quantum(BELL_CODE, (1, 0, 0, 0)) == pytest.approx(1.0)
    assert optimal_success_quantum(BELL_CODE, ProbVec4.uniform()) == pytest.approx(0.25)


def test_size_limits():
    with pytest.raises(ValueError):
        verify_lemma1(sample_uniform(5, 0))
    with pytest.raises(ValueError):
        optimal_success_quantum(BELL_CODE, (1, 0, 0, 0), decoder="nope")
