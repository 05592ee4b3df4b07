"""Circuit construction and execution for the layered ansatz."""

import math

import numpy as np
import pytest

from qaoalab.ansatz import (
    ONE_QUBIT_DURATION,
    TWO_QUBIT_DURATION,
    Circuit,
    QaoaParams,
    build_qaoa_circuit,
    gate_count,
    run_circuit,
)
from qaoalab.graph import MaxCutInstance
from qaoalab.objective import evaluate_qaoa
from qaoalab.statevec import Counts, StateVector


def exact_probs(instance, params) -> np.ndarray:
    circuit = build_qaoa_circuit(instance, params)
    state = run_circuit(circuit, "exact")
    return np.abs(state.amplitudes) ** 2


# -- parameter container ---------------------------------------------------


def test_params_round_trip():
    params = QaoaParams((0.1, 0.2), (1.5, 2.5))
    assert params.p == 2
    np.testing.assert_array_equal(params.to_vector(), [0.1, 0.2, 1.5, 2.5])
    assert QaoaParams.from_vector(params.to_vector()) == params


def test_params_vector_packs_betas_first():
    theta = QaoaParams((0.5,), (4.0,)).to_vector()
    assert theta[0] == 0.5 and theta[1] == 4.0


def test_params_length_mismatch():
    with pytest.raises(ValueError):
        QaoaParams((0.1,), (0.2, 0.3))
    with pytest.raises(ValueError):
        QaoaParams.from_vector([1.0, 2.0, 3.0])


# -- structure ---------------------------------------------------------------


def test_gate_count_examples(canonical):
    for p in (0, 1, 5):
        params = QaoaParams((0.3,) * p, (0.7,) * p)
        circuit = build_qaoa_circuit(canonical, params)
        assert len(circuit.ops) == gate_count(5, 6, p)
    assert gate_count(5, 6, 0) == 5
    assert gate_count(5, 6, 1) == 28
    assert gate_count(5, 6, 5) == 120


def test_gate_count_law_random_shapes():
    gen = np.random.default_rng(0)
    for _ in range(10):
        n = int(gen.integers(2, 7))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        m = int(gen.integers(1, len(pairs) + 1))
        p = int(gen.integers(0, 4))
        instance = MaxCutInstance(n=n, edges=tuple(pairs[:m]))
        circuit = build_qaoa_circuit(instance, QaoaParams((0.1,) * p, (0.2,) * p))
        assert len(circuit.ops) == n + p * (3 * m + n)


def test_layer_structure(canonical):
    params = QaoaParams((0.3,), (0.7,))
    ops = build_qaoa_circuit(canonical, params).ops
    assert [op.kind for op in ops[:5]] == ["H"] * 5
    # each edge contributes CNOT, RZ, CNOT; the mixer closes the layer
    for e in range(6):
        block = ops[5 + 3 * e : 8 + 3 * e]
        assert [op.kind for op in block] == ["CNOT", "RZ", "CNOT"]
        assert block[1].angle == pytest.approx(2 * 0.7)
        assert block[0].qubits == block[2].qubits
        assert block[1].qubits == (block[0].qubits[1],)
    mixer = ops[23:28]
    assert all(op.kind == "RX" and op.angle == pytest.approx(2 * 0.3) for op in mixer)


def test_durations(canonical):
    ops = build_qaoa_circuit(canonical, QaoaParams((0.3,), (0.7,))).ops
    for op in ops:
        expected = TWO_QUBIT_DURATION if op.kind == "CNOT" else ONE_QUBIT_DURATION
        assert op.duration == expected


def test_weighted_edge_scales_phase():
    instance = MaxCutInstance(n=2, edges=((0, 1),), weights=(2.0,))
    ops = build_qaoa_circuit(instance, QaoaParams((0.0,), (0.5,))).ops
    rz = [op for op in ops if op.kind == "RZ"]
    assert rz[0].angle == pytest.approx(2.0 * 2.0 * 0.5)


def test_circuit_is_hashable(canonical):
    circuit = build_qaoa_circuit(canonical, QaoaParams((0.3,), (0.7,)))
    assert hash(circuit) == hash(Circuit(circuit.n, circuit.ops))


# -- semantics -----------------------------------------------------------------


def test_gamma_zero_energy_is_uniform(canonical):
    # no cost phase: the mixer acts on the uniform state, energy stays -3
    for beta in (0.0, 0.4, 1.1):
        e = evaluate_qaoa(canonical, QaoaParams((beta,), (0.0,))).energy
        assert e == pytest.approx(-3.0, abs=1e-9)


def test_beta_shift_by_pi_preserves_probabilities(canonical):
    base = QaoaParams((0.37,), (1.9,))
    shifted = QaoaParams((0.37 + math.pi,), (1.9,))
    np.testing.assert_allclose(
        exact_probs(canonical, base), exact_probs(canonical, shifted), atol=1e-9
    )


def test_p0_is_uniform(canonical):
    probs = exact_probs(canonical, QaoaParams((), ()))
    np.testing.assert_allclose(probs, np.full(32, 1 / 32), atol=1e-12)


# -- execution modes -------------------------------------------------------------


def test_run_modes_return_types(canonical):
    circuit = build_qaoa_circuit(canonical, QaoaParams((0.3,), (0.7,)))
    assert isinstance(run_circuit(circuit, "exact"), StateVector)
    sampled = run_circuit(circuit, "sampled", shots=64, seed=0)
    assert isinstance(sampled, Counts)
    assert sum(sampled.counts.values()) == 64


def test_run_mode_validation(canonical):
    circuit = build_qaoa_circuit(canonical, QaoaParams((0.3,), (0.7,)))
    with pytest.raises(ValueError):
        run_circuit(circuit, "approximate")
    with pytest.raises(ValueError):
        run_circuit(circuit, "sampled")
    with pytest.raises(ValueError):
        run_circuit(circuit, "noisy", shots=10, seed=0)


def test_sampled_matches_exact_distribution(canonical):
    params = QaoaParams((0.9,), (1.2,))
    probs = exact_probs(canonical, params)
    circuit = build_qaoa_circuit(canonical, params)
    shots = 100000
    counts = run_circuit(circuit, "sampled", shots=shots, seed=21)
    for i, p in enumerate(probs):
        observed = counts.counts.get(format(i, "05b"), 0)
        sigma = math.sqrt(shots * p * (1 - p))
        assert abs(observed - shots * p) <= 4 * sigma + 1e-9
