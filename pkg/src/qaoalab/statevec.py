"""Dense statevector simulation for few-qubit circuits.

Basis convention: qubit 0 occupies the most significant bit of the basis
index, so the leftmost character of a measured bitstring is qubit 0 and
therefore node 0 of the graph module. Qubit q's bit of index ``i`` is
``(i >> (n - 1 - q)) & 1``.

Gates are value objects (GateOp); the engine is a plain loop over ops
with cached index tables per (n, qubit) so repeated trajectory runs pay
no setup cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import rng
from .graph import MaxCutInstance, cut_value_table

MAX_QUBITS = 24

GATE_KINDS = ("H", "X", "Y", "Z", "RX", "RZ", "CNOT", "DELAY")
ROTATION_KINDS = ("RX", "RZ")
TWO_QUBIT_KINDS = ("CNOT",)

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


class GateOp(NamedTuple):
    """One circuit operation.

    DELAY is an explicit idle placeholder (identity with a duration); it
    lets decoupling pulses keep their timing if a circuit is rescheduled.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    duration: float = 1.0


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray


@dataclass
class Counts:
    """Measured bitstring histogram; keys are n-character bitstrings."""

    counts: dict[str, int]
    shots: int

    def probabilities(self) -> dict[str, float]:
        return {b: c / self.shots for b, c in self.counts.items()}


def zero_state(n: int) -> StateVector:
    """|0...0> on n qubits."""
    if not isinstance(n, int) or not (1 <= n <= MAX_QUBITS):
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n!r}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


# ---------------------------------------------------------------------------
# cached index tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=512)
def _bit_values(n: int, q: int) -> np.ndarray:
    if not (0 <= q < n):
        raise ValueError(f"qubit {q} out of range for n={n}")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx >> (n - 1 - q)) & 1
    bits.flags.writeable = False
    return bits


@lru_cache(maxsize=512)
def _x_perm(n: int, q: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    perm = idx ^ (1 << (n - 1 - q))
    perm.flags.writeable = False
    return perm


@lru_cache(maxsize=512)
def _cnot_perm(n: int, control: int, target: int) -> np.ndarray:
    if control == target:
        raise ValueError("CNOT control and target must differ")
    cbit = _bit_values(n, control)
    idx = np.arange(1 << n, dtype=np.int64)
    perm = np.where(cbit == 1, idx ^ (1 << (n - 1 - target)), idx)
    perm.flags.writeable = False
    return perm


@lru_cache(maxsize=512)
def _y_phase(n: int, q: int) -> np.ndarray:
    # After the bit-flip permutation, indices with the bit set received
    # an amplitude from |0>: factor +i; the others from |1>: factor -i.
    phase = np.where(_bit_values(n, q) == 1, 1j, -1j)
    phase.flags.writeable = False
    return phase


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _apply_dense_1q(amps: np.ndarray, n: int, q: int, mat: np.ndarray) -> np.ndarray:
    left = 1 << q
    right = 1 << (n - 1 - q)
    return np.einsum("ab,ibj->iaj", mat, amps.reshape(left, 2, right)).reshape(-1)


def _apply(amps: np.ndarray, n: int, op: GateOp) -> np.ndarray:
    """Apply one op to an exclusively owned buffer; may mutate or replace it."""
    kind = op.kind
    if kind == "RZ":
        q = op.qubits[0]
        w = np.exp(0.5j * op.angle)
        return amps * np.where(_bit_values(n, q) == 1, w, w.conjugate())
    if kind == "CNOT":
        c, t = op.qubits
        return amps[_cnot_perm(n, c, t)]
    if kind == "H":
        return _apply_dense_1q(amps, n, op.qubits[0], _H)
    if kind == "RX":
        half = 0.5 * op.angle
        mat = np.array(
            [[np.cos(half), -1j * np.sin(half)], [-1j * np.sin(half), np.cos(half)]]
        )
        return _apply_dense_1q(amps, n, op.qubits[0], mat)
    if kind == "X":
        return amps[_x_perm(n, op.qubits[0])]
    if kind == "Y":
        return amps[_x_perm(n, op.qubits[0])] * _y_phase(n, op.qubits[0])
    if kind == "Z":
        sign = np.where(_bit_values(n, op.qubits[0]) == 1, -1.0, 1.0)
        return amps * sign
    if kind == "DELAY":
        return amps
    raise ValueError(f"unknown gate kind {kind!r}")


def _validate_gate(n: int, op: GateOp) -> None:
    if op.kind not in GATE_KINDS:
        raise ValueError(f"unknown gate kind {op.kind!r}")
    arity = 2 if op.kind in TWO_QUBIT_KINDS else 1
    if len(op.qubits) != arity:
        raise ValueError(f"{op.kind} takes {arity} qubit(s), got {op.qubits!r}")
    for q in op.qubits:
        if not (0 <= q < n):
            raise ValueError(f"qubit {q} out of range for n={n}")
    if len(set(op.qubits)) != len(op.qubits):
        raise ValueError(f"{op.kind} qubits must be distinct, got {op.qubits!r}")
    if op.kind in ROTATION_KINDS:
        if op.angle is None:
            raise ValueError(f"{op.kind} requires an angle")
    elif op.kind != "DELAY" and op.angle is not None:
        raise ValueError(f"{op.kind} takes no angle")
    if op.duration is None or op.duration < 0:
        raise ValueError(f"duration must be a non-negative number, got {op.duration!r}")


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    """Validated single-gate application; returns a new StateVector."""
    _validate_gate(state.n, op)
    return StateVector(state.n, _apply(state.amplitudes.copy(), state.n, op))


def simulate_ops(n: int, ops) -> StateVector:
    """Run a gate sequence on |0...0>; validates every op."""
    state = zero_state(n)
    amps = state.amplitudes
    for op in ops:
        _validate_gate(n, op)
        amps = _apply(amps, n, op)
    state.amplitudes = amps
    return state


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------


def expectation_cut(state: StateVector, instance: MaxCutInstance) -> float:
    """<state| C |state> for the diagonal cut observable of ``instance``."""
    if instance.n != state.n:
        raise ValueError(f"instance has {instance.n} nodes but state has {state.n} qubits")
    probs = np.abs(state.amplitudes) ** 2
    return float(probs @ cut_value_table(instance))


def sample_counts(state: StateVector, shots: int, seed: int) -> Counts:
    """Multinomial measurement of the state in the computational basis.

    Shot i consumes draw i of the (seed, sample) substream, so any
    prefix of the shots is reproducible independently.
    """
    if not isinstance(shots, int) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    probs = np.abs(state.amplitudes) ** 2
    total = probs.sum()
    if not np.isfinite(total) or total <= 0:
        raise ValueError("state has no probability mass")
    cum = np.cumsum(probs / total)
    u = rng.generator(seed, rng.STREAM_SAMPLE).random(shots)
    outcomes = np.searchsorted(cum, u, side="right")
    np.clip(outcomes, 0, probs.size - 1, out=outcomes)
    width = state.n
    raw = np.bincount(outcomes, minlength=probs.size)
    counts = {format(i, f"0{width}b"): int(c) for i, c in enumerate(raw) if c > 0}
    return Counts(counts, shots)
