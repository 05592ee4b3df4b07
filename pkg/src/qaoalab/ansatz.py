"""Alternating-layer MaxCut circuit construction and execution.

The depth-p circuit is H on every qubit, then p repetitions of a cost
layer and a mixer layer. Each edge (u, v) with weight w contributes
CNOT(u, v), RZ(2*w*gamma) on v, CNOT(u, v), the diagonal phase
exp(-i*w*gamma) on basis states where the edge is uncut and
exp(+i*w*gamma) where it is cut; global phase aside, gamma thus
parameterizes the cost-layer evolution. The mixer is RX(2*beta) on
every qubit. Gate count is n + p * (3*|E| + n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import MaxCutInstance
from .statevec import Counts, GateOp, StateVector, sample_counts, simulate_ops

ONE_QUBIT_DURATION = 1.0
TWO_QUBIT_DURATION = 4.0

RUN_MODES = ("exact", "sampled", "noisy")


@dataclass(frozen=True)
class QaoaParams:
    """Layer angles; betas drive the mixer, gammas the cost phase."""

    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        gammas = tuple(float(g) for g in self.gammas)
        if len(betas) != len(gammas):
            raise ValueError(
                f"{len(betas)} betas vs {len(gammas)} gammas; layer counts must match"
            )
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "gammas", gammas)

    @property
    def p(self) -> int:
        return len(self.betas)

    def to_vector(self) -> np.ndarray:
        """Flat parameter vector [betas..., gammas...]."""
        return np.array(self.betas + self.gammas, dtype=float)

    @classmethod
    def from_vector(cls, theta) -> "QaoaParams":
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or theta.size % 2 != 0:
            raise ValueError(f"parameter vector must be flat with even length, got shape {theta.shape}")
        p = theta.size // 2
        return cls(tuple(theta[:p]), tuple(theta[p:]))


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list on n qubits; hashable so schedules can be cached."""

    n: int
    ops: tuple[GateOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))


def gate_count(n: int, m: int, p: int) -> int:
    """Ops in a depth-p circuit on n qubits with m edges."""
    return n + p * (3 * m + n)


def build_qaoa_circuit(
    instance: MaxCutInstance,
    params: QaoaParams,
    *,
    one_qubit_duration: float = ONE_QUBIT_DURATION,
    two_qubit_duration: float = TWO_QUBIT_DURATION,
) -> Circuit:
    """Construct the depth-p circuit for ``instance`` at ``params``."""
    ops: list[GateOp] = []
    for q in range(instance.n):
        ops.append(GateOp("H", (q,), None, one_qubit_duration))
    for beta, gamma in zip(params.betas, params.gammas):
        for (u, v), w in zip(instance.edges, instance.weights):
            ops.append(GateOp("CNOT", (u, v), None, two_qubit_duration))
            ops.append(GateOp("RZ", (v,), 2.0 * w * gamma, one_qubit_duration))
            ops.append(GateOp("CNOT", (u, v), None, two_qubit_duration))
        for q in range(instance.n):
            ops.append(GateOp("RX", (q,), 2.0 * beta, one_qubit_duration))
    return Circuit(instance.n, tuple(ops))


def run_circuit(
    circuit: Circuit,
    mode: str,
    *,
    shots: int | None = None,
    seed: int | None = None,
    noise=None,
) -> StateVector | Counts:
    """Execute a circuit.

    exact   -> final StateVector, no randomness
    sampled -> Counts from the noiseless final state (shots, seed required)
    noisy   -> Counts from per-shot noise trajectories (noise config required)
    """
    if mode not in RUN_MODES:
        raise ValueError(f"mode must be one of {RUN_MODES}, got {mode!r}")
    if mode == "exact":
        return simulate_ops(circuit.n, circuit.ops)
    if shots is None or seed is None:
        raise ValueError(f"mode {mode!r} requires shots and seed")
    if mode == "sampled":
        state = simulate_ops(circuit.n, circuit.ops)
        return sample_counts(state, shots, seed)
    if noise is None:
        raise ValueError("mode 'noisy' requires a noise config")
    from . import noise as noise_mod  # circular at import time only

    return noise_mod.sample_noisy(circuit, noise, shots, seed)
