"""Energy objective over measured counts, plus evaluation traces.

Energy is the negative mean cut value, so minimizing energy maximizes
the cut: the canonical 5-node instance has optimum -6 and a uniform
superposition sits at -3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import rng
from .ansatz import QaoaParams, build_qaoa_circuit, run_circuit
from .graph import MaxCutInstance, cut_value_table
from .statevec import Counts, expectation_cut


class TraceRecord(NamedTuple):
    index: int
    theta: tuple[float, ...]
    energy: float


@dataclass
class OptimizationTrace:
    """Append-only log of objective evaluations, in order."""

    method: str = ""
    records: list[TraceRecord] = field(default_factory=list)
    status: str | None = None

    def append(self, theta, energy: float) -> None:
        theta = tuple(float(t) for t in np.asarray(theta, dtype=float))
        self.records.append(TraceRecord(len(self.records), theta, float(energy)))

    def energies(self) -> list[float]:
        return [r.energy for r in self.records]

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class EnergySample:
    """One objective evaluation; counts is None for exact evaluations."""

    energy: float
    shots: int
    counts: Counts | None = None


def energy_from_counts(counts: Counts, instance: MaxCutInstance) -> float:
    """-(sum of counts-weighted cut values) / shots."""
    if counts.shots < 1 or sum(counts.counts.values()) != counts.shots:
        raise ValueError("counts total does not match shots")
    table = cut_value_table(instance)
    total = 0.0
    for bits, c in counts.counts.items():
        if len(bits) != instance.n or set(bits) - {"0", "1"}:
            raise ValueError(f"bitstring {bits!r} does not fit a {instance.n}-node instance")
        if c < 0:
            raise ValueError(f"negative count for {bits!r}")
        total += c * table[int(bits, 2)]
    return -total / counts.shots


def evaluate_qaoa(
    instance: MaxCutInstance,
    params: QaoaParams,
    mode: str = "exact",
    *,
    shots: int | None = None,
    seed: int | None = None,
    noise=None,
    trace: OptimizationTrace | None = None,
) -> EnergySample:
    """Build, run, and score the circuit for ``params``.

    Exact mode returns the exact expectation (shots reported as 0);
    sampled and noisy modes estimate it from counts.
    """
    circuit = build_qaoa_circuit(instance, params)
    if mode == "exact":
        state = run_circuit(circuit, "exact")
        sample = EnergySample(-expectation_cut(state, instance), 0, None)
    else:
        counts = run_circuit(circuit, mode, shots=shots, seed=seed, noise=noise)
        sample = EnergySample(energy_from_counts(counts, instance), counts.shots, counts)
    if trace is not None:
        trace.append(params.to_vector(), sample.energy)
    return sample


def make_objective(
    instance: MaxCutInstance,
    p: int,
    mode: str = "exact",
    *,
    shots: int | None = None,
    seed: int | None = None,
    noise=None,
) -> Callable[[np.ndarray], float]:
    """Objective over flat theta = [betas..., gammas...] of length 2p.

    Stochastic modes give evaluation k its own derived seed, so the
    noise realization is a pure function of (seed, k) regardless of
    which optimizer asks, in what order.
    """
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    counter = [0]

    def objective(theta) -> float:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (2 * p,):
            raise ValueError(f"expected theta of shape ({2 * p},), got {theta.shape}")
        params = QaoaParams.from_vector(theta)
        k = counter[0]
        counter[0] += 1
        if mode == "exact":
            return evaluate_qaoa(instance, params, "exact").energy
        eval_seed = rng.child_seed(seed, rng.STREAM_EVAL, k)
        return evaluate_qaoa(
            instance, params, mode, shots=shots, seed=eval_seed, noise=noise
        ).energy

    return objective
