"""Parametric noise channels and mitigation passes.

Noise is simulated as per-shot pure-state trajectories: each shot draws
its own stochastic Pauli insertions, quasi-static dephasing rates, and
readout flips, all from substreams keyed by (seed, stream, shot), then
runs once through the dense simulator. Inserted error ops carry zero
duration so they never perturb timing.

Mitigation passes rewrite circuits:
  * twirl_circuit wraps every CNOT in a random Pauli pair and its
    conjugated partner, turning the coherent ZZ over-rotation into an
    incoherent average over shots.
  * schedule_circuit assigns start times (ASAP or ALAP greedy list
    scheduling) and reports per-qubit busy/idle intervals.
  * insert_dd fills idle windows with symmetric decoupling sequences
    whose net effect is the identity, echoing away quasi-static phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import rng
from .ansatz import ONE_QUBIT_DURATION, Circuit
from .statevec import Counts, GateOp, simulate_ops

PAULI_KINDS = ("X", "Y", "Z")

DD_SEQUENCES: dict[str, tuple[str, ...]] = {
    "XpXm": ("X", "X"),
    "XY4": ("X", "Y", "X", "Y"),
}


@dataclass(frozen=True)
class NoiseConfig:
    """Error rates and mitigation switches.

    p1q / p2q: probability of a uniform random Pauli (pair) after each
    one-/two-qubit gate. p_readout: independent per-bit flip probability.
    epsilon_coherent: ZZ over-rotation angle appended after every CNOT.
    sigma_dephase: std-dev of the per-shot, per-qubit quasi-static
    dephasing rate applied over idle time.
    """

    p1q: float = 0.0
    p2q: float = 0.0
    p_readout: float = 0.0
    epsilon_coherent: float = 0.0
    sigma_dephase: float = 0.0
    twirling: bool = False
    dd: bool = False
    dd_sequence: str = "XpXm"

    def __post_init__(self):
        for name in ("p1q", "p2q", "p_readout"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v!r}")
        if self.sigma_dephase < 0:
            raise ValueError(f"sigma_dephase must be >= 0, got {self.sigma_dephase!r}")
        if self.dd_sequence not in DD_SEQUENCES:
            raise ValueError(
                f"dd_sequence must be one of {sorted(DD_SEQUENCES)}, got {self.dd_sequence!r}"
            )


# ---------------------------------------------------------------------------
# Pauli twirling
# ---------------------------------------------------------------------------


def _build_twirl_table() -> dict[tuple[int, int], tuple[int, int]]:
    """For each Pauli pair P, the pair Q with CNOT (P kron P') CNOT = +/- Q.

    Computed numerically once; Pauli ids are 0..3 for I, X, Y, Z with the
    control qubit first in the kron product. Signs are dropped: the
    conjugated pair equals the original conjugation up to global phase.
    """
    paulis = (
        np.eye(2, dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    )
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    table: dict[tuple[int, int], tuple[int, int]] = {}
    for a in range(4):
        for b in range(4):
            m = cnot @ np.kron(paulis[a], paulis[b]) @ cnot
            for c in range(4):
                for d in range(4):
                    cand = np.kron(paulis[c], paulis[d])
                    if np.allclose(m, cand) or np.allclose(m, -cand):
                        table[(a, b)] = (c, d)
                        break
                else:
                    continue
                break
            else:
                raise AssertionError(f"no Pauli image for pair ({a}, {b})")
    return table


_TWIRL_TABLE = _build_twirl_table()
_PAULI_BY_ID = {1: "X", 2: "Y", 3: "Z"}


def twirl_circuit(circuit: Circuit, seed: int) -> Circuit:
    """Wrap every CNOT in a random Pauli pair and its conjugation image.

    The sandwich leaves each CNOT's ideal action unchanged (up to global
    phase) while randomizing the sign of coherent errors attached to it.
    A circuit with no CNOTs is returned unchanged. Deterministic in
    (circuit, seed).
    """
    n_cnots = sum(1 for op in circuit.ops if op.kind == "CNOT")
    if n_cnots == 0:
        return circuit
    draws = rng.generator(seed, rng.STREAM_TWIRL).integers(0, 16, size=n_cnots)
    ops: list[GateOp] = []
    i = 0
    for op in circuit.ops:
        if op.kind != "CNOT":
            ops.append(op)
            continue
        a, b = int(draws[i]) >> 2, int(draws[i]) & 3
        c, d = _TWIRL_TABLE[(a, b)]
        i += 1
        control, target = op.qubits
        if a:
            ops.append(GateOp(_PAULI_BY_ID[a], (control,), None, ONE_QUBIT_DURATION))
        if b:
            ops.append(GateOp(_PAULI_BY_ID[b], (target,), None, ONE_QUBIT_DURATION))
        ops.append(op)
        if c:
            ops.append(GateOp(_PAULI_BY_ID[c], (control,), None, ONE_QUBIT_DURATION))
        if d:
            ops.append(GateOp(_PAULI_BY_ID[d], (target,), None, ONE_QUBIT_DURATION))
    return Circuit(circuit.n, tuple(ops))


# ---------------------------------------------------------------------------
# scheduling
# ---------------------------------------------------------------------------


class Interval(NamedTuple):
    """Half-open [start, end) slice of one qubit's timeline.

    op_index points into the circuit's ops for busy intervals and is
    None for idle ones.
    """

    start: float
    end: float
    op_index: int | None


@dataclass(frozen=True)
class Timeline:
    """Start times per op plus per-qubit interval decompositions."""

    makespan: float
    starts: tuple[float, ...]
    qubits: tuple[tuple[Interval, ...], ...]

    def idle_intervals(self, q: int) -> tuple[Interval, ...]:
        return tuple(iv for iv in self.qubits[q] if iv.op_index is None)


SCHEDULE_POLICIES = ("asap", "alap")


def _asap_starts(circuit: Circuit) -> list[float]:
    ready = [0.0] * circuit.n
    starts = []
    for op in circuit.ops:
        s = max(ready[q] for q in op.qubits)
        starts.append(s)
        for q in op.qubits:
            ready[q] = s + op.duration
    return starts


@lru_cache(maxsize=256)
def _schedule_cached(circuit: Circuit, policy: str) -> Timeline:
    for op in circuit.ops:
        if op.duration is None or op.duration < 0:
            raise ValueError(f"op {op!r} lacks a usable duration")
    if policy == "asap":
        starts = _asap_starts(circuit)
        makespan = max(
            (s + op.duration for s, op in zip(starts, circuit.ops)), default=0.0
        )
    else:
        # ALAP: schedule the reversed circuit ASAP, then mirror in time.
        rev = Circuit(circuit.n, tuple(reversed(circuit.ops)))
        rev_starts = _asap_starts(rev)
        makespan = max(
            (s + op.duration for s, op in zip(rev_starts, rev.ops)), default=0.0
        )
        starts = [
            makespan - (rs + op.duration)
            for rs, op in zip(reversed(rev_starts), circuit.ops)
        ]
    per_qubit: list[tuple[Interval, ...]] = []
    for q in range(circuit.n):
        busy = sorted(
            (s, i)
            for i, (s, op) in enumerate(zip(starts, circuit.ops))
            if q in op.qubits
        )
        intervals: list[Interval] = []
        t = 0.0
        for s, i in busy:
            if s > t:
                intervals.append(Interval(t, s, None))
            end = s + circuit.ops[i].duration
            if end > s:
                intervals.append(Interval(s, end, i))
            t = max(t, end)
        if makespan > t:
            intervals.append(Interval(t, makespan, None))
        per_qubit.append(tuple(intervals))
    return Timeline(makespan, tuple(starts), tuple(per_qubit))


def schedule_circuit(circuit: Circuit, policy: str = "asap") -> Timeline:
    """Greedy list schedule of a circuit under the given policy.

    ASAP starts every op at the max ready-time of its qubits; ALAP is
    the time-mirror of ASAP on the reversed circuit, so both share one
    makespan. Per-qubit intervals tile [0, makespan] exactly.
    """
    if policy not in SCHEDULE_POLICIES:
        raise ValueError(f"policy must be one of {SCHEDULE_POLICIES}, got {policy!r}")
    return _schedule_cached(circuit, policy)


# ---------------------------------------------------------------------------
# dynamical decoupling
# ---------------------------------------------------------------------------


def insert_dd(circuit: Circuit, timeline: Timeline, sequence: str = "XpXm") -> Circuit:
    """Fill idle windows with a symmetric decoupling sequence.

    Pulses are centered with spacing fractions 1/(2k), 1/k, ..., 1/(2k)
    of the window's free time, realized as explicit DELAY ops so the
    placement survives rescheduling. A window shorter than the pulses
    themselves is left untouched. Each sequence composes to the identity
    (XY4 up to global phase), so the ideal circuit action is preserved,
    while a constant dephasing rate accumulated across the window is
    echoed to zero.
    """
    if sequence not in DD_SEQUENCES:
        raise ValueError(f"sequence must be one of {sorted(DD_SEQUENCES)}, got {sequence!r}")
    if len(timeline.starts) != len(circuit.ops):
        raise ValueError("timeline does not match circuit")
    pulses = DD_SEQUENCES[sequence]
    k = len(pulses)
    pulse_dur = ONE_QUBIT_DURATION
    # (start, tiebreak, op); original ops keep their indices as tiebreak
    entries: list[tuple[float, int, GateOp]] = [
        (s, i, op) for i, (s, op) in enumerate(zip(timeline.starts, circuit.ops))
    ]
    counter = len(entries)
    for q in range(circuit.n):
        for iv in timeline.qubits[q]:
            if iv.op_index is not None:
                continue
            free = (iv.end - iv.start) - k * pulse_dur
            if free < 0:
                continue
            head = free / (2 * k)
            mid = free / k
            t = iv.start
            for j, kind in enumerate(pulses):
                gap = head if j == 0 else mid
                if gap > 0:
                    entries.append((t, counter, GateOp("DELAY", (q,), None, gap)))
                    counter += 1
                t += gap
                entries.append((t, counter, GateOp(kind, (q,), None, pulse_dur)))
                counter += 1
                t += pulse_dur
            if head > 0:
                entries.append((t, counter, GateOp("DELAY", (q,), None, head)))
                counter += 1
    entries.sort(key=lambda e: (e[0], e[1]))
    return Circuit(circuit.n, tuple(op for _, _, op in entries))


# ---------------------------------------------------------------------------
# trajectory noise
# ---------------------------------------------------------------------------

# the 15 non-identity Pauli pairs are indexed 1..15 as (idx >> 2, idx & 3)


def apply_trajectory_noise(
    circuit: Circuit, config: NoiseConfig, shot_index: int, seed: int
) -> Circuit:
    """One shot's stochastic error realization as an expanded circuit.

    Draw order is fixed: per-qubit dephasing rates first, then one draw
    per gate in op order, so the result is a pure function of
    (circuit, config, shot_index, seed). Inserted ops carry duration 0.
    DELAY ops receive dephasing (they are idle time) but no gate noise.
    """
    stochastic = config.p1q > 0 or config.p2q > 0
    dephasing = config.sigma_dephase > 0
    coherent = config.epsilon_coherent != 0.0
    if not (stochastic or dephasing or coherent):
        return circuit
    gen = rng.generator(seed, rng.STREAM_TRAJECTORY, shot_index)
    deltas = gen.normal(0.0, config.sigma_dephase, size=circuit.n) if dephasing else None

    # Map each op to the idle time immediately preceding it on its qubits,
    # plus any trailing idle, from the ASAP schedule.
    idle_before: dict[int, list[tuple[int, float]]] = {}
    trailing: list[tuple[int, float]] = []
    if dephasing:
        timeline = schedule_circuit(circuit, "asap")
        for q in range(circuit.n):
            intervals = timeline.qubits[q]
            for j, iv in enumerate(intervals):
                if iv.op_index is not None:
                    continue
                if j + 1 < len(intervals):
                    nxt = intervals[j + 1].op_index
                    idle_before.setdefault(nxt, []).append((q, iv.end - iv.start))
                else:
                    trailing.append((q, iv.end - iv.start))

    eps = config.epsilon_coherent
    ops: list[GateOp] = []
    for idx, op in enumerate(circuit.ops):
        for q, dur in idle_before.get(idx, ()):
            ops.append(GateOp("RZ", (q,), 2.0 * deltas[q] * dur, 0.0))
        ops.append(op)
        if op.kind == "DELAY":
            if dephasing and op.duration > 0:
                q = op.qubits[0]
                ops.append(GateOp("RZ", (q,), 2.0 * deltas[q] * op.duration, 0.0))
            continue
        if op.kind == "CNOT":
            if coherent:
                u, v = op.qubits
                ops.append(GateOp("CNOT", (u, v), None, 0.0))
                ops.append(GateOp("RZ", (v,), 2.0 * eps, 0.0))
                ops.append(GateOp("CNOT", (u, v), None, 0.0))
            if config.p2q > 0 and gen.random() < config.p2q:
                pick = int(gen.integers(1, 16))
                a, b = pick >> 2, pick & 3
                u, v = op.qubits
                if a:
                    ops.append(GateOp(_PAULI_BY_ID[a], (u,), None, 0.0))
                if b:
                    ops.append(GateOp(_PAULI_BY_ID[b], (v,), None, 0.0))
        else:
            if config.p1q > 0 and gen.random() < config.p1q:
                pick = int(gen.integers(0, 3))
                ops.append(GateOp(PAULI_KINDS[pick], op.qubits, None, 0.0))
    for q, dur in trailing:
        ops.append(GateOp("RZ", (q,), 2.0 * deltas[q] * dur, 0.0))
    return Circuit(circuit.n, tuple(ops))


def apply_readout_error(bits: str, p_readout: float, shot_index: int, seed: int) -> str:
    """Flip each measured bit independently with probability p_readout."""
    if not (0.0 <= p_readout <= 1.0):
        raise ValueError(f"p_readout must be in [0, 1], got {p_readout!r}")
    if p_readout == 0.0:
        return bits
    flips = rng.generator(seed, rng.STREAM_READOUT, shot_index).random(len(bits))
    return "".join(
        ("1" if b == "0" else "0") if f < p_readout else b
        for b, f in zip(bits, flips)
    )


# ---------------------------------------------------------------------------
# per-shot pipeline
# ---------------------------------------------------------------------------


def sample_noisy(circuit: Circuit, config: NoiseConfig, shots: int, seed: int) -> Counts:
    """Monte Carlo counts under the full noise-and-mitigation pipeline.

    Per shot: (optional DD insertion, done once), optional fresh twirl,
    trajectory noise realization, statevector run, one measurement draw,
    optional readout flips. Shot i uses only draw i of each substream.
    """
    if not isinstance(shots, int) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots!r}")
    base = circuit
    if config.dd:
        base = insert_dd(base, schedule_circuit(base, "asap"), config.dd_sequence)
    u = rng.generator(seed, rng.STREAM_SAMPLE).random(shots)
    width = circuit.n
    tally: dict[str, int] = {}
    for i in range(shots):
        shot_circuit = base
        if config.twirling:
            shot_circuit = twirl_circuit(
                shot_circuit, rng.child_seed(seed, rng.STREAM_TWIRL, i)
            )
        shot_circuit = apply_trajectory_noise(shot_circuit, config, i, seed)
        state = simulate_ops(shot_circuit.n, shot_circuit.ops)
        probs = np.abs(state.amplitudes) ** 2
        cum = np.cumsum(probs)
        outcome = int(np.searchsorted(cum, u[i] * cum[-1], side="right"))
        outcome = min(outcome, probs.size - 1)
        bits = format(outcome, f"0{width}b")
        if config.p_readout > 0:
            bits = apply_readout_error(bits, config.p_readout, i, seed)
        tally[bits] = tally.get(bits, 0) + 1
    return Counts(dict(sorted(tally.items())), shots)
