"""Exact statevector engine.

States are sparse maps from basis index to complex amplitude.  Qubit 0 is
the most significant bit of the basis index.  Three interchangeable gate
appliers back ``apply_circuit``:

* dense numpy vector, used automatically below ``DENSE_AMPLITUDE_LIMIT``
  total amplitudes;
* vectorised sparse index/amplitude arrays (up to 62 qubits, the safe
  int64 range);
* a plain-dict applier for wider circuits.

All appliers are single-threaded and deterministic; they agree with each
other to well below the acceptance tolerances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate
from .errors import CircuitError, LayoutError

PRUNE_TOL = 1e-14          # amplitudes below this magnitude are dropped
NORM_DRIFT_TOL = 1e-12     # renormalise only past this drift
DENSE_AMPLITUDE_LIMIT = 1 << 20
ARRAY_QUBIT_LIMIT = 62     # int64 basis indices

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class QuantumState:
    """Immutable sparse statevector with an optional register layout."""

    num_qubits: int
    amplitudes: dict[int, complex]
    registers: dict[str, tuple[int, int]] | None = None

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.amplitudes.values())

    def probability(self, index: int) -> float:
        return abs(self.amplitudes.get(index, 0.0)) ** 2

    def _register(self, name: str) -> tuple[int, int]:
        if self.registers is None or name not in self.registers:
            raise LayoutError(f"state has no register {name!r}")
        return self.registers[name]


@dataclass(frozen=True)
class MeasurementDistribution:
    """Exact outcome probabilities for one register."""

    register: str
    entries: dict[int, float]

    def top_outcome(self) -> int:
        return max(self.entries, key=lambda v: (self.entries[v], -v))


def basis_state(num_qubits: int, value: int,
                registers: dict[str, tuple[int, int]] | None = None) -> QuantumState:
    """|value> on ``num_qubits`` qubits."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    if not 0 <= value < (1 << num_qubits):
        raise ValueError(f"value {value} out of range for {num_qubits} qubits")
    regs = registers if registers is not None else {"q": (0, num_qubits)}
    return QuantumState(num_qubits, {value: 1.0 + 0.0j}, regs)


def uniform_state(num_qubits: int,
                  registers: dict[str, tuple[int, int]] | None = None) -> QuantumState:
    """Equal superposition of every basis state."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    amp = complex(2.0 ** (-num_qubits / 2.0))
    regs = registers if registers is not None else {"q": (0, num_qubits)}
    return QuantumState(num_qubits, {i: amp for i in range(1 << num_qubits)}, regs)


def zero_state_for(circuit: Circuit) -> QuantumState:
    return basis_state(circuit.num_qubits, 0, dict(circuit.registers))


def engine_for(num_qubits: int, engine: str = "auto") -> str:
    """Resolve the applier used for a given width ("dense" or "sparse")."""
    if engine == "auto":
        return "dense" if (1 << num_qubits) < DENSE_AMPLITUDE_LIMIT else "sparse"
    if engine in ("dense", "sparse"):
        return engine
    raise ValueError(f"unknown engine {engine!r}")


# ---------------------------------------------------------------------------
# gate appliers

def _check_gate(gate: Gate, num_qubits: int) -> None:
    for q in gate.qubits():
        if not 0 <= q < num_qubits:
            raise CircuitError(f"gate qubit {q} outside state of width {num_qubits}")


def _apply_dense(amps: Mapping[int, complex], gates: list[Gate], n: int) -> dict[int, complex]:
    dim = 1 << n
    vec = np.zeros(dim, dtype=np.complex128)
    for idx, amp in amps.items():
        vec[idx] = amp
    all_idx = np.arange(dim, dtype=np.int64)
    for gate in gates:
        pos = n - 1 - gate.target
        mask = 1 << pos
        if gate.kind == "H":
            shaped = vec.reshape(-1, 2, 1 << pos)
            lo = shaped[:, 0, :].copy()
            hi = shaped[:, 1, :].copy()
            shaped[:, 0, :] = (lo + hi) * _INV_SQRT2
            shaped[:, 1, :] = (lo - hi) * _INV_SQRT2
        elif gate.kind == "Z":
            shaped = vec.reshape(-1, 2, 1 << pos)
            shaped[:, 1, :] *= -1.0
        else:  # X / MCX
            if gate.controls:
                sel = np.ones(dim, dtype=bool)
                for q, pol in gate.controls:
                    bit = (all_idx >> (n - 1 - q)) & 1
                    sel &= (bit == 1) if pol else (bit == 0)
                vec = np.where(sel, vec[all_idx ^ mask], vec)
            else:
                vec = vec[all_idx ^ mask]
    vec = _renormalise_vec(vec)
    nz = np.nonzero(np.abs(vec) >= PRUNE_TOL)[0]
    return {int(i): complex(vec[i]) for i in nz}


def _apply_array(amps: Mapping[int, complex], gates: list[Gate], n: int) -> dict[int, complex]:
    idxs = np.fromiter(amps.keys(), dtype=np.int64, count=len(amps))
    vals = np.fromiter(amps.values(), dtype=np.complex128, count=len(amps))
    for gate in gates:
        mask = np.int64(1 << (n - 1 - gate.target))
        if gate.kind == "H":
            bit_set = (idxs & mask) != 0
            lo = idxs & ~mask
            hi = idxs | mask
            new_idx = np.concatenate([lo, hi])
            new_val = np.concatenate([vals, np.where(bit_set, -vals, vals)]) * _INV_SQRT2
            uniq, inv = np.unique(new_idx, return_inverse=True)
            acc = np.zeros(len(uniq), dtype=np.complex128)
            np.add.at(acc, inv, new_val)
            keep = np.abs(acc) >= PRUNE_TOL
            idxs, vals = uniq[keep], acc[keep]
        elif gate.kind == "Z":
            vals = np.where((idxs & mask) != 0, -vals, vals)
        else:  # X / MCX
            if gate.controls:
                sel = np.ones(len(idxs), dtype=bool)
                for q, pol in gate.controls:
                    bit = (idxs >> np.int64(n - 1 - q)) & 1
                    sel &= (bit == 1) if pol else (bit == 0)
                idxs = np.where(sel, idxs ^ mask, idxs)
            else:
                idxs = idxs ^ mask
    order = np.argsort(idxs, kind="stable")
    idxs, vals = idxs[order], vals[order]
    vals = _renormalise_vec(vals)
    return {int(i): complex(v) for i, v in zip(idxs, vals)}


def _apply_bigint(amps: Mapping[int, complex], gates: list[Gate], n: int) -> dict[int, complex]:
    state = dict(amps)
    for gate in gates:
        mask = 1 << (n - 1 - gate.target)
        if gate.kind == "H":
            nxt: dict[int, complex] = {}
            for idx, amp in state.items():
                lo, hi = idx & ~mask, idx | mask
                half = amp * _INV_SQRT2
                nxt[lo] = nxt.get(lo, 0.0) + half
                nxt[hi] = nxt.get(hi, 0.0) + (-half if idx & mask else half)
            state = {i: a for i, a in nxt.items() if abs(a) >= PRUNE_TOL}
        elif gate.kind == "Z":
            state = {i: (-a if i & mask else a) for i, a in state.items()}
        else:
            def fires(idx: int) -> bool:
                for q, pol in gate.controls:
                    if bool((idx >> (n - 1 - q)) & 1) != pol:
                        return False
                return True
            state = {(i ^ mask if fires(i) else i): a for i, a in state.items()}
    total = math.sqrt(sum(abs(a) ** 2 for a in state.values()))
    if abs(total - 1.0) > NORM_DRIFT_TOL and total > 0.0:
        state = {i: a / total for i, a in state.items()}
    return dict(sorted(state.items()))


def _renormalise_vec(vec: np.ndarray) -> np.ndarray:
    total = float(np.sqrt(np.sum(np.abs(vec) ** 2)))
    if abs(total - 1.0) > NORM_DRIFT_TOL and total > 0.0:
        vec = vec / total
    return vec


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Apply one gate; see ``apply_circuit`` for batches."""
    _check_gate(gate, state.num_qubits)
    return _apply(state, [gate], state.registers, "auto")


def apply_circuit(state: QuantumState, circuit: Circuit, engine: str = "auto") -> QuantumState:
    """Apply a circuit's gates in order, returning a new state."""
    if circuit.num_qubits != state.num_qubits:
        raise CircuitError(
            f"circuit width {circuit.num_qubits} != state width {state.num_qubits}")
    registers = dict(circuit.registers) if circuit.registers else state.registers
    return _apply(state, circuit.gates, registers, engine)


def _apply(state: QuantumState, gates: list[Gate],
           registers: dict[str, tuple[int, int]] | None, engine: str) -> QuantumState:
    n = state.num_qubits
    for gate in gates:
        _check_gate(gate, n)
    mode = engine_for(n, engine)
    if mode == "dense":
        if (1 << n) > DENSE_AMPLITUDE_LIMIT:
            raise ValueError(f"dense engine limited to {DENSE_AMPLITUDE_LIMIT} amplitudes")
        amps = _apply_dense(state.amplitudes, gates, n)
    elif n <= ARRAY_QUBIT_LIMIT:
        amps = _apply_array(state.amplitudes, gates, n)
    else:
        amps = _apply_bigint(state.amplitudes, gates, n)
    return QuantumState(n, amps, registers)


# ---------------------------------------------------------------------------
# readout

def marginal_distribution(state: QuantumState, register: str) -> MeasurementDistribution:
    """Exact probabilities of each value of one register (zero entries omitted)."""
    start, width = state._register(register)
    shift = state.num_qubits - start - width
    mask = (1 << width) - 1
    probs: dict[int, float] = {}
    for idx, amp in state.amplitudes.items():
        value = (idx >> shift) & mask
        probs[value] = probs.get(value, 0.0) + abs(amp) ** 2
    return MeasurementDistribution(register, dict(sorted(probs.items())))


def sample(state: QuantumState, register: str, seed: int, shots: int) -> dict[int, int]:
    """Seeded multinomial draw from a register's exact marginal."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    dist = marginal_distribution(state, register)
    outcomes = sorted(dist.entries)
    probs = np.array([dist.entries[v] for v in outcomes], dtype=float)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return {v: int(c) for v, c in zip(outcomes, counts) if c > 0}


def fidelity(s1: QuantumState, s2: QuantumState) -> float:
    """|<s1|s2>|^2."""
    if s1.num_qubits != s2.num_qubits:
        raise ValueError("states must have the same qubit count")
    small, large = (s1, s2) if len(s1.amplitudes) <= len(s2.amplitudes) else (s2, s1)
    overlap = 0.0 + 0.0j
    for idx, amp in small.amplitudes.items():
        other = large.amplitudes.get(idx)
        if other is not None:
            overlap += amp.conjugate() * other if small is s1 else other.conjugate() * amp
    return abs(overlap) ** 2


def reflect_about(state: QuantumState, axis: QuantumState) -> QuantumState:
    """(2|axis><axis| - I) |state>, computed directly on the sparse maps."""
    if state.num_qubits != axis.num_qubits:
        raise ValueError("states must have the same qubit count")
    overlap = 0.0 + 0.0j
    for idx, amp in state.amplitudes.items():
        ax = axis.amplitudes.get(idx)
        if ax is not None:
            overlap += ax.conjugate() * amp
    out: dict[int, complex] = {}
    for idx, ax in axis.amplitudes.items():
        out[idx] = 2.0 * overlap * ax
    for idx, amp in state.amplitudes.items():
        out[idx] = out.get(idx, 0.0) - amp
    pruned = {i: a for i, a in sorted(out.items()) if abs(a) >= PRUNE_TOL}
    return QuantumState(state.num_qubits, pruned, state.registers)
