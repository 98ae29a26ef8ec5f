"""Gate-level circuit representation.

Circuits are built over named registers (contiguous qubit ranges, most
significant bit first: qubit 0 of a register holds its highest-value bit,
and qubit 0 of the whole circuit is the most significant bit of the basis
index).  The gate set is {X, H, Z, MCX}; every kind is self-inverse, so a
circuit is inverted by reversing its gate list.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CircuitError, LayoutError

GATE_KINDS = ("X", "H", "Z", "MCX")

# A control is (qubit, polarity); polarity True fires on |1>, False on |0>.
Control = tuple[int, bool]


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[Control, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.controls and self.kind != "MCX":
            raise CircuitError(f"{self.kind} gates take no controls")
        seen = {self.target}
        for q, _ in self.controls:
            if q in seen:
                raise CircuitError(f"gate indices clash on qubit {q}")
            seen.add(q)

    def qubits(self) -> tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)


class Circuit:
    """Ordered gate list over a fixed register layout.

    Treat instances as immutable once built; the appending methods exist
    for construction only and return ``self`` for chaining.
    """

    def __init__(self, registers: Sequence[tuple[str, int]] | int):
        if isinstance(registers, int):
            registers = [("q", registers)]
        self.registers: dict[str, tuple[int, int]] = {}
        start = 0
        for name, width in registers:
            if width < 1:
                raise LayoutError(f"register {name!r} must have width >= 1")
            if name in self.registers:
                raise LayoutError(f"duplicate register name {name!r}")
            self.registers[name] = (start, width)
            start += width
        self.num_qubits = start
        if self.num_qubits < 1:
            raise LayoutError("circuit needs at least one qubit")
        self.gates: list[Gate] = []

    # -- layout helpers ---------------------------------------------------

    def register_qubits(self, name: str) -> list[int]:
        start, width = self._reg(name)
        return list(range(start, start + width))

    def register_width(self, name: str) -> int:
        return self._reg(name)[1]

    def _reg(self, name: str) -> tuple[int, int]:
        try:
            return self.registers[name]
        except KeyError:
            raise LayoutError(f"unknown register {name!r}") from None

    def encode(self, values: Mapping[str, int]) -> int:
        """Basis index with each named register set to a value, others 0."""
        index = 0
        for name, value in values.items():
            start, width = self._reg(name)
            if not 0 <= value < (1 << width):
                raise ValueError(f"value {value} does not fit register {name!r}")
            index |= value << (self.num_qubits - start - width)
        return index

    def decode(self, index: int, name: str) -> int:
        """Value of one register within a basis index."""
        start, width = self._reg(name)
        return (index >> (self.num_qubits - start - width)) & ((1 << width) - 1)

    def copy_layout(self) -> "Circuit":
        """Empty circuit sharing this circuit's register layout."""
        fresh = Circuit.__new__(Circuit)
        fresh.registers = dict(self.registers)
        fresh.num_qubits = self.num_qubits
        fresh.gates = []
        return fresh

    # -- construction -----------------------------------------------------

    def append(self, gate: Gate) -> "Circuit":
        for q in gate.qubits():
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit {q} outside circuit of width {self.num_qubits}")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for gate in gates:
            self.append(gate)
        return self

    def x(self, q: int) -> "Circuit":
        return self.append(Gate("X", q))

    def h(self, q: int) -> "Circuit":
        return self.append(Gate("H", q))

    def z(self, q: int) -> "Circuit":
        return self.append(Gate("Z", q))

    def cnot(self, control: int, target: int) -> "Circuit":
        return self.append(Gate("MCX", target, ((control, True),)))

    def toffoli(self, c1: int, c2: int, target: int,
                polarities: tuple[bool, bool] = (True, True)) -> "Circuit":
        return self.append(Gate("MCX", target, ((c1, polarities[0]), (c2, polarities[1]))))

    def mcx(self, controls: Sequence[Control], target: int) -> "Circuit":
        if not controls:
            return self.x(target)
        return self.append(Gate("MCX", target, tuple(controls)))

    def load_value(self, register: str, value: int) -> "Circuit":
        """X gates placing a classical value into a register assumed |0...0>."""
        start, width = self._reg(register)
        if not 0 <= value < (1 << width):
            raise ValueError(f"value {value} does not fit register {register!r}")
        for k in range(width):
            if (value >> (width - 1 - k)) & 1:
                self.x(start + k)
        return self

    # -- whole-circuit operations ------------------------------------------

    def compose(self, other: "Circuit") -> "Circuit":
        if other.registers != self.registers:
            raise LayoutError("cannot compose circuits with different register layouts")
        combined = self.copy_layout()
        combined.gates = list(self.gates) + list(other.gates)
        return combined

    def inverse(self) -> "Circuit":
        inv = self.copy_layout()
        inv.gates = list(reversed(self.gates))
        return inv

    def dump(self) -> str:
        """One gate per line, e.g. ``MCX t=5 c=+0,-3`` (+ fires on 1, - on 0)."""
        lines = []
        for gate in self.gates:
            line = f"{gate.kind} t={gate.target}"
            if gate.controls:
                ctrls = ",".join(f"{'+' if pol else '-'}{q}" for q, pol in gate.controls)
                line += f" c={ctrls}"
            lines.append(line)
        return "\n".join(lines)

    def __len__(self) -> int:
        return len(self.gates)

    def __repr__(self) -> str:
        regs = ", ".join(f"{n}:{w}" for n, (_, w) in self.registers.items())
        return f"Circuit({self.num_qubits} qubits [{regs}], {len(self.gates)} gates)"


def new_circuit(registers: Sequence[tuple[str, int]]) -> Circuit:
    return Circuit(registers)


def compose(first: Circuit, second: Circuit) -> Circuit:
    return first.compose(second)


def inverse(circuit: Circuit) -> Circuit:
    return circuit.inverse()


def lift_function(layout: Circuit, table: Sequence[int], in_reg: str, out_reg: str) -> Circuit:
    """Reversible XOR embedding of a classical truth table.

    For every basis state |x>|y> the returned circuit maps it to
    |x>|y XOR table[x]>: one MCX per set output bit per table row, with the
    controls encoding x in mixed polarity.
    """
    n = layout.register_width(in_reg)
    m = layout.register_width(out_reg)
    if len(table) != (1 << n):
        raise ValueError(f"table length {len(table)} != 2^{n} for register {in_reg!r}")
    in_qubits = layout.register_qubits(in_reg)
    out_qubits = layout.register_qubits(out_reg)
    lifted = layout.copy_layout()
    for x, fx in enumerate(table):
        if not 0 <= fx < (1 << m):
            raise ValueError(f"table value {fx} does not fit register {out_reg!r}")
        if fx == 0:
            continue
        controls = tuple((q, bool((x >> (n - 1 - k)) & 1)) for k, q in enumerate(in_qubits))
        for k in range(m):
            if (fx >> (m - 1 - k)) & 1:
                lifted.append(Gate("MCX", out_qubits[k], controls))
    return lifted
