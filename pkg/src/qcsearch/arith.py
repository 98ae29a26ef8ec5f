"""Reversible arithmetic: ripple-carry adder and shift-and-add multiplier.

The adder is the classic Toffoli/CNOT ripple construction: a CARRY cascade
up the bit positions, then a mirrored unwind that leaves every carry
ancilla back in |0>.  The multiplier schedules one adder per multiplier
bit, shifted into the matching window of the product register.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate
from .errors import LayoutError


@dataclass(frozen=True)
class ArithLayout:
    x_reg: str
    y_reg: str
    out_reg: str
    carries: tuple[int, ...]


def _with_control(gates: list[Gate], control: int | None) -> list[Gate]:
    if control is None:
        return gates
    return [Gate("MCX", g.target, g.controls + ((control, True),)) for g in gates]


def _adder_gates(x_lsb: list[int], s_lsb: list[int], c_lsb: list[int]) -> list[Gate]:
    """|x>|s> -> |x>|s + x mod 2^(n+1)>, qubit lists ordered LSB first.

    Needs len(s) = len(x) + 1 and len(c) = len(x); carries end in |0>.
    """
    n = len(x_lsb)
    if len(s_lsb) != n + 1 or len(c_lsb) != n:
        raise LayoutError("adder needs n+1 sum qubits and n carry qubits")

    def carry(c_in: int, x: int, s: int, c_out: int) -> list[Gate]:
        return [
            Gate("MCX", c_out, ((x, True), (s, True))),
            Gate("MCX", s, ((x, True),)),
            Gate("MCX", c_out, ((c_in, True), (s, True))),
        ]

    def total(c_in: int, x: int, s: int) -> list[Gate]:
        return [Gate("MCX", s, ((x, True),)), Gate("MCX", s, ((c_in, True),))]

    gates: list[Gate] = []
    for j in range(n - 1):
        gates += carry(c_lsb[j], x_lsb[j], s_lsb[j], c_lsb[j + 1])
    gates += carry(c_lsb[n - 1], x_lsb[n - 1], s_lsb[n - 1], s_lsb[n])
    gates.append(Gate("MCX", s_lsb[n - 1], ((x_lsb[n - 1], True),)))
    gates += total(c_lsb[n - 1], x_lsb[n - 1], s_lsb[n - 1])
    for j in range(n - 2, -1, -1):
        gates += list(reversed(carry(c_lsb[j], x_lsb[j], s_lsb[j], c_lsb[j + 1])))
        gates += total(c_lsb[j], x_lsb[j], s_lsb[j])
    return gates


def adder_gates_on(layout: Circuit, x_reg: str, sum_qubits_msb: list[int],
                   carry_qubits: list[int], control: int | None = None) -> list[Gate]:
    """Adder gates embedded at explicit qubit positions (sum given MSB first)."""
    x_lsb = list(reversed(layout.register_qubits(x_reg)))
    s_lsb = list(reversed(sum_qubits_msb))
    footprint = set(x_lsb) | set(s_lsb) | set(carry_qubits)
    if len(footprint) != len(x_lsb) + len(s_lsb) + len(carry_qubits):
        raise LayoutError("adder registers overlap")
    if control is not None and control in footprint:
        raise LayoutError("adder control overlaps its footprint")
    return _with_control(_adder_gates(x_lsb, s_lsb, carry_qubits), control)


def build_adder(n: int) -> Circuit:
    """|x>|s> -> |x>|s + x mod 2^(n+1)> over registers x(n), s(n+1), carry(n)."""
    if n < 1:
        raise ValueError("adder width must be >= 1")
    layout = Circuit([("x", n), ("s", n + 1), ("carry", n)])
    circ = layout.copy_layout()
    circ.extend(adder_gates_on(layout, "x", layout.register_qubits("s"),
                               layout.register_qubits("carry")))
    return circ


def build_controlled_adder(n: int) -> Circuit:
    """Adds x into s only when the ctrl qubit is |1>; identity otherwise."""
    if n < 1:
        raise ValueError("adder width must be >= 1")
    layout = Circuit([("ctrl", 1), ("x", n), ("s", n + 1), ("carry", n)])
    circ = layout.copy_layout()
    circ.extend(adder_gates_on(layout, "x", layout.register_qubits("s"),
                               layout.register_qubits("carry"),
                               control=layout.register_qubits("ctrl")[0]))
    return circ


def multiplier_gates_on(layout: Circuit, x_reg: str, y_reg: str, out_reg: str,
                        carry_reg: str) -> list[Gate]:
    """Shift-and-add multiplication |x>|y>|p> -> |x>|y>|p + x*y mod 2^(2n)>."""
    n = layout.register_width(x_reg)
    if layout.register_width(y_reg) != n:
        raise LayoutError("multiplier operands must have equal widths")
    if layout.register_width(out_reg) != 2 * n:
        raise LayoutError("product register must be twice the operand width")
    y_qubits = layout.register_qubits(y_reg)
    out = layout.register_qubits(out_reg)
    carries = layout.register_qubits(carry_reg)[:n]
    gates: list[Gate] = []
    for j in range(n):                       # j = significance of the y bit
        control = y_qubits[n - 1 - j]
        window = out[n - 1 - j:2 * n - j]    # significances j .. j+n, MSB first
        gates += adder_gates_on(layout, x_reg, window, carries, control=control)
    return gates


def build_multiplier(n: int) -> tuple[Circuit, ArithLayout]:
    """|x>|y>|0> -> |x>|y>|x*y> over registers x(n), y(n), prod(2n), carry(n).

    A non-zero initial product register is not rejected: the circuit then
    computes |x>|y>|p + x*y mod 2^(2n)>.
    """
    if n < 1:
        raise ValueError("multiplier width must be >= 1")
    layout = Circuit([("x", n), ("y", n), ("prod", 2 * n), ("carry", n)])
    circ = layout.copy_layout()
    circ.extend(multiplier_gates_on(layout, "x", "y", "prod", "carry"))
    return circ, ArithLayout("x", "y", "prod", tuple(layout.register_qubits("carry")))
