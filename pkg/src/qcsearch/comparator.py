"""Bit-string comparator circuits and predicate-controlled flip wrappers.

The comparator walks two equal-width registers from the most significant
bit down.  Each position gets a unit cell writing two indicator ancillas

    g_i = a_i AND NOT b_i        (this position says a > b)
    l_i = NOT a_i AND b_i        (this position says a < b)

gated, for every position after the first, by a chain ancilla that is 1
only while all higher positions compared equal.  The chain bit itself is
a Toffoli activated on zero over the position's indicators.  The gating
means at most one position ever raises an indicator, so plain CNOTs fan
the indicators into the two output qubits:

    O1 = 1, O2 = 0   a > b
    O1 = 0, O2 = 1   a < b
    O1 = 0, O2 = 0   a = b

After the outputs are written the indicator/chain ancillas are uncomputed,
so the bare comparator leaves every internal ancilla in |0> and only O1/O2
carry information.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .circuit import Circuit, Gate
from .errors import LayoutError


class Relation(Enum):
    GT = "GT"
    LT = "LT"
    EQ = "EQ"
    LEQ = "LEQ"
    GEQ = "GEQ"
    NEQ = "NEQ"


def compare_classical(a: int, b: int, n: int) -> Relation:
    """Classical reference comparison of two n-bit values (GT/LT/EQ only)."""
    if not 0 <= a < (1 << n):
        raise ValueError(f"a={a} out of range for width {n}")
    if not 0 <= b < (1 << n):
        raise ValueError(f"b={b} out of range for width {n}")
    if a > b:
        return Relation.GT
    if a < b:
        return Relation.LT
    return Relation.EQ


def relation_holds(relation: Relation, a: int, b: int) -> bool:
    if relation is Relation.GT:
        return a > b
    if relation is Relation.LT:
        return a < b
    if relation is Relation.EQ:
        return a == b
    if relation is Relation.LEQ:
        return a <= b
    if relation is Relation.GEQ:
        return a >= b
    return a != b


@dataclass(frozen=True)
class ComparatorLayout:
    """Placement of a built comparator inside a circuit layout."""

    n: int
    a_reg: str
    b_reg: str
    o1: int
    o2: int
    ancillas: tuple[int, ...]

    @property
    def ancilla_count(self) -> int:
        return len(self.ancillas)


def comparator_registers(n: int, a_reg: str = "a", b_reg: str = "b",
                         anc_reg: str = "cmp_anc", o1_reg: str = "o1",
                         o2_reg: str = "o2") -> list[tuple[str, int]]:
    """Register list for a standalone n-bit comparator."""
    regs = [(a_reg, n), (b_reg, n), (o1_reg, 1), (o2_reg, 1)]
    if n > 0:
        regs.append((anc_reg, 3 * n - 1))
    return regs


def comparator_layout(layout: Circuit, n: int, a_reg: str = "a", b_reg: str = "b",
                      anc_reg: str = "cmp_anc", o1_reg: str = "o1",
                      o2_reg: str = "o2") -> ComparatorLayout:
    anc = layout.register_qubits(anc_reg)
    if len(anc) < 3 * n - 1:
        raise LayoutError(f"comparator needs {3 * n - 1} ancillas, register "
                          f"{anc_reg!r} has {len(anc)}")
    return ComparatorLayout(
        n=n, a_reg=a_reg, b_reg=b_reg,
        o1=layout.register_qubits(o1_reg)[0],
        o2=layout.register_qubits(o2_reg)[0],
        ancillas=tuple(anc[:3 * n - 1]),
    )


def build_unit_cell(layout: Circuit, position: int, a_reg: str = "a", b_reg: str = "b",
                    anc_reg: str = "cmp_anc") -> Circuit:
    """Two mixed-polarity Toffolis writing one position's g/l indicators."""
    n = layout.register_width(a_reg)
    if not 0 <= position < n:
        raise ValueError(f"position {position} outside width {n}")
    cl = comparator_layout(layout, n, a_reg, b_reg, anc_reg)
    a_q = layout.register_qubits(a_reg)[position]
    b_q = layout.register_qubits(b_reg)[position]
    g_q, l_q = _indicator_qubits(cl, position)
    cell = layout.copy_layout()
    cell.mcx([(a_q, True), (b_q, False)], g_q)
    cell.mcx([(a_q, False), (b_q, True)], l_q)
    return cell


def _indicator_qubits(cl: ComparatorLayout, position: int) -> tuple[int, int]:
    return cl.ancillas[position], cl.ancillas[cl.n + position]


def _chain_qubit(cl: ComparatorLayout, position: int) -> int:
    return cl.ancillas[2 * cl.n + position]


def _compute_gates(layout: Circuit, cl: ComparatorLayout) -> list[Gate]:
    """Indicator + chain computation, most significant position first."""
    a_qubits = layout.register_qubits(cl.a_reg)
    b_qubits = layout.register_qubits(cl.b_reg)
    gates: list[Gate] = []
    for i in range(cl.n):
        g_q, l_q = _indicator_qubits(cl, i)
        cell = [(a_qubits[i], True), (b_qubits[i], False)]
        anticell = [(a_qubits[i], False), (b_qubits[i], True)]
        if i > 0:
            chain = (_chain_qubit(cl, i - 1), True)
            cell.append(chain)
            anticell.append(chain)
        gates.append(Gate("MCX", g_q, tuple(cell)))
        gates.append(Gate("MCX", l_q, tuple(anticell)))
        if i < cl.n - 1:
            # chain bit: still undecided after this position
            controls = [(g_q, False), (l_q, False)]
            if i > 0:
                controls.append((_chain_qubit(cl, i - 1), True))
            gates.append(Gate("MCX", _chain_qubit(cl, i), tuple(controls)))
    return gates


def build_comparator_gates(layout: Circuit, a_reg: str = "a", b_reg: str = "b",
                           anc_reg: str = "cmp_anc", o1_reg: str = "o1",
                           o2_reg: str = "o2") -> Circuit:
    """Comparator on an existing layout; outputs in o1/o2, ancillas restored."""
    n = layout.register_width(a_reg)
    if layout.register_width(b_reg) != n:
        raise LayoutError("compared registers must have equal widths")
    cl = comparator_layout(layout, n, a_reg, b_reg, anc_reg, o1_reg, o2_reg)
    circ = layout.copy_layout()
    compute = _compute_gates(layout, cl)
    circ.extend(compute)
    for i in range(n):
        g_q, l_q = _indicator_qubits(cl, i)
        circ.cnot(g_q, cl.o1)
        circ.cnot(l_q, cl.o2)
    circ.extend(reversed(compute))
    return circ


def build_comparator(n: int) -> tuple[Circuit, ComparatorLayout]:
    """Standalone n-bit comparator over registers a, b, o1, o2, cmp_anc."""
    if n < 1:
        raise ValueError("comparator width must be >= 1")
    layout = Circuit(comparator_registers(n))
    circ = build_comparator_gates(layout)
    return circ, comparator_layout(layout, n)


def predicate_controls(relation: Relation, o1: int, o2: int) -> list[tuple[tuple[int, bool], ...]]:
    """Control patterns on (o1, o2) whose union fires exactly on the relation."""
    if relation is Relation.GT:
        return [((o1, True),)]
    if relation is Relation.LT:
        return [((o2, True),)]
    if relation is Relation.EQ:
        return [((o1, False), (o2, False))]
    if relation is Relation.LEQ:      # O1 = 0 <=> not (a > b)
        return [((o1, False),)]
    if relation is Relation.GEQ:      # O2 = 0 <=> not (a < b)
        return [((o2, False),)]
    if relation is Relation.NEQ:      # GT and LT fire disjointly
        return [((o1, True),), ((o2, True),)]
    raise ValueError(f"unknown relation {relation!r}")


def build_predicate_flip(layout: Circuit, relation: Relation, flip_target: int,
                         a_reg: str = "a", b_reg: str = "b",
                         anc_reg: str = "cmp_anc", o1_reg: str = "o1",
                         o2_reg: str = "o2") -> Circuit:
    """Compute the comparator, flip a target on the relation, uncompute.

    Every comparator qubit (outputs included) is restored, so only the flip
    target records whether value(a_reg) <relation> value(b_reg) held.
    """
    n = layout.register_width(a_reg)
    cl = comparator_layout(layout, n, a_reg, b_reg, anc_reg, o1_reg, o2_reg)
    if flip_target in set(layout.register_qubits(a_reg)) | set(layout.register_qubits(b_reg)) \
            | set(cl.ancillas) | {cl.o1, cl.o2}:
        raise LayoutError("flip target lies inside the comparator footprint")
    comp = build_comparator_gates(layout, a_reg, b_reg, anc_reg, o1_reg, o2_reg)
    circ = layout.copy_layout()
    circ.extend(comp.gates)
    for controls in predicate_controls(relation, cl.o1, cl.o2):
        circ.append(Gate("MCX", flip_target, controls))
    circ.extend(reversed(comp.gates))
    return circ
