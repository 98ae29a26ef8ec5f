"""Grover iteration machinery: oracles, diffusion, planning, execution.

Oracles are built from classically-checkable predicates over the search
register.  Every oracle is self-contained: its workspace registers start
and end in |0>, and the phase flip lands exactly on the predicate's
solution set.  The default marking mechanism flips a target qubit held in
(|0>-|1>)/sqrt(2) (phase kickback); a direct phase-flip mode produces the
same search-register state and is available for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import comparator as cmp
from .circuit import Circuit, Gate
from .errors import LayoutError, PlanningError
from .state import (MeasurementDistribution, QuantumState, apply_circuit,
                    marginal_distribution, zero_state_for)

# ---------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class Compare:
    """search value <relation> reference, decided by the comparator circuit."""
    reference: int
    relation: cmp.Relation


@dataclass(frozen=True)
class EqualConstant:
    value: int


@dataclass(frozen=True)
class Odd:
    pass


@dataclass(frozen=True)
class Membership:
    values: frozenset[int]

    def __init__(self, values) -> None:
        object.__setattr__(self, "values", frozenset(values))


@dataclass(frozen=True)
class BranchSelect:
    """Flip s1 when compare_a > compare_b, s2 otherwise (decided by O1)."""
    compare_a: int
    compare_b: int
    s1: int
    s2: int


@dataclass(frozen=True)
class FunctionZero:
    """Flip x whenever table[x] equals the reference value."""
    table: tuple[int, ...]
    reference: int = 0

    def __init__(self, table, reference: int = 0) -> None:
        object.__setattr__(self, "table", tuple(table))
        object.__setattr__(self, "reference", reference)

    @property
    def out_width(self) -> int:
        top = max(max(self.table), self.reference, 1)
        return top.bit_length()


@dataclass(frozen=True)
class AllOf:
    """Conjunction of sub-predicates, realised with one flag ancilla each."""
    parts: tuple["OraclePredicate", ...]

    def __init__(self, parts) -> None:
        object.__setattr__(self, "parts", tuple(parts))


OraclePredicate = Union[Compare, EqualConstant, Odd, Membership, BranchSelect,
                        FunctionZero, AllOf]


def predicate_matches(predicate: OraclePredicate, value: int) -> bool:
    """Classical truth of the predicate for one search value."""
    if isinstance(predicate, Compare):
        return cmp.relation_holds(predicate.relation, value, predicate.reference)
    if isinstance(predicate, EqualConstant):
        return value == predicate.value
    if isinstance(predicate, Odd):
        return value % 2 == 1
    if isinstance(predicate, Membership):
        return value in predicate.values
    if isinstance(predicate, BranchSelect):
        chosen = predicate.s1 if predicate.compare_a > predicate.compare_b else predicate.s2
        return value == chosen
    if isinstance(predicate, FunctionZero):
        return predicate.table[value] == predicate.reference
    if isinstance(predicate, AllOf):
        return all(predicate_matches(part, value) for part in predicate.parts)
    raise TypeError(f"unknown predicate {predicate!r}")


def marked_values(predicate: OraclePredicate, n: int) -> list[int]:
    return [v for v in range(1 << n) if predicate_matches(predicate, v)]


def oracle_registers(predicate: OraclePredicate, n: int,
                     prefix: str = "") -> list[tuple[str, int]]:
    """Workspace registers the oracle needs besides search and target."""
    if isinstance(predicate, Compare):
        return [(prefix + "ref", n), (prefix + "o1", 1), (prefix + "o2", 1),
                (prefix + "cmp_anc", 3 * n - 1)]
    if isinstance(predicate, (EqualConstant, Odd, Membership)):
        return []
    if isinstance(predicate, BranchSelect):
        return [(prefix + "cmp_a", n), (prefix + "cmp_b", n), (prefix + "o1", 1),
                (prefix + "o2", 1), (prefix + "cmp_anc", 3 * n - 1)]
    if isinstance(predicate, FunctionZero):
        m = predicate.out_width
        return [(prefix + "fout", m), (prefix + "fref", m), (prefix + "o1", 1),
                (prefix + "o2", 1), (prefix + "cmp_anc", 3 * m - 1)]
    if isinstance(predicate, AllOf):
        regs: list[tuple[str, int]] = []
        for i, part in enumerate(predicate.parts):
            regs += oracle_registers(part, n, prefix=f"{prefix}p{i}_")
        regs.append((prefix + "flags", len(predicate.parts)))
        return regs
    raise TypeError(f"unknown predicate {predicate!r}")


def grover_layout(predicate: OraclePredicate, n: int) -> Circuit:
    """Full system layout: search register, oracle workspace, kickback target."""
    return Circuit([("search", n)] + oracle_registers(predicate, n) + [("t", 1)])


def _pattern_controls(qubits: Sequence[int], value: int) -> tuple[tuple[int, bool], ...]:
    width = len(qubits)
    return tuple((q, bool((value >> (width - 1 - k)) & 1)) for k, q in enumerate(qubits))


def _oracle_parts(predicate: OraclePredicate, layout: Circuit, n: int,
                  prefix: str = "", search_reg: str = "search"):
    """(setup gates, marker control patterns, teardown gates).

    The patterns fire on disjoint basis sets whose union is exactly the
    predicate's solution set once the setup gates have run.
    """
    search = layout.register_qubits(search_reg)
    if isinstance(predicate, Compare):
        if not 0 <= predicate.reference < (1 << n):
            raise ValueError(f"reference {predicate.reference} out of range")
        load = layout.copy_layout().load_value(prefix + "ref", predicate.reference)
        comp = cmp.build_comparator_gates(layout, search_reg, prefix + "ref",
                                          prefix + "cmp_anc", prefix + "o1",
                                          prefix + "o2")
        setup = load.gates + comp.gates
        o1 = layout.register_qubits(prefix + "o1")[0]
        o2 = layout.register_qubits(prefix + "o2")[0]
        markers = cmp.predicate_controls(predicate.relation, o1, o2)
        return setup, markers, list(reversed(setup))
    if isinstance(predicate, EqualConstant):
        if not 0 <= predicate.value < (1 << n):
            raise ValueError(f"value {predicate.value} out of range")
        return [], [_pattern_controls(search, predicate.value)], []
    if isinstance(predicate, Odd):
        return [], [((search[-1], True),)], []
    if isinstance(predicate, Membership):
        for v in predicate.values:
            if not 0 <= v < (1 << n):
                raise ValueError(f"member {v} out of range")
        return [], [_pattern_controls(search, v) for v in sorted(predicate.values)], []
    if isinstance(predicate, BranchSelect):
        for v in (predicate.compare_a, predicate.compare_b, predicate.s1, predicate.s2):
            if not 0 <= v < (1 << n):
                raise ValueError(f"branch parameter {v} out of range")
        load = layout.copy_layout()
        load.load_value(prefix + "cmp_a", predicate.compare_a)
        load.load_value(prefix + "cmp_b", predicate.compare_b)
        comp = cmp.build_comparator_gates(layout, prefix + "cmp_a", prefix + "cmp_b",
                                          prefix + "cmp_anc", prefix + "o1",
                                          prefix + "o2")
        setup = load.gates + comp.gates
        o1 = layout.register_qubits(prefix + "o1")[0]
        markers = [
            _pattern_controls(search, predicate.s1) + ((o1, True),),
            _pattern_controls(search, predicate.s2) + ((o1, False),),
        ]
        return setup, markers, list(reversed(setup))
    if isinstance(predicate, FunctionZero):
        if len(predicate.table) != (1 << n):
            raise ValueError(f"table length {len(predicate.table)} != 2^{n}")
        load = layout.copy_layout().load_value(prefix + "fref", predicate.reference)
        from .circuit import lift_function
        lift = lift_function(layout, predicate.table, search_reg, prefix + "fout")
        comp = cmp.build_comparator_gates(layout, prefix + "fout", prefix + "fref",
                                          prefix + "cmp_anc", prefix + "o1",
                                          prefix + "o2")
        setup = load.gates + lift.gates + comp.gates
        o1 = layout.register_qubits(prefix + "o1")[0]
        o2 = layout.register_qubits(prefix + "o2")[0]
        markers = cmp.predicate_controls(cmp.Relation.EQ, o1, o2)
        return setup, markers, list(reversed(setup))
    if isinstance(predicate, AllOf):
        flags = layout.register_qubits(prefix + "flags")
        setup: list[Gate] = []
        for i, part in enumerate(predicate.parts):
            sub_setup, sub_markers, sub_teardown = _oracle_parts(
                part, layout, n, prefix=f"{prefix}p{i}_", search_reg=search_reg)
            setup += sub_setup
            setup += [Gate("MCX", flags[i], controls) for controls in sub_markers]
            setup += sub_teardown
        markers = [tuple((f, True) for f in flags)]
        return setup, markers, list(reversed(setup))
    raise TypeError(f"unknown predicate {predicate!r}")


def _phase_gates(controls: tuple[tuple[int, bool], ...]) -> list[Gate]:
    """Phase-flip exactly the basis states matching a control pattern."""
    pivot, polarity = controls[-1]
    rest = controls[:-1]
    inner = Gate("MCX", pivot, rest) if rest else Gate("X", pivot)
    gates = [Gate("H", pivot), inner, Gate("H", pivot)]
    if not polarity:
        gates = [Gate("X", pivot)] + gates + [Gate("X", pivot)]
    return gates


def build_oracle(predicate: OraclePredicate, layout: Circuit, mode: str = "kickback",
                 search_reg: str = "search", target_reg: str = "t") -> Circuit:
    """Oracle circuit over ``layout``.

    kickback mode flips the target register's qubit on every solution;
    phase mode flips the solutions' phases directly and leaves the target
    untouched.
    """
    n = layout.register_width(search_reg)
    setup, markers, teardown = _oracle_parts(predicate, layout, n, search_reg=search_reg)
    circ = layout.copy_layout()
    circ.extend(setup)
    if mode == "kickback":
        target = layout.register_qubits(target_reg)[0]
        for controls in markers:
            circ.append(Gate("MCX", target, controls))
    elif mode == "phase":
        for controls in markers:
            circ.extend(_phase_gates(controls))
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    circ.extend(teardown)
    return circ


# ---------------------------------------------------------------------------
# diffusion

def _zero_reflection_gates(qubits: Sequence[int]) -> list[Gate]:
    """2|0..0><0..0| - I on the given qubits (exact, including global sign)."""
    pivot = qubits[-1]
    if len(qubits) == 1:
        return [Gate("Z", pivot)]
    controls = tuple((q, False) for q in qubits[:-1])
    flip_zero = [Gate("X", pivot), Gate("H", pivot), Gate("MCX", pivot, controls),
                 Gate("H", pivot), Gate("X", pivot)]
    global_minus = [Gate("X", pivot), Gate("Z", pivot), Gate("X", pivot), Gate("Z", pivot)]
    return flip_zero + global_minus


def uniform_prepare(layout: Circuit, search_reg: str = "search") -> Circuit:
    prep = layout.copy_layout()
    for q in layout.register_qubits(search_reg):
        prep.h(q)
    return prep


def build_diffusion(layout: Circuit, search_reg: str = "search",
                    prepare: Circuit | None = None) -> Circuit:
    """A (2|0><0| - I) A^-1 with A the preparation (Hadamards by default).

    With the uniform preparation this is exactly 2|s><s| - I, inversion
    about the mean.  ``prepare`` must touch only the search register.
    """
    search = set(layout.register_qubits(search_reg))
    if prepare is None:
        prepare = uniform_prepare(layout, search_reg)
    for gate in prepare.gates:
        if not set(gate.qubits()) <= search:
            raise LayoutError("preparation circuit must act only on the search register")
    circ = layout.copy_layout()
    circ.extend(reversed(prepare.gates))
    circ.extend(_zero_reflection_gates(layout.register_qubits(search_reg)))
    circ.extend(prepare.gates)
    return circ


# ---------------------------------------------------------------------------
# planning and execution

def success_probability(theta: float, iterations: int) -> float:
    return math.sin((2 * iterations + 1) * theta) ** 2


def plan_for_mass(initial_mass: float) -> tuple[int, float]:
    """Optimal round count given the preparation's marked-state mass."""
    if not 0.0 < initial_mass <= 1.0:
        raise PlanningError(f"initial marked mass {initial_mass} outside (0, 1]")
    theta = math.asin(math.sqrt(initial_mass))
    # round-half-down keeps ties at the cheaper iteration count
    k = max(0, math.ceil(math.pi / (4.0 * theta) - 1.0 - 1e-9))
    return k, success_probability(theta, k)


def plan_iterations(total: int, marked: int) -> tuple[int, float]:
    """(k_opt, predicted success) for ``marked`` solutions out of ``total``."""
    if marked <= 0:
        raise PlanningError("no marked states to plan for")
    if marked > total:
        raise PlanningError(f"marked count {marked} exceeds space size {total}")
    return plan_for_mass(marked / total)


@dataclass(frozen=True)
class GroverPlan:
    num_qubits: int
    predicate: OraclePredicate
    iterations: int | None = None
    marked_count_hint: int | None = None
    oracle_mode: str = "kickback"
    prepare: Circuit | None = None

    def __post_init__(self) -> None:
        if self.iterations is not None and self.iterations < 0:
            raise PlanningError("iterations must be >= 0")
        if self.marked_count_hint is not None:
            if not 0 < self.marked_count_hint < (1 << self.num_qubits):
                raise PlanningError("marked_count_hint must satisfy 0 < M < N")


@dataclass(frozen=True)
class GroverResult:
    final_state: QuantumState
    distribution: MeasurementDistribution
    marked_mass: float
    marked_set: tuple[int, ...]
    iterations: int
    predicted_success: float | None
    oracle_mode: str


def _round_gates(layout: Circuit, oracle: Circuit, diffusion: Circuit) -> list[Gate]:
    return list(oracle.gates) + list(diffusion.gates)


def run_grover(plan: GroverPlan, initial: QuantumState | None = None,
               engine: str = "auto") -> GroverResult:
    """Prepare, iterate oracle + diffusion, and report exact marked mass."""
    n = plan.num_qubits
    layout = grover_layout(plan.predicate, n)
    marked = marked_values(plan.predicate, n)
    if not marked:
        raise PlanningError("predicate marks no states")
    total = 1 << n
    hint = plan.marked_count_hint if plan.marked_count_hint is not None else len(marked)
    if plan.iterations is not None:
        iterations = plan.iterations
    else:
        iterations, _ = plan_iterations(total, hint)
    predicted: float | None = None
    if plan.prepare is None:
        theta = math.asin(math.sqrt(hint / total))
        predicted = success_probability(theta, iterations)

    oracle = build_oracle(plan.predicate, layout, plan.oracle_mode)
    diffusion = build_diffusion(layout, "search", plan.prepare)
    kickback = plan.oracle_mode == "kickback"
    target = layout.register_qubits("t")[0]

    circ = layout.copy_layout()
    if initial is None:
        if kickback:
            circ.x(target).h(target)
        prep = plan.prepare if plan.prepare is not None else uniform_prepare(layout)
        circ.extend(prep.gates)
        state = zero_state_for(layout)
    else:
        if initial.num_qubits != layout.num_qubits:
            raise LayoutError("initial state does not match the oracle layout")
        state = initial
    round_gates = _round_gates(layout, oracle, diffusion)
    for _ in range(iterations):
        circ.extend(round_gates)
    if kickback and initial is None:
        circ.h(target).x(target)
    state = apply_circuit(state, circ, engine=engine)

    dist = marginal_distribution(state, "search")
    mass = sum(dist.entries.get(v, 0.0) for v in marked)
    return GroverResult(state, dist, mass, tuple(marked), iterations, predicted,
                        plan.oracle_mode)


@dataclass(frozen=True)
class BBHTResult:
    outcome: int | None
    rounds: int
    grover_iterations: int

    @property
    def found(self) -> bool:
        return self.outcome is not None


def run_bbht(predicate: OraclePredicate, num_qubits: int, seed: int,
             max_rounds: int = 30, growth: float = 1.2,
             oracle_mode: str = "kickback", engine: str = "auto") -> BBHTResult:
    """Randomized-schedule search for an unknown number of marked states.

    Round r draws the iteration count uniformly from [0, ceil(growth^r)],
    measures once (seeded), and verifies the outcome classically; stops on
    the first verified hit or after ``max_rounds`` failures.
    """
    rng = np.random.default_rng(seed)
    layout = grover_layout(predicate, num_qubits)
    oracle = build_oracle(predicate, layout, oracle_mode)
    diffusion = build_diffusion(layout)
    target = layout.register_qubits("t")[0]

    base = layout.copy_layout()
    if oracle_mode == "kickback":
        base.x(target).h(target)
    base.extend(uniform_prepare(layout).gates)
    round_gates = _round_gates(layout, oracle, diffusion)

    total_iterations = 0
    for r in range(1, max_rounds + 1):
        limit = math.ceil(growth ** r)
        k = int(rng.integers(0, limit + 1))
        circ = base.copy_layout()
        circ.gates = list(base.gates)
        for _ in range(k):
            circ.extend(round_gates)
        state = apply_circuit(zero_state_for(layout), circ, engine=engine)
        total_iterations += k
        dist = marginal_distribution(state, "search")
        outcomes = sorted(dist.entries)
        probs = np.array([dist.entries[v] for v in outcomes], dtype=float)
        drawn = int(rng.choice(outcomes, p=probs / probs.sum()))
        if predicate_matches(predicate, drawn):
            return BBHTResult(drawn, r, total_iterations)
    return BBHTResult(None, max_rounds, total_iterations)
