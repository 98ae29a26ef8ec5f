"""End-to-end search algorithms built on the comparator oracles.

Covers threshold search, iterated minimum finding, zero/preimage finding
for table-defined functions, the odd-database primality/factoring
pipeline, and comparator-controlled conditional search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grover
from .arith import multiplier_gates_on
from .circuit import Circuit
from .comparator import Relation, build_comparator_gates, comparator_registers, \
    predicate_controls
from .errors import LayoutError, PlanningError
from .grover import (AllOf, BranchSelect, Compare, FunctionZero, GroverPlan,
                     Membership, Odd, marked_values, plan_for_mass,
                     predicate_matches, run_bbht, run_grover)
from .state import (MeasurementDistribution, QuantumState, apply_circuit,
                    fidelity, marginal_distribution, reflect_about, zero_state_for)

DEGENERATE_NOTE = ("half the space is marked, so the marked mass stays at 1/2 "
                   "for every iteration count; only the marked-set identity and "
                   "its conditional uniformity are amplification-invariant")


# ---------------------------------------------------------------------------
# threshold search


@dataclass(frozen=True)
class ThresholdResult:
    distribution: MeasurementDistribution | None
    marked_set: tuple[int, ...]
    marked_mass: float
    iterations: int
    predicted_success: float | None
    no_solution: bool
    notes: tuple[str, ...] = ()


def threshold_search(n: int, reference: int, relation: str = "greater",
                     iterations: int | None = None,
                     oracle_mode: str = "kickback") -> ThresholdResult:
    """Grover search for values strictly above (or below) a reference."""
    if relation not in ("greater", "less"):
        raise ValueError(f"relation must be 'greater' or 'less', got {relation!r}")
    rel = Relation.GT if relation == "greater" else Relation.LT
    predicate = Compare(reference, rel)
    try:
        plan = GroverPlan(n, predicate, iterations=iterations, oracle_mode=oracle_mode)
        result = run_grover(plan)
    except PlanningError:
        return ThresholdResult(None, (), 0.0, 0, None, True,
                               ("no values satisfy the threshold predicate",))
    notes: tuple[str, ...] = ()
    if 2 * len(result.marked_set) == (1 << n):
        notes = (DEGENERATE_NOTE,)
    return ThresholdResult(result.distribution, result.marked_set, result.marked_mass,
                           result.iterations, result.predicted_success, False, notes)


# ---------------------------------------------------------------------------
# minimum finding


@dataclass(frozen=True)
class MinSearchTrace:
    thresholds: tuple[int, ...]
    rounds: int
    result: int


def find_minimum(n: int, membership: set[int] | None, seed: int,
                 max_rounds: int = 30, stability_rounds: int = 3,
                 oracle_mode: str = "kickback") -> MinSearchTrace:
    """Iterated at-most-threshold search until the measurement stabilises.

    Each pass marks the members at or below the current threshold, runs the
    randomized-schedule search, and adopts the verified measurement as the
    new threshold.  The loop stops once ``stability_rounds`` consecutive
    measurements repeat the threshold.  A pass that exhausts its schedule
    without a verified hit counts as an unchanged measurement.
    """
    full_space = 1 << n
    if membership is None:
        members = list(range(full_space))
    else:
        members = sorted(membership)
        if not members:
            raise ValueError("membership set must be non-empty")
        if members[-1] >= full_space:
            raise ValueError(f"member {members[-1]} out of range for width {n}")
    rng = np.random.default_rng(seed)
    threshold = int(members[rng.integers(0, len(members))])
    thresholds = [threshold]
    rounds = 0
    streak = 0
    while streak < stability_rounds:
        if membership is None:
            predicate: grover.OraclePredicate = Compare(threshold, Relation.LEQ)
        else:
            predicate = AllOf([Compare(threshold, Relation.LEQ), Membership(members)])
        outcome = run_bbht(predicate, n, seed=int(rng.integers(0, 2 ** 63)),
                           max_rounds=max_rounds, oracle_mode=oracle_mode)
        rounds += 1
        if outcome.found and outcome.outcome < threshold:
            threshold = outcome.outcome
            thresholds.append(threshold)
            streak = 0
        else:
            streak += 1
    return MinSearchTrace(tuple(thresholds), rounds, threshold)


# ---------------------------------------------------------------------------
# zero / preimage finding


@dataclass(frozen=True)
class ZeroSearchResult:
    distribution: MeasurementDistribution | None
    best: int | None
    solutions: tuple[int, ...]
    marked_mass: float
    iterations: int
    predicted_success: float | None
    no_solution: bool


def find_preimage(table: list[int], n: int, target: int,
                  iterations: int | None = None,
                  oracle_mode: str = "kickback") -> ZeroSearchResult:
    """Grover search for x with table[x] == target."""
    predicate = FunctionZero(table, target)
    try:
        plan = GroverPlan(n, predicate, iterations=iterations, oracle_mode=oracle_mode)
        result = run_grover(plan)
    except PlanningError:
        return ZeroSearchResult(None, None, (), 0.0, 0, None, True)
    return ZeroSearchResult(result.distribution, result.distribution.top_outcome(),
                            result.marked_set, result.marked_mass, result.iterations,
                            result.predicted_success, False)


def find_zero(table: list[int], n: int, iterations: int | None = None,
              oracle_mode: str = "kickback") -> ZeroSearchResult:
    return find_preimage(table, n, 0, iterations, oracle_mode)


# ---------------------------------------------------------------------------
# odd-number database and the primality pipeline


@dataclass(frozen=True)
class OddDatabase:
    state: QuantumState            # width n, register "db"
    values: tuple[int, ...]
    fidelity_to_ideal: float
    mode: str
    stage_masses: tuple[float, ...] = ()


def odd_values_below(a: int, exclude_one: bool) -> list[int]:
    start = 3 if exclude_one else 1
    return list(range(start, a, 2))


def _ideal_db_state(values: list[int], n: int) -> QuantumState:
    amp = complex(1.0 / math.sqrt(len(values)))
    return QuantumState(n, {v: amp for v in values}, {"db": (0, n)})


def prepare_odd_database(a: int, n: int | None = None, mode: str = "idealized",
                         exclude_one: bool = False) -> OddDatabase:
    """Uniform superposition of the odd values below ``a``.

    idealized mode constructs the state directly (fidelity 1).  In
    literal-grover mode the state is produced the long way round: amplify
    below-threshold values out of the uniform state, then amplify odd
    values out of that, reflecting about the intermediate state.  The
    reported fidelity against the ideal database quantifies how far this
    chained preparation lands from the state the idealized mode assumes.
    """
    if a < 3 or a % 2 == 0:
        raise ValueError("database bound must be an odd integer >= 3")
    if n is None:
        n = a.bit_length()
    if a >= (1 << n):
        raise ValueError(f"width {n} too small for bound {a}")
    values = odd_values_below(a, exclude_one)
    if not values:
        raise ValueError(f"no database values below {a} with exclude_one={exclude_one}")
    ideal = _ideal_db_state(values, n)
    if mode == "idealized":
        return OddDatabase(ideal, tuple(values), 1.0, mode)
    if mode != "literal-grover":
        raise ValueError(f"unknown database mode {mode!r}")

    predicate = Compare(a, Relation.LT)
    layout = grover.grover_layout(predicate, n)
    target = layout.register_qubits("t")[0]
    k1, _ = grover.plan_iterations(1 << n, a)
    oracle1 = grover.build_oracle(predicate, layout)
    diffusion = grover.build_diffusion(layout)
    stage1 = layout.copy_layout()
    stage1.x(target).h(target)
    stage1.extend(grover.uniform_prepare(layout).gates)
    for _ in range(k1):
        stage1.extend(oracle1.gates)
        stage1.extend(diffusion.gates)
    state1 = apply_circuit(zero_state_for(layout), stage1)

    below_mass = sum(p for v, p in marginal_distribution(state1, "search").entries.items()
                     if v < a)
    odd_mass = sum(p for v, p in marginal_distribution(state1, "search").entries.items()
                   if v % 2 == 1)
    oracle2 = grover.build_oracle(Odd(), layout)
    k2, _ = plan_for_mass(odd_mass)
    state = state1
    for _ in range(k2):
        state = apply_circuit(state, oracle2)
        state = reflect_about(state, state1)
    unprep = layout.copy_layout().h(target).x(target)
    state = apply_circuit(state, unprep)
    db_state = extract_register_state(state, "search")
    db_state = QuantumState(n, db_state.amplitudes, {"db": (0, n)})
    fid = fidelity(db_state, ideal)
    return OddDatabase(db_state, tuple(values), fid, mode, (below_mass, odd_mass))


def extract_register_state(state: QuantumState, register: str) -> QuantumState:
    """Pull one register out of a state whose other qubits are all |0>."""
    start, width = state._register(register)
    shift = state.num_qubits - start - width
    rest_mask = ~(((1 << width) - 1) << shift)
    amps: dict[int, complex] = {}
    for idx, amp in state.amplitudes.items():
        if idx & rest_mask:
            raise ValueError(f"state has support outside register {register!r}")
        amps[idx >> shift] = amp
    return QuantumState(width, dict(sorted(amps.items())), {register: (0, width)})


@dataclass(frozen=True)
class ProductDatabase:
    state: QuantumState            # registers b1(n), b2(n), prod(2n)
    layout: Circuit
    n: int
    values: tuple[int, ...]
    db_fidelity: float
    mode: str


def build_product_database(a: int, mode: str = "idealized",
                           exclude_one: bool = False) -> ProductDatabase:
    """Two odd databases joined through the reversible multiplier."""
    n = a.bit_length()
    db = prepare_odd_database(a, n, mode, exclude_one)
    prep_layout = Circuit([("b1", n), ("b2", n), ("prod", 2 * n), ("carry", n)])
    amps: dict[int, complex] = {}
    for x, ax in db.state.amplitudes.items():
        for y, ay in db.state.amplitudes.items():
            amps[prep_layout.encode({"b1": x, "b2": y})] = ax * ay
    paired = QuantumState(prep_layout.num_qubits, dict(sorted(amps.items())),
                          dict(prep_layout.registers))
    prod_circ = prep_layout.copy_layout()
    prod_circ.extend(multiplier_gates_on(prep_layout, "b1", "b2", "prod", "carry"))
    multiplied = apply_circuit(paired, prod_circ)

    # carries are clean after the multiplier, so the register can be dropped
    carry_width = n
    reduced_layout = Circuit([("b1", n), ("b2", n), ("prod", 2 * n)])
    reduced: dict[int, complex] = {}
    for idx, amp in multiplied.amplitudes.items():
        if idx & ((1 << carry_width) - 1):
            raise ValueError("multiplier left a carry ancilla set")
        reduced[idx >> carry_width] = amp
    state = QuantumState(reduced_layout.num_qubits, dict(sorted(reduced.items())),
                         dict(reduced_layout.registers))
    return ProductDatabase(state, reduced_layout, n, db.values, db.fidelity_to_ideal,
                           mode)


FULL_ORACLE_LIMIT = 31   # widest bound for which the 12n+2-qubit system is used


@dataclass(frozen=True)
class PrimeResult:
    a: int
    classification: str                 # "prime" | "composite"
    witness: tuple[int, int] | None
    database: tuple[int, ...]
    db_fidelity: float
    amplification_rounds: int
    hit_probability: float
    failure_probability: float
    repetitions: int
    product_distribution: MeasurementDistribution
    oracle_realization: str             # "full-registers" | "reduced-product"
    mode: str
    notes: tuple[str, ...] = ()


def _amplify_full(product: ProductDatabase, a: int, rounds: int) -> QuantumState:
    """Comparator-oracle amplification over the complete register set."""
    n = product.n
    w = 2 * n
    layout = Circuit([("b1", n), ("b2", n), ("prod", w), ("ref", w),
                      ("o1", 1), ("o2", 1), ("cmp_anc", 3 * w - 1), ("t", 1)])
    extra = layout.num_qubits - product.state.num_qubits
    embedded = {idx << extra: amp for idx, amp in product.state.amplitudes.items()}
    state = QuantumState(layout.num_qubits, embedded, dict(layout.registers))
    init = layout.copy_layout()
    init.load_value("ref", a)
    target = layout.register_qubits("t")[0]
    init.x(target).h(target)
    state = apply_circuit(state, init)
    axis = state
    oracle = layout.copy_layout()
    comp = build_comparator_gates(layout, "prod", "ref")
    oracle.extend(comp.gates)
    for controls in predicate_controls(Relation.EQ,
                                       layout.register_qubits("o1")[0],
                                       layout.register_qubits("o2")[0]):
        oracle.mcx(list(controls), target)
    oracle.extend(reversed(comp.gates))
    for _ in range(rounds):
        state = apply_circuit(state, oracle)
        state = reflect_about(state, axis)
    return state


def _amplify_reduced(product: ProductDatabase, a: int, rounds: int) -> QuantumState:
    """Phase-oracle amplification applied directly to the product register."""
    layout = product.layout
    state = product.state
    axis = state
    shift = layout.num_qubits - layout.registers["prod"][0] - 2 * product.n
    mask = (1 << (2 * product.n)) - 1
    for _ in range(rounds):
        flipped = {idx: (-amp if ((idx >> shift) & mask) == a else amp)
                   for idx, amp in state.amplitudes.items()}
        state = QuantumState(state.num_qubits, flipped, state.registers)
        state = reflect_about(state, axis)
    return state


def is_prime(a: int, seed: int = 0, repetitions: int | None = None,
             mode: str = "idealized", exclude_one: bool = False) -> PrimeResult:
    """Classify an odd number by searching its odd-product database for it.

    Composite verdicts carry a classically verified factor pair, so they
    are never wrong; prime verdicts fail only with the reported (exactly
    computed) probability of every amplified measurement missing.
    """
    if a < 3 or a % 2 == 0:
        raise ValueError("primality test requires an odd integer >= 3")
    if repetitions is None:
        repetitions = math.ceil(math.log2(a)) + 3
    if exclude_one and a == 3:
        dist = MeasurementDistribution("prod", {})
        return PrimeResult(a, "prime", None, (), 1.0, 0, 0.0, 0.0, repetitions,
                           dist, "empty-database", mode,
                           ("no candidate factors below 3",))

    product = build_product_database(a, mode, exclude_one)
    n = product.n
    prod_dist = marginal_distribution(product.state, "prod")
    hit_mass = prod_dist.entries.get(a, 0.0)
    rounds = 0
    if hit_mass > 0.0:
        rounds, _ = plan_for_mass(hit_mass)

    full = a <= FULL_ORACLE_LIMIT
    if full:
        amplified = _amplify_full(product, a, rounds)
    else:
        amplified = _amplify_reduced(product, a, rounds)
    registers = dict(amplified.registers or {})
    registers["pair_and_prod"] = (0, 4 * n)
    readout = QuantumState(amplified.num_qubits, amplified.amplitudes, registers)
    joint = marginal_distribution(readout, "pair_and_prod")
    final_prod = marginal_distribution(readout, "prod")
    hit_probability = final_prod.entries.get(a, 0.0)
    failure = (1.0 - hit_probability) ** repetitions if hit_mass > 0.0 else 0.0

    rng = np.random.default_rng(seed)
    outcomes = sorted(joint.entries)
    probs = np.array([joint.entries[v] for v in outcomes], dtype=float)
    probs = probs / probs.sum()
    witness: tuple[int, int] | None = None
    for _ in range(repetitions):
        drawn = int(rng.choice(outcomes, p=probs))
        prod_value = drawn & ((1 << (2 * n)) - 1)
        x = drawn >> (3 * n)
        y = (drawn >> (2 * n)) & ((1 << n) - 1)
        if prod_value == a and x * y == a:
            witness = (x, y)
            break

    classification = "composite" if witness is not None else "prime"
    notes = []
    if not full:
        notes.append("comparator oracle evaluated directly on the product register "
                     "(reduced simulation for bounds above "
                     f"{FULL_ORACLE_LIMIT})")
    if mode == "literal-grover":
        notes.append(f"database fidelity to ideal: {product.db_fidelity:.6f}")
    return PrimeResult(a, classification, witness, product.values,
                       product.db_fidelity, rounds, hit_probability, failure,
                       repetitions, final_prod,
                       "full-registers" if full else "reduced-product",
                       mode, tuple(notes))


def factorize(a: int, seed: int = 0) -> list[int]:
    """Prime factor multiset of an odd integer via recursive witness descent."""
    if a < 3 or a % 2 == 0:
        raise ValueError("factorization requires an odd integer >= 3")
    result = is_prime(a, seed=seed, exclude_one=True)
    if result.classification == "prime":
        return [a]
    p, q = result.witness
    return sorted(factorize(p, seed + 1) + factorize(q, seed + 2))


# ---------------------------------------------------------------------------
# conditional search


@dataclass(frozen=True)
class ConditionalResult:
    distribution: MeasurementDistribution
    selected: int
    top_outcome: int
    marked_mass: float
    iterations: int
    predicted_success: float | None


def conditional_search(a: int, b: int, s1: int, s2: int, n: int,
                       iterations: int | None = None,
                       oracle_mode: str = "kickback") -> ConditionalResult:
    """If a > b search for s1, otherwise search for s2."""
    predicate = BranchSelect(a, b, s1, s2)
    plan = GroverPlan(n, predicate, iterations=iterations, oracle_mode=oracle_mode)
    result = run_grover(plan)
    selected = s1 if a > b else s2
    return ConditionalResult(result.distribution, selected,
                             result.distribution.top_outcome(), result.marked_mass,
                             result.iterations, result.predicted_success)
