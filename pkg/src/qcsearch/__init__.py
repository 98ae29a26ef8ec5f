"""Comparator-oracle Grover search toolkit with an exact statevector engine."""

from .circuit import Circuit, Gate, compose, inverse, lift_function, new_circuit
from .comparator import (ComparatorLayout, Relation, build_comparator,
                         build_comparator_gates, build_predicate_flip,
                         build_unit_cell, compare_classical, relation_holds)
from .arith import ArithLayout, build_adder, build_controlled_adder, build_multiplier
from .errors import CircuitError, LayoutError, PlanningError
from .grover import (AllOf, BBHTResult, BranchSelect, Compare, EqualConstant,
                     FunctionZero, GroverPlan, GroverResult, Membership, Odd,
                     OraclePredicate, build_diffusion, build_oracle, grover_layout,
                     marked_values, plan_for_mass, plan_iterations,
                     predicate_matches, run_bbht, run_grover, uniform_prepare)
from .state import (MeasurementDistribution, QuantumState, apply_circuit,
                    apply_gate, basis_state, fidelity, marginal_distribution,
                    reflect_about, sample, uniform_state, zero_state_for)
from .algorithms import (ConditionalResult, MinSearchTrace, OddDatabase,
                         PrimeResult, ProductDatabase, ThresholdResult,
                         ZeroSearchResult, build_product_database,
                         conditional_search, factorize, find_minimum,
                         find_preimage, find_zero, is_prime,
                         prepare_odd_database, threshold_search)

__version__ = "0.1.0"
