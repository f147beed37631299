"""The certification network and finite-shot sampling of its correlations.

Party layout for a single cell (tensor order A, B0, B, C):

* Alice measures qubit A; inputs 1..3.
* Bob holds qubits B0 and B.  Inputs 1..6 measure B0 alone; the reserved
  input :data:`~discrimnet.correlations.DIAMOND` applies a four-outcome
  joint measurement to the pair (B0, B).
* Charlie measures qubit C; inputs 1, 2.
* The A-B0 link and the B-C link each carry a shared two-qubit state.

Certification rounds run the full tripartite layout.  Discrimination rounds
reuse the same devices with the unknown target state in the B slot and Bob
fixed to the joint measurement; only the A-B0 link matters there, so the
target statistics reduce to an effective single-qubit POVM on B
(:func:`cell_effects`).  N-qubit targets use one cell per site and the
product structure of the cells, never one global tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .correlations import DIAMOND, CorrelationTable, _validate_povm
from .errors import ResourceLimitError, ValidationError
from .qubits import (
    IDENTITY_2,
    TOL,
    bell_state,
    conjugate_entries,
    kron,
    partial_trace,
    pauli,
    qubit_count,
    validate_density,
)

ALICE_INPUTS = (1, 2, 3)
BOB_SINGLE_INPUTS = (1, 2, 3, 4, 5, 6)
CHARLIE_INPUTS = (1, 2)
JOINT_OUTCOMES = (0, 1, 2, 3)

#: Axis pair and relative sign of Bob's single-qubit observable per input:
#: input y measures (pauli(j) + s*pauli(k)) / sqrt(2).
BOB_AXIS_PAIRS = {
    1: (1, 2, +1),
    2: (1, 2, -1),
    3: (1, 3, +1),
    4: (1, 3, -1),
    5: (2, 3, +1),
    6: (2, 3, -1),
}

#: Default cap on simultaneously simulated cells.
MAX_CELLS = 3


def _binary_projectors(observable: np.ndarray) -> dict[int, np.ndarray]:
    """Outcome projectors (I +/- O)/2 of a +/-1-valued observable."""
    obs = np.asarray(observable, dtype=complex)
    return {1: (IDENTITY_2 + obs) / 2, -1: (IDENTITY_2 - obs) / 2}


@dataclass(frozen=True)
class DeviceStrategy:
    """Complete description of the states and measurements of one cell.

    ``bob_single`` holds 2x2 elements acting on B0 only; ``bob_joint`` holds
    the 4x4 elements of the four-outcome measurement on (B0, B).  Outcome
    maps follow the {outcome label: operator} convention of
    :func:`~discrimnet.correlations.measurement_correlations`.
    """

    aux_ab0: np.ndarray
    aux_bc: np.ndarray
    alice: dict[int, dict[int, np.ndarray]]
    bob_single: dict[int, dict[int, np.ndarray]]
    bob_joint: dict[int, np.ndarray]
    charlie: dict[int, dict[int, np.ndarray]]
    label: str = "unnamed"

    def validate(self, tol: float = TOL) -> None:
        validate_density(self.aux_ab0, tol, name=f"{self.label}: A-B0 link state")
        validate_density(self.aux_bc, tol, name=f"{self.label}: B-C link state")
        for x in ALICE_INPUTS:
            _validate_povm(self.alice[x], tol, f"{self.label}: alice input {x}")
        for y in BOB_SINGLE_INPUTS:
            _validate_povm(self.bob_single[y], tol, f"{self.label}: bob input {y}")
        _validate_povm(self.bob_joint, tol, f"{self.label}: bob joint input")
        for z in CHARLIE_INPUTS:
            _validate_povm(self.charlie[z], tol, f"{self.label}: charlie input {z}")


def honest_strategy() -> DeviceStrategy:
    """Ideal devices: both links maximally entangled, Pauli-aligned observables."""
    phi0 = bell_state(0)
    sqrt2 = np.sqrt(2.0)
    bob_single = {
        y: _binary_projectors((pauli(j) + s * pauli(k)) / sqrt2)
        for y, (j, k, s) in BOB_AXIS_PAIRS.items()
    }
    return DeviceStrategy(
        aux_ab0=phi0,
        aux_bc=phi0,
        alice={x: _binary_projectors(pauli(x)) for x in ALICE_INPUTS},
        bob_single=bob_single,
        bob_joint={b: bell_state(b) for b in JOINT_OUTCOMES},
        charlie={
            1: _binary_projectors((pauli(1) + pauli(2)) / sqrt2),
            2: _binary_projectors((pauli(1) - pauli(2)) / sqrt2),
        },
        label="honest",
    )


def conjugate_strategy(strategy: DeviceStrategy, label: str | None = None) -> DeviceStrategy:
    """Entrywise complex conjugate of every state and operator of a strategy."""
    conj_povm = lambda povm: {k: conjugate_entries(op) for k, op in povm.items()}
    return DeviceStrategy(
        aux_ab0=conjugate_entries(strategy.aux_ab0),
        aux_bc=conjugate_entries(strategy.aux_bc),
        alice={x: conj_povm(p) for x, p in strategy.alice.items()},
        bob_single={y: conj_povm(p) for y, p in strategy.bob_single.items()},
        bob_joint=conj_povm(strategy.bob_joint),
        charlie={z: conj_povm(p) for z, p in strategy.charlie.items()},
        label=label if label is not None else f"conjugate({strategy.label})",
    )


def conjugated_strategy() -> DeviceStrategy:
    """Conjugate twin of the honest strategy; indistinguishable on certification data."""
    return conjugate_strategy(honest_strategy(), label="conjugated")


def werner_strategy(visibility: float) -> DeviceStrategy:
    """Honest measurements on isotropically degraded link states.

    Both links carry visibility*phi0 + (1-visibility)*I/4; visibility 1
    recovers the honest strategy.
    """
    p = float(visibility)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"visibility must lie in [0, 1], got {visibility!r}")
    link = p * bell_state(0) + (1.0 - p) * np.eye(4) / 4.0
    honest = honest_strategy()
    return DeviceStrategy(
        aux_ab0=link,
        aux_bc=link,
        alice=honest.alice,
        bob_single=honest.bob_single,
        bob_joint=honest.bob_joint,
        charlie=honest.charlie,
        label=f"werner({p})",
    )


def classical_strategy(
    alice_outcomes: dict[int, int],
    bob_outcomes: dict[int, int],
    joint_outcome: int,
    charlie_outcomes: dict[int, int],
    label: str = "classical",
) -> DeviceStrategy:
    """Deterministic devices: each input returns a fixed outcome, state-independent.

    Realised as trivial POVMs (identity on the assigned outcome, zero
    elsewhere), so the same exact-correlation machinery applies.
    """

    def fixed(assigned: int, outcomes, dim: int) -> dict[int, np.ndarray]:
        if assigned not in outcomes:
            raise ValidationError(f"assigned outcome {assigned!r} not in {outcomes}")
        zero = np.zeros((dim, dim), dtype=complex)
        return {o: (np.eye(dim, dtype=complex) if o == assigned else zero) for o in outcomes}

    for inputs, assignment, who in (
        (ALICE_INPUTS, alice_outcomes, "alice"),
        (BOB_SINGLE_INPUTS, bob_outcomes, "bob"),
        (CHARLIE_INPUTS, charlie_outcomes, "charlie"),
    ):
        missing = [i for i in inputs if i not in assignment]
        if missing:
            raise ValidationError(f"{who} assignment misses inputs {missing}")
    return DeviceStrategy(
        aux_ab0=bell_state(0),
        aux_bc=bell_state(0),
        alice={x: fixed(alice_outcomes[x], (1, -1), 2) for x in ALICE_INPUTS},
        bob_single={y: fixed(bob_outcomes[y], (1, -1), 2) for y in BOB_SINGLE_INPUTS},
        bob_joint=fixed(joint_outcome, JOINT_OUTCOMES, 4),
        charlie={z: fixed(charlie_outcomes[z], (1, -1), 2) for z in CHARLIE_INPUTS},
        label=label,
    )


def _alice_link_effects(strategy: DeviceStrategy) -> dict[tuple[int, int], np.ndarray]:
    """Effective operators on B0 after Alice's outcome on the A-B0 link."""
    out = {}
    for x in ALICE_INPUTS:
        for a, op in strategy.alice[x].items():
            full = kron(op, IDENTITY_2) @ strategy.aux_ab0
            out[(a, x)] = partial_trace(full, (2, 2), keep=(1,))
    return out


def _charlie_link_effects(strategy: DeviceStrategy) -> dict[tuple[int, int], np.ndarray]:
    """Effective operators on B after Charlie's outcome on the B-C link."""
    out = {}
    for z in CHARLIE_INPUTS:
        for c, op in strategy.charlie[z].items():
            full = kron(IDENTITY_2, op) @ strategy.aux_bc
            out[(c, z)] = partial_trace(full, (2, 2), keep=(0,))
    return out


def certification_correlations(strategy: DeviceStrategy, tol: float = TOL) -> CorrelationTable:
    """Exact tripartite distributions over all certification inputs.

    For Bob inputs 1..6 the joint probability factorises as
    Tr[N_b T1(a,x)] * Tr[T2(c,z)] with T1/T2 the per-link effective
    operators, because those measurements act on B0 alone; for the joint
    input the (B0, B) element is traced against T1 (x) T2 directly.
    """
    strategy.validate(tol)
    t1 = _alice_link_effects(strategy)
    t2 = _charlie_link_effects(strategy)
    probs: dict[tuple, dict[tuple, float]] = {}
    bob_inputs = (DIAMOND,) + BOB_SINGLE_INPUTS
    for x, y, z in product(ALICE_INPUTS, bob_inputs, CHARLIE_INPUTS):
        dist: dict[tuple, float] = {}
        if y == DIAMOND:
            for a in (1, -1):
                for c in (1, -1):
                    joint_link = kron(t1[(a, x)], t2[(c, z)])
                    for b, op in strategy.bob_joint.items():
                        dist[(a, b, c)] = float(np.einsum("ij,ji->", op, joint_link).real)
        else:
            for a in (1, -1):
                for c in (1, -1):
                    w_c = float(np.trace(t2[(c, z)]).real)
                    for b, op in strategy.bob_single[y].items():
                        p = float(np.einsum("ij,ji->", op, t1[(a, x)]).real) * w_c
                        dist[(a, b, c)] = p
        probs[(x, y, z)] = dist
    return CorrelationTable(probs, tol=tol)


def cell_effects(strategy: DeviceStrategy, tol: float = TOL) -> dict[tuple[int, int, int], np.ndarray]:
    """Effective POVM elements on the target slot B, keyed by (a, x, b).

    F(a, x, b) satisfies Tr[F rho] = p(a, b | x, joint) for any target rho;
    summing F over (a, b) at fixed x gives the identity.
    """
    strategy.validate(tol)
    t1 = _alice_link_effects(strategy)
    effects = {}
    for (a, x), left in t1.items():
        padded = kron(left, IDENTITY_2)
        for b, op in strategy.bob_joint.items():
            effects[(a, x, b)] = partial_trace(op @ padded, (2, 2), keep=(1,))
    return effects


def discrimination_correlations(
    strategy: DeviceStrategy, target: np.ndarray, tol: float = TOL
) -> CorrelationTable:
    """Exact distributions p(a, b | x, joint) with ``target`` in the B slot."""
    target = validate_density(target, tol, name="target")
    if target.shape != (2, 2):
        raise ValidationError("single-cell target must be a one-qubit state")
    effects = cell_effects(strategy, tol)
    probs: dict[tuple, dict[tuple, float]] = {}
    for x in ALICE_INPUTS:
        dist = {
            (a, b): float(np.einsum("ij,ji->", effects[(a, x, b)], target).real)
            for a in (1, -1)
            for b in JOINT_OUTCOMES
        }
        probs[(x, DIAMOND)] = dist
    return CorrelationTable(probs, tol=tol)


@dataclass(frozen=True)
class QubitNetwork:
    """One certification cell per target qubit plus the shared N-qubit target."""

    cells: tuple[DeviceStrategy, ...]
    target: np.ndarray

    def __post_init__(self):
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValidationError("network needs at least one cell")
        target = validate_density(self.target, name="network target")
        if qubit_count(target.shape[0]) != len(cells):
            raise ValidationError(
                f"target spans {qubit_count(target.shape[0])} qubits "
                f"but the network has {len(cells)} cells"
            )
        object.__setattr__(self, "target", target)


def network_certification_correlations(
    net: QubitNetwork, tol: float = TOL
) -> tuple[CorrelationTable, ...]:
    """Per-cell certification tables.

    The joint tripartite distribution factorises across cells, so the cells
    are certified independently; a single joint table over all cells is
    never materialised.
    """
    return tuple(certification_correlations(cell, tol) for cell in net.cells)


def network_discrimination_correlations(
    net: QubitNetwork, max_cells: int = MAX_CELLS, tol: float = TOL
) -> CorrelationTable:
    """Exact distributions p(a_vec, b_vec | x_vec, joint) for an N-cell network.

    Inputs and outcomes are tuples with one component per cell; Bob's input
    is the all-joint tuple.  Computed blockwise from per-cell effective
    POVMs, tensored only across the N target qubits.
    """
    n = len(net.cells)
    if n > max_cells:
        raise ResourceLimitError(f"{n} cells exceed the configured cap of {max_cells}")
    per_cell = [cell_effects(cell, tol) for cell in net.cells]
    joint_in = (DIAMOND,) * n
    probs: dict[tuple, dict[tuple, float]] = {}
    for xs in product(ALICE_INPUTS, repeat=n):
        dist: dict[tuple, float] = {}
        for a_vec in product((1, -1), repeat=n):
            for b_vec in product(JOINT_OUTCOMES, repeat=n):
                effect = kron(*[
                    per_cell[k][(a_vec[k], xs[k], b_vec[k])] for k in range(n)
                ])
                dist[(a_vec, b_vec)] = float(np.einsum("ij,ji->", effect, net.target).real)
        probs[(xs, joint_in)] = dist
    return CorrelationTable(probs, tol=tol)


@dataclass(frozen=True)
class CountsTable:
    """Finite-shot counts per (input tuple, outcome tuple), with provenance."""

    shots: int
    counts: dict[tuple, dict[tuple, int]]
    seed: int
    source_outcomes: dict[tuple, tuple] = field(default_factory=dict, repr=False)


def _input_seed(seed: int, inputs: tuple) -> np.random.Generator:
    """Deterministic per-input-tuple stream so sampling order never matters."""
    flat: list[int] = [int(seed)]
    for component in inputs:
        if isinstance(component, tuple):
            flat.append(len(component))
            flat.extend(int(v) for v in component)
        else:
            flat.append(1)
            flat.append(int(component))
    return np.random.default_rng(np.random.SeedSequence(flat))


def sample_counts(table: CorrelationTable, shots_per_input: int, seed: int) -> CountsTable:
    """Multinomial counts: ``shots_per_input`` rounds for every input tuple."""
    shots = int(shots_per_input)
    if shots < 1:
        raise ValidationError(f"shots_per_input must be >= 1, got {shots_per_input!r}")
    if int(seed) < 0:
        raise ValidationError("seed must be a non-negative integer")
    counts: dict[tuple, dict[tuple, int]] = {}
    outcome_order: dict[tuple, tuple] = {}
    for inputs in table.input_tuples():
        outcomes = table.outcomes_for(inputs)
        weights = np.array([max(table.prob(inputs, o), 0.0) for o in outcomes])
        weights = weights / weights.sum()
        rng = _input_seed(int(seed), inputs)
        drawn = rng.multinomial(shots, weights)
        counts[inputs] = {o: int(k) for o, k in zip(outcomes, drawn)}
        outcome_order[inputs] = outcomes
    return CountsTable(shots=shots, counts=counts, seed=int(seed), source_outcomes=outcome_order)


def estimate_table(counts: CountsTable) -> CorrelationTable:
    """Relative-frequency estimate of the sampled table (keeps the shot count)."""
    probs = {
        inputs: {o: k / counts.shots for o, k in dist.items()}
        for inputs, dist in counts.counts.items()
    }
    return CorrelationTable(probs, shots=counts.shots)
