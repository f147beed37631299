"""Joint conditional outcome distributions and the CHSH-family evaluators.

A :class:`CorrelationTable` stores, for every tuple of measurement inputs
(one entry per party), the probability of every tuple of outcomes.  Exact
tables come from trace computations; estimated tables keep the per-input
shot count used to produce them so downstream consumers can attach error
bars.  Input and outcome labels are integers, or tuples of integers for
collective (multi-cell) parties.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .errors import ConditioningError, ValidationError
from .qubits import TOL, kron, validate_density

#: Input label reserved for the four-outcome joint two-qubit measurement.
DIAMOND = 0

#: Triple-CHSH term layout (m, n, p, q): each of the three first-party inputs
#: appears in two of the three CHSH combinations.
THREE_CHSH_TERMS = ((1, 2, 1, 2), (1, 3, 4, 3), (2, 3, 6, 5))


class CorrelationTable:
    """Conditional distributions p(outcomes | inputs) for independent parties."""

    def __init__(self, probs, shots: int | None = None, tol: float = TOL):
        if not probs:
            raise ValidationError("correlation table must not be empty")
        n_parties = None
        table: dict[tuple, dict[tuple, float]] = {}
        for inputs, dist in probs.items():
            inputs = tuple(inputs)
            if n_parties is None:
                n_parties = len(inputs)
            elif len(inputs) != n_parties:
                raise ValidationError("inconsistent party count across input tuples")
            total = 0.0
            clean: dict[tuple, float] = {}
            for outcomes, p in dist.items():
                outcomes = tuple(outcomes)
                if len(outcomes) != n_parties:
                    raise ValidationError("outcome tuple length does not match party count")
                p = float(p)
                if p < -tol or p > 1.0 + tol:
                    raise ValidationError(f"probability {p} for {inputs}/{outcomes} out of [0, 1]")
                clean[outcomes] = p
                total += p
            if abs(total - 1.0) > max(tol, 1e-6):
                raise ValidationError(f"outcome probabilities for input {inputs} sum to {total}")
            table[inputs] = clean
        self._table = table
        self._n_parties = n_parties
        self.shots = None if shots is None else int(shots)

    @property
    def parties(self) -> int:
        return self._n_parties

    def input_tuples(self) -> tuple[tuple, ...]:
        return tuple(sorted(self._table))

    def outcomes_for(self, inputs) -> tuple[tuple, ...]:
        return tuple(sorted(self._dist(inputs)))

    def prob(self, inputs, outcomes) -> float:
        """Probability of an outcome tuple; unknown outcomes of a known input are 0."""
        return self._dist(inputs).get(tuple(outcomes), 0.0)

    def _dist(self, inputs) -> dict[tuple, float]:
        try:
            return self._table[tuple(inputs)]
        except KeyError:
            raise ValidationError(f"no entry for input tuple {tuple(inputs)!r}") from None

    def marginal(self, keep) -> "CorrelationTable":
        """Marginal table over a subset of parties.

        Outcomes of dropped parties are summed out; their input choices are
        averaged with uniform weight, which pools statistics when the
        marginal is input-independent.  Shot counts are scaled by the number
        of pooled input variants.
        """
        keep = tuple(sorted({int(k) for k in keep}))
        if not keep or any(k < 0 or k >= self._n_parties for k in keep):
            raise ValidationError(f"keep={keep} invalid for {self._n_parties} parties")
        groups: dict[tuple, dict[tuple, float]] = {}
        counts: dict[tuple, int] = {}
        for inputs, dist in self._table.items():
            kept_in = tuple(inputs[i] for i in keep)
            acc = groups.setdefault(kept_in, {})
            counts[kept_in] = counts.get(kept_in, 0) + 1
            for outcomes, p in dist.items():
                kept_out = tuple(outcomes[i] for i in keep)
                acc[kept_out] = acc.get(kept_out, 0.0) + p
        variants = set(counts.values())
        if len(variants) != 1:
            raise ValidationError("uneven input coverage prevents uniform pooling")
        n_var = variants.pop()
        probs = {
            inp: {out: p / n_var for out, p in dist.items()} for inp, dist in groups.items()
        }
        shots = None if self.shots is None else self.shots * n_var
        return CorrelationTable(probs, shots=shots)


def _validate_povm(ops: dict, tol: float, where: str) -> int:
    dims = {np.asarray(op).shape for op in ops.values()}
    if len(dims) != 1 or any(len(s) != 2 or s[0] != s[1] for s in dims):
        raise ValidationError(f"{where}: POVM elements must share one square shape")
    dim = next(iter(dims))[0]
    total = np.zeros((dim, dim), dtype=complex)
    for outcome, op in ops.items():
        op = np.asarray(op, dtype=complex)
        if np.max(np.abs(op - op.conj().T)) > tol:
            raise ValidationError(f"{where}: element for outcome {outcome!r} is not Hermitian")
        if np.min(np.linalg.eigvalsh(op)) < -tol:
            raise ValidationError(f"{where}: element for outcome {outcome!r} is not PSD")
        total += op
    if np.max(np.abs(total - np.eye(dim))) > max(tol, 1e-7):
        raise ValidationError(f"{where}: elements do not sum to the identity")
    return dim


def measurement_correlations(state, parties, tol: float = TOL) -> CorrelationTable:
    """Exact outcome distributions for independent parties measuring ``state``.

    ``parties`` is a sequence with one entry per party; each entry maps an
    input label to a POVM given as {outcome label: operator}.  Party
    operators are tensored in sequence order, which must match the tensor
    order of ``state``.
    """
    state = validate_density(state, tol)
    dims = []
    for idx, party in enumerate(parties):
        party_dims = set()
        for inp, ops in party.items():
            party_dims.add(_validate_povm(ops, tol, f"party {idx}, input {inp!r}"))
        if len(party_dims) != 1:
            raise ValidationError(f"party {idx}: inputs act on different dimensions")
        dims.append(party_dims.pop())
    if int(np.prod(dims)) != state.shape[0]:
        raise ValidationError(
            f"party dimensions {tuple(dims)} do not match state dimension {state.shape[0]}"
        )
    probs: dict[tuple, dict[tuple, float]] = {}
    for inputs in product(*[sorted(party) for party in parties]):
        povms = [party[inp] for party, inp in zip(parties, inputs)]
        dist: dict[tuple, float] = {}
        for outcomes in product(*[sorted(povm) for povm in povms]):
            joint = kron(*[povm[out] for povm, out in zip(povms, outcomes)])
            dist[outcomes] = float(np.einsum("ij,ji->", joint, state).real)
        probs[inputs] = dist
    return CorrelationTable(probs, tol=tol)


def _binary_outcomes(table: CorrelationTable, inputs) -> None:
    for outcomes in table.outcomes_for(inputs):
        if any(o not in (1, -1) for o in outcomes):
            raise ValidationError(
                f"correlator needs +/-1 outcomes, input {inputs} has {outcomes}"
            )


def correlator(table: CorrelationTable, x, y) -> float:
    """Product expectation of two +/-1 outcomes at inputs (x, y) of a two-party table."""
    if table.parties != 2:
        raise ValidationError("correlator expects a two-party table")
    _binary_outcomes(table, (x, y))
    return sum(a * b * table.prob((x, y), (a, b)) for a in (1, -1) for b in (1, -1))


def chsh(table: CorrelationTable, m, n, p, q) -> float:
    """CHSH combination <A_m B_p> + <A_m B_q> + <A_n B_p> - <A_n B_q>."""
    return (
        correlator(table, m, p)
        + correlator(table, m, q)
        + correlator(table, n, p)
        - correlator(table, n, q)
    )


def three_chsh(table: CorrelationTable, terms=THREE_CHSH_TERMS) -> float:
    """Sum of three CHSH combinations; classically bounded by 6, quantumly by 6*sqrt(2)."""
    return sum(chsh(table, *term) for term in terms)


def conditional_correlator(
    table: CorrelationTable, x, z, joint_outcome, joint_input=DIAMOND
) -> float:
    """First/third-party correlator conditioned on the joint-measurement outcome.

    Expects a three-party table whose middle party supports ``joint_input``.
    Raises :class:`ConditioningError` when the conditioning outcome has zero
    probability at the requested inputs.
    """
    if table.parties != 3:
        raise ValidationError("conditional correlator expects a three-party table")
    inputs = (x, joint_input, z)
    weight = 0.0
    acc = 0.0
    for outcomes in table.outcomes_for(inputs):
        a, b, c = outcomes
        if b != joint_outcome:
            continue
        p = table.prob(inputs, outcomes)
        weight += p
        acc += a * c * p
    if weight <= 0.0:
        raise ConditioningError(
            f"joint outcome {joint_outcome!r} has zero probability at inputs {inputs}"
        )
    return acc / weight


def conditional_chsh(
    table: CorrelationTable,
    joint_outcome: int,
    alice_inputs=(1, 2),
    charlie_inputs=(1, 2),
    joint_input=DIAMOND,
) -> float:
    """CHSH form for statistics conditioned on one joint-measurement outcome.

    The sign layout depends on the conditioning outcome: outcomes 0 and 1 use
    the two standard CHSH sign patterns, outcomes 2 and 3 their negatives.
    With that convention all four forms peak at 2*sqrt(2) simultaneously on
    the ideal strategy.
    """
    if joint_outcome not in (0, 1, 2, 3):
        raise ValidationError(f"joint outcome must be in 0..3, got {joint_outcome!r}")
    x1, x2 = alice_inputs
    z1, z2 = charlie_inputs
    e = {
        (x, z): conditional_correlator(table, x, z, joint_outcome, joint_input)
        for x in (x1, x2)
        for z in (z1, z2)
    }
    form_0 = e[(x1, z1)] + e[(x1, z2)] + e[(x2, z1)] - e[(x2, z2)]
    form_1 = e[(x1, z1)] + e[(x1, z2)] - e[(x2, z1)] + e[(x2, z2)]
    return {0: form_0, 1: form_1, 2: -form_1, 3: -form_0}[joint_outcome]
