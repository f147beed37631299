"""Certification gate on observed correlations, plus the trusted probe that
resolves the sign ambiguity of the third Pauli axis.

The gate is black box: it sees a correlation table, never the devices.  It
passes when the triple-CHSH combination reaches its quantum maximum
6*sqrt(2) and each of the four joint-outcome-conditioned CHSH forms reaches
2*sqrt(2), all within the configured tolerance.  Certification data cannot
distinguish a strategy from its entrywise conjugate; conjugate target-state
pairs therefore need one trusted probe state, measured with the third
setting, to fix which sign of the y axis the devices implement.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .correlations import CorrelationTable, conditional_chsh, correlator, three_chsh
from .discriminate import extract_readout, pauli_bias
from .errors import ConditioningError, InconclusiveError, ValidationError
from .network import DeviceStrategy, discrimination_correlations, estimate_table, sample_counts
from .qubits import TOL

THREE_CHSH_QUANTUM_MAX = 6.0 * sqrt(2.0)
THREE_CHSH_CLASSICAL_BOUND = 6.0
CONDITIONAL_CHSH_QUANTUM_MAX = 2.0 * sqrt(2.0)

#: Per-correlator input pairs entering the triple-CHSH combination.
_THREE_CHSH_PAIRS = (
    (1, 1), (1, 2), (2, 1), (2, 2),
    (1, 4), (1, 3), (3, 4), (3, 3),
    (2, 6), (2, 5), (3, 6), (3, 5),
)


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of the certification gate.

    ``shots`` is None for exact tables.  ``passed`` is true when the
    triple-CHSH value and all four conditional forms reach their quantum
    maxima within ``tolerance``.
    """

    three_chsh: float
    conditional_chsh: tuple[float, float, float, float]
    tolerance: float
    passed: bool
    shots: int | None

    def as_mapping(self) -> dict[str, object]:
        out: dict[str, object] = {"three_chsh": self.three_chsh}
        for b, value in enumerate(self.conditional_chsh):
            out[f"conditional_chsh_{b}"] = value
        out["tolerance"] = self.tolerance
        out["shots"] = "exact" if self.shots is None else self.shots
        out["passed"] = self.passed
        return out


def _three_chsh_standard_error(ab_table: CorrelationTable) -> float:
    """Propagated multinomial standard error of the triple-CHSH estimate."""
    shots = ab_table.shots
    if not shots:
        raise ValidationError("standard error needs a table with a shot count")
    var = 0.0
    for x, y in _THREE_CHSH_PAIRS:
        e = correlator(ab_table, x, y)
        var += max(1.0 - e * e, 0.0) / shots
    return sqrt(var)


def certify(table: CorrelationTable, tolerance: float | None = None) -> CertificationReport:
    """Run the certification gate on a tripartite correlation table.

    ``tolerance`` defaults to the exact-arithmetic tolerance for exact
    tables and to four estimated standard errors of the triple-CHSH value
    for finite-shot tables.
    """
    if table.parties != 3:
        raise ValidationError("certification expects a three-party table")
    ab = table.marginal((0, 1))
    beta = three_chsh(ab)
    gammas = []
    for b in range(4):
        try:
            gammas.append(float(conditional_chsh(table, b)))
        except ConditioningError:
            # a joint outcome that never occurs cannot be certified
            gammas.append(float("nan"))
    gammas = tuple(gammas)
    if tolerance is None:
        tolerance = TOL if table.shots is None else 4.0 * _three_chsh_standard_error(ab)
    passed = beta >= THREE_CHSH_QUANTUM_MAX - tolerance and all(
        g >= CONDITIONAL_CHSH_QUANTUM_MAX - tolerance for g in gammas
    )
    return CertificationReport(
        three_chsh=float(beta),
        conditional_chsh=gammas,
        tolerance=float(tolerance),
        passed=bool(passed),
        shots=table.shots,
    )


def needs_trusted_probe(rho1: np.ndarray, rho2: np.ndarray, threshold: float = TOL) -> bool:
    """Whether discriminating the pair needs the trusted probe.

    True when the two z- and x-setting biases both vanish, i.e. the states
    differ only in their y correlation -- exactly the conjugate pairs the
    certification data cannot split.
    """
    d1, d2, _ = pauli_bias(rho1, rho2)
    return max(d1, d2) <= threshold


def trusted_probe_state() -> np.ndarray:
    """The trusted probe: +1 eigenstate of the y axis."""
    return np.array([[0.5, -0.5j], [0.5j, 0.5]])


@dataclass(frozen=True)
class ProbeResult:
    """Resolved sign of the third setting and the probe readout behind it."""

    sign: int
    outcome_distribution: tuple[float, float]


def run_trusted_probe(
    strategy: DeviceStrategy,
    shots: int | None = None,
    seed: int = 0,
    tol: float = TOL,
) -> ProbeResult:
    """Feed the trusted probe state through the network and read setting 3.

    The caller is responsible for certifying the devices first.  Returns
    sign +1 when the majority readout outcome on the probe is +1, -1 when
    it is -1.  With finite shots a split within four standard errors of
    50/50 raises :class:`InconclusiveError`.
    """
    table = discrimination_correlations(strategy, trusted_probe_state(), tol)
    if shots is not None:
        table = estimate_table(sample_counts(table, shots, seed))
    readout = extract_readout(table)
    p_plus = readout.prob(1, 3)
    p_minus = readout.prob(-1, 3)
    if shots is None:
        if abs(p_plus - p_minus) <= tol:
            raise InconclusiveError("probe readout is an exact 50/50 split")
    else:
        if abs(p_plus - 0.5) <= 2.0 / sqrt(shots):
            raise InconclusiveError(
                f"probe readout {p_plus:.4f} within statistical margin of 50/50"
            )
    sign = 1 if p_plus > p_minus else -1
    return ProbeResult(sign=sign, outcome_distribution=(float(p_plus), float(p_minus)))
