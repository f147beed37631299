"""Target-state readout from joint-measurement statistics and the decision
rules that pick an ensemble member from it.

Once devices are certified, the statistics at Alice setting ``x`` pool into
per-setting outcome distributions that coincide with direct Pauli
measurements of the hidden target: outcome ``a`` with joint outcome ``b``
counts towards readout outcome ``a`` when ``b`` is 0 or equals ``x`` and
towards ``-a`` otherwise.  Decisions compare the estimated readout against
each member's predicted readout on a small set of informative settings:

* non-conjugate pairs are separated by a z or x setting (device
  independent);
* conjugate pairs differ only in the y correlation, whose sign the devices
  leave open, so those need a trusted-probe result before setting 3 data
  can be used.

For N-qubit targets the setting is a label tuple, chosen to maximise the
gap between the members' Pauli coefficients, and the probe question is
asked per cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import acos, sqrt
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

from .correlations import DIAMOND, CorrelationTable
from .errors import (
    DegenerateEnsembleError,
    InconclusiveError,
    MdiRequiredError,
    UncertifiedDevicesError,
    ValidationError,
)
from .qubits import (
    TOL,
    conjugate_entries,
    is_pure,
    kron,
    pauli_coefficients,
    pauli_projector,
    qubit_count,
    validate_density,
)

if TYPE_CHECKING:  # pragma: no cover
    from .certify import CertificationReport, ProbeResult

DI = "DI"
MDI = "MDI"


@dataclass(frozen=True)
class PauliReadout:
    """Per-setting outcome distributions of the hidden target.

    ``settings`` maps a setting label (int, or tuple of ints for N-qubit
    targets) to {outcome: probability}.  ``shots`` is the per-input shot
    count of the source table, or None for exact readouts.
    """

    settings: Mapping
    shots: int | None

    def prob(self, outcome, setting) -> float:
        try:
            dist = self.settings[setting]
        except KeyError:
            raise ValidationError(f"readout has no setting {setting!r}") from None
        return dist.get(outcome, 0.0)


def _readout_sign(a: int, joint: int, setting: int) -> int:
    """Effective outcome sign of category (a, joint) at a given setting."""
    return a if joint in (0, setting) else -a


def extract_readout(table: CorrelationTable) -> PauliReadout:
    """Pool the four joint-outcome categories of each setting into a readout.

    Accepts single-cell tables (integer setting labels, joint input
    :data:`~discrimnet.correlations.DIAMOND`) and N-cell tables (tuple
    labels, all-joint input), exact or estimated.
    """
    if table.parties != 2:
        raise ValidationError("readout extraction expects a two-party table")
    settings: dict = {}
    for inputs in table.input_tuples():
        x, y = inputs
        if isinstance(x, tuple):
            if y != (DIAMOND,) * len(x):
                raise ValidationError(f"second input must be all-joint, got {y!r}")
            dist: dict = {}
            for (a_vec, b_vec) in table.outcomes_for(inputs):
                pooled = tuple(
                    _readout_sign(a, b, s) for a, b, s in zip(a_vec, b_vec, x)
                )
                dist[pooled] = dist.get(pooled, 0.0) + table.prob(inputs, (a_vec, b_vec))
        else:
            if y != DIAMOND:
                raise ValidationError(f"second input must be the joint input, got {y!r}")
            dist = {}
            for (a, b) in table.outcomes_for(inputs):
                pooled = _readout_sign(a, b, x)
                dist[pooled] = dist.get(pooled, 0.0) + table.prob(inputs, (a, b))
        settings[x] = dist
    return PauliReadout(settings=settings, shots=table.shots)


def predicted_readout(rho: np.ndarray, settings: Iterable) -> dict:
    """Exact readout distributions a certified network produces for ``rho``."""
    rho = validate_density(rho)
    out: dict = {}
    for setting in settings:
        if isinstance(setting, tuple):
            dist = {}
            for a_vec in product((1, -1), repeat=len(setting)):
                proj = kron(*[pauli_projector(a, s) for a, s in zip(a_vec, setting)])
                dist[a_vec] = float(np.einsum("ij,ji->", proj, rho).real)
        else:
            dist = {
                a: float(np.einsum("ij,ji->", pauli_projector(a, setting), rho).real)
                for a in (1, -1)
            }
        out[setting] = dist
    return out


def state_angles(rho: np.ndarray, tol: float = TOL) -> tuple[float, float]:
    """Recover (omega, theta) of a pure qubit state cos(w)|0> + e^{i t} sin(w)|1>."""
    rho = validate_density(rho, tol)
    if rho.shape != (2, 2) or not is_pure(rho, tol):
        raise ValidationError("state angles are defined for pure one-qubit states")
    omega = acos(min(1.0, sqrt(max(float(rho[0, 0].real), 0.0))))
    off = complex(rho[1, 0])
    theta = float(np.angle(off)) if abs(off) > tol else 0.0
    return omega, theta % (2.0 * np.pi)


def pauli_bias(rho1: np.ndarray, rho2: np.ndarray) -> tuple[float, float, float]:
    """Summed readout bias of a pure pair per setting, in closed form.

    Component k is the total variation between the setting-k readout
    distributions of the two states:

        bias_1 = 2 |cos^2(w1) - cos^2(w2)|
        bias_2 = |Re(e^{-i t1} sin(2 w1) - e^{-i t2} sin(2 w2))|
        bias_3 = |Im(e^{-i t1} sin(2 w1) - e^{-i t2} sin(2 w2))|

    Raises :class:`DegenerateEnsembleError` for identical states.
    """
    w1, t1 = state_angles(rho1)
    w2, t2 = state_angles(rho2)
    cross = np.exp(-1j * t1) * np.sin(2 * w1) - np.exp(-1j * t2) * np.sin(2 * w2)
    d1 = 2.0 * abs(np.cos(w1) ** 2 - np.cos(w2) ** 2)
    d2 = abs(cross.real)
    d3 = abs(cross.imag)
    if max(d1, d2, d3) <= TOL:
        raise DegenerateEnsembleError("states are identical within tolerance")
    return float(d1), float(d2), float(d3)


def pauli_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Half the largest per-setting bias; positive for any distinct pure pair."""
    return max(pauli_bias(rho1, rho2)) / 2.0


def choose_setting(rho1: np.ndarray, rho2: np.ndarray, threshold: float = TOL) -> tuple[int, str]:
    """Best readout setting for a pure pair and the mode it can be used in.

    When the z or x bias clears ``threshold`` the larger of the two decides
    (ties prefer setting 1) and the mode is device independent; otherwise
    the pair is conjugate, setting 3 is forced and a probe is required.
    """
    d1, d2, _ = pauli_bias(rho1, rho2)
    if max(d1, d2) > threshold:
        return (1, DI) if d1 >= d2 else (2, DI)
    return 3, MDI


@dataclass(frozen=True)
class Decision:
    """Outcome of a discrimination run."""

    chosen_index: int
    used_settings: tuple
    mode: str
    margin: float


def _check_certification(certification: "CertificationReport | None") -> None:
    if certification is not None and not certification.passed:
        raise UncertifiedDevicesError(
            "devices failed certification; discrimination output would be meaningless"
        )


def _validate_ensemble(ensemble: Sequence, n_qubits: int | None = None) -> list[np.ndarray]:
    members = []
    total = 0.0
    for prior, rho in ensemble:
        prior = float(prior)
        if prior < -TOL or prior > 1.0 + TOL:
            raise ValidationError(f"prior {prior} out of [0, 1]")
        total += prior
        rho = validate_density(rho)
        if not is_pure(rho):
            raise ValidationError("ensemble members must be pure states")
        if n_qubits is not None and qubit_count(rho.shape[0]) != n_qubits:
            raise ValidationError("ensemble members must all span the same qubit count")
        members.append(rho)
    if len(members) < 2:
        raise ValidationError("ensemble needs at least two members")
    if abs(total - 1.0) > 1e-6:
        raise ValidationError(f"priors sum to {total}, expected 1")
    return members


def _distribution_distance(est: Mapping, predicted: Mapping, settings) -> float:
    gap = 0.0
    for setting in settings:
        for outcome, p in predicted[setting].items():
            gap = max(gap, abs(est[setting].get(outcome, 0.0) - p))
    return gap


def _margin_and_choice(est: dict, predictions: list[dict], settings) -> tuple[int, float]:
    distances = [_distribution_distance(est, pred, settings) for pred in predictions]
    chosen = int(np.argmin(distances))
    margin = min(d for j, d in enumerate(distances) if j != chosen)
    return chosen, float(margin)


def _refuse_if_noisy(margin: float, shots: int | None) -> None:
    # Conservative binomial bound on one readout frequency: sd <= 0.5/sqrt(shots).
    if shots is not None and margin < 4.0 * 0.5 / sqrt(shots):
        raise InconclusiveError(
            f"margin {margin:.4g} is below the 4-sigma noise floor at {shots} shots"
        )


def discriminate(
    readout: PauliReadout,
    ensemble: Sequence,
    probe: "ProbeResult | None" = None,
    certification: "CertificationReport | None" = None,
    threshold: float = TOL,
) -> Decision:
    """Pick the ensemble member whose predicted readout is nearest the estimate.

    ``ensemble`` is a sequence of (prior, density matrix) pairs of distinct
    pure one-qubit states.  Every pairwise comparison contributes its best
    setting; if any pair is conjugate a ``probe`` result must be supplied,
    and its sign is applied to the setting-3 data before comparing.  A
    certification report, when given, must have passed.  Finite-shot
    readouts whose decision margin falls below four standard errors are
    refused as inconclusive.
    """
    _check_certification(certification)
    members = _validate_ensemble(ensemble, n_qubits=1)
    chosen_settings = set()
    any_mdi = False
    for i, j in combinations(range(len(members)), 2):
        setting, mode = choose_setting(members[i], members[j], threshold)
        chosen_settings.add(setting)
        any_mdi = any_mdi or mode == MDI
    if any_mdi and probe is None:
        raise MdiRequiredError(
            "ensemble contains a conjugate pair; supply a trusted-probe result"
        )
    used = tuple(sorted(chosen_settings))
    est = {s: {a: readout.prob(a, s) for a in (1, -1)} for s in used}
    if 3 in used and probe is not None and probe.sign < 0:
        est[3] = {a: readout.prob(-a, 3) for a in (1, -1)}
    predictions = [predicted_readout(rho, used) for rho in members]
    chosen, margin = _margin_and_choice(est, predictions, used)
    _refuse_if_noisy(margin, readout.shots)
    return Decision(
        chosen_index=chosen,
        used_settings=used,
        mode=MDI if any_mdi else DI,
        margin=margin,
    )


def _coefficient_gap_argmax(c1, c2, labels: tuple[int, ...], n: int) -> tuple[tuple[int, ...], float]:
    best_labels, best_gap = None, -1.0
    for tup in product(labels, repeat=n):
        gap = abs(c1[tup] - c2[tup])
        if gap > best_gap + TOL:
            best_labels, best_gap = tup, gap
    return best_labels, best_gap


def _readout_gap_argmax(phi1, phi2, labels: tuple[int, ...], n: int) -> tuple[tuple[int, ...], float]:
    best_labels, best_gap = None, -1.0
    for tup in product(labels, repeat=n):
        pred1 = predicted_readout(phi1, [tup])[tup]
        pred2 = predicted_readout(phi2, [tup])[tup]
        gap = max(abs(pred1[a] - pred2[a]) for a in pred1)
        if gap > best_gap + TOL:
            best_labels, best_gap = tup, gap
    return best_labels, best_gap


def select_setting_tuple(
    phi1: np.ndarray, phi2: np.ndarray, threshold: float = TOL
) -> tuple[tuple[int, ...], str]:
    """Setting tuple separating two N-qubit pure states, and the usable mode.

    Primary rule: maximise the gap between the states' Pauli coefficients
    over tuples with labels in {1, 2} (device independent), falling back to
    labels {1, 2, 3} for conjugate pairs (probe required).  Lexicographic
    order breaks ties.  Pairs whose full-weight coefficients all agree are
    still separated through the readout distributions themselves, which
    carry the marginal information the coefficients miss.
    """
    phi1 = validate_density(phi1)
    phi2 = validate_density(phi2)
    if phi1.shape != phi2.shape:
        raise ValidationError("states must share one qubit count")
    if not (is_pure(phi1) and is_pure(phi2)):
        raise ValidationError("setting selection expects pure states")
    n = qubit_count(phi1.shape[0])
    c1 = pauli_coefficients(phi1)
    c2 = pauli_coefficients(phi2)
    tup, gap = _coefficient_gap_argmax(c1, c2, (1, 2), n)
    if gap > threshold:
        return tup, DI
    conjugate_pair = bool(np.max(np.abs(phi1 - conjugate_entries(phi2))) <= threshold)
    if not conjugate_pair:
        tup, gap = _readout_gap_argmax(phi1, phi2, (1, 2), n)
        if gap > threshold:
            return tup, DI
    tup, gap = _coefficient_gap_argmax(c1, c2, (1, 2, 3), n)
    if gap > threshold:
        return tup, MDI
    tup, gap = _readout_gap_argmax(phi1, phi2, (1, 2, 3), n)
    if gap > threshold:
        return tup, MDI
    raise DegenerateEnsembleError("states are identical within tolerance")


def coefficient_from_readout(readout: PauliReadout, setting) -> float:
    """Pauli coefficient at a full-weight setting, rebuilt from the readout.

    The coefficient is the expectation of the product of the +/-1 outcomes;
    full outcome coverage at the setting is required.
    """
    setting_key = tuple(setting) if isinstance(setting, (tuple, list)) else setting
    dist = readout.settings.get(setting_key)
    if dist is None:
        raise ValidationError(f"readout has no setting {setting_key!r}")
    n = len(setting_key) if isinstance(setting_key, tuple) else 1
    value = 0.0
    for a_vec in product((1, -1), repeat=n):
        key = a_vec if isinstance(setting_key, tuple) else a_vec[0]
        if key not in dist:
            raise ValidationError(f"readout misses outcome {key!r} at setting {setting_key!r}")
        value += float(np.prod(a_vec)) * dist[key]
    return value


def multiqubit_distance(phi1: np.ndarray, phi2: np.ndarray) -> float:
    """Half the worst-setting total-variation gap over full-weight settings.

    Positive for any two distinct N-qubit states: the readout distributions
    over label tuples in {1, 2, 3}**n pin the state down completely.
    """
    phi1 = validate_density(phi1)
    phi2 = validate_density(phi2)
    n = qubit_count(phi1.shape[0])
    worst = 0.0
    for tup in product((1, 2, 3), repeat=n):
        pred1 = predicted_readout(phi1, [tup])[tup]
        pred2 = predicted_readout(phi2, [tup])[tup]
        worst = max(worst, sum(abs(pred1[a] - pred2[a]) for a in pred1))
    return worst / 2.0


def discriminate_multiqubit(
    readout: PauliReadout,
    ensemble: Sequence,
    probes: "Sequence[ProbeResult] | None" = None,
    certification: "CertificationReport | None" = None,
    threshold: float = TOL,
) -> Decision:
    """N-qubit analogue of :func:`discriminate` with one probe per cell.

    Sign corrections apply sitewise: wherever a used setting tuple carries
    label 3 at a cell whose probe resolved to -1, that cell's readout
    outcome is flipped before comparing against predictions.
    """
    _check_certification(certification)
    members = _validate_ensemble(ensemble)
    n = qubit_count(members[0].shape[0])
    for rho in members[1:]:
        if rho.shape != members[0].shape:
            raise ValidationError("ensemble members must share one qubit count")
    chosen_settings = set()
    any_mdi = False
    for i, j in combinations(range(len(members)), 2):
        tup, mode = select_setting_tuple(members[i], members[j], threshold)
        chosen_settings.add(tup)
        any_mdi = any_mdi or mode == MDI
    if any_mdi and probes is None:
        raise MdiRequiredError(
            "ensemble contains a conjugate pair; supply per-cell trusted-probe results"
        )
    signs = tuple(1 for _ in range(n)) if probes is None else tuple(p.sign for p in probes)
    if len(signs) != n:
        raise ValidationError(f"expected {n} probe results, got {len(signs)}")
    used = tuple(sorted(chosen_settings))
    est: dict = {}
    for tup in used:
        if tup not in readout.settings:
            raise ValidationError(f"readout has no setting {tup!r}")
        flip = tuple(k for k in range(n) if tup[k] == 3 and signs[k] < 0)
        dist = {}
        for a_vec, p in readout.settings[tup].items():
            fixed = tuple(-a if k in flip else a for k, a in enumerate(a_vec))
            dist[fixed] = p
        est[tup] = dist
    predictions = [predicted_readout(rho, used) for rho in members]
    chosen, margin = _margin_and_choice(est, predictions, used)
    _refuse_if_noisy(margin, readout.shots)
    return Decision(
        chosen_index=chosen,
        used_settings=used,
        mode=MDI if any_mdi else DI,
        margin=margin,
    )
