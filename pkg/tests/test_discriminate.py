import numpy as np
import pytest
from helpers import (
    KET_0,
    KET_1,
    KET_L,
    KET_PLUS,
    KET_R,
    SIGMA,
    angles_ket,
    haar_density,
    proj,
)

from discrimnet.certify import ProbeResult, certify, run_trusted_probe
from discrimnet.correlations import DIAMOND
from discrimnet.discriminate import (
    DI,
    MDI,
    choose_setting,
    coefficient_from_readout,
    discriminate,
    discriminate_multiqubit,
    extract_readout,
    multiqubit_distance,
    pauli_bias,
    pauli_distance,
    predicted_readout,
    select_setting_tuple,
    state_angles,
)
from discrimnet.errors import (
    DegenerateEnsembleError,
    InconclusiveError,
    MdiRequiredError,
    UncertifiedDevicesError,
    ValidationError,
)
from discrimnet.network import (
    QubitNetwork,
    certification_correlations,
    discrimination_correlations,
    estimate_table,
    network_discrimination_correlations,
    sample_counts,
    werner_strategy,
)
from discrimnet.qubits import bell_state, kron


def operational_bias(rho1, rho2):
    """Independent oracle: summed absolute readout bias per setting."""
    diff = rho1 - rho2
    out = []
    for axis in (1, 2, 3):
        total = 0.0
        for a in (1, -1):
            projector = (np.eye(2) + a * SIGMA[axis]) / 2
            total += abs(np.trace(projector @ diff).real)
        out.append(total)
    return tuple(out)


def exact_readout(strategy, rho):
    return extract_readout(discrimination_correlations(strategy, rho))


class TestExtractReadout:
    def test_ground_state(self, honest):
        readout = exact_readout(honest, proj(KET_0))
        assert readout.prob(1, 1) == pytest.approx(1.0)
        assert readout.prob(-1, 1) == pytest.approx(0.0, abs=1e-12)

    def test_circular_state_third_setting(self, honest):
        table = discrimination_correlations(honest, proj(KET_R))
        assert table.prob((3, DIAMOND), (1, 0)) == pytest.approx(0.25)
        readout = extract_readout(table)
        assert readout.prob(1, 3) == pytest.approx(1.0)

    def test_maximally_mixed(self, honest):
        readout = exact_readout(honest, np.eye(2) / 2)
        for x in (1, 2, 3):
            for a in (1, -1):
                assert readout.prob(a, x) == pytest.approx(0.5)

    def test_matches_direct_projector_probabilities(self, honest):
        rng = np.random.default_rng(31)
        for _ in range(10):
            rho = haar_density(rng, 2)
            readout = exact_readout(honest, rho)
            predicted = predicted_readout(rho, (1, 2, 3))
            for x in (1, 2, 3):
                for a in (1, -1):
                    assert readout.prob(a, x) == pytest.approx(predicted[x][a], abs=1e-9)

    def test_estimated_readout_keeps_shots(self, honest):
        table = discrimination_correlations(honest, proj(KET_PLUS))
        readout = extract_readout(estimate_table(sample_counts(table, 2000, seed=1)))
        assert readout.shots == 2000

    def test_needs_joint_input(self, honest_p1):
        with pytest.raises(ValidationError):
            extract_readout(honest_p1)


class TestBias:
    def test_orthogonal_poles(self):
        bias = pauli_bias(proj(KET_0), proj(KET_1))
        assert bias == pytest.approx((2.0, 0.0, 0.0), abs=1e-12)
        assert pauli_distance(proj(KET_0), proj(KET_1)) == pytest.approx(1.0)

    def test_circular_pair(self):
        bias = pauli_bias(proj(KET_R), proj(KET_L))
        assert bias == pytest.approx((0.0, 0.0, 2.0), abs=1e-12)

    def test_identical_states(self):
        with pytest.raises(DegenerateEnsembleError):
            pauli_bias(proj(KET_R), proj(KET_R))

    def test_closed_form_equals_operational_sum(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            rho1 = haar_density(rng, 2)
            rho2 = haar_density(rng, 2)
            closed = pauli_bias(rho1, rho2)
            oracle = operational_bias(rho1, rho2)
            assert closed == pytest.approx(oracle, abs=1e-9)

    def test_state_angles_round_trip(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            omega = rng.uniform(0, np.pi / 2)
            theta = rng.uniform(0, 2 * np.pi)
            w, t = state_angles(proj(angles_ket(omega, theta)))
            assert w == pytest.approx(omega, abs=1e-7)
            if 1e-6 < omega < np.pi / 2 - 1e-6:
                assert t % (2 * np.pi) == pytest.approx(theta, abs=1e-6)

    def test_rejects_mixed_states(self):
        with pytest.raises(ValidationError):
            pauli_bias(np.eye(2) / 2, proj(KET_0))


class TestChooseSetting:
    def test_pole_vs_equator_tie_breaks_low(self):
        assert choose_setting(proj(KET_0), proj(KET_PLUS)) == (1, DI)

    def test_circular_pair_is_probe_bound(self):
        assert choose_setting(proj(KET_R), proj(KET_L)) == (3, MDI)

    def test_real_pair_numeric(self):
        rho1 = proj(angles_ket(np.pi / 6, 0.0))
        rho2 = proj(angles_ket(np.pi / 3, 0.0))
        assert choose_setting(rho1, rho2) == (1, DI)


class TestDiscriminate:
    def test_exact_poles(self, honest):
        ensemble = [(0.5, proj(KET_0)), (0.5, proj(KET_1))]
        decision = discriminate(exact_readout(honest, proj(KET_0)), ensemble)
        assert decision.chosen_index == 0
        assert decision.margin == pytest.approx(1.0)
        assert decision.mode == DI
        assert decision.used_settings == (1,)

    def test_conjugate_pair_with_probe_under_conjugate_devices(self, conjugated):
        ensemble = [(0.5, proj(KET_R)), (0.5, proj(KET_L))]
        probe = run_trusted_probe(conjugated)
        for truth in (0, 1):
            readout = exact_readout(conjugated, ensemble[truth][1])
            decision = discriminate(readout, ensemble, probe=probe)
            assert decision.chosen_index == truth
            assert decision.mode == MDI

    def test_missing_probe_is_refused(self, honest):
        ensemble = [(0.5, proj(KET_R)), (0.5, proj(KET_L))]
        with pytest.raises(MdiRequiredError):
            discriminate(exact_readout(honest, proj(KET_R)), ensemble)

    def test_failed_certification_is_refused(self, honest):
        degraded = certify(certification_correlations(werner_strategy(0.8)))
        ensemble = [(0.5, proj(KET_0)), (0.5, proj(KET_1))]
        with pytest.raises(UncertifiedDevicesError):
            discriminate(exact_readout(honest, proj(KET_0)), ensemble, certification=degraded)

    def test_statistical_accuracy(self, honest):
        ensemble = [(0.5, proj(KET_0)), (0.5, proj(angles_ket(np.pi / 8, 0.0)))]
        correct = 0
        for seed in range(20):
            truth = seed % 2
            table = discrimination_correlations(honest, ensemble[truth][1])
            readout = extract_readout(estimate_table(sample_counts(table, 10**5, seed=seed)))
            decision = discriminate(readout, ensemble)
            correct += decision.chosen_index == truth
        assert correct == 20

    def test_noisy_margin_is_inconclusive(self, honest):
        close = [(0.5, proj(KET_0)), (0.5, proj(angles_ket(0.05, 0.0)))]
        table = discrimination_correlations(honest, proj(KET_0))
        readout = extract_readout(estimate_table(sample_counts(table, 25, seed=2)))
        with pytest.raises(InconclusiveError):
            discriminate(readout, close, threshold=1e-9)

    def test_three_member_ensemble(self, honest):
        ensemble = [
            (0.4, proj(KET_0)),
            (0.3, proj(KET_PLUS)),
            (0.3, proj(KET_R)),
        ]
        for truth in range(3):
            decision = discriminate(exact_readout(honest, ensemble[truth][1]), ensemble)
            assert decision.chosen_index == truth

    def test_bad_priors(self, honest):
        with pytest.raises(ValidationError):
            discriminate(
                exact_readout(honest, proj(KET_0)),
                [(0.9, proj(KET_0)), (0.9, proj(KET_1))],
            )


class TestSettingTupleSelection:
    def test_entangled_pair_separated_by_x_axis_pair(self):
        assert select_setting_tuple(bell_state(0), bell_state(1)) == ((2, 2), DI)

    def test_conjugate_product_pair_needs_probe(self):
        s1 = kron(proj(KET_R), proj(KET_0))
        s2 = kron(proj(KET_L), proj(KET_0))
        setting, mode = select_setting_tuple(s1, s2)
        assert mode == MDI
        assert 3 in setting

    def test_coefficient_blind_pair_falls_back_to_distributions(self):
        s00 = kron(proj(KET_0), proj(KET_0))
        s11 = kron(proj(KET_1), proj(KET_1))
        setting, mode = select_setting_tuple(s00, s11)
        assert mode == DI
        assert setting == (1, 1)

    def test_single_site_consistent_with_choose_setting(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            rho1 = haar_density(rng, 2)
            rho2 = haar_density(rng, 2)
            setting, mode = select_setting_tuple(rho1, rho2)
            scalar, scalar_mode = choose_setting(rho1, rho2)
            assert setting == (scalar,)
            assert mode == scalar_mode

    def test_identical_states_rejected(self):
        with pytest.raises(DegenerateEnsembleError):
            select_setting_tuple(bell_state(0), bell_state(0))


class TestCoefficients:
    def test_entangled_state_coefficient(self, honest):
        table = network_discrimination_correlations(QubitNetwork((honest, honest), bell_state(0)))
        readout = extract_readout(table)
        assert coefficient_from_readout(readout, (1, 1)) == pytest.approx(1.0)
        assert coefficient_from_readout(readout, (3, 3)) == pytest.approx(-1.0)

    def test_maximally_mixed_coefficients_vanish(self, honest):
        table = network_discrimination_correlations(QubitNetwork((honest, honest), np.eye(4) / 4))
        readout = extract_readout(table)
        for setting in [(1, 2), (2, 2), (3, 1)]:
            assert coefficient_from_readout(readout, setting) == pytest.approx(0.0, abs=1e-9)

    def test_sampled_coefficient_close(self, honest):
        table = discrimination_correlations(honest, proj(KET_PLUS))
        readout = extract_readout(estimate_table(sample_counts(table, 10**6, seed=6)))
        assert coefficient_from_readout(readout, 2) == pytest.approx(1.0, abs=5e-3)

    def test_incomplete_coverage_rejected(self):
        from discrimnet.discriminate import PauliReadout

        readout = PauliReadout(settings={(1, 1): {(1, 1): 1.0}}, shots=None)
        with pytest.raises(ValidationError):
            coefficient_from_readout(readout, (1, 1))


class TestMultiqubit:
    def test_distance_positive_for_random_pairs(self):
        rng = np.random.default_rng(51)
        for _ in range(20):
            phi1 = haar_density(rng, 4)
            phi2 = haar_density(rng, 4)
            assert multiqubit_distance(phi1, phi2) > 0

    def test_exact_decision_with_mixed_cells_and_probes(self, honest, conjugated):
        s1 = kron(proj(KET_R), proj(KET_0))
        s2 = kron(proj(KET_L), proj(KET_0))
        ensemble = [(0.5, s1), (0.5, s2)]
        probes = (run_trusted_probe(conjugated), run_trusted_probe(honest))
        for truth in (0, 1):
            net = QubitNetwork((conjugated, honest), ensemble[truth][1])
            readout = extract_readout(network_discrimination_correlations(net))
            decision = discriminate_multiqubit(readout, ensemble, probes=probes)
            assert decision.chosen_index == truth
            assert decision.mode == MDI

    def test_missing_probes_refused(self, honest):
        s1 = kron(proj(KET_R), proj(KET_0))
        s2 = kron(proj(KET_L), proj(KET_0))
        net = QubitNetwork((honest, honest), s1)
        readout = extract_readout(network_discrimination_correlations(net))
        with pytest.raises(MdiRequiredError):
            discriminate_multiqubit(readout, [(0.5, s1), (0.5, s2)])

    def test_naive_sign_assumption_misleads(self, conjugated):
        # pretending the devices are honest flips the decision on a
        # conjugate ensemble read through conjugate devices
        ensemble = [(0.5, proj(KET_R)), (0.5, proj(KET_L))]
        readout = exact_readout(conjugated, proj(KET_R))
        naive = ProbeResult(sign=1, outcome_distribution=(1.0, 0.0))
        decision = discriminate(readout, ensemble, probe=naive)
        assert decision.chosen_index == 1  # wrong on purpose

    def test_random_two_qubit_decisions(self, honest):
        rng = np.random.default_rng(61)
        for trial in range(20):
            phi1 = haar_density(rng, 4)
            phi2 = haar_density(rng, 4)
            ensemble = [(0.5, phi1), (0.5, phi2)]
            truth = trial % 2
            net = QubitNetwork((honest, honest), ensemble[truth][1])
            readout = extract_readout(network_discrimination_correlations(net))
            decision = discriminate_multiqubit(readout, ensemble)
            assert decision.chosen_index == truth
