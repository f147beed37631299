import numpy as np
import pytest
from helpers import KET_0, KET_PLUS, KET_R, SIGMA, angles_ket, haar_density, proj

from discrimnet.correlations import DIAMOND, measurement_correlations, three_chsh
from discrimnet.errors import ResourceLimitError, ValidationError
from discrimnet.network import (
    QubitNetwork,
    cell_effects,
    certification_correlations,
    classical_strategy,
    conjugate_strategy,
    discrimination_correlations,
    estimate_table,
    network_certification_correlations,
    network_discrimination_correlations,
    sample_counts,
    werner_strategy,
)
from discrimnet.qubits import bell_state, kron

SQRT2 = np.sqrt(2.0)


def all_outcome_signs(b, x):
    """Effective readout sign of category (a=+1, b) at setting x (oracle rule)."""
    return 1 if b in (0, x) else -1


class TestStrategies:
    def test_honest_passes_validation(self, honest):
        honest.validate()

    def test_full_visibility_matches_honest(self, honest, honest_p1):
        table = certification_correlations(werner_strategy(1.0))
        for inputs in honest_p1.input_tuples():
            for outcomes in honest_p1.outcomes_for(inputs):
                assert table.prob(inputs, outcomes) == pytest.approx(
                    honest_p1.prob(inputs, outcomes), abs=1e-12
                )

    def test_visibility_out_of_range(self):
        with pytest.raises(ValidationError):
            werner_strategy(1.2)

    def test_classical_strategy_is_deterministic(self):
        strat = classical_strategy(
            alice_outcomes={1: 1, 2: -1, 3: 1},
            bob_outcomes={y: -1 for y in range(1, 7)},
            joint_outcome=2,
            charlie_outcomes={1: 1, 2: 1},
        )
        table = certification_correlations(strat)
        assert table.prob((1, 1, 1), (1, -1, 1)) == pytest.approx(1.0)
        assert table.prob((2, DIAMOND, 2), (-1, 2, 1)) == pytest.approx(1.0)

    def test_classical_strategy_requires_full_assignment(self):
        with pytest.raises(ValidationError):
            classical_strategy({1: 1}, {y: 1 for y in range(1, 7)}, 0, {1: 1, 2: 1})


class TestCertificationCorrelations:
    def test_matches_generic_trace_oracle(self, honest, honest_p1):
        # Independent route: kron the joint state, embed Bob's single-qubit
        # elements, and evaluate through the generic exact-correlation code.
        state = kron(honest.aux_ab0, honest.aux_bc)
        eye = np.eye(2)
        bob = {y: {a: kron(op, eye) for a, op in povm.items()} for y, povm in honest.bob_single.items()}
        bob[DIAMOND] = honest.bob_joint
        table = measurement_correlations(state, [honest.alice, bob, honest.charlie])
        for inputs in honest_p1.input_tuples():
            for outcomes in honest_p1.outcomes_for(inputs):
                assert honest_p1.prob(inputs, outcomes) == pytest.approx(
                    table.prob(inputs, outcomes), abs=1e-10
                )

    def test_honest_reaches_triple_chsh_maximum(self, honest_p1):
        assert three_chsh(honest_p1.marginal((0, 1))) == pytest.approx(6 * SQRT2)

    def test_conjugate_strategy_same_statistics(self, honest_p1, conjugated_p1):
        for inputs in honest_p1.input_tuples():
            for outcomes in honest_p1.outcomes_for(inputs):
                assert conjugated_p1.prob(inputs, outcomes) == pytest.approx(
                    honest_p1.prob(inputs, outcomes), abs=1e-12
                )

    def test_classical_bounded(self):
        strat = classical_strategy(
            {1: 1, 2: 1, 3: -1}, {y: 1 for y in range(1, 7)}, 0, {1: -1, 2: 1}
        )
        assert three_chsh(certification_correlations(strat).marginal((0, 1))) <= 6 + 1e-12

    def test_single_setting_branch_ignores_third_party(self, honest_p1):
        # p(a, b | x, y) pooled from either z value must agree.
        for x in (1, 2, 3):
            for y in range(1, 7):
                for a in (1, -1):
                    for b in (1, -1):
                        z1 = sum(honest_p1.prob((x, y, 1), (a, b, c)) for c in (1, -1))
                        z2 = sum(honest_p1.prob((x, y, 2), (a, b, c)) for c in (1, -1))
                        assert z1 == pytest.approx(z2, abs=1e-12)


class TestDiscriminationCorrelations:
    def test_ground_state_readout_weight(self, honest):
        table = discrimination_correlations(honest, proj(KET_0))
        assert table.prob((1, DIAMOND), (1, 0)) == pytest.approx(0.25)

    def test_normalisation_per_setting(self, honest):
        rng = np.random.default_rng(2)
        table = discrimination_correlations(honest, haar_density(rng, 2))
        for x in (1, 2, 3):
            total = sum(table.prob((x, DIAMOND), o) for o in table.outcomes_for((x, DIAMOND)))
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_joint_outcome_symmetry(self, honest):
        rng = np.random.default_rng(3)
        for _ in range(10):
            table = discrimination_correlations(honest, haar_density(rng, 2))
            for x in (1, 2, 3):
                for b in range(4):
                    for a in (1, -1):
                        folded = a * all_outcome_signs(b, x)
                        assert table.prob((x, DIAMOND), (a, b)) == pytest.approx(
                            table.prob((x, DIAMOND), (folded, 0)), abs=1e-9
                        )

    def test_cell_effects_form_povm(self, honest):
        effects = cell_effects(honest)
        for x in (1, 2, 3):
            total = sum(effects[(a, x, b)] for a in (1, -1) for b in range(4))
            assert np.allclose(total, np.eye(2), atol=1e-10)

    def test_conjugate_devices_differ_only_on_third_setting(self, honest, conjugated):
        rng = np.random.default_rng(4)
        target = haar_density(rng, 2)
        assert abs(target[1, 0].imag) > 1e-3
        t_honest = discrimination_correlations(honest, target)
        t_conj = discrimination_correlations(conjugated, target)
        for x in (1, 2):
            for outcome in t_honest.outcomes_for((x, DIAMOND)):
                assert t_conj.prob((x, DIAMOND), outcome) == pytest.approx(
                    t_honest.prob((x, DIAMOND), outcome), abs=1e-12
                )
        diffs = [
            abs(t_conj.prob((3, DIAMOND), o) - t_honest.prob((3, DIAMOND), o))
            for o in t_honest.outcomes_for((3, DIAMOND))
        ]
        assert max(diffs) > 1e-3

    def test_conjugate_devices_identical_on_real_targets(self, honest, conjugated):
        target = proj(angles_ket(0.7, 0.0))
        t_honest = discrimination_correlations(honest, target)
        t_conj = discrimination_correlations(conjugated, target)
        for x in (1, 2, 3):
            for outcome in t_honest.outcomes_for((x, DIAMOND)):
                assert t_conj.prob((x, DIAMOND), outcome) == pytest.approx(
                    t_honest.prob((x, DIAMOND), outcome), abs=1e-12
                )

    def test_rejects_multi_qubit_target(self, honest):
        with pytest.raises(ValidationError):
            discrimination_correlations(honest, np.eye(4) / 4)


class TestQubitNetwork:
    def test_single_cell_reduces_to_direct_form(self, honest):
        target = proj(KET_R)
        network_table = network_discrimination_correlations(
            QubitNetwork(cells=(honest,), target=target)
        )
        direct = discrimination_correlations(honest, target)
        for x in (1, 2, 3):
            for a in (1, -1):
                for b in range(4):
                    assert network_table.prob(((x,), (DIAMOND,)), ((a,), (b,))) == pytest.approx(
                        direct.prob((x, DIAMOND), (a, b)), abs=1e-12
                    )

    def test_scaled_readout_matches_direct_projector_trace(self, honest):
        target = bell_state(0)
        table = network_discrimination_correlations(QubitNetwork((honest, honest), target))
        for x1 in (1, 2, 3):
            for x2 in (1, 2, 3):
                for a1 in (1, -1):
                    for a2 in (1, -1):
                        projector = kron(
                            (np.eye(2) + a1 * SIGMA[x1]) / 2, (np.eye(2) + a2 * SIGMA[x2]) / 2
                        )
                        oracle = np.trace(projector @ target).real
                        value = 16 * table.prob(
                            ((x1, x2), (DIAMOND, DIAMOND)), ((a1, a2), (0, 0))
                        )
                        assert value == pytest.approx(oracle, abs=1e-9)

    def test_product_targets_factorise(self, honest):
        rng = np.random.default_rng(9)
        rho1 = haar_density(rng, 2)
        rho2 = haar_density(rng, 2)
        joint = network_discrimination_correlations(QubitNetwork((honest, honest), kron(rho1, rho2)))
        t1 = discrimination_correlations(honest, rho1)
        t2 = discrimination_correlations(honest, rho2)
        for x1, x2 in [(1, 2), (3, 1), (2, 2)]:
            for a1, a2 in [(1, 1), (-1, 1)]:
                for b1, b2 in [(0, 0), (2, 3)]:
                    assert joint.prob(((x1, x2), (DIAMOND, DIAMOND)), ((a1, a2), (b1, b2))) == (
                        pytest.approx(
                            t1.prob((x1, DIAMOND), (a1, b1)) * t2.prob((x2, DIAMOND), (a2, b2)),
                            abs=1e-12,
                        )
                    )

    def test_cell_cap(self, honest):
        net = QubitNetwork((honest,) * 4, np.eye(16) / 16)
        with pytest.raises(ResourceLimitError):
            network_discrimination_correlations(net)

    def test_target_size_must_match_cells(self, honest):
        with pytest.raises(ValidationError):
            QubitNetwork((honest, honest), np.eye(2) / 2)

    def test_per_cell_certification_tables(self, honest, honest_p1):
        net = QubitNetwork((honest, conjugate_strategy(honest)), bell_state(0))
        tables = network_certification_correlations(net)
        assert len(tables) == 2
        for table in tables:
            assert three_chsh(table.marginal((0, 1))) == pytest.approx(6 * SQRT2)


class TestSampling:
    def test_same_seed_same_counts(self, honest):
        table = discrimination_correlations(honest, proj(KET_PLUS))
        first = sample_counts(table, 500, seed=11)
        second = sample_counts(table, 500, seed=11)
        assert first.counts == second.counts

    def test_different_seed_differs(self, honest):
        table = discrimination_correlations(honest, proj(KET_PLUS))
        assert sample_counts(table, 500, 1).counts != sample_counts(table, 500, 2).counts

    def test_counts_sum_to_shots(self, honest):
        table = discrimination_correlations(honest, proj(KET_PLUS))
        counts = sample_counts(table, 321, seed=0)
        for inputs, dist in counts.counts.items():
            assert sum(dist.values()) == 321

    def test_degenerate_distribution(self, honest):
        table = discrimination_correlations(honest, proj(KET_0))
        counts = sample_counts(table, 1000, seed=5)
        # setting 1 reads out +1 deterministically: only (1, b) categories hit
        for (a, b), k in counts.counts[(1, DIAMOND)].items():
            if a * all_outcome_signs(b, 1) == -1:
                assert k == 0

    def test_estimate_converges(self, honest):
        rng = np.random.default_rng(21)
        table = discrimination_correlations(honest, haar_density(rng, 2))
        estimated = estimate_table(sample_counts(table, 10**6, seed=3))
        worst = max(
            abs(estimated.prob(i, o) - table.prob(i, o))
            for i in table.input_tuples()
            for o in table.outcomes_for(i)
        )
        assert worst < 5e-3
        assert estimated.shots == 10**6

    def test_invalid_shots(self, honest):
        table = discrimination_correlations(honest, proj(KET_0))
        with pytest.raises(ValidationError):
            sample_counts(table, 0, seed=1)
        with pytest.raises(ValidationError):
            sample_counts(table, 10, seed=-4)
