import numpy as np
import pytest

from beamlink import (BeamCombination, ChannelMatrix,
                      CombinatorialExplosionError, NoiseModel,
                      NoValidCombinationError, ScenarioConfig,
                      enumerate_combinations, realize, rule1_scores,
                      rule2_scores, run_protocol, select_rule1, select_rule2)
from beamlink.protocol import (RULE2_DETERMINANT, SCHEME_BEAM_NP,
                               SCHEME_BEAM_ZF_IMPERFECT, SCHEME_OMNI_NP,
                               draw_csit_errors, evaluate_realization)

from conftest import random_channel
from oracles import oracle_rule1, oracle_rule2


def wrap(arrays):
    return [ChannelMatrix(a, is_normalized=True) for a in arrays]


class TestEnumerateCombinations:
    def test_k2_l4(self):
        combos = enumerate_combinations(2, 4)
        assert len(combos) == 16
        assert combos[0].indices == (0, 0)
        assert combos[-1].indices == (3, 3)
        assert len(set(combos)) == 16

    def test_degenerate(self):
        assert [c.indices for c in enumerate_combinations(1, 1)] == [(0,)]

    def test_k3_l2(self):
        combos = enumerate_combinations(3, 2)
        assert len(combos) == 8
        assert combos == sorted(combos)

    def test_guard(self):
        with pytest.raises(CombinatorialExplosionError):
            enumerate_combinations(10, 8)


class TestSelectRule1:
    def test_identity_beats_coupled(self):
        combos = [BeamCombination((0, 0)), BeamCombination((0, 1))]
        channels = wrap([np.eye(2, dtype=complex),
                         np.array([[1.0, 0.5], [0.5, 1.0]], dtype=complex)])
        scored = rule1_scores(combos, channels, NoiseModel(0.1))
        assert select_rule1(scored) == combos[0]
        assert scored[0].score == pytest.approx(20.0)
        assert scored[1].score == pytest.approx(2 / 0.35)

    def test_single_combination(self):
        combos = [BeamCombination((0, 0))]
        scored = rule1_scores(combos, wrap([np.eye(2, dtype=complex)]),
                              NoiseModel(0.1))
        assert select_rule1(scored) == combos[0]

    def test_bit_identical_channels_tie_lexicographic(self):
        h = random_channel(np.random.default_rng(3))
        combos = [BeamCombination((1, 0)), BeamCombination((0, 1))]
        scored = rule1_scores(combos, wrap([h, h.copy()]), NoiseModel(0.1))
        assert select_rule1(scored).indices == (0, 1)
        # input order must not matter
        assert select_rule1(scored[::-1]).indices == (0, 1)


class TestSelectRule2:
    def test_beta_scalarization_example(self):
        combos = [BeamCombination((0, 0)), BeamCombination((1, 1))]
        channels = wrap([np.eye(2, dtype=complex),
                         np.diag([1.0, 2.0]).astype(complex)])
        scored = rule2_scores(combos, channels)
        assert select_rule2(scored) == combos[1]  # beta 0.8 > 0.5
        assert scored[0].score == pytest.approx(0.5, rel=1e-9)
        assert scored[1].score == pytest.approx(0.8, rel=1e-9)

    def test_determinant_scalarization_example(self):
        combos = [BeamCombination((0, 0)), BeamCombination((1, 1))]
        channels = wrap([np.eye(2, dtype=complex),
                         np.diag([1.0, 2.0]).astype(complex)])
        scored = rule2_scores(combos, channels, RULE2_DETERMINANT)
        assert select_rule2(scored) == combos[1]  # det(H H^H): 4 > 1
        assert scored[0].score == pytest.approx(1.0, rel=1e-9)
        assert scored[1].score == pytest.approx(4.0, rel=1e-9)

    def test_ill_conditioned_marked_rejected(self):
        combos = [BeamCombination((0, 0)), BeamCombination((0, 1))]
        channels = wrap([np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex),
                         np.eye(2, dtype=complex)])
        scored = rule2_scores(combos, channels)
        assert scored[0].rejected and scored[0].score is None
        assert select_rule2(scored) == combos[1]

    def test_all_rejected_raises(self):
        combos = [BeamCombination((0, 0))]
        channels = wrap([np.ones((2, 2), dtype=complex)])
        with pytest.raises(NoValidCombinationError):
            select_rule2(rule2_scores(combos, channels))

    def test_scale_invariance_of_argmax(self):
        rng = np.random.default_rng(11)
        combos = enumerate_combinations(2, 3)
        channels = [random_channel(rng) for _ in combos]
        for scale in (0.037, 1.0, 260.0):
            scaled = wrap([scale * h for h in channels])
            assert select_rule2(rule2_scores(combos, scaled)).indices \
                == select_rule2(rule2_scores(combos, wrap(channels))).indices
            noise = NoiseModel(1e-9)  # interference-limited regime
            assert select_rule1(rule1_scores(combos, scaled, noise)).indices \
                == select_rule1(rule1_scores(combos, wrap(channels), noise)).indices


class TestBruteForceAgreement:
    def test_both_rules_match_oracle_on_realizations(self):
        config = ScenarioConfig(runs=1, normalization_subruns=20,
                                snr_grid_db=(10.0,))
        agree = 0
        for run in range(60):
            rng = np.random.default_rng(1000 + run)
            real = realize(config, rng)
            combos = list(real.combinations)
            channels = list(real.beam_channels)
            noise = config.noise_for(10.0)

            scored1 = rule1_scores(combos, wrap(channels), noise)
            assert select_rule1(scored1) == oracle_rule1(
                combos, channels, noise.noise_variance)

            scored2 = rule2_scores(combos, wrap(channels))
            assert select_rule2(scored2) == oracle_rule2(combos, channels)

            scored2d = rule2_scores(combos, wrap(channels), RULE2_DETERMINANT)
            assert select_rule2(scored2d) == oracle_rule2(combos, channels,
                                                          determinant=True)
            agree += 1
        assert agree == 60


class TestRunProtocol:
    def test_scheme_filtering_single_entry(self, small_config):
        config = small_config.with_updates(schemes=(SCHEME_OMNI_NP,))
        reports = run_protocol(config, np.random.default_rng(5))
        assert list(reports) == [SCHEME_OMNI_NP]
        assert reports[SCHEME_OMNI_NP].sum_rate > 0

    def test_l1_beam_np_equals_np_on_only_combination(self, small_config):
        config = small_config.with_updates(L=1, schemes=(SCHEME_BEAM_NP,))
        rng = np.random.default_rng(7)
        real = realize(config, rng)
        outcomes = evaluate_realization(real, config)
        for (scheme, snr_db, _), outcome in outcomes.items():
            assert outcome.combination.indices == (0, 0)
            noise = config.noise_for(snr_db)
            direct = np.abs(np.diag(real.beam_channels[0])) ** 2
            interference = (np.sum(np.abs(real.beam_channels[0]) ** 2, axis=1)
                            - direct)
            expected = direct / (interference + noise.noise_variance)
            assert np.allclose(outcome.report.sinrs, expected, rtol=1e-12)

    def test_determinism_same_seed(self, small_config):
        r1 = run_protocol(small_config, np.random.default_rng(42), snr_db=20.0)
        r2 = run_protocol(small_config, np.random.default_rng(42), snr_db=20.0)
        assert r1 == r2

    def test_imperfect_scheme_keys_include_variance(self, small_config):
        config = small_config.with_updates(
            schemes=(SCHEME_BEAM_ZF_IMPERFECT,),
            csit_error_variances=(0.001, 0.01))
        reports = run_protocol(config, np.random.default_rng(9), snr_db=20.0)
        assert set(reports) == {"beam-zf-imperfect@0.001",
                                "beam-zf-imperfect@0.01"}

    def test_beam_np_beats_omni_np_on_average(self):
        config = ScenarioConfig(runs=1, normalization_subruns=20,
                                snr_grid_db=(10.0,),
                                schemes=(SCHEME_OMNI_NP, SCHEME_BEAM_NP))
        gains = []
        for run in range(150):
            reports = run_protocol(config, np.random.default_rng(50_000 + run))
            gains.append(reports[SCHEME_BEAM_NP].sum_rate
                         - reports[SCHEME_OMNI_NP].sum_rate)
        assert np.mean(gains) > 0

    def test_csit_selection_tracks_erroneous_channel(self, small_config):
        # With a huge error variance the imperfect-CSIT winner should often
        # differ from the perfect-CSIT winner, proving selection sees H_e.
        config = small_config.with_updates(
            schemes=("beam-zf-erp", SCHEME_BEAM_ZF_IMPERFECT),
            csit_error_variances=(2.0,))
        differs = 0
        for run in range(40):
            rng = np.random.default_rng(300 + run)
            real = realize(config, rng)
            views = {2.0: draw_csit_errors(real, 2.0, np.random.default_rng(run))}
            outcomes = evaluate_realization(real, config, views)
            perfect = outcomes[("beam-zf-erp", 0.0, None)].combination
            noisy = outcomes[(SCHEME_BEAM_ZF_IMPERFECT, 0.0, 2.0)].combination
            differs += perfect != noisy
        assert differs > 5
