"""Cheating-strategy tests: cycles, best guesses, forcing, futility."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qct.adversary import (
    CycleStructure,
    Strategy,
    StrategyKind,
    best_guess_results,
    cycle_structure,
    estimate_pass_probability,
    run_cheat_experiment,
    run_fake_sequence_attack,
    run_reflect_attack,
    wilson_interval,
)
from qct.analysis import pass_prob_permutation_model, stirling_first_kind
from qct.bell import (
    BellLabel,
    EntangledMatching,
    ParticleId,
    Party,
    PauliLabel,
    total_parity,
)
from qct.protocol import Sequence, SessionConfig
from qct.seeding import session_rng


class TestStrategy:
    def test_party_constraints(self):
        Strategy.reflect(PauliLabel.X)
        Strategy.fake_sequence(1)
        with pytest.raises(ValueError):
            Strategy(StrategyKind.REFLECT, Party.ALICE)
        with pytest.raises(ValueError):
            Strategy(StrategyKind.FAKE_SEQUENCE, Party.BOB)
        with pytest.raises(ValueError):
            Strategy.fake_sequence(2)

    def test_describe(self):
        assert Strategy.reflect(PauliLabel.Z).describe() == "reflect(flip=Z)"
        assert Strategy.fake_sequence(1).describe() == "fake-seq(desired=1)"


def _independent_cycle_count(tau: dict[int, int]) -> int:
    seen, count = set(), 0
    for start in tau:
        if start in seen:
            continue
        count += 1
        node = start
        while node not in seen:
            seen.add(node)
            node = tau[node]
    return count


class TestCycleStructure:
    def test_identity_sequences_give_fixed_points(self):
        seq = Sequence((3, 1, 2))
        cycles = cycle_structure(seq, seq)
        assert cycles.lengths == (1, 1, 1)
        assert cycles.cycles == ((1,), (2,), (3,))

    def test_two_slot_swap_gives_one_transposition(self):
        cycles = cycle_structure(Sequence((2, 1)), Sequence.identity(2))
        assert cycles.lengths == (2,)
        assert cycles.cycles == ((1, 2),)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cycle_structure(Sequence((1, 2)), Sequence((1,)))

    @settings(deadline=None)
    @given(
        st.permutations(list(range(1, 8))),
        st.permutations(list(range(1, 8))),
    )
    def test_against_independent_decomposition(self, true_order, claimed_order):
        true_seq = Sequence(tuple(true_order))
        claimed = Sequence(tuple(claimed_order))
        cycles = cycle_structure(true_seq, claimed)
        assert sum(cycles.lengths) == 7
        tau = {m: true_seq.pair_at(claimed.slot_of(m)) for m in range(1, 8)}
        assert cycles.group_count == _independent_cycle_count(tau)
        # every cycle really is a tau-orbit
        for cycle in cycles.cycles:
            for i, m in enumerate(cycle):
                assert tau[m] == cycle[(i + 1) % len(cycle)]


class TestBestGuess:
    def test_fixed_points_guessed_exactly(self):
        cycles = CycleStructure(((1,), (2,), (3,)))
        rng = session_rng(0)
        assert best_guess_results(cycles, rng) == [BellLabel.PHI_PLUS] * 3

    def test_cycle_xor_matches_target(self):
        rng = session_rng(1)
        cycles = CycleStructure(((1, 3, 4), (2, 5)))
        targets = {1: BellLabel.PSI_PLUS}
        for _ in range(200):
            guess = best_guess_results(cycles, rng, targets)
            xor_a = guess[0].value ^ guess[2].value ^ guess[3].value
            xor_b = guess[1].value ^ guess[4].value
            assert BellLabel(xor_a) is BellLabel.PSI_PLUS
            assert BellLabel(xor_b) is BellLabel.PHI_PLUS

    def test_two_cycle_uniform_over_equal_pairs(self):
        # consistent set for a 2-cycle with target 00 = the four equal pairs
        rng = session_rng(2)
        cycles = CycleStructure(((1, 2),))
        counts = {label: 0 for label in BellLabel}
        trials = 20_000
        for _ in range(trials):
            a, b = best_guess_results(cycles, rng)
            assert a is b
            counts[a] += 1
        result = stats.chisquare(list(counts.values()))
        assert result.pvalue > 0.001


class TestReflectAttack:
    @pytest.mark.parametrize("flip", list(PauliLabel))
    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_coin_forced_exactly(self, flip, n):
        config = SessionConfig(n, seed=13)
        for i in range(50):
            run = run_reflect_attack(config, flip, session_rng(1000 * n + i))
            assert run.coin == flip.parity

    def test_transcript_shape(self):
        run = run_reflect_attack(SessionConfig(3, seed=8), PauliLabel.X, session_rng(8))
        t = run.transcript
        assert len(t.messages) in (5, 6)
        bob_batch = t.messages[1]
        # Bob ships back Alice's own odd particles
        assert all(p.owner is Party.ALICE and p.index % 2 == 1 for p in bob_batch.particles)
        assert t.bob_outcomes == t.messages[3].results

    def test_pass_implies_exact_match(self):
        hits = 0
        for i in range(300):
            run = run_reflect_attack(SessionConfig(2, seed=0), PauliLabel.I, session_rng(i))
            if run.passed:
                hits += 1
                assert run.transcript.alice_outcomes == run.transcript.bob_outcomes
        assert 0 < hits < 300  # some pass, some fail

    @pytest.mark.parametrize("length", [1, 2, 3, 4, 5])
    def test_per_cycle_match_rate(self, length):
        """A single cycle of length L matches with probability 4**(1-L)."""
        rng = session_rng(31 + length)
        arrived = Sequence(tuple((m % length) + 1 for m in range(1, length + 1)))
        claimed = Sequence.identity(length)
        cycles = cycle_structure(arrived, claimed)
        assert cycles.lengths == (length,)
        trials = 40_000 if length > 1 else 500
        hits = 0
        for _ in range(trials):
            matching = EntangledMatching(
                (
                    ParticleId(Party.ALICE, 2 * m - 1),
                    ParticleId(Party.ALICE, 2 * m),
                    BellLabel.PHI_PLUS,
                )
                for m in range(1, length + 1)
            )
            outcomes = [
                matching.measure_pair(
                    ParticleId(Party.ALICE, 2 * m),
                    ParticleId(Party.ALICE, 2 * arrived.pair_at(m) - 1),
                    rng,
                )
                for m in range(1, length + 1)
            ]
            if best_guess_results(cycles, rng) == outcomes:
                hits += 1
        p = 4.0 ** (1 - length)
        sigma = (p * (1 - p) / trials) ** 0.5
        assert abs(hits / trials - p) <= max(3 * sigma, 1e-12)

    def test_tau_is_uniform_cycle_count_distribution(self):
        """Cycle counts over many runs follow the signless Stirling weights."""
        n, trials = 4, 20_000
        counts = np.zeros(n + 1)
        for i in range(trials):
            run = run_reflect_attack(SessionConfig(n, seed=7), PauliLabel.I, session_rng(i))
            arrived_pairs = [p.pair for p in run.transcript.messages[1].particles]
            tau = {m: arrived_pairs[m - 1] for m in range(1, n + 1)}
            counts[_independent_cycle_count(tau)] += 1
        stirling = stirling_first_kind(n)
        expected = np.array([trials * stirling[m] / 24.0 for m in range(n + 1)])
        result = stats.chisquare(counts[1:], expected[1:])
        assert result.pvalue > 0.001


class TestFakeSequenceAttack:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_parity_equality_exact(self, n):
        config = SessionConfig(n, seed=3)
        for i in range(400):
            run = run_fake_sequence_attack(config, desired=1, rng=session_rng(i))
            t = run.transcript
            assert total_parity(t.alice_outcomes) == total_parity(t.bob_outcomes)
            assert run.bob_coin == total_parity(t.bob_outcomes)

    def test_single_pair_degenerates_to_honest(self):
        config = SessionConfig(1, seed=0)
        for i in range(100):
            run = run_fake_sequence_attack(config, desired=0, rng=session_rng(i))
            t = run.transcript
            true_first = t.messages[0].particles[0].pair
            assert t.messages[2].sequence.pair_at(1) == true_first
            assert t.alice_outcomes == t.bob_outcomes

    def test_lie_told_exactly_when_coin_wrong(self):
        config = SessionConfig(3, seed=0)
        lied = honest = 0
        for i in range(400):
            run = run_fake_sequence_attack(config, desired=1, rng=session_rng(i))
            t = run.transcript
            true_seq = tuple(p.pair for p in t.messages[0].particles)
            announced = t.messages[2].sequence.order
            alice_coin = total_parity(t.alice_outcomes)
            if alice_coin == 1:
                honest += 1
                assert announced == true_seq
            else:
                lied += 1
                assert announced != true_seq
        assert lied > 0 and honest > 0

    def test_desired_coin_not_forced(self):
        config = SessionConfig(2, seed=0)
        hits = sum(
            run_fake_sequence_attack(config, desired=1, rng=session_rng(i)).bob_coin
            for i in range(4000)
        )
        rate = hits / 4000
        assert abs(rate - 0.5) < 4 * (0.25 / 4000) ** 0.5

    def test_desired_validation(self):
        with pytest.raises(ValueError):
            run_fake_sequence_attack(SessionConfig(2), desired=2, rng=session_rng(0))


class TestExperiments:
    def test_wilson_against_scipy(self):
        for successes, trials in [(0, 10), (10, 10), (7, 19), (625, 1000), (1, 100_000)]:
            lo, hi = wilson_interval(successes, trials)
            ref = stats.binomtest(successes, trials).proportion_ci(
                confidence_level=0.95, method="wilson"
            )
            assert lo == pytest.approx(ref.low, abs=1e-12)
            assert hi == pytest.approx(ref.high, abs=1e-12)

    def test_wilson_brackets_estimate(self):
        for successes, trials in [(0, 5), (5, 5), (3, 17), (99, 100)]:
            lo, hi = wilson_interval(successes, trials)
            assert lo <= successes / trials <= hi

    def test_report_reproducible_and_consistent(self):
        config = SessionConfig(2, seed=77)
        a = estimate_pass_probability(config, 3000)
        b = estimate_pass_probability(config, 3000)
        assert a == b
        assert a.estimate == a.successes / a.trials
        assert a.ci_low <= a.estimate <= a.ci_high
        assert a.forced_coin_rate == 1.0  # flip I forces coin 0 every run
        assert a.seed == 77

    def test_pass_rate_matches_permutation_model_n3(self):
        report = estimate_pass_probability(SessionConfig(3, seed=5), 20_000)
        assert report.ci_low <= pass_prob_permutation_model(3) <= report.ci_high
        assert report.ci_low <= 0.3125 <= report.ci_high

    def test_fake_sequence_experiment(self):
        report = run_cheat_experiment(
            SessionConfig(2, seed=6), Strategy.fake_sequence(1), 4000
        )
        assert report.forced_coin_rate == report.estimate
        assert abs(report.estimate - 0.5) < 0.03

    def test_honest_strategy_rejected(self):
        with pytest.raises(ValueError):
            run_cheat_experiment(
                SessionConfig(2), Strategy(StrategyKind.HONEST, Party.BOB), 10
            )

    def test_trial_count_validated(self):
        with pytest.raises(ValueError):
            estimate_pass_probability(SessionConfig(2), 0)
