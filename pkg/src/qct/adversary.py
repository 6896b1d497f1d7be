"""Cheating strategies and their Monte Carlo evaluation.

Bob's reflection attack: instead of shipping his own pairs he returns
Alice's particles in a random order, claiming they are his. Every
measurement Alice performs then joins two of her own pairs, so he controls
her coin completely - an optional Pauli flip on one returned particle sets
the total parity. What he cannot control is her results check: after the
sequence announcement he knows only which measurements fell into common
cycles, and within a cycle of length L her outcomes are uniform over the
4**(L-1) assignments with fixed XOR. Guessing uniformly inside each
consistent set is his best play, and it succeeds with probability
4**(m - N) for m cycles.

Alice's fake-sequence attack: she measures before announcing and, when the
coin is not to her liking, announces a different sequence. The parity
conservation of Bell measurements makes this futile - Bob's total parity
equals hers no matter which sequence she names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .bell import BellLabel, EntangledMatching, Party, PauliLabel
from .protocol import (
    CoinAnnouncement,
    ParticleBatch,
    ResultsAnnouncement,
    Sequence,
    SequenceAnnouncement,
    SessionConfig,
    SessionTranscript,
    Verdict,
    VerdictAnnouncement,
    alice_verify,
    apply_noise,
    even_particle,
    initial_edges,
    odd_particle,
    random_sequence,
    toss_from_outcomes,
)
from .seeding import trial_rng

__all__ = [
    "StrategyKind",
    "Strategy",
    "CycleStructure",
    "cycle_structure",
    "best_guess_results",
    "ReflectRun",
    "FakeSequenceRun",
    "run_reflect_attack",
    "run_fake_sequence_attack",
    "ExperimentReport",
    "estimate_pass_probability",
    "run_cheat_experiment",
    "wilson_interval",
]

# 97.5% standard normal quantile, for two-sided 95% intervals.
_Z95 = 1.959963984540054


class StrategyKind(str, Enum):
    HONEST = "honest"
    REFLECT = "reflect"
    FAKE_SEQUENCE = "fake-seq"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Strategy:
    """A party plus what it does. REFLECT is Bob-only (with a Pauli flip
    choosing the forced coin); FAKE_SEQUENCE is Alice-only (with the coin
    value she wants)."""

    kind: StrategyKind
    party: Party
    flip: PauliLabel = PauliLabel.I
    desired: int = 0

    def __post_init__(self) -> None:
        if self.kind is StrategyKind.REFLECT and self.party is not Party.BOB:
            raise ValueError("the reflection attack is Bob's strategy")
        if self.kind is StrategyKind.FAKE_SEQUENCE and self.party is not Party.ALICE:
            raise ValueError("the fake-sequence attack is Alice's strategy")
        if self.desired not in (0, 1):
            raise ValueError("desired coin must be 0 or 1")

    def describe(self) -> str:
        if self.kind is StrategyKind.REFLECT:
            return f"reflect(flip={self.flip.name})"
        if self.kind is StrategyKind.FAKE_SEQUENCE:
            return f"fake-seq(desired={self.desired})"
        return "honest"

    @classmethod
    def reflect(cls, flip: PauliLabel = PauliLabel.I) -> "Strategy":
        return cls(StrategyKind.REFLECT, Party.BOB, flip=flip)

    @classmethod
    def fake_sequence(cls, desired: int) -> "Strategy":
        return cls(StrategyKind.FAKE_SEQUENCE, Party.ALICE, desired=desired)


@dataclass(frozen=True)
class CycleStructure:
    """Cycles of the pairing permutation, each a tuple of 1-based pair
    indices starting at its smallest member, listed in ascending order of
    that member."""

    cycles: tuple[tuple[int, ...], ...]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    @property
    def group_count(self) -> int:
        return len(self.cycles)

    @property
    def total(self) -> int:
        return sum(len(c) for c in self.cycles)


def cycle_structure(true_seq: Sequence, claimed_seq: Sequence) -> CycleStructure:
    """Cycles of tau = true_seq o claimed_seq^-1 over pair indices.

    tau(m) is the pair that actually sits where pair m is claimed to be: the
    measurement at index m really consumes pair tau(m)'s travelling half.
    Identical sequences give N fixed points; a claimed swap of two slots
    gives one 2-cycle.
    """
    n = len(true_seq)
    if len(claimed_seq) != n:
        raise ValueError("sequences must have equal length")
    tau = {m: true_seq.pair_at(claimed_seq.slot_of(m)) for m in range(1, n + 1)}
    seen: set[int] = set()
    cycles: list[tuple[int, ...]] = []
    for start in range(1, n + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = tau[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = tau[nxt]
        cycles.append(tuple(cycle))
    return CycleStructure(tuple(cycles))


def best_guess_results(
    cycles: CycleStructure,
    rng: np.random.Generator,
    targets: dict[int, BellLabel] | None = None,
) -> list[BellLabel]:
    """Optimal fabricated results for the verifier's check, indexed by pair.

    Within each cycle the verifier's outcomes are uniform over the
    assignments whose XOR equals the XOR of the cycle's initial edge labels
    (all Phi+ unless `targets` overrides a cycle, keyed by its smallest
    member). Sampling uniformly from that consistent set maximises the
    per-cycle match probability at 4**(1 - length); a fixed point is
    guessed exactly.
    """
    guess: dict[int, BellLabel] = {}
    for cycle in cycles.cycles:
        target = targets.get(cycle[0], BellLabel.PHI_PLUS) if targets else BellLabel.PHI_PLUS
        acc = target.value
        for m in cycle[1:]:
            lab = int(rng.integers(4))
            acc ^= lab
            guess[m] = BellLabel(lab)
        guess[cycle[0]] = BellLabel(acc)
    return [guess[m] for m in range(1, cycles.total + 1)]


class ReflectRun(NamedTuple):
    transcript: SessionTranscript
    passed: bool
    coin: int


class FakeSequenceRun(NamedTuple):
    transcript: SessionTranscript
    bob_coin: int


def run_reflect_attack(
    config: SessionConfig,
    flip: PauliLabel,
    rng: np.random.Generator,
    record_transcript: bool = True,
) -> ReflectRun:
    """One session in which Bob reflects Alice's particles.

    Bob returns the received particles in a uniformly random order, claims
    pair-order identification, applies `flip` to the particle in return
    slot 1 (any single particle works the same), and fabricates his
    announced results by the best-guess rule. Returns Alice's verdict
    (passed) and the coin she computes, which equals parity(flip) whenever
    the flip is what set the total parity - i.e. always.
    """
    n = config.n_pairs
    matching = EntangledMatching(initial_edges(Party.ALICE, n))

    alice_seq = random_sequence(n, rng)
    return_order = rng.permutation(n)  # return slot s holds received slot return_order[s-1]+1

    # True pair content of each return slot: Alice's pair alice_seq(rho(s)).
    arrived = Sequence(tuple(alice_seq.pair_at(int(r) + 1) for r in return_order))
    claimed = Sequence.identity(n)

    if flip is not PauliLabel.I:
        matching.apply_pauli(odd_particle(Party.ALICE, arrived.pair_at(1)), flip)

    transcript = SessionTranscript(config)
    if record_transcript:
        transcript.append(
            ParticleBatch(
                Party.ALICE,
                tuple(odd_particle(Party.ALICE, alice_seq.pair_at(t)) for t in range(1, n + 1)),
            )
        )
        transcript.append(
            ParticleBatch(
                Party.BOB,
                tuple(odd_particle(Party.ALICE, arrived.pair_at(s)) for s in range(1, n + 1)),
            )
        )
        transcript.append(SequenceAnnouncement(Party.ALICE, alice_seq))

    # Alice measures her kept half of pair m against return slot m.
    alice_results = []
    for m in range(1, n + 1):
        outcome = matching.measure_pair(
            even_particle(Party.ALICE, m),
            odd_particle(Party.ALICE, arrived.pair_at(m)),
            rng,
        )
        alice_results.append(apply_noise(outcome, config.noise, rng))

    # Bob now knows tau = arrived o claimed^-1 and fabricates his results.
    cycles = cycle_structure(arrived, claimed)
    targets = None
    if flip is not PauliLabel.I:
        flipped_pair = arrived.pair_at(1)
        for cycle in cycles.cycles:
            if flipped_pair in cycle:
                targets = {cycle[0]: BellLabel(flip.value)}
                break
    bob_announced = best_guess_results(cycles, rng, targets)

    verdict = alice_verify(alice_results, bob_announced)
    coin = toss_from_outcomes(alice_results)
    passed = verdict is Verdict.ACCEPT

    transcript.alice_outcomes = tuple(alice_results)
    transcript.bob_outcomes = tuple(bob_announced)
    transcript.verdict = verdict
    if record_transcript:
        transcript.append(ResultsAnnouncement(Party.BOB, tuple(bob_announced)))
        transcript.append(VerdictAnnouncement(Party.ALICE, verdict))
    if passed:
        transcript.coin = coin
        if record_transcript:
            transcript.append(CoinAnnouncement(Party.ALICE, coin))
    return ReflectRun(transcript, passed, coin)


def run_fake_sequence_attack(
    config: SessionConfig,
    desired: int,
    rng: np.random.Generator,
) -> FakeSequenceRun:
    """One session in which Alice measures first and may lie about her order.

    If her coin already equals `desired` she announces truthfully; otherwise
    she announces a uniformly random different sequence (for a single pair
    there is none, so she stays truthful). Bob's total outcome parity equals
    hers either way, so his coin is returned unchanged by the lie.
    """
    if desired not in (0, 1):
        raise ValueError("desired coin must be 0 or 1")
    n = config.n_pairs
    matching = EntangledMatching(
        initial_edges(Party.ALICE, n) + initial_edges(Party.BOB, n)
    )
    transcript = SessionTranscript(config)

    alice_seq = random_sequence(n, rng)
    transcript.append(
        ParticleBatch(
            Party.ALICE,
            tuple(odd_particle(Party.ALICE, alice_seq.pair_at(t)) for t in range(1, n + 1)),
        )
    )
    transcript.append(
        ParticleBatch(Party.BOB, tuple(odd_particle(Party.BOB, m) for m in range(1, n + 1)))
    )

    # Alice measures before announcing anything.
    alice_results = []
    for m in range(1, n + 1):
        outcome = matching.measure_pair(
            even_particle(Party.ALICE, m), odd_particle(Party.BOB, m), rng
        )
        alice_results.append(apply_noise(outcome, config.noise, rng))
    alice_coin = toss_from_outcomes(alice_results)

    announced_seq = alice_seq
    if alice_coin != desired and n > 1:
        while True:
            candidate = random_sequence(n, rng)
            if candidate != alice_seq:
                announced_seq = candidate
                break
    transcript.append(SequenceAnnouncement(Party.ALICE, announced_seq))

    # Bob trusts the announcement: his kept half of pair m goes against the
    # slot claimed to carry Alice's pair m.
    bob_results = []
    for m in range(1, n + 1):
        slot = announced_seq.slot_of(m)
        outcome = matching.measure_pair(
            even_particle(Party.BOB, m),
            odd_particle(Party.ALICE, alice_seq.pair_at(slot)),
            rng,
        )
        bob_results.append(apply_noise(outcome, config.noise, rng))
    bob_coin = toss_from_outcomes(bob_results)

    transcript.alice_outcomes = tuple(alice_results)
    transcript.bob_outcomes = tuple(bob_results)
    transcript.append(ResultsAnnouncement(Party.BOB, tuple(bob_results)))
    # A cheating Alice has nothing to gain from aborting her own attack.
    transcript.verdict = Verdict.ACCEPT
    transcript.append(VerdictAnnouncement(Party.ALICE, Verdict.ACCEPT))
    transcript.coin = bob_coin
    transcript.append(CoinAnnouncement(Party.BOB, bob_coin))
    return FakeSequenceRun(transcript, bob_coin)


@dataclass(frozen=True)
class ExperimentReport:
    """Monte Carlo summary of repeated attack sessions."""

    strategy: Strategy
    n_pairs: int
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    forced_coin_rate: float
    seed: int

    def __post_init__(self) -> None:
        if not self.ci_low <= self.estimate <= self.ci_high:
            raise ValueError("confidence interval must bracket the estimate")


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def run_cheat_experiment(
    config: SessionConfig, strategy: Strategy, trials: int
) -> ExperimentReport:
    """Repeat a strategy with independent per-trial streams.

    Success means: the session passed verification (reflect) or Bob's coin
    came out as desired (fake-seq). forced_coin_rate tracks how often the
    strategist's preferred coin value was produced.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    successes = 0
    forced = 0
    if strategy.kind is StrategyKind.REFLECT:
        want = strategy.flip.parity
        for i in range(trials):
            run = run_reflect_attack(
                config, strategy.flip, trial_rng(config.seed, i), record_transcript=False
            )
            if run.passed:
                successes += 1
            if run.coin == want:
                forced += 1
    elif strategy.kind is StrategyKind.FAKE_SEQUENCE:
        for i in range(trials):
            run = run_fake_sequence_attack(config, strategy.desired, trial_rng(config.seed, i))
            if run.bob_coin == strategy.desired:
                successes += 1
        forced = successes
    else:
        raise ValueError("honest play is not a cheat experiment")
    lo, hi = wilson_interval(successes, trials)
    return ExperimentReport(
        strategy=strategy,
        n_pairs=config.n_pairs,
        trials=trials,
        successes=successes,
        estimate=successes / trials,
        ci_low=lo,
        ci_high=hi,
        forced_coin_rate=forced / trials,
        seed=config.seed,
    )


def estimate_pass_probability(
    config: SessionConfig, trials: int, flip: PauliLabel = PauliLabel.I
) -> ExperimentReport:
    """Pass rate of the reflection attack over `trials` independent runs."""
    return run_cheat_experiment(config, Strategy.reflect(flip), trials)
