"""The two-party coin-tossing protocol over entangled pairs.

Each party prepares N Phi+ pairs and ships the odd-indexed half of every
pair to the other side: Alice in a secret random order, Bob in plain pair
order. After Alice reveals her order, each party Bell-measures its kept
halves against the received ones, pair index against pair index. Every
measurement is an entanglement swap, so both parties see the same list of
outcomes; the coin is the XOR of the outcome parities. Bob announces his
results first, Alice compares them index by index against her own and
accepts or aborts. Alice never announces her outcomes.

A transcript records the message flow in its fixed phase order and refuses
out-of-order construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .bell import BellLabel, EntangledMatching, ParticleId, Party, total_parity

__all__ = [
    "NoiseModel",
    "SessionConfig",
    "Sequence",
    "random_sequence",
    "ParticleBatch",
    "SequenceAnnouncement",
    "ResultsAnnouncement",
    "VerdictAnnouncement",
    "CoinAnnouncement",
    "Message",
    "Verdict",
    "SessionTranscript",
    "ProtocolOrderError",
    "EmptyOutcomesError",
    "LengthMismatchError",
    "run_honest",
    "toss_from_outcomes",
    "alice_verify",
    "apply_noise",
    "initial_edges",
    "odd_particle",
    "even_particle",
]


class ProtocolOrderError(RuntimeError):
    """A transcript message arrived outside the fixed phase order."""


class EmptyOutcomesError(ValueError):
    """A coin cannot be tossed from zero outcomes."""


class LengthMismatchError(ValueError):
    """Result lists of different lengths cannot be compared."""


@dataclass(frozen=True)
class NoiseModel:
    """Readout noise: each recorded outcome survives with probability gamma,
    otherwise it is replaced by one of the three other labels uniformly."""

    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")


@dataclass(frozen=True)
class SessionConfig:
    n_pairs: int
    seed: int = 0
    noise: NoiseModel | None = None

    def __post_init__(self) -> None:
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be at least 1")


@dataclass(frozen=True)
class Sequence:
    """Transmission order: order[slot - 1] = 1-based pair index in that slot."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.order)
        if n == 0 or sorted(self.order) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    def pair_at(self, slot: int) -> int:
        """Pair index carried in 1-based `slot`."""
        return self.order[slot - 1]

    def slot_of(self, pair: int) -> int:
        """1-based slot in which `pair` travels."""
        return self.order.index(pair) + 1

    @classmethod
    def identity(cls, n: int) -> "Sequence":
        return cls(tuple(range(1, n + 1)))


def random_sequence(n: int, rng: np.random.Generator) -> Sequence:
    return Sequence(tuple(int(x) + 1 for x in rng.permutation(n)))


@dataclass(frozen=True)
class ParticleBatch:
    sender: Party
    particles: tuple[ParticleId, ...]


@dataclass(frozen=True)
class SequenceAnnouncement:
    sender: Party
    sequence: Sequence


@dataclass(frozen=True)
class ResultsAnnouncement:
    sender: Party
    results: tuple[BellLabel, ...]


class Verdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class VerdictAnnouncement:
    sender: Party
    verdict: Verdict


@dataclass(frozen=True)
class CoinAnnouncement:
    sender: Party
    coin: int


Message = Union[
    ParticleBatch,
    SequenceAnnouncement,
    ResultsAnnouncement,
    VerdictAnnouncement,
    CoinAnnouncement,
]

# Fixed phase order; measurements happen between phases 2 and 3 but are not
# messages. The coin announcement is absent when Alice aborts.
_PHASES: tuple[tuple[type, Party | None], ...] = (
    (ParticleBatch, Party.ALICE),
    (ParticleBatch, Party.BOB),
    (SequenceAnnouncement, Party.ALICE),
    (ResultsAnnouncement, Party.BOB),
    (VerdictAnnouncement, Party.ALICE),
    (CoinAnnouncement, None),
)

PHASE_NAMES = (
    "alice-particles",
    "bob-particles",
    "sequence-announcement",
    "results-announcement",
    "verdict",
    "coin",
)


def phase_of(message: Message) -> int:
    for idx, (mtype, sender) in enumerate(_PHASES):
        if isinstance(message, mtype) and (sender is None or message.sender is sender):
            return idx
    raise ProtocolOrderError(f"message does not fit any protocol phase: {message!r}")


@dataclass
class SessionTranscript:
    """Message log plus both parties' private outcome records."""

    config: SessionConfig
    messages: list[Message] = field(default_factory=list)
    alice_outcomes: tuple[BellLabel, ...] = ()
    bob_outcomes: tuple[BellLabel, ...] = ()
    verdict: Verdict | None = None
    coin: int | None = None  # None = aborted (no coin produced)

    def append(self, message: Message) -> None:
        phase = phase_of(message)
        expected = len(self.messages)
        if phase != expected:
            raise ProtocolOrderError(
                f"phase {PHASE_NAMES[phase]} out of order: expected "
                f"{PHASE_NAMES[expected] if expected < len(_PHASES) else 'nothing further'}"
            )
        self.messages.append(message)

    @property
    def alice_coin(self) -> int | None:
        return toss_from_outcomes(self.alice_outcomes) if self.alice_outcomes else None

    @property
    def bob_coin(self) -> int | None:
        return toss_from_outcomes(self.bob_outcomes) if self.bob_outcomes else None


def toss_from_outcomes(outcomes: Iterable[BellLabel]) -> int:
    """Coin value: XOR of the outcome parities."""
    outcomes = tuple(outcomes)
    if not outcomes:
        raise EmptyOutcomesError("cannot toss a coin from zero outcomes")
    return total_parity(outcomes)


def alice_verify(
    alice_results: Iterable[BellLabel], bob_announced: Iterable[BellLabel]
) -> Verdict:
    """Index-by-index comparison of Alice's outcomes with Bob's announcement."""
    mine = tuple(alice_results)
    theirs = tuple(bob_announced)
    if len(mine) != len(theirs):
        raise LengthMismatchError(f"{len(mine)} results vs {len(theirs)} announced")
    return Verdict.ACCEPT if mine == theirs else Verdict.REJECT


def apply_noise(
    outcome: BellLabel, noise: NoiseModel | None, rng: np.random.Generator
) -> BellLabel:
    """Corrupt a recorded outcome: kept with probability gamma, otherwise
    replaced by a uniformly chosen different label."""
    if noise is None or noise.gamma >= 1.0 or rng.random() < noise.gamma:
        return outcome
    return BellLabel(outcome.value ^ int(rng.integers(1, 4)))


@lru_cache(maxsize=None)
def odd_particle(party: Party, pair: int) -> ParticleId:
    return ParticleId(party, 2 * pair - 1)


@lru_cache(maxsize=None)
def even_particle(party: Party, pair: int) -> ParticleId:
    return ParticleId(party, 2 * pair)


def initial_edges(
    party: Party, n_pairs: int, label: BellLabel = BellLabel.PHI_PLUS
) -> list[tuple[ParticleId, ParticleId, BellLabel]]:
    """The party's n_pairs source pairs: (odd half, even half, label)."""
    return [
        (odd_particle(party, m), even_particle(party, m), label)
        for m in range(1, n_pairs + 1)
    ]


def run_honest(
    config: SessionConfig, rng: np.random.Generator | None = None
) -> SessionTranscript:
    """One honest session; returns the full transcript.

    Both parties' outcome lists are identical in the noiseless case, the
    verdict is Accept, and the coin is the XOR of the outcome parities.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
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
        ParticleBatch(
            Party.BOB, tuple(odd_particle(Party.BOB, m) for m in range(1, n + 1))
        )
    )
    transcript.append(SequenceAnnouncement(Party.ALICE, alice_seq))

    # Alice: her kept half of pair m against Bob's odd half of pair m (Bob
    # ships in pair order, so slot m is his pair m).
    alice_results = []
    for m in range(1, n + 1):
        outcome = matching.measure_pair(
            even_particle(Party.ALICE, m), odd_particle(Party.BOB, m), rng
        )
        alice_results.append(apply_noise(outcome, config.noise, rng))
    # Bob: his kept half of pair m against Alice's odd half of pair m,
    # located through the announced sequence.
    bob_results = []
    for m in range(1, n + 1):
        outcome = matching.measure_pair(
            even_particle(Party.BOB, m), odd_particle(Party.ALICE, m), rng
        )
        bob_results.append(apply_noise(outcome, config.noise, rng))

    transcript.alice_outcomes = tuple(alice_results)
    transcript.bob_outcomes = tuple(bob_results)
    transcript.append(ResultsAnnouncement(Party.BOB, tuple(bob_results)))

    verdict = alice_verify(alice_results, bob_results)
    transcript.verdict = verdict
    transcript.append(VerdictAnnouncement(Party.ALICE, verdict))
    if verdict is Verdict.ACCEPT:
        coin = toss_from_outcomes(alice_results)
        transcript.coin = coin
        transcript.append(CoinAnnouncement(Party.ALICE, coin))
    return transcript
