"""Bell-state labels, Pauli flips, and a symbolic entanglement-swapping engine.

The four Bell states are tracked as two classical bits (hi, lo): hi is the
bit-flip component, lo the phase-flip component.  Under this encoding a Pauli
applied to either particle of a pair is a XOR on the label, and a Bell
measurement that joins two different pairs (entanglement swapping) leaves the
two spectator particles in the state ``b1 ^ b2 ^ outcome``.  Both facts are
certified against a dense statevector simulation in the test suite; the
engine itself never touches amplitudes.
"""

from __future__ import annotations

from enum import Enum, IntEnum
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "BellLabel",
    "PauliLabel",
    "Party",
    "ParticleId",
    "EntangledMatching",
    "MatchingError",
    "UnknownParticleError",
    "AlreadyMeasuredError",
    "SelfMeasurementError",
    "apply_pauli",
    "parity",
    "total_parity",
]


class BellLabel(IntEnum):
    """Two-bit Bell-state label: value = (hi << 1) | lo."""

    PHI_PLUS = 0b00
    PHI_MINUS = 0b01
    PSI_PLUS = 0b10
    PSI_MINUS = 0b11

    @property
    def hi(self) -> int:
        """Bit-flip bit: 0 for Phi states, 1 for Psi states."""
        return (self.value >> 1) & 1

    @property
    def lo(self) -> int:
        """Phase-flip bit: 0 for + states, 1 for - states."""
        return self.value & 1

    @property
    def parity(self) -> int:
        """hi XOR lo.  Phi+ and Psi- are even; Phi- and Psi+ are odd."""
        return ((self.value >> 1) ^ self.value) & 1

    @property
    def bits(self) -> str:
        return f"{self.value:02b}"

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self.value]

    @classmethod
    def from_bits(cls, bits: str) -> "BellLabel":
        return cls(int(bits, 2))

    def __xor__(self, other: int) -> "BellLabel":  # type: ignore[override]
        return BellLabel(self.value ^ int(other))

    __rxor__ = __xor__

    def __str__(self) -> str:
        return self.symbol


_SYMBOLS = ("Phi+", "Phi-", "Psi+", "Psi-")


class PauliLabel(IntEnum):
    """Pauli flip as (x, z) bits, value = (x << 1) | z, phases discarded.

    The Y used throughout is the real matrix X @ Z = [[0, -1], [1, 0]], so
    composition is a plain XOR of labels and no phase bookkeeping is needed.
    """

    I = 0b00  # noqa: E741 - I is the identity flip, the conventional name
    Z = 0b01
    X = 0b10
    Y = 0b11

    @property
    def x(self) -> int:
        return (self.value >> 1) & 1

    @property
    def z(self) -> int:
        return self.value & 1

    @property
    def parity(self) -> int:
        """Parity change this flip causes on any Bell label (x XOR z)."""
        return ((self.value >> 1) ^ self.value) & 1


def apply_pauli(label: BellLabel, pauli: PauliLabel) -> BellLabel:
    """Label of (pauli on one particle) applied to a pair in `label`.

    Acting on either particle gives the same label; only global/relative
    phase differs, which the label algebra does not track.
    """
    return BellLabel(label.value ^ pauli.value)


def parity(label: BellLabel) -> int:
    return label.parity


def total_parity(outcomes: Iterable[BellLabel]) -> int:
    """XOR of the parities of `outcomes`; 0 for an empty collection."""
    acc = 0
    for label in outcomes:
        acc ^= label.parity
    return acc


class Party(str, Enum):
    ALICE = "alice"
    BOB = "bob"

    def __str__(self) -> str:
        return self.value


class ParticleId(NamedTuple):
    """A single particle, addressed as owner + 1-based index.

    Within one party's numbering, pair m consists of particles 2m-1 and 2m;
    odd indices are the halves sent over the channel, even indices stay home.
    """

    owner: Party
    index: int

    @property
    def pair(self) -> int:
        """1-based index of the pair this particle belongs to."""
        return (self.index + 1) // 2

    def __str__(self) -> str:
        return f"{self.owner.value}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "ParticleId":
        owner, _, idx = text.partition(":")
        return cls(Party(owner), int(idx))


class MatchingError(ValueError):
    """Base class for invalid operations on an EntangledMatching."""


class UnknownParticleError(MatchingError):
    pass


class AlreadyMeasuredError(MatchingError):
    pass


class SelfMeasurementError(MatchingError):
    pass


class EntangledMatching:
    """Perfect matching of particles into labelled Bell pairs.

    Supports exactly the operations the protocol needs: Pauli flips on a
    single particle and Bell measurements on arbitrary particle pairs.
    Measuring two partners consumes their edge and reports its label
    deterministically (no randomness involved); measuring particles from two
    different edges draws a uniform outcome and rewires the two spectators
    into a fresh edge labelled ``b1 ^ b2 ^ outcome``.

    The XOR of all live edge labels and all recorded outcomes is invariant
    under both operations, which is the conservation law behind the whole
    protocol; `conservation_ok()` checks it in O(edges).
    """

    def __init__(self, edges: Iterable[tuple[ParticleId, ParticleId, BellLabel]] = ()):
        self._edges: dict[ParticleId, tuple[ParticleId, BellLabel]] = {}
        self._consumed: set[ParticleId] = set()
        self.history: list[tuple[tuple[ParticleId, ParticleId], BellLabel]] = []
        self.initial_xor = 0
        for u, v, label in edges:
            self.add_pair(u, v, label)

    def add_pair(self, u: ParticleId, v: ParticleId, label: BellLabel) -> None:
        if u == v:
            raise SelfMeasurementError(f"cannot pair {u} with itself")
        for p in (u, v):
            if p in self._edges or p in self._consumed:
                raise MatchingError(f"particle {p} already in the matching")
        self._edges[u] = (v, label)
        self._edges[v] = (u, label)
        self.initial_xor ^= label.value

    # -- queries ---------------------------------------------------------

    def is_live(self, u: ParticleId) -> bool:
        return u in self._edges

    def live_particles(self) -> list[ParticleId]:
        return list(self._edges)

    def partner_of(self, u: ParticleId) -> ParticleId:
        return self._require_live(u)[0]

    def label_of(self, u: ParticleId) -> BellLabel:
        return self._require_live(u)[1]

    def live_xor(self) -> int:
        """XOR of the labels of all live edges (each edge counted once)."""
        acc = 0
        seen: set[ParticleId] = set()
        for u, (v, lab) in self._edges.items():
            if u not in seen:
                acc ^= lab.value
                seen.add(u)
                seen.add(v)
        return acc

    def history_xor(self) -> int:
        acc = 0
        for _, outcome in self.history:
            acc ^= outcome.value
        return acc

    def conservation_ok(self) -> bool:
        """True iff XOR(live labels) ^ XOR(outcomes) equals the initial XOR."""
        return (self.live_xor() ^ self.history_xor()) == self.initial_xor

    def _require_live(self, u: ParticleId) -> tuple[ParticleId, BellLabel]:
        entry = self._edges.get(u)
        if entry is None:
            if u in self._consumed:
                raise AlreadyMeasuredError(f"particle {u} was already measured")
            raise UnknownParticleError(f"particle {u} is not part of the matching")
        return entry

    # -- operations ------------------------------------------------------

    def apply_pauli(self, u: ParticleId, pauli: PauliLabel) -> None:
        """Flip the edge containing `u` by `pauli` (single-particle action)."""
        if pauli is PauliLabel.I:
            self._require_live(u)
            return
        v, label = self._require_live(u)
        flipped = apply_pauli(label, pauli)
        self._edges[u] = (v, flipped)
        self._edges[v] = (u, flipped)

    def measure_pair(
        self, u: ParticleId, v: ParticleId, rng: np.random.Generator | None = None
    ) -> BellLabel:
        """Bell-measure particles `u` and `v`; returns the outcome label.

        Partners: outcome is their edge label, deterministically - `rng` is
        never consulted.  Non-partners: outcome is uniform over the four
        labels and the two spectator particles become a new edge labelled
        ``b1 ^ b2 ^ outcome``.
        """
        if u == v:
            raise SelfMeasurementError(f"cannot measure {u} against itself")
        pu, b1 = self._require_live(u)
        if pu == v:
            outcome = b1
            del self._edges[u], self._edges[v]
        else:
            pv, b2 = self._require_live(v)
            if rng is None:
                raise ValueError("rng is required when measuring non-partners")
            outcome = BellLabel(int(rng.integers(4)))
            residual = BellLabel(b1.value ^ b2.value ^ outcome.value)
            del self._edges[u], self._edges[v]
            self._edges[pu] = (pv, residual)
            self._edges[pv] = (pu, residual)
        self._consumed.add(u)
        self._consumed.add(v)
        self.history.append(((u, v), outcome))
        return outcome
