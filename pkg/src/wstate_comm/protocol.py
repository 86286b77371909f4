"""
Protocol state machines: DSQC with particle-order rearrangement, the
multi-round QSDC variant, and QKD as either one carrying a random message.

Registers in transit are kept per physical system: each block is one
n-qubit StateVector, each decoy a 1-qubit StateVector. A slot of the
travelling sequence names either ``("m", block, qubit)`` or
``("d", decoy_index)``; blocks and qubits are 1-based in transcripts.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .codebooks import Codebook, decode, encode, load_codebook
from .errors import DecodeError, DomainError
from .qcore import MINUS, ONE, PLUS, X_BASIS, Z_BASIS, ZERO, MeasurementBasis, StateVector, measure_qubit

DEFAULT_THRESHOLD = 0.05

DECOY_STATES: dict[str, StateVector] = {"0": ZERO, "1": ONE, "+": PLUS, "-": MINUS}
DECOY_BASIS = {"0": "Z", "1": "Z", "+": "X", "-": "X"}
BASES: dict[str, MeasurementBasis] = {"Z": Z_BASIS, "X": X_BASIS}


class Mode(str, enum.Enum):
    DSQC = "dsqc"
    QSDC = "qsdc"
    QKD = "qkd"


class EveKind(str, enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND_RANDOM_BASIS = "intercept"
    MEASURE_ALL_COMPUTATIONAL = "measure-all"


@dataclass(frozen=True)
class DecoyPhoton:
    prepared_state: str
    position: int
    preparation_basis: str

    def __post_init__(self):
        if DECOY_BASIS.get(self.prepared_state) != self.preparation_basis:
            raise DomainError(f"decoy {self.prepared_state!r} is not a {self.preparation_basis} basis state")


@dataclass(frozen=True)
class EveStrategy:
    """Eavesdropper acting on qubits in transit.

    ``rounds`` restricts the attack to the listed transmissions (1-based;
    DSQC has a single transmission). ``rng`` defaults to one seeded from
    the run's config.
    """

    kind: EveKind = EveKind.NONE
    rng: np.random.Generator | None = None
    rounds: frozenset[int] | None = None

    def attacks(self, round_index: int) -> bool:
        return self.kind is not EveKind.NONE and (self.rounds is None or round_index in self.rounds)


NO_EVE = EveStrategy()


@dataclass(frozen=True)
class ProtocolConfig:
    mode: Mode = Mode.DSQC
    codebook: str = "W3_FULL"
    blocks: int = 1
    error_threshold: float = DEFAULT_THRESHOLD
    alice_seed: int = 0
    bob_seed: int = 1
    eve_seed: int = 2
    transport: Mode = Mode.DSQC  # carrier for QKD mode

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "transport", Mode(self.transport))
        if not isinstance(self.blocks, (int, np.integer)) or self.blocks < 1:
            raise DomainError(f"block count must be a positive integer, got {self.blocks!r}")
        if not 0 <= self.error_threshold < 1:
            raise DomainError(f"error threshold must lie in [0, 1), got {self.error_threshold}")
        if self.transport is Mode.QKD:
            raise DomainError("QKD transport must be dsqc or qsdc")

    @classmethod
    def from_seed(cls, seed: int, **kwargs) -> "ProtocolConfig":
        """Derive independent Alice/Bob/Eve seeds from one master seed."""
        alice, bob, eve = (int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(3))
        return cls(alice_seed=alice, bob_seed=bob, eve_seed=eve, **kwargs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        d["transport"] = self.transport.value
        return d


@dataclass
class Channel:
    """Registers currently held by whoever controls the channel."""

    blocks: list[StateVector]
    decoys: list[StateVector]

    def copy(self) -> "Channel":
        return Channel(list(self.blocks), list(self.decoys))

    def measure(self, slot: tuple, basis: str, rng: np.random.Generator) -> str:
        if slot[0] == "m":
            _, block, qubit = slot
            outcome, self.blocks[block] = measure_qubit(self.blocks[block], qubit, BASES[basis], rng)
        else:
            outcome, self.decoys[slot[1]] = measure_qubit(self.decoys[slot[1]], 1, BASES[basis], rng)
        return outcome


@dataclass(frozen=True)
class EveObservation:
    position: int
    basis: str
    outcome: str


def eve_apply(
    strategy: EveStrategy,
    slots: Sequence[tuple],
    channel: Channel,
    rng: np.random.Generator | None = None,
) -> tuple[Channel, list[EveObservation]]:
    """Let Eve act slot by slot; returns the forwarded registers and her record."""
    if strategy.kind is EveKind.NONE:
        return channel, []
    rng = strategy.rng if strategy.rng is not None else rng
    if rng is None:
        raise DomainError("an active eavesdropper needs a random source")
    forwarded = channel.copy()
    observations = []
    for position, slot in enumerate(slots):
        if strategy.kind is EveKind.INTERCEPT_RESEND_RANDOM_BASIS:
            basis = "Z" if rng.random() < 0.5 else "X"
        else:
            basis = "Z"
        observations.append(EveObservation(position, basis, forwarded.measure(slot, basis, rng)))
    return forwarded, observations


@dataclass(frozen=True)
class RoundLog:
    round: int
    slots: list[str]
    decoy_positions: list[int]
    decoy_states: list[str]
    bob_bases: list[str]
    bob_outcomes: list[str]
    matching: int
    errors: int
    error_rate: float
    passed: bool
    eve: list[list] = field(default_factory=list)


@dataclass(frozen=True)
class ProtocolTranscript:
    mode: str
    transport: str
    codebook: str
    n: int
    bits_per_block: int
    N: int
    error_threshold: float
    message_sent: str
    message_received: str | None
    corrupted_blocks: list[int]
    qubits_transmitted: int
    decoys_transmitted: int
    classical_bits_for_decoding: int
    decoy_error_rate: float
    aborted: bool
    aborted_at_round: int | None
    permutation: list[int] | None
    permutation_bits_information_theoretic: float | None
    rounds: list[RoundLog]
    config: dict

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolTranscript":
        data = dict(data)
        data["rounds"] = [RoundLog(**r) for r in data["rounds"]]
        return cls(**data)

    @property
    def delivered(self) -> bool:
        return not self.aborted and self.message_received == self.message_sent


@dataclass(frozen=True)
class QKDResult:
    transcript: ProtocolTranscript
    alice_key: str
    bob_key: str | None

    @property
    def keys_match(self) -> bool:
        return self.bob_key is not None and self.alice_key == self.bob_key


def slot_name(slot: tuple) -> str:
    if slot[0] == "m":
        return f"m{slot[1] + 1}:{slot[2]}"
    return f"d{slot[1] + 1}"


def _interleave(message_slots: list[tuple], decoy_count: int, rng: np.random.Generator) -> tuple[list[tuple], list[int]]:
    total = len(message_slots) + decoy_count
    positions = sorted(int(p) for p in rng.choice(total, size=decoy_count, replace=False))
    decoy_at = set(positions)
    slots, msg = [], iter(message_slots)
    decoy_index = 0
    for pos in range(total):
        if pos in decoy_at:
            slots.append(("d", decoy_index))
            decoy_index += 1
        else:
            slots.append(next(msg))
    return slots, positions


class _Session:
    """One protocol run; keeps the mutable bookkeeping out of the public API."""

    def __init__(self, config: ProtocolConfig, message: str, eve: EveStrategy, alice: np.random.Generator):
        self.config = config
        self.book: Codebook = load_codebook(config.codebook)
        self.message = _check_message(self.book, config.blocks, message)
        self.eve = eve
        self.alice = alice
        self.bob = np.random.default_rng(config.bob_seed)
        self.eve_rng = eve.rng if eve.rng is not None else np.random.default_rng(config.eve_seed)
        self.rounds: list[RoundLog] = []
        self.qubits = 0
        self.decoys = 0
        k = self.book.bits_per_block
        # Alice encodes each block
        blocks = [encode(self.book, self.message[j * k:(j + 1) * k]) for j in range(config.blocks)]
        self.channel = Channel(blocks, [])

    def transmit(self, round_index: int, message_slots: list[tuple]) -> bool:
        """Send message slots plus an equal number of decoys, then run the decoy check."""
        count = len(message_slots)
        labels = [str(x) for x in self.alice.choice(list(DECOY_STATES), size=count)]
        first = len(self.channel.decoys)
        self.channel.decoys.extend(DECOY_STATES[s] for s in labels)
        local_slots, positions = _interleave(message_slots, count, self.alice)
        slots = [("d", first + s[1]) if s[0] == "d" else s for s in local_slots]
        self.qubits += len(slots)
        self.decoys += count

        observations: list[EveObservation] = []
        if self.eve.attacks(round_index):
            self.channel, observations = eve_apply(self.eve, slots, self.channel, self.eve_rng)

        # Bob measures announced decoys in random bases
        bob_bases = ["Z" if b == 0 else "X" for b in self.bob.integers(0, 2, size=count)]
        outcomes = [self.channel.measure(("d", first + i), basis, self.bob) for i, basis in enumerate(bob_bases)]
        matching = [i for i in range(count) if DECOY_BASIS[labels[i]] == bob_bases[i]]
        errors = sum(outcomes[i] != labels[i] for i in matching)
        rate = errors / len(matching) if matching else 0.0
        passed = rate <= self.config.error_threshold
        self.rounds.append(
            RoundLog(
                round=round_index,
                slots=[slot_name(s) for s in slots],
                decoy_positions=positions,
                decoy_states=labels,
                bob_bases=bob_bases,
                bob_outcomes=outcomes,
                matching=len(matching),
                errors=int(errors),
                error_rate=rate,
                passed=passed,
                eve=[[o.position, o.basis, o.outcome] for o in observations],
            )
        )
        return passed

    def decode_blocks(self) -> tuple[str, list[int]]:
        """Bob measures every block in the codebook basis."""
        received, corrupted = [], []
        for j, state in enumerate(self.channel.blocks):
            try:
                received.append(decode(self.book, state, self.bob))
            except DecodeError:
                received.append("?" * self.book.bits_per_block)
                corrupted.append(j + 1)
        return "".join(received), corrupted

    def transcript(self, mode: Mode, transport: Mode, aborted_at: int | None, permutation, classical_bits: int):
        matching = sum(r.matching for r in self.rounds)
        errors = sum(r.errors for r in self.rounds)
        received, corrupted = (None, []) if aborted_at is not None else self.decode_blocks()
        perm_cost = None
        if permutation is not None:
            perm_cost = round(math.lgamma(len(permutation) + 1) / math.log(2), 6)
        return ProtocolTranscript(
            mode=mode.value,
            transport=transport.value,
            codebook=self.book.name,
            n=self.book.n,
            bits_per_block=self.book.bits_per_block,
            N=self.config.blocks,
            error_threshold=self.config.error_threshold,
            message_sent=self.message,
            message_received=received,
            corrupted_blocks=corrupted,
            qubits_transmitted=self.qubits,
            decoys_transmitted=self.decoys,
            classical_bits_for_decoding=classical_bits,
            decoy_error_rate=errors / matching if matching else 0.0,
            aborted=aborted_at is not None,
            aborted_at_round=aborted_at,
            permutation=permutation,
            permutation_bits_information_theoretic=perm_cost,
            rounds=self.rounds,
            config=self.config.to_dict(),
        )


def _check_message(book: Codebook, blocks: int, message: str) -> str:
    expected = book.bits_per_block * blocks
    if len(message) != expected:
        raise DomainError(f"{book.name} with {blocks} blocks carries {expected} bits, message has {len(message)}")
    if set(message) - {"0", "1"}:
        raise DomainError("message must be a bit string")
    return message


def _dsqc(session: _Session, mode: Mode) -> ProtocolTranscript:
    n, N = session.book.n, session.config.blocks
    # flatten, reorder globally, interleave n*N decoys
    sequence = [("m", j, q) for j in range(N) for q in range(1, n + 1)]
    permutation = [int(p) for p in session.alice.permutation(len(sequence))]
    reordered = [sequence[p] for p in permutation]
    if not session.transmit(1, reordered):
        return session.transcript(mode, Mode.DSQC, 1, None, 0)
    # the order announcement costs one bit per travelling message qubit
    return session.transcript(mode, Mode.DSQC, None, permutation, n * N)


def _qsdc(session: _Session, mode: Mode) -> ProtocolTranscript:
    n, N = session.book.n, session.config.blocks
    for i in range(1, n + 1):
        if not session.transmit(i, [("m", j, i) for j in range(N)]):
            return session.transcript(mode, Mode.QSDC, i, None, 0)
    return session.transcript(mode, Mode.QSDC, None, None, 0)


def _require_mode(config: ProtocolConfig, mode: Mode) -> None:
    if config.mode is not mode:
        raise DomainError(f"config mode is {config.mode.value}, expected {mode.value}")


def run_dsqc(config: ProtocolConfig, message: str, eve: EveStrategy = NO_EVE) -> ProtocolTranscript:
    _require_mode(config, Mode.DSQC)
    return _dsqc(_Session(config, message, eve, np.random.default_rng(config.alice_seed)), Mode.DSQC)


def run_qsdc(config: ProtocolConfig, message: str, eve: EveStrategy = NO_EVE) -> ProtocolTranscript:
    _require_mode(config, Mode.QSDC)
    return _qsdc(_Session(config, message, eve, np.random.default_rng(config.alice_seed)), Mode.QSDC)


def run_qkd(config: ProtocolConfig, key_length: int, eve: EveStrategy = NO_EVE) -> QKDResult:
    """Send a uniformly random key through the configured transport."""
    _require_mode(config, Mode.QKD)
    book = load_codebook(config.codebook)
    if key_length != book.bits_per_block * config.blocks:
        raise DomainError(f"key length must be {book.bits_per_block * config.blocks} for {config.blocks} blocks")
    alice = np.random.default_rng(config.alice_seed)
    key = "".join(str(int(b)) for b in alice.integers(0, 2, size=key_length))
    session = _Session(config, key, eve, alice)
    run = _dsqc if config.transport is Mode.DSQC else _qsdc
    transcript = run(session, Mode.QKD)
    return QKDResult(transcript, key, transcript.message_received)


def run(config: ProtocolConfig, message: str | None = None, eve: EveStrategy = NO_EVE):
    """Dispatch on ``config.mode``; a missing message is drawn at random."""
    if config.mode is Mode.QKD:
        book = load_codebook(config.codebook)
        return run_qkd(config, book.bits_per_block * config.blocks, eve)
    if message is None:
        message = random_message(config)
    runner = run_dsqc if config.mode is Mode.DSQC else run_qsdc
    return runner(config, message, eve)


def random_message(config: ProtocolConfig, rng: np.random.Generator | None = None) -> str:
    book = load_codebook(config.codebook)
    rng = rng if rng is not None else np.random.default_rng(config.alice_seed ^ 0x5DEECE66D)
    return "".join(str(int(b)) for b in rng.integers(0, 2, size=book.bits_per_block * config.blocks))


def transmitted_message_qubits(transcript: ProtocolTranscript) -> list[tuple[int, int]]:
    """(block, qubit) pairs that appeared on the channel, read from round logs."""
    out = []
    for r in transcript.rounds:
        for name in r.slots:
            if name.startswith("m"):
                block, qubit = name[1:].split(":")
                out.append((int(block), int(qubit)))
    return out


def with_eve_rounds(strategy: EveStrategy, rounds: Iterable[int]) -> EveStrategy:
    return replace(strategy, rounds=frozenset(rounds))
