"""
W states and the four encoding codebooks.

Each table row is stored twice: as a Pauli string and as the literal signed
ket expansion printed alongside it. ``load_codebook`` regenerates every
codeword from the Pauli string and refuses to return a book whose rows
disagree with the literal data or whose codewords are not orthonormal.

Row ``k`` of a table encodes the binary representation of ``k``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import DecodeError, DomainError, IntegrityError
from .qcore import (
    ALPHABET,
    EXACT_TOL,
    SPAN_TOL,
    StateVector,
    apply_pauli_string,
    measure_in_orthonormal_set,
)

CODEBOOK_NAMES = ("W3_FULL", "W4_FULL", "W4_DENSE_1", "W4_DENSE_2")

# (operator factors, signed kets). Coefficient magnitude is 1/sqrt(n).
TABLES: dict[str, dict] = {
    "W3_FULL": {
        "n": 3,
        "targets": (1, 2, 3),
        "rows": [
            (("I", "I", "I"), "+001 +010 +100"),
            (("X", "I", "I"), "+101 +110 +000"),
            (("iY", "X", "I"), "-111 -100 +010"),
            (("iY", "iY", "X"), "+110 -101 -011"),
            (("Z", "X", "iY"), "+010 -001 +111"),
            (("I", "iY", "I"), "-011 +000 -110"),
            (("X", "I", "iY"), "+100 -111 -001"),
            (("I", "Z", "iY"), "+000 +011 -101"),
        ],
    },
    "W4_FULL": {
        "n": 4,
        "targets": (1, 2, 3, 4),
        "rows": [
            (("I", "I", "I", "I"), "+0001 +0010 +0100 +1000"),
            (("X", "I", "I", "I"), "+0000 +1001 +1010 +1100"),
            (("iY", "Z", "I", "I"), "+0000 -1001 -1010 +1100"),
            (("I", "iY", "I", "I"), "+0000 -0101 -0110 -1100"),
            (("Z", "X", "I", "I"), "+0000 +0101 +0110 -1100"),
            (("Z", "Z", "I", "I"), "+0001 +0010 -0100 -1000"),
            (("I", "I", "X", "iY"), "-0001 +0010 -0111 -1011"),
            (("Z", "Z", "X", "iY"), "-0001 +0010 +0111 +1011"),
            (("X", "iY", "iY", "iY"), "+1101 -0111 +1011 +1110"),
            (("iY", "X", "iY", "iY"), "+1101 +0111 -1011 +1110"),
            (("I", "X", "X", "iY"), "+0110 -0101 -0011 -1111"),
            (("I", "X", "iY", "X"), "-0110 +0101 -0011 -1111"),
            (("iY", "I", "iY", "X"), "+1010 -1001 +1111 -0011"),
            (("iY", "X", "I", "Z"), "+1101 -1110 -1000 +0100"),
            (("iY", "X", "Z", "I"), "-1101 +1110 -1000 +0100"),
            (("iY", "I", "X", "iY"), "-0011 +1001 -1010 +1111"),
        ],
    },
    "W4_DENSE_1": {
        "n": 4,
        "targets": (1, 2),
        "rows": [
            (("X", "I"), "+1001 +1010 +1100 +0000"),
            (("iY", "Z"), "-1001 -1010 +1100 +0000"),
            (("Z", "X"), "+0101 +0110 +0000 -1100"),
            (("I", "iY"), "-0101 -0110 +0000 -1100"),
            (("I", "Z"), "+0001 +0010 -0100 +1000"),
            (("Z", "I"), "+0001 +0010 +0100 -1000"),
            (("iY", "iY"), "+1101 +1110 -1000 -0100"),
            (("X", "X"), "+1101 +1110 +1000 +0100"),
        ],
    },
    "W4_DENSE_2": {
        "n": 4,
        "targets": (1, 2),
        "rows": [
            (("I", "X"), "+0101 +0110 +0000 +1100"),
            (("Z", "iY"), "-0101 -0110 +0000 +1100"),
            (("iY", "I"), "-1001 -1010 -1100 +0000"),
            (("X", "Z"), "+1001 +1010 -1100 +0000"),
            (("I", "Z"), "+0001 +0010 -0100 +1000"),
            (("Z", "I"), "+0001 +0010 +0100 -1000"),
            (("iY", "iY"), "+1101 +1110 -1000 -0100"),
            (("X", "X"), "+1101 +1110 +1000 +0100"),
        ],
    },
}


@dataclass(frozen=True)
class WState:
    n: int
    vector: StateVector


def make_w_state(n: int) -> WState:
    """Symmetric n-qubit W state: 1/sqrt(n) on every weight-1 basis state."""
    if not isinstance(n, (int, np.integer)) or not 2 <= n <= 8:
        raise DomainError(f"W state size must be an integer in 2..8, got {n!r}")
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n):
        amps[1 << k] = 1 / math.sqrt(n)
    return WState(int(n), StateVector(int(n), amps))


@dataclass(frozen=True)
class PauliString:
    factors: tuple[str, ...]
    targets: tuple[int, ...] | None = None

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise DomainError("Pauli string needs at least one factor")
        for f in factors:
            if f not in ALPHABET:
                raise DomainError(f"unknown factor {f!r}")
        targets = tuple(self.targets) if self.targets is not None else tuple(range(1, len(factors) + 1))
        if len(targets) != len(factors):
            raise DomainError("one target per factor required")
        if len(set(targets)) != len(targets) or list(targets) != sorted(targets):
            raise DomainError(f"targets must be distinct and sorted: {targets}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "targets", targets)

    @property
    def label(self) -> str:
        return "⊗".join(self.factors)

    def apply(self, state: StateVector) -> StateVector:
        return apply_pauli_string(state, self.factors, self.targets)

    def __str__(self) -> str:
        return self.label


def parse_signed_kets(text: str, n: int) -> np.ndarray:
    """``"+001 -010"`` -> amplitude vector with entries +-1/sqrt(n)."""
    amps = np.zeros(2**n, dtype=complex)
    for term in text.split():
        sign, bits = term[0], term[1:]
        if sign not in "+-" or len(bits) != n or set(bits) - {"0", "1"}:
            raise IntegrityError(f"malformed ket term {term!r}")
        amps[int(bits, 2)] += (1 if sign == "+" else -1) / math.sqrt(n)
    return amps


@dataclass(frozen=True)
class RowCheck:
    book: str
    row: int
    bits: str
    operator: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True, eq=False)
class Codebook:
    name: str
    n: int
    width: int
    seed_state: StateVector
    entries: tuple[tuple[str, PauliString], ...]
    encoded_states: tuple[StateVector, ...]

    @property
    def bits_per_block(self) -> int:
        return len(self.entries[0][0])

    @property
    def targets(self) -> tuple[int, ...]:
        return self.entries[0][1].targets

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, PauliString]]:
        return iter(self.entries)

    def index_of(self, bits: str) -> int:
        if len(bits) != self.bits_per_block or set(bits) - {"0", "1"}:
            raise DomainError(f"{self.name} encodes {self.bits_per_block}-bit strings, got {bits!r}")
        return int(bits, 2)

    def gram(self) -> np.ndarray:
        mat = self._matrix()
        return mat.conj() @ mat.T

    def _matrix(self) -> np.ndarray:
        return np.array([s.amplitudes for s in self.encoded_states])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "width": self.width,
            "targets": list(self.targets),
            "entries": [
                {
                    "bits": bits,
                    "operator": list(op.factors),
                    "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
                }
                for (bits, op), state in zip(self.entries, self.encoded_states)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def check_rows(name: str, tables: dict | None = None) -> list[RowCheck]:
    """Recompute every row of table ``name`` and compare with the literal kets."""
    table = _table(name, tables)
    n = table["n"]
    seed = make_w_state(n).vector
    width = int(math.log2(len(table["rows"])))
    results = []
    for k, (factors, kets) in enumerate(table["rows"]):
        op = PauliString(factors, table["targets"])
        bits = format(k, f"0{width}b")
        computed = op.apply(seed).amplitudes
        expected = parse_signed_kets(kets, n)
        diff = float(np.max(np.abs(computed - expected)))
        ok = diff <= EXACT_TOL
        detail = "" if ok else f"max amplitude deviation {diff:.3g}"
        results.append(RowCheck(name, k, bits, op.label, ok, detail))
    return results


def check_orthogonality(book: Codebook) -> tuple[bool, str]:
    gram = book.gram()
    dev = np.abs(gram - np.eye(len(book)))
    if float(dev.max()) <= EXACT_TOL:
        return True, ""
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return False, f"rows {i} and {j}: <e_i|e_j> = {complex(gram[i, j]):.6g}"


def _table(name: str, tables: dict | None) -> dict:
    tables = TABLES if tables is None else tables
    if name not in tables:
        raise DomainError(f"unknown codebook {name!r}; expected one of {CODEBOOK_NAMES}")
    return tables[name]


def build_codebook(name: str, tables: dict | None = None) -> Codebook:
    """Build and validate; raises IntegrityError on any row or orthogonality failure."""
    table = _table(name, tables)
    rows = table["rows"]
    count = len(rows)
    if count == 0 or count & (count - 1):
        raise IntegrityError(f"{name}: entry count {count} is not a power of two")
    for check in check_rows(name, tables):
        if not check.ok:
            raise IntegrityError(f"{name} row {check.row} ({check.operator}): {check.detail}")
    n = table["n"]
    seed = make_w_state(n).vector
    width = int(math.log2(count))
    entries = tuple((format(k, f"0{width}b"), PauliString(f, table["targets"])) for k, (f, _) in enumerate(rows))
    encoded = tuple(op.apply(seed) for _, op in entries)
    book = Codebook(name, n, len(table["targets"]), seed, entries, encoded)
    ok, detail = check_orthogonality(book)
    if not ok:
        raise IntegrityError(f"{name}: codewords not orthonormal, {detail}")
    return book


@lru_cache(maxsize=None)
def load_codebook(name: str) -> Codebook:
    """Validated codebook built from the embedded tables (cached)."""
    return build_codebook(name)


def encode(book: Codebook, bits: str) -> StateVector:
    return book.encoded_states[book.index_of(bits)]


def decode(book: Codebook, state: StateVector, rng: np.random.Generator | None = None) -> str:
    """Bit string of the codeword matching ``state``.

    An exact codeword (|<e_k|state>| = 1 within 1e-9) decodes without
    randomness; anything else is measured in the codeword basis with
    ``rng``. Weight outside the codebook span raises DecodeError.
    """
    if state.num_qubits != book.n:
        raise DomainError(f"{book.name} decodes {book.n}-qubit states, got {state.num_qubits}")
    overlaps = np.abs(book._matrix().conj() @ state.amplitudes)
    k = int(np.argmax(overlaps))
    if abs(overlaps[k] - 1.0) <= SPAN_TOL:
        return book.entries[k][0]
    if rng is None:
        raise DecodeError(f"state is not a {book.name} codeword (best overlap {overlaps[k]:.6g})")
    k, _ = measure_in_orthonormal_set(state, book.encoded_states, rng)
    return book.entries[k][0]


def operator_set(book: Codebook) -> frozenset[tuple[str, ...]]:
    return frozenset(op.factors for _, op in book.entries)


def books(names: Sequence[str] = CODEBOOK_NAMES) -> list[Codebook]:
    return [load_codebook(name) for name in names]
