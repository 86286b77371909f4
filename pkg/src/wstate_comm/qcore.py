"""
Dense state-vector engine for small multi-qubit registers.

Conventions:
- Qubits are numbered from 1. Qubit 1 is the leftmost symbol of a ket and
  the most significant bit of the basis index, so ``|0001>`` has index 1.
- ``iY`` is the real matrix ``[[0, 1], [-1, 0]]``: iY|0> = -|1>, iY|1> = +|0>.
- States are immutable. Every measurement takes an explicit
  ``numpy.random.Generator``; nothing reads global random state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DecodeError, DomainError

MAX_QUBITS = 8
EXACT_TOL = 1e-12
SPAN_TOL = 1e-9

_SQRT2_INV = 1 / np.sqrt(2)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over the computational basis of ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise DomainError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise DomainError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > EXACT_TOL:
            raise DomainError(f"state is not normalized (squared norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Iterable[complex], normalize: bool = False) -> "StateVector":
        amps = np.asarray(list(amplitudes) if not isinstance(amplitudes, np.ndarray) else amplitudes, dtype=complex)
        num_qubits = int(round(np.log2(amps.shape[0]))) if amps.shape[0] else 0
        if amps.shape[0] != 2**num_qubits:
            raise DomainError(f"amplitude count {amps.shape[0]} is not a power of two")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise DomainError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(num_qubits, amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis state ``|bits>``."""
        if not bits or set(bits) - {"0", "1"}:
            raise DomainError(f"not a bit string: {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.num_qubits + other.num_qubits, np.kron(self.amplitudes, other.amplitudes))

    def equals_up_to_phase(self, other: "StateVector", tol: float = EXACT_TOL) -> bool:
        if other.num_qubits != self.num_qubits:
            return False
        return abs(abs(inner_product(self, other)) - 1.0) <= tol

    def ket(self, tol: float = EXACT_TOL) -> str:
        """Human-readable expansion, e.g. ``+0.5|0001> -0.5|0010>``."""
        terms = []
        for index, amp in enumerate(self.amplitudes):
            if abs(amp) > tol:
                label = format(index, f"0{self.num_qubits}b")
                coeff = amp.real if abs(amp.imag) <= tol else amp
                terms.append(f"{coeff:+.6g}|{label}>")
        return " ".join(terms)

    def __repr__(self) -> str:
        return f"StateVector({self.ket()})"


@dataclass(frozen=True, eq=False)
class SingleQubitOp:
    name: str
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.shape != (2, 2):
            raise DomainError(f"{self.name}: single-qubit operator must be 2x2")
        if not np.allclose(matrix.conj().T @ matrix, np.eye(2), atol=EXACT_TOL, rtol=0):
            raise DomainError(f"{self.name}: matrix is not unitary")
        object.__setattr__(self, "matrix", matrix)


I = SingleQubitOp("I", np.eye(2))
X = SingleQubitOp("X", [[0, 1], [1, 0]])
IY = SingleQubitOp("iY", [[0, 1], [-1, 0]])
Z = SingleQubitOp("Z", [[1, 0], [0, -1]])

PAULI_OPS: dict[str, SingleQubitOp] = {op.name: op for op in (I, X, IY, Z)}
ALPHABET: tuple[str, ...] = ("I", "X", "iY", "Z")


def as_op(op: SingleQubitOp | str) -> SingleQubitOp:
    if isinstance(op, SingleQubitOp):
        return op
    try:
        return PAULI_OPS[op]
    except KeyError:
        raise DomainError(f"unknown operator {op!r}; expected one of {ALPHABET}") from None


def _gram(states: Sequence[StateVector]) -> np.ndarray:
    mat = np.array([s.amplitudes for s in states])
    return mat.conj() @ mat.T


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal measurement basis; ``labels`` name the outcomes in order."""

    name: str
    basis_states: tuple[StateVector, ...]
    labels: tuple[str, ...] = field(default=())
    dual: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        states = tuple(self.basis_states)
        if not states:
            raise DomainError("measurement basis is empty")
        if len({s.num_qubits for s in states}) != 1:
            raise DomainError("basis states act on different qubit counts")
        gram = _gram(states)
        if not np.allclose(gram, np.eye(len(states)), atol=EXACT_TOL, rtol=0):
            raise DomainError(f"basis {self.name!r} is not orthonormal")
        labels = tuple(self.labels) or tuple(str(k) for k in range(len(states)))
        if len(labels) != len(states):
            raise DomainError("one label per basis state required")
        object.__setattr__(self, "basis_states", states)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dual", np.array([b.amplitudes for b in states]).conj())

    @property
    def num_qubits(self) -> int:
        return self.basis_states[0].num_qubits


ZERO = StateVector.basis("0")
ONE = StateVector.basis("1")
PLUS = StateVector(1, [_SQRT2_INV, _SQRT2_INV])
MINUS = StateVector(1, [_SQRT2_INV, -_SQRT2_INV])

Z_BASIS = MeasurementBasis("Z", (ZERO, ONE), ("0", "1"))
X_BASIS = MeasurementBasis("X", (PLUS, MINUS), ("+", "-"))


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 1 <= qubit <= state.num_qubits:
        raise DomainError(f"qubit {qubit} out of range 1..{state.num_qubits}")


def apply_pauli_string(
    state: StateVector,
    ops: Sequence[SingleQubitOp | str],
    targets: Sequence[int],
) -> StateVector:
    """Apply ``ops[k]`` to qubit ``targets[k]`` and identity everywhere else."""
    if len(ops) != len(targets):
        raise DomainError(f"{len(ops)} operators for {len(targets)} targets")
    if len(set(targets)) != len(targets):
        raise DomainError(f"targets are not distinct: {list(targets)}")
    for t in targets:
        _check_qubit(state, t)
    n = state.num_qubits
    psi = state.amplitudes.reshape([2] * n)
    for op, t in zip(ops, targets):
        matrix = as_op(op).matrix
        psi = np.moveaxis(np.tensordot(matrix, psi, axes=([1], [t - 1])), 0, t - 1)
    return StateVector(n, psi.reshape(-1))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugating the first argument."""
    if a.num_qubits != b.num_qubits:
        raise DomainError(f"dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    if len(probs) == 2:
        return 0 if rng.random() * (probs[0] + probs[1]) < probs[0] else 1
    u = rng.random() * float(probs.sum())
    index = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    index = min(index, len(probs) - 1)
    # float round-off may land on a branch of (numerically) zero weight
    if probs[index] <= EXACT_TOL**2:
        index = int(np.argmax(probs))
    return index


def measure_qubit(
    state: StateVector,
    qubit: int,
    basis: MeasurementBasis,
    rng: np.random.Generator,
) -> tuple[str, StateVector]:
    """Projective single-qubit measurement; returns (outcome label, collapsed state)."""
    _check_qubit(state, qubit)
    if basis.num_qubits != 1 or len(basis.basis_states) != 2:
        raise DomainError(f"basis {basis.name!r} is not a single-qubit basis")
    n = state.num_qubits
    psi = state.amplitudes.reshape(2 ** (qubit - 1), 2, 2 ** (n - qubit))
    # row k of the dual matrix is <b_k|; one matmul yields both branches
    branches = np.matmul(basis.dual, psi)
    probs = (branches.real**2 + branches.imag**2).sum(axis=(0, 2))
    k = _sample(probs, rng)
    chosen = basis.basis_states[k].amplitudes.reshape(1, 2, 1)
    collapsed = (chosen * branches[:, k:k + 1, :]).reshape(-1) / np.sqrt(probs[k])
    return basis.labels[k], StateVector(n, collapsed)


def outcome_probabilities(state: StateVector, basis_states: Sequence[StateVector]) -> np.ndarray:
    overlaps = np.array([b.amplitudes for b in basis_states]).conj() @ state.amplitudes
    return np.abs(overlaps) ** 2


def span_residual(state: StateVector, basis_states: Sequence[StateVector]) -> float:
    """Norm of the component of ``state`` orthogonal to span(basis_states)."""
    mat = np.array([b.amplitudes for b in basis_states])
    projected = mat.T @ (mat.conj() @ state.amplitudes)
    return float(np.linalg.norm(state.amplitudes - projected))


def measure_in_orthonormal_set(
    state: StateVector,
    basis_states: Sequence[StateVector],
    rng: np.random.Generator | None,
) -> tuple[int, float]:
    """Measure against a (possibly incomplete) orthonormal set.

    Returns ``(index, probability)``. Raises DecodeError when the state has
    weight outside the span of ``basis_states``. ``rng`` may be None only if
    the outcome is certain.
    """
    if not basis_states:
        raise DomainError("empty measurement set")
    for b in basis_states:
        if b.num_qubits != state.num_qubits:
            raise DomainError("measurement set and state have different qubit counts")
    if not np.allclose(_gram(basis_states), np.eye(len(basis_states)), atol=SPAN_TOL, rtol=0):
        raise DomainError("measurement set is not orthonormal")
    residual = span_residual(state, basis_states)
    if residual > SPAN_TOL:
        raise DecodeError(f"state lies outside the measured span (residual norm {residual:.3g})")
    probs = outcome_probabilities(state, basis_states)
    certain = int(np.argmax(probs))
    if probs[certain] >= 1 - SPAN_TOL:
        return certain, float(probs[certain])
    if rng is None:
        raise DomainError("outcome is not deterministic and no random source was supplied")
    k = _sample(probs, rng)
    return k, float(probs[k])
