"""
Exhaustive search for encoding schemes on a W state.

A scheme is a set of Pauli strings whose images of the seed state are
pairwise orthogonal. Candidates are all ``4**m`` products over the
alphabet {I, X, iY, Z}; two candidates are compatible when their images
are orthogonal, so schemes of size ``s`` are exactly the ``s``-cliques of
the compatibility graph.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .codebooks import make_w_state
from .errors import DomainError, IntegrityError
from .qcore import ALPHABET, EXACT_TOL, StateVector, apply_pauli_string, inner_product

OperatorTuple = tuple[str, ...]


@dataclass(frozen=True)
class SearchSpec:
    n: int
    width: int
    targets: tuple[int, ...] | None = None
    required_set_size: int = 8
    alphabet: tuple[str, ...] = ALPHABET

    def __post_init__(self):
        targets = tuple(self.targets) if self.targets is not None else tuple(range(1, self.width + 1))
        object.__setattr__(self, "targets", targets)
        if not 1 <= self.width <= self.n:
            raise DomainError(f"width must be in 1..n={self.n}, got {self.width}")
        if len(targets) != self.width or len(set(targets)) != self.width:
            raise DomainError(f"need {self.width} distinct targets, got {targets}")
        if any(not 1 <= t <= self.n for t in targets):
            raise DomainError(f"targets out of range 1..{self.n}: {targets}")
        if not 1 <= self.required_set_size <= 2**self.n:
            raise DomainError(f"required_set_size must be in 1..{2**self.n}")
        if set(self.alphabet) - set(ALPHABET):
            raise DomainError(f"alphabet must be drawn from {ALPHABET}")

    @property
    def seed(self) -> StateVector:
        return make_w_state(self.n).vector

    def image(self, operators: OperatorTuple) -> StateVector:
        return apply_pauli_string(self.seed, operators, self.targets)


@dataclass(frozen=True)
class CompatibilityGraph:
    spec: SearchSpec
    vertices: tuple[OperatorTuple, ...]
    adjacency: tuple[frozenset[int], ...]

    def adjacent(self, u: OperatorTuple, v: OperatorTuple) -> bool:
        return self.vertices.index(v) in self.adjacency[self.vertices.index(u)]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


def build_compatibility_graph(spec: SearchSpec) -> CompatibilityGraph:
    vertices = tuple(itertools.product(spec.alphabet, repeat=spec.width))
    images = np.array([spec.image(v).amplitudes for v in vertices])
    overlaps = np.abs(images.conj() @ images.T)
    adjacency = tuple(
        frozenset(int(j) for j in np.nonzero(overlaps[i] < EXACT_TOL)[0] if j != i) for i in range(len(vertices))
    )
    return CompatibilityGraph(spec, vertices, adjacency)


def enumerate_cliques(graph: CompatibilityGraph, size: int) -> list[tuple[OperatorTuple, ...]]:
    """All cliques of exactly ``size`` vertices, in lexicographic vertex-index order."""
    if size < 1:
        raise DomainError("clique size must be positive")
    found: list[tuple[int, ...]] = []
    # neighbours above v as an int bitmask
    later = [sum(1 << u for u in graph.adjacency[v] if u > v) for v in range(len(graph.vertices))]

    def extend(clique: list[int], candidates: int) -> None:
        if len(clique) == size:
            found.append(tuple(clique))
            return
        need = size - len(clique)
        while candidates and candidates.bit_count() >= need:
            v = (candidates & -candidates).bit_length() - 1
            candidates &= candidates - 1
            rest = candidates & later[v]
            if rest.bit_count() >= need - 1:
                extend(clique + [v], rest)

    extend([], (1 << len(graph.vertices)) - 1)
    return [tuple(graph.vertices[i] for i in clique) for clique in found]


class SchemeCheck(NamedTuple):
    ok: bool
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def verify_scheme(operators: Iterable[Sequence[str]], spec: SearchSpec) -> SchemeCheck:
    ops = [tuple(op) for op in operators]
    for op in ops:
        if len(op) != spec.width or set(op) - set(spec.alphabet):
            raise DomainError(f"operator {op} not drawn from the search alphabet at width {spec.width}")
    images = [spec.image(op) for op in ops]
    for (i, a), (j, b) in itertools.combinations(enumerate(images), 2):
        overlap = abs(inner_product(a, b))
        if overlap >= EXACT_TOL:
            return SchemeCheck(False, f"{'⊗'.join(ops[i])} and {'⊗'.join(ops[j])} overlap {overlap:.6g}")
    return SchemeCheck(True, "")


@dataclass(frozen=True)
class SchemeResult:
    spec: SearchSpec
    operator_sets: tuple[frozenset[OperatorTuple], ...]
    canonical_form: tuple[tuple[OperatorTuple, ...], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.operator_sets)

    def __contains__(self, operators) -> bool:
        return frozenset(tuple(op) for op in operators) in self.operator_sets

    def to_dict(self) -> dict:
        return {
            "n": self.spec.n,
            "m": self.spec.width,
            "targets": list(self.spec.targets),
            "size": self.spec.required_set_size,
            "count": len(self.canonical_form),
            "schemes": [["⊗".join(op) for op in scheme] for scheme in self.canonical_form],
        }


def _recheck(schemes: Sequence[tuple[OperatorTuple, ...]], spec: SearchSpec) -> None:
    # recompute each image once, then one small Gram matrix per scheme
    images = {}
    for scheme in schemes:
        for op in scheme:
            if op not in images:
                images[op] = spec.image(op).amplitudes
    for scheme in schemes:
        mat = np.array([images[op] for op in scheme])
        gram = mat.conj() @ mat.T
        off = np.abs(gram - np.diag(np.diag(gram)))
        if off.max(initial=0.0) >= EXACT_TOL:
            raise IntegrityError(f"enumerated scheme failed recheck: {verify_scheme(scheme, spec).detail}")


def search_schemes(spec: SearchSpec) -> SchemeResult:
    canonical = tuple(enumerate_cliques(build_compatibility_graph(spec), spec.required_set_size))
    _recheck(canonical, spec)
    return SchemeResult(spec, tuple(frozenset(s) for s in canonical), canonical)
