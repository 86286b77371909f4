"""
Reference computations that share no code with the engine: ket algebra on
bit strings with exact coefficients, Fractions for probabilities.

A ket is a dict {bit string: coefficient}; coefficients are ints standing
for multiples of a common normalization (1/sqrt(n) for W states).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb


def w_ket(n: int) -> dict[str, int]:
    return {"0" * (n - 1 - k) + "1" + "0" * k: 1 for k in range(n)}


def _apply_single(op: str, bit: str) -> tuple[int, str]:
    if op == "I":
        return 1, bit
    if op == "X":
        return 1, "1" if bit == "0" else "0"
    if op == "Z":
        return (1 if bit == "0" else -1), bit
    if op == "iY":
        # iY|0> = -|1>, iY|1> = +|0>
        return (-1, "1") if bit == "0" else (1, "0")
    raise ValueError(op)


def apply_ket(ket: dict[str, int], ops, targets=None) -> dict[str, int]:
    targets = targets or list(range(1, len(ops) + 1))
    out: dict[str, int] = {}
    for bits, coeff in ket.items():
        chars = list(bits)
        for op, t in zip(ops, targets):
            sign, chars[t - 1] = _apply_single(op, chars[t - 1])
            coeff *= sign
        key = "".join(chars)
        out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}


def parse_ket(text: str) -> dict[str, int]:
    """``"+001 -010"`` -> {"001": 1, "010": -1}."""
    return {term[1:]: (1 if term[0] == "+" else -1) for term in text.split()}


def ket_inner(a: dict[str, int], b: dict[str, int], norm: int) -> Fraction:
    """<a|b> for real kets whose coefficients are multiples of 1/sqrt(norm)."""
    return Fraction(sum(a[k] * b.get(k, 0) for k in a), norm)


def ket_to_amplitudes(ket: dict[str, int], n: int, norm: int | None = None) -> list[float]:
    """Amplitudes of ``ket`` over n qubits, coefficients in units of 1/sqrt(norm) (default n)."""
    norm = n if norm is None else norm
    amps = [0.0] * 2**n
    for bits, c in ket.items():
        amps[int(bits, 2)] = c / norm**0.5
    return amps


def residual_squared_outside(ket: dict[str, int], norm: int, others: list[dict[str, int]]) -> Fraction:
    """1 - sum_k |<e_k|psi>|^2 for an orthonormal set, exactly."""
    total = Fraction(sum(c * c for c in ket.values()), norm)
    return total - sum(ket_inner(e, ket, norm) ** 2 for e in others)


def weight_one_probability(ket: dict[str, int], qubit: int) -> Fraction:
    num = sum(c * c for bits, c in ket.items() if bits[qubit - 1] == "1")
    return Fraction(num, sum(c * c for c in ket.values()))


# --- decoy statistics -------------------------------------------------------

_DECOYS = {"0": ("Z", 0), "1": ("Z", 1), "+": ("X", 0), "-": ("X", 1)}


def intercept_error_probability() -> Fraction:
    """P(Bob's matching-basis outcome differs from the prepared decoy) under
    random-basis intercept-resend, by enumeration of every branch."""
    total = Fraction(0)
    for decoy, (prep_basis, prep_bit) in _DECOYS.items():
        for eve_basis in "ZX":
            if eve_basis == prep_basis:
                # Eve reads the decoy faithfully and resends it
                branches = [(Fraction(1), prep_bit)]
            else:
                # conjugate basis: Eve's outcome is uniform, Bob's outcome is uniform again
                branches = [(Fraction(1, 2), 0), (Fraction(1, 2), 1)]
            for p, bob_bit in branches:
                if bob_bit != prep_bit:
                    total += Fraction(1, 4) * Fraction(1, 2) * p
    return total


def binomial_pmf(n: int, k: int, p: Fraction) -> Fraction:
    return comb(n, k) * p**k * (1 - p) ** (n - k)


def round_abort_probability(decoys: int, threshold: float, p_error: Fraction = Fraction(1, 4)) -> Fraction:
    """P(decoy error rate > threshold) for one checked transmission of ``decoys`` decoys:
    matching count ~ Bin(decoys, 1/2), errors | matching ~ Bin(matching, p_error)."""
    total = Fraction(0)
    thr = Fraction(threshold).limit_denominator(10**6)
    for m in range(1, decoys + 1):
        pm = binomial_pmf(decoys, m, Fraction(1, 2))
        tail = sum(binomial_pmf(m, e, p_error) for e in range(m + 1) if Fraction(e, m) > thr)
        total += pm * tail
    return total


# --- Eve's guessing power against the reordered DSQC sequence ---------------

def z_weight_distribution(ket: dict[str, int]) -> dict[int, Fraction]:
    norm = sum(c * c for c in ket.values())
    dist: dict[int, Fraction] = {}
    for bits, c in ket.items():
        w = bits.count("1")
        dist[w] = dist.get(w, 0) + Fraction(c * c, norm)
    return dist


def _convolve(a: dict[int, Fraction], b: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for i, p in a.items():
        for j, q in b.items():
            out[i + j] = out.get(i + j, 0) + p * q
    return out


def bayes_block_guess(codewords: list[dict[str, int]], blocks: int, decoys: int):
    """Bayes-optimal guess of block 1 from the count of ones among all of Eve's
    Z outcomes (all she has without the order). Returns (guess rule, exact accuracy)."""
    q = len(codewords)
    weights = [z_weight_distribution(c) for c in codewords]
    mixture: dict[int, Fraction] = {}
    for w in weights:
        for k, p in w.items():
            mixture[k] = mixture.get(k, 0) + p / q
    rest = {0: Fraction(1)}
    for _ in range(blocks - 1):
        rest = _convolve(rest, mixture)
    decoy = {k: binomial_pmf(decoys, k, Fraction(1, 2)) for k in range(decoys + 1)}
    rest = _convolve(rest, decoy)
    joint = [_convolve(w, rest) for w in weights]  # P(total ones = k | block 1 = b)
    totals = sorted(set().union(*joint))
    rule = {}
    accuracy = Fraction(0)
    for k in totals:
        scores = [Fraction(1, q) * joint[b].get(k, 0) for b in range(q)]
        best = max(range(q), key=lambda b: (scores[b], -b))
        rule[k] = best
        accuracy += scores[best]
    return rule, accuracy


def all_subsets_orthogonal(images: list[dict[str, int]], norm: int, size: int) -> list[tuple[int, ...]]:
    """Every index subset of ``size`` whose kets are pairwise orthogonal (brute force)."""
    ortho = [[ket_inner(a, b, norm) == 0 for b in images] for a in images]
    return [s for s in itertools.combinations(range(len(images)), size)
            if all(ortho[i][j] for i, j in itertools.combinations(s, 2))]
