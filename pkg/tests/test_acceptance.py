"""
Acceptance gate. Each test checks one criterion inside its runtime budget
and records a PASS/FAIL line that is printed in the pytest terminal summary.
"""
import itertools
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import all_subsets_orthogonal, apply_ket, parse_ket, w_ket
from wstate_comm.codebooks import CODEBOOK_NAMES, TABLES, check_rows, decode, encode, load_codebook, operator_set
from wstate_comm.efficiency import (
    PROPOSED_DSQC,
    PROPOSED_QSDC,
    audit_transcript,
    bound_violations,
    eta1,
    eta2,
    format_percent,
    comparison_report,
)
from wstate_comm.protocol import (
    EveKind,
    EveStrategy,
    Mode,
    ProtocolConfig,
    random_message,
    run_dsqc,
    run_qsdc,
    transmitted_message_qubits,
    with_eve_rounds,
)
from wstate_comm.qcore import ALPHABET
from wstate_comm.scheme_search import SearchSpec, search_schemes

INTERCEPT = EveStrategy(EveKind.INTERCEPT_RESEND_RANDOM_BASIS)


@contextmanager
def criterion(number: int, title: str, budget: float):
    start = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed < budget:
            status = "PASS"
        else:
            note = " over budget"
    except Exception as exc:
        elapsed = time.perf_counter() - start
        note = f" {type(exc).__name__}"
        raise
    finally:
        line = f"{status} {number}. {title} ({elapsed:.2f}s of {budget:g}s{note})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert status == "PASS", line


def test_1_table_fidelity():
    with criterion(1, "table fidelity", 1.0):
        checks = [c for name in CODEBOOK_NAMES for c in check_rows(name)]
        assert len(checks) == 40 and all(c.ok for c in checks)
        # the engine's amplitudes against independent integer ket algebra
        for name in CODEBOOK_NAMES:
            table, book = TABLES[name], load_codebook(name)
            scale = 1 / np.sqrt(table["n"])
            for state, (factors, kets) in zip(book.encoded_states, table["rows"]):
                oracle = apply_ket(w_ket(table["n"]), factors, table["targets"])
                assert oracle == parse_ket(kets)
                expected = np.zeros(2 ** table["n"])
                for bits, c in oracle.items():
                    expected[int(bits, 2)] = c * scale
                assert np.max(np.abs(state.amplitudes - expected)) <= 1e-12


def test_2_orthogonality():
    with criterion(2, "gram matrices", 1.0):
        sizes = []
        for name in CODEBOOK_NAMES:
            states = load_codebook(name).encoded_states
            for (i, a), (j, b) in itertools.product(enumerate(states), repeat=2):
                assert abs(np.vdot(a.amplitudes, b.amplitudes) - (i == j)) <= 1e-12
            sizes.append(len(states))
        assert sorted(sizes) == [8, 8, 8, 16]


def test_3_round_trip():
    with criterion(3, "round trip", 10.0):
        count = 0
        for name in CODEBOOK_NAMES:
            book = load_codebook(name)
            for bits, _ in book:
                assert decode(book, encode(book, bits)) == bits
                count += 1
        assert count == 40
        for mode, runner in ((Mode.DSQC, run_dsqc), (Mode.QSDC, run_qsdc)):
            for seed in range(1000):
                cfg = ProtocolConfig.from_seed(seed, mode=mode, codebook=CODEBOOK_NAMES[seed % 4], blocks=1 + seed % 4)
                t = runner(cfg, random_message(cfg))
                assert t.message_received == t.message_sent and t.decoy_error_rate == 0


def test_4_efficiency_reproduction():
    with criterion(4, "efficiency reproduction", 5.0):
        expected = {Mode.DSQC: (Fraction(1, 2), Fraction(1, 3)), Mode.QSDC: (Fraction(1, 2), Fraction(1, 2))}
        for (mode, runner), book in itertools.product(((Mode.DSQC, run_dsqc), (Mode.QSDC, run_qsdc)),
                                                      ("W3_FULL", "W4_FULL")):
            cfg = ProtocolConfig.from_seed(4, mode=mode, codebook=book, blocks=5)
            d = audit_transcript(runner(cfg, random_message(cfg)))
            assert (eta1(d), eta2(d)) == expected[mode]
        report = comparison_report()
        rendered = [f"{format_percent(r.eta1, trim=True)}/{format_percent(r.eta2, trim=True)}" for r in report]
        assert rendered == ["37.5/30", "33.33/22.22", "26.67/22.22", "33.33/20", "16.67/14.29", "50/33.33", "50/50"]
        assert (report.row(PROPOSED_DSQC).eta1, report.row(PROPOSED_DSQC).eta2) == expected[Mode.DSQC]
        assert (report.row(PROPOSED_QSDC).eta1, report.row(PROPOSED_QSDC).eta2) == expected[Mode.QSDC]


def test_5_bounds():
    with criterion(5, "efficiency bounds sweep", 1.0):
        assert bound_violations(max_c=8) == []


def test_6_eavesdropping_detection():
    with criterion(6, "eavesdropping detection", 60.0):
        aborted = matching = errors = 0
        runs = 1000
        for seed in range(runs):
            cfg = ProtocolConfig.from_seed(seed, mode=Mode.DSQC, blocks=100, error_threshold=0.05)
            t = run_dsqc(cfg, random_message(cfg), INTERCEPT)
            aborted += t.aborted
            matching += sum(r.matching for r in t.rounds)
            errors += sum(r.errors for r in t.rounds)
        assert matching >= 10_000
        assert 0.23 <= errors / matching <= 0.27
        assert aborted / runs >= 0.999


def test_7_scheme_enumeration():
    with criterion(7, "scheme enumeration", 120.0):
        spec = SearchSpec(4, 2, (1, 2), 8)
        result = search_schemes(spec)
        for name in ("W4_DENSE_1", "W4_DENSE_2"):
            assert operator_set(load_codebook(name)) in result.operator_sets
        assert len(result) >= 4
        candidates = list(itertools.product(ALPHABET, repeat=2))
        images = [apply_ket(w_ket(4), c, [1, 2]) for c in candidates]
        oracle = {frozenset(candidates[i] for i in s) for s in all_subsets_orthogonal(images, 4, 8)}
        assert oracle == set(result.operator_sets)


def test_8_qsdc_isolation():
    with criterion(8, "QSDC isolation", 10.0):
        early = 0
        for seed in range(100):
            book = "W3_FULL" if seed % 2 else "W4_FULL"
            n = load_codebook(book).n
            target = 1 + seed % (n - 1)
            cfg = ProtocolConfig.from_seed(seed, mode=Mode.QSDC, codebook=book, blocks=20)
            t = run_qsdc(cfg, random_message(cfg), with_eve_rounds(INTERCEPT, [target]))
            if not t.aborted:
                continue
            k = t.aborted_at_round
            assert k == target < n
            early += 1
            assert t.message_received is None and len(t.rounds) == k
            assert all(q <= k for _, q in transmitted_message_qubits(t))
            assert t.qubits_transmitted == 2 * k * t.N
        assert early >= 90
