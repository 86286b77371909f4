"""Simulation and verification toolkit for W-state based DSQC, QSDC and QKD."""
from .codebooks import CODEBOOK_NAMES, Codebook, PauliString, decode, encode, load_codebook, make_w_state
from .efficiency import EfficiencyDescriptor, audit_transcript, comparison_report, eta1, eta2
from .errors import AuditError, DecodeError, DomainError, IntegrityError
from .protocol import (
    EveKind,
    EveStrategy,
    Mode,
    ProtocolConfig,
    ProtocolTranscript,
    run,
    run_dsqc,
    run_qkd,
    run_qsdc,
)
from .scheme_search import SearchSpec, search_schemes, verify_scheme
from .qcore import StateVector, apply_pauli_string, inner_product, measure_in_orthonormal_set, measure_qubit

__version__ = "0.1.0"
