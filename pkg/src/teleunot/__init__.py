"""Simulator of universal optimal qubit cloning and the teleported
universal-NOT gate: an exact gate-level network plus a Monte Carlo model of
the two-photon beamsplitter experiment that realizes the cloning half."""

from .analysis import (
    ScanMetadata,
    ScanReport,
    ScanSummary,
    build_report,
    estimate_r,
    export_report,
    flatness_chi2,
    load_report,
)
from .circuit import (
    BellLabel,
    ProtocolOutcome,
    bell_state,
    bell_to_computational,
    computational_to_bell,
    haar_random_qubit,
    prepare_singlet,
    project_antisym_complement,
    run_teleunot,
)
from .core import (
    CNOT,
    H,
    TOFFOLI,
    X,
    Z,
    DensityMatrix,
    Gate,
    PureState,
    Qubit,
    apply_gate,
    fidelity,
    partial_trace,
    project_qubit,
    tensor,
)
from .figures import render_scan_figure
from .photonics import (
    DEFAULT_SEED,
    CoincidenceTally,
    DelayScanConfig,
    DetectionEvent,
    PhotonPair,
    Routing,
    analytic_mode1_state,
    beamsplitter_branch_probabilities,
    default_z_values,
    fidelity_from_r,
    mode1_clone_fidelity,
    overlap_from_delay,
    run_scan,
    run_trial,
    sample_ancilla,
)

__version__ = "0.1.0"
