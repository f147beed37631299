"""Network-based device-independent quantum state discrimination.

Simulates the two-link certification network, runs the self-testing
certification gate on its correlations, reads the hidden target state back
out of joint-measurement statistics, and quantifies the cost of the Pauli
measurement restriction through guessing probabilities.
"""

from .certify import (
    CertificationReport,
    ProbeResult,
    certify,
    needs_trusted_probe,
    run_trusted_probe,
    trusted_probe_state,
)
from .correlations import (
    DIAMOND,
    CorrelationTable,
    chsh,
    conditional_chsh,
    conditional_correlator,
    correlator,
    measurement_correlations,
    three_chsh,
)
from .discriminate import (
    Decision,
    PauliReadout,
    choose_setting,
    coefficient_from_readout,
    discriminate,
    discriminate_multiqubit,
    extract_readout,
    multiqubit_distance,
    pauli_bias,
    pauli_distance,
    predicted_readout,
    select_setting_tuple,
)
from .errors import (
    ConditioningError,
    DegenerateEnsembleError,
    InconclusiveError,
    MdiRequiredError,
    ResourceLimitError,
    UncertifiedDevicesError,
    ValidationError,
)
from .guessing import (
    SweepResult,
    TwoStateEnsemble,
    guessing_gap,
    helstrom,
    pauli_restricted_guess,
    real_state,
    sweep_real_states,
)
from .network import (
    CountsTable,
    DeviceStrategy,
    QubitNetwork,
    certification_correlations,
    classical_strategy,
    conjugate_strategy,
    conjugated_strategy,
    discrimination_correlations,
    estimate_table,
    honest_strategy,
    network_certification_correlations,
    network_discrimination_correlations,
    sample_counts,
    werner_strategy,
)
from .qubits import (
    PauliCoefficients,
    PureState,
    bell_state,
    bell_unitary,
    conjugate_entries,
    kron,
    partial_trace,
    pauli,
    pauli_coefficients,
    pauli_projector,
    state_from_coefficients,
)

__version__ = "0.1.0"
