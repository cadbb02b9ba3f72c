"""Even-parity precession protocol toolkit.

Classical scores and the 1/K bound, oscillator and spin score operators,
Wigner negativity, entanglement witnesses and a round-by-round sampler.
"""
__version__ = "0.1.0"

from .protocol import (  # noqa: E402
    NumericalError,
    ProtocolConfig,
    ScoreReport,
    ScoreValue,
    angle_grid,
    classical_bound,
)
from .classical import (  # noqa: E402
    ClassicalEnsemble,
    ClassicalState,
    ScoreField,
    classical_score,
    classical_score_field,
    ensemble_score,
    mc_bound_check,
)
from .oscillator import (  # noqa: E402
    FockState,
    GridSpec,
    ScoreOperatorCV,
    WignerGrid,
    build_score_operator_cv,
    com_witness,
    delta_scan_cv,
    gaussian_lower_bound,
    max_quantum_score_cv,
    negativity_bound_check,
    negativity_volume,
    projector_element,
    wigner_function,
)
from .spin import (  # noqa: E402
    JxBasis,
    QubitEnsembleState,
    ScoreOperatorSpin,
    SpinState,
    SpinValue,
    build_score_operator_qubit_ensemble,
    build_score_operator_spin,
    closed_form_score,
    depolarized_ghz_score,
    dimension_witness,
    gme_separable_bound,
    jx_eigenbasis,
    max_quantum_score_spin,
    optimal_delta_scan,
    spin_cv_convergence_report,
    spin_projector,
)
from .sampler import RoundRecord, ScoreEstimate, estimate_score, sample_round_quantum  # noqa: E402
