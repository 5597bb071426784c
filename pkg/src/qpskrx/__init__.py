"""Simulation and optimization of QPSK coherent-state receivers.

Core numerics (Fock-space states, detector models, receivers, bounds,
optimizer) live in the submodules re-exported here; the ``service`` package
wraps them in an HTTP API and ``cli`` is the command-line front end.
"""

from .bounds import GramSpectrum, gram_spectrum, helstrom_qpsk, heterodyne_qpsk
from .curves import CSV_HEADER, CurveRow, ErrorCurve, concat_curves, format_sig
from .detector_models import (
    DetectorModel,
    PovmDiagonal,
    default_n_cutoff,
    off_prob_fock,
    off_prob_squeezed,
    onoff_off_prob,
    pnrd_count_prob,
    pnrd_povm_element,
)
from .feedforward_receiver import (
    MODES,
    ErrorEstimate,
    FeedforwardConfig,
    Posterior,
    choose_nulling,
    exact_error_rate,
    montecarlo_error_rate,
    posterior_update,
    stage_amplitude,
    stage_likelihood,
)
from .fock_core import (
    ComplexAmplitude,
    FockVector,
    PskAlphabet,
    SqueezeParam,
    coherent_overlap,
    hermite_eval,
    squeezed_coherent_fock,
)
from .optimizer import OptimizationResult, optimize_static, sweep_curve
from .static_receiver import (
    NULLING_TARGETS,
    PORTS,
    ConditionalProbTable,
    FockTruncationError,
    StaticReceiverConfig,
    decision_probabilities,
    port_effective_amplitude,
    static_error_rate,
)

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "ComplexAmplitude",
    "ConditionalProbTable",
    "CurveRow",
    "DetectorModel",
    "ErrorCurve",
    "ErrorEstimate",
    "FeedforwardConfig",
    "FockTruncationError",
    "FockVector",
    "GramSpectrum",
    "MODES",
    "NULLING_TARGETS",
    "OptimizationResult",
    "PORTS",
    "Posterior",
    "PovmDiagonal",
    "PskAlphabet",
    "SqueezeParam",
    "StaticReceiverConfig",
    "choose_nulling",
    "coherent_overlap",
    "concat_curves",
    "decision_probabilities",
    "default_n_cutoff",
    "exact_error_rate",
    "format_sig",
    "gram_spectrum",
    "helstrom_qpsk",
    "hermite_eval",
    "heterodyne_qpsk",
    "montecarlo_error_rate",
    "off_prob_fock",
    "off_prob_squeezed",
    "onoff_off_prob",
    "optimize_static",
    "pnrd_count_prob",
    "pnrd_povm_element",
    "port_effective_amplitude",
    "posterior_update",
    "squeezed_coherent_fock",
    "stage_amplitude",
    "stage_likelihood",
    "static_error_rate",
    "sweep_curve",
]
