"""Exact two-photon ground-state transfer in a waveguide-coupled lambda
atom, with the cascaded single-photon approximation and a brute-force
discretized-mode validator."""

__version__ = "0.1.0"

from .amplitudes import (
    AmplitudeField,
    WavepacketKind,
    WavepacketSpec,
    initial_wavepacket,
    normalization_N,
    phi_BA,
    psi_A,
    psi_A1,
    psi_A2,
    psi_A_general,
    sample_phi_BA,
    sample_psi_A,
    single_photon_envelope,
)
from .core import AtomParams, ModelConfig, PulseParams, coupling_g, exp_dd, phi1
from .errors import (
    ConfigError,
    ConvergenceError,
    GridCaptureError,
    Lambda2pError,
    NumericalError,
    QuadratureError,
    UnsupportedConfigurationError,
)
from .oracle import ModeGrid, OracleReport, TwoExcitationState, init_state, integrate
from .probability import (
    QuadratureOptions,
    TransitionResult,
    cascaded_probability,
    purified_population,
    single_photon_probability,
    transition_probability,
    transition_probability_asymptotic,
)

__all__ = [
    "AmplitudeField",
    "AtomParams",
    "ConfigError",
    "ConvergenceError",
    "GridCaptureError",
    "Lambda2pError",
    "ModeGrid",
    "ModelConfig",
    "NumericalError",
    "OracleReport",
    "PulseParams",
    "QuadratureError",
    "QuadratureOptions",
    "TransitionResult",
    "TwoExcitationState",
    "UnsupportedConfigurationError",
    "WavepacketKind",
    "WavepacketSpec",
    "cascaded_probability",
    "coupling_g",
    "exp_dd",
    "init_state",
    "initial_wavepacket",
    "integrate",
    "normalization_N",
    "phi1",
    "phi_BA",
    "psi_A",
    "psi_A1",
    "psi_A2",
    "psi_A_general",
    "purified_population",
    "sample_phi_BA",
    "sample_psi_A",
    "single_photon_envelope",
    "single_photon_probability",
    "transition_probability",
    "transition_probability_asymptotic",
]
