"""Fidelity of quantum states: purifications, measurements, channels and truncations."""

from .channels import (CHANNELS, Ensemble, KrausChannel, apply_channel, channel_from_string,
                       convexity_second_derivative, entanglement_fidelity,
                       entanglement_fidelity_purified, ensemble_average_fidelity)
from .errors import (AncillaTooSmall, DimMismatch, InvalidChannel, InvalidParameter, InvalidPovm,
                     InvalidTruncation, NoConvergence, NotDensity, NotHermitian, NotPsd,
                     QfidError, SchemaError)
from .fidelity import (FidelityReport, bures_angle, check_bounds, fidelity, fidelity_nested,
                       trace_distance, uhlmann_optimal_purifications)
from .linalg import SpectralDecomposition, polar_unitary, psd_sqrt, spectral_decomposition, trace_norm
from .measurement import (LiftedPovm, Povm, classical_fidelity, classical_trace_distance,
                          fidelity_optimal_povm, helstrom_povm, induced_distribution,
                          lifted_truncation_povm, m_operator)
from .states import Purification, as_density, partial_trace_ancilla, purify
from .truncation import (SpectralStateGenerator, epsilon_schedule, limit_fidelity, materialize,
                         truncated_fidelity_sweep)

__version__ = "0.1.0"
