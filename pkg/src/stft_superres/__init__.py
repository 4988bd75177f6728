"""Super-resolution of spike trains from STFT measurements by TV-norm minimization."""

from .certificate import (
    Certificate,
    IllConditionedError,
    VerificationReport,
    build_certificate,
    certificate_value,
    verify_certificate,
)
from .measures import (
    REAL,
    TORUS,
    DiscreteMeasure,
    KernelJet,
    MeasureError,
    ParameterError,
    WindowParams,
    autocorrelation_jet,
    cert_derivative_kernel_jet,
    cert_kernel_jet,
    min_separation,
    window_fourier_coefficient,
    window_value,
)
from .solver import (
    DegenerateSupportError,
    RecoveryResult,
    SolverFailure,
    SolverOptions,
    extract_support,
    fit_amplitudes,
    recover,
    recover_fourier,
    solve_dual,
)
from .stft import (
    CorruptedMeasurementError,
    DomainError,
    MomentVector,
    StftMeasurements,
    TrigPoly,
    adjoint_polynomial,
    complete_inversion_approx,
    fourier_moments,
    reduce_measurements,
    stft_coefficients,
    stft_time_function,
)

__version__ = "0.1.0"
