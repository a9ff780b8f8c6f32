"""Rate functions and spectral tools for generalized sample covariance and
deformed Wigner ensembles."""

from .dyson import (
    CovarianceModel,
    DegenerateModelError,
    EdgeData,
    SolverError,
    detect_degenerate,
    edge_solve,
    g_bar_sigma,
    g_sigma,
    h_rho,
    sigma_density,
    sigma_measure,
    support_window,
    thresholds,
)
from .measures import MeasureError, Semicircle, SpectralMeasure, Uniform, remove_zero_atom
from .montecarlo import (
    build_gamma,
    distance_stats,
    edge_stats,
    sample_spectrum,
    tail_curve,
)
from .rate import (
    approx_sweep,
    epsilon_truncate,
    f_fn,
    j_fn,
    rate,
    rate_degenerate,
    rate_table,
    rate_variational,
)
from .wigner import (
    DeformedWignerModel,
    DWEdgeData,
    dw_branches,
    dw_edge,
    dw_epsilon_cap,
    dw_h,
    dw_rate,
    dw_rate_variational,
    free_convolution_density,
    free_convolution_measure,
    k_transform,
)

__all__ = [
    "CovarianceModel",
    "DWEdgeData",
    "DeformedWignerModel",
    "DegenerateModelError",
    "EdgeData",
    "MeasureError",
    "Semicircle",
    "SolverError",
    "SpectralMeasure",
    "Uniform",
    "approx_sweep",
    "build_gamma",
    "detect_degenerate",
    "distance_stats",
    "dw_branches",
    "dw_edge",
    "dw_epsilon_cap",
    "dw_h",
    "dw_rate",
    "dw_rate_variational",
    "edge_solve",
    "edge_stats",
    "epsilon_truncate",
    "f_fn",
    "free_convolution_density",
    "free_convolution_measure",
    "g_bar_sigma",
    "g_sigma",
    "h_rho",
    "j_fn",
    "k_transform",
    "rate",
    "rate_degenerate",
    "rate_table",
    "rate_variational",
    "remove_zero_atom",
    "sample_spectrum",
    "sigma_density",
    "sigma_measure",
    "support_window",
    "tail_curve",
    "thresholds",
]

__version__ = "0.1.0"
