from .errors import ErrorReport, mean_l2_error, error_report, solution_statistics, ERROR_COLUMNS, STATISTICS_COLUMNS
from .bounds import BoundReport, BoundEstimator, empirical_bound, bound_curve, relative_error, BOUND_COLUMNS
from .collocation import gauss_legendre_rule, sc_mean_estimate, sc_error_table, weighted_mean
from .diagnostics import rho_z_diagnostic, rho_z_norm

__all__ = [
    "ErrorReport",
    "mean_l2_error",
    "error_report",
    "solution_statistics",
    "ERROR_COLUMNS",
    "STATISTICS_COLUMNS",
    "BoundReport",
    "BoundEstimator",
    "empirical_bound",
    "bound_curve",
    "relative_error",
    "BOUND_COLUMNS",
    "gauss_legendre_rule",
    "sc_mean_estimate",
    "sc_error_table",
    "weighted_mean",
    "rho_z_diagnostic",
    "rho_z_norm",
]
