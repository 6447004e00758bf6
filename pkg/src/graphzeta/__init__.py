"""Spectra, zeta functions and Casimir forces of quantum graphs.

Schroedinger operators -d^2/dx^2 + V(x) on finite metric graphs with
self-adjoint matching conditions at the vertices, magnetic phases on the
bonds, and units hbar = 2m = 1 throughout.
"""

from .casimir import (EnergyResult, ForceResult, casimir_force,
                      mu_sensitivity, vacuum_energy)
from .errors import (GraphFormatError, GraphZetaError, NumericalError,
                     UnsupportedError, ValidationError)
from .graph import (Bond, MatchingConditions, MetricGraph, VertexSpec,
                    build_vertex_conditions, load_graph, parse_graph,
                    replace_bond_length, require_valid, same_conditions,
                    serialize_graph, validate_matching)
from .interval import solve_imag_axis, transfer_matrix_real
from .oracle import (SpectrumWindow, discretized_eigenvalues,
                     energy_finite_difference, reference_zeta_R,
                     scan_spectrum, zeta_direct)
from .potentials import (BumpPotential, ConstantPotential, ZeroPotential,
                         potential_from_dict)
from .secular import (AsymptoticData, F_imag, asymptotic_F_coefficients,
                      dF_dL_imag, logF_and_slope_imag, secular_matrix_real,
                      smallest_singular_values)
from .wkb import d_constant, u_log_expansion, wkb_coefficients
from .zeta import (MinusHalfData, ZetaEvaluation, minus_half_data,
                   zeta_dir_bond, zeta_im, zeta_total)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticData", "Bond", "BumpPotential", "ConstantPotential",
    "EnergyResult", "F_imag", "ForceResult", "GraphFormatError",
    "GraphZetaError", "MatchingConditions", "MetricGraph", "MinusHalfData",
    "NumericalError", "SpectrumWindow", "UnsupportedError",
    "ValidationError", "VertexSpec", "ZeroPotential", "ZetaEvaluation",
    "asymptotic_F_coefficients", "build_vertex_conditions", "casimir_force",
    "d_constant", "dF_dL_imag", "discretized_eigenvalues",
    "energy_finite_difference", "load_graph", "logF_and_slope_imag",
    "minus_half_data", "mu_sensitivity", "parse_graph",
    "potential_from_dict", "reference_zeta_R", "replace_bond_length",
    "require_valid", "same_conditions", "scan_spectrum",
    "secular_matrix_real", "serialize_graph", "smallest_singular_values",
    "solve_imag_axis", "transfer_matrix_real", "u_log_expansion",
    "vacuum_energy", "validate_matching", "wkb_coefficients",
    "zeta_dir_bond", "zeta_direct", "zeta_im", "zeta_total",
]
