"""Deformed-oscillator numerics.

A three-parameter deformation (q, l, lambda) of the oscillator ladder
algebra: q-arithmetic and the structure function, truncated Fock-space
operators and spectra, coherent states with a verified resolution of
unity, photon-counting statistics and the induced state-space metric.
"""

from .algebra import (BoundednessReport, FockTruncation, SpectrumRow,
                      TridiagonalOperator, boundedness_diagnostic,
                      commutator_defect, ladder_matrices, position_momentum,
                      spectrum)
from .coherent import (CoherentState, DomainDisk, MomentReport, QuadratureSpec,
                       amplitudes, domain_radius, eigen_residual, moment_target,
                       normalization, normalization_complex, overlap,
                       pochhammer_product, unity_weight, verify_moments)
from .geometry import MetricPoint, metric_smallx_check, metric_w
from .qcore import (CompensatedSum, ConvergenceError, DeformParams, DomainError,
                    SeriesEval, pochhammer_infinite, q_derivative, q_factorial,
                    q_integral, q_number, q_pochhammer, structure_function)
from .statistics import (StatsPoint, dressed_boson_matrices, mandel_smallx_check,
                         monomial_expectation, photon_pdf, stats_point)

__version__ = "0.1.0"

__all__ = [
    "BoundednessReport", "CoherentState", "CompensatedSum", "ConvergenceError",
    "DeformParams", "DomainDisk", "DomainError", "FockTruncation", "MetricPoint",
    "MomentReport", "QuadratureSpec", "SeriesEval", "SpectrumRow", "StatsPoint",
    "TridiagonalOperator", "amplitudes", "boundedness_diagnostic",
    "commutator_defect", "domain_radius", "dressed_boson_matrices",
    "eigen_residual", "ladder_matrices", "mandel_smallx_check",
    "metric_smallx_check", "metric_w", "moment_target", "monomial_expectation",
    "normalization", "normalization_complex", "overlap", "photon_pdf",
    "pochhammer_infinite", "pochhammer_product", "position_momentum",
    "q_derivative", "q_factorial", "q_integral", "q_number", "q_pochhammer",
    "spectrum", "stats_point", "structure_function", "unity_weight",
    "verify_moments",
]
