"""Mean-field thermodynamics of a transverse-field Ising chain coupled to a cavity mode."""

__version__ = "0.1.0"

from ._validation import (ConvergenceError, DegenerateDesignError, DickeIsingError, DomainError,
                          NoSolutionError, OutOfRegionError, ResourceError, TruncationError)
from .finite_oracle import (DenseSpectrum, dicke_ising_dense_ground_state, ising_dense_free_energy,
                            ising_dense_spectrum)
from .ising import (ReducedIsingParams, dispersion, free_energy_density, free_energy_density_finite,
                    magnetization)
from .landau import (LandauCoeffs, critical_beta, landau_coefficients, max_neg_I2,
                     second_order_condition, tricritical_point)
from .meanfield import (MeanFieldSolution, ModelParams, Observables, Phase, ReducedParams,
                        interior_minimum, minimize, observables, reduced_free_energy, simplex_sweep)
from .metrology import (EstimatorDesign, PhotonStats, ScalingFit, blue_estimator, photon_stats,
                        sensitivity_scan, tanh_order_parameter, temperature_estimator_variance)
from .phase_diagram import (BoundaryPoint, Order, TransitionKind, classify, first_order_branch,
                            second_order_branch, trace_diagram)
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig

__all__ = [
    "BoundaryPoint", "ConvergenceError", "DEFAULT_QUADRATURE", "DegenerateDesignError",
    "DenseSpectrum", "DickeIsingError", "DomainError", "EstimatorDesign", "LandauCoeffs",
    "MeanFieldSolution", "ModelParams", "NoSolutionError", "Observables", "Order",
    "OutOfRegionError", "Phase", "PhotonStats", "QuadratureConfig", "ReducedIsingParams",
    "ReducedParams", "ResourceError", "ScalingFit", "TransitionKind", "TruncationError",
    "blue_estimator", "classify", "critical_beta", "dicke_ising_dense_ground_state", "dispersion",
    "first_order_branch", "free_energy_density", "free_energy_density_finite", "interior_minimum",
    "ising_dense_free_energy", "ising_dense_spectrum", "landau_coefficients", "magnetization",
    "max_neg_I2", "minimize", "observables", "photon_stats", "reduced_free_energy",
    "second_order_branch", "second_order_condition", "sensitivity_scan", "simplex_sweep",
    "tanh_order_parameter", "temperature_estimator_variance", "trace_diagram", "tricritical_point",
]
