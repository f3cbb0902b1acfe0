"""Generalized Gaussian wave packets, bucket-brigade propagation and
instanton-augmented tunneling in one dimension (units with hbar = 1)."""

__version__ = "0.1.0"

from .brigade import (BasisSet, BrigadeConfig, SubspacePropagator, SubspaceTransform,
                      assemble_matrices, generate_trajectory_basis, initial_coefficients,
                      project_and_exponentiate, reconstruct, significant_subspace)
from .errors import (ConfigError, DecayUnderflowError, DegenerateBasisError, DomainError,
                     DomainTooSmallError, NoInstantonError, NoStationarySolutionError,
                     NumericalFailure, StepSizeError, WpbError)
from .exact_propagators import (ClassicalPoint, coherent_trajectory, driven_harmonic_step,
                                free_evolve, harmonic_evolve, quadratic_evolve)
from .oracle_grid import DEFAULT_GRID, GridSpec, GridState
from .packets import (GeneralizedGaussian, boost, evaluate, kinetic_element, moment,
                      norm_squared, normalize, overlap, shift)
from .potentials import EffectiveQuadraticParams, PotentialSpec, effective_quadratic
from .tunneling import (InstantonPath, Splitting, StationaryWell, find_stationary_gaussians,
                        instanton_basis, instanton_trajectory, smoothed_hamiltonian,
                        splitting_and_transfer)

__all__ = [name for name in dir() if not name.startswith("_")]
