"""Numerical laboratory for the energy ∫|∇u|² + (1/ε² - 1)|∇|u||² on the unit disc."""

from .boundary import (BoundaryMap, PhaseTrace, current_density, relative_phase,
                       sample_boundary, unwrap_phase)
from .diagnostics import (DiagnosticsReport, VortexDetection, compare_to_canonical,
                          default_beta, detect_vortices, diagnose, equipartition_ratio,
                          hopf_cr_residual, identity_residuals, modulus_asymptotics_error,
                          pohozaev_residual)
from .disc import blaschke_eval, hyperbolic_distance, mobius, winding_number
from .energy import DiscreteEnergy, EnergyBreakdown, energy, energy_gradient
from .errors import *  # noqa: F401,F403
from .exact import ExactMinimizer, blaschke_minimizer, exact_energy, radial_profile
from .excess import (ExcessOptions, ExcessResult, cross_validate, excess_direct,
                     excess_via_formula, minimize_excess, w_renormalized, w_tilde)
from .harmonic import (HarmonicFunction, VortexConfig, canonical_harmonic_map, dirichlet_phi0,
                       h_half_seminorm_sq, harmonic_extension, neumann_phi0_tilde,
                       regular_part_R0)
from .mesh import Field2D, PolarMesh, read_field_csv, write_field_csv
from .solver import (MeshSpec, SolverConfig, build_mesh, continuation_sweep, initial_field,
                     minimize, multistart)
from .thinfilm import thin_film_minimize, thin_film_sweep

__version__ = "0.1.0"
