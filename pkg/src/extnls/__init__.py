"""Numerical laboratory for the defocusing power-nonlinearity Schrödinger
equation on the exterior of the unit ball with Dirichlet walls."""

__version__ = "0.1.0"

from .domain import (ModelParams, DiscDomain, FieldState, Representation,
                     build_domain, sample_radial)
from .operators import (LaplacianOp, PropagatorConfig, apply_laplacian,
                        linear_step, nonlinear_phase_step, strang_step,
                        perturbed_step)
from .functionals import (DiagnosticsRecord, MixedNormSpec, mass, energy,
                          gradient_norm_sq, strauss_ratio,
                          sup_weighted_amplitude, pseudoconformal_energy,
                          sobolev_norm, mixed_norm, check_admissible,
                          stability_energy, compute_diagnostics)
from .compat import (CompatReport, boundary_trace, linear_compat_sequence,
                     nonlinear_compat_sequence)
from .pseudoconformal import (ConeSlice, forward_transform, inverse_transform,
                              cone_energy, monotonicity_audit)
from .profiles import make_initial_state, eigenmodes, eigenmode_sum
