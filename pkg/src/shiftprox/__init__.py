"""Forward-backward splitting and fixed-inertia FISTA for strongly convex composite problems."""

from .core import (Algorithm, CompositeProblem, DimensionError, DivergenceError, ProxOracle,
                   SmoothOracle, UnavailableError, ValidationReport, objective_value,
                   validate_problem)
from .lyapunov import (LyapunovSpec, empirical_rate, fbs_energy, normalized_traces, phi)
from .quadratic import (QuadraticInstance, exact_solution, instance_grad, instance_prox,
                        make_instance, spectral_constants)
from .rates import (RateCertificate, Region, fbs_rate, fbs_rate_remark, fista_delta_certificate,
                    fista_inertia, fista_rate, region_map, zeta)
from .shift import (ShiftedProblem, contraction_factor, forward_backward_map, optimal_fbs_step,
                    shift, shifted_prox, shifted_smooth_grad)
from .solvers import (SolverConfig, SolverRun, fbs_run, fista_delta_run, fista_run,
                      fista_zform_run, solve, stop_check)

__version__ = "0.1.0"
