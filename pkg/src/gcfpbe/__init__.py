"""Sectional finite-volume solver and validation harness for size-structured
growth-coagulation-fragmentation population dynamics with a renewal
boundary condition."""

from .backend import BACKEND, available_backends
from .coefficients import (ActivatedSludge, Affine, AssumptionReport,
                           CoefficientSet, ConstantKernel, ConstantRate,
                           DaughterDistribution, FragmentationRate,
                           Gravitational, LinearShear, ModifiedSmoluchowski,
                           NonlinearShear, PowerLaw, ProbeSpec, ProductKernel,
                           TableKernel, TableRate, daughter_count,
                           eval_coagulation, eval_daughter,
                           eval_fragmentation_rate, verify_assumptions)
from .config import ConfigError, RunConfig, parse_config
from .diagnostics import (CappedLinear, ExpDecay, MomentRecord, SmoothBump,
                          decay_fit, mass_balance_residual, moment,
                          weak_form_residual, weighted_difference_norm,
                          weighted_norm)
from .grid import PairAllocation, SizeGrid, build_grid, build_pair_allocation
from .integrator import (Ledgers, StabilityError, StepperConfig, Trajectory,
                         run, stable_dt, step)
from .operators import (OperatorTables, RhsTerms, StateVector, build_tables,
                        coagulation_rhs, death_rhs, fragmentation_rhs,
                        growth_rhs, total_rhs, truncate_coefficients)

__version__ = "0.1.0"
