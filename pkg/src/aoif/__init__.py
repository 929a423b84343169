"""Exact AoI / peak-AoI analysis of multi-source preemptive M/PH/1/1 queues with errors."""
from .age_analysis import MatrixExpDensity, SourceAnalysis, analyze_all, analyze_source, mean_aoi
from .config import load_system, parse_system
from .errors import (AoifError, ClassificationError, ConfigError, DomainError, NonErgodicError,
                     NumericalError, SingularMatrixError, StarvationError, UnsupportedReductionError)
from .mfq import MFQSpec, build_mfq, build_reduced_global
from .model import SourceSpec, SystemSpec, homogeneous_system, preset_preemption
from .optimizer import CostSpec, grid_search, policy_sweep
from .phase_type import PHDistribution, erlang, exponential, hyperexp_balanced, ph_fit_two_moments
from .simulator import simulate
from .solver import solve_steady_state

__version__ = "0.1.0"
