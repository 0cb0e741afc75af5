"""Level dynamics of parametric Hamiltonians as a classical gas, coupled to
density-matrix evolution in the instantaneous eigenbasis."""

from .config import RunConfig, load_config
from .errors import (AmbiguousAlignment, ConfigError, DegenerateLevels, GridMismatch,
                     LevelGasError, SchemaMismatch)
from .integrator import StepOptions, Trajectory, euler_maruyama_step, rk4_step, simulate
from .levels import LevelState, init_levels, pechukas_rhs, stochastic_pechukas_rhs
from .master import SIGN, WindowSpec, occupation_rhs, rho_rhs, rho_rhs_noisy, rho_rhs_windowed
from .models import HamiltonianSpec, Schedule, build_two_qubit_ising, uniform_rho0
from .noise import NoiseProcess, zero_noise
from .oracle import compare, direct_evolve, eigen_levels
from .runner import oracle_compare, run_config, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "AmbiguousAlignment", "ConfigError", "DegenerateLevels", "GridMismatch", "HamiltonianSpec",
    "LevelGasError", "LevelState", "NoiseProcess", "RunConfig", "SIGN", "Schedule",
    "SchemaMismatch", "StepOptions", "Trajectory", "WindowSpec", "build_two_qubit_ising",
    "compare", "direct_evolve", "eigen_levels", "euler_maruyama_step", "init_levels",
    "load_config", "occupation_rhs", "oracle_compare", "pechukas_rhs", "rho_rhs",
    "rho_rhs_noisy", "rho_rhs_windowed", "rk4_step", "run_config", "run_trajectory",
    "simulate", "stochastic_pechukas_rhs", "uniform_rho0", "zero_noise",
]
