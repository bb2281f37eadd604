"""Traveling-wave speed sign for time-periodic nonlocal Lotka-Volterra competition.

The package computes carrying capacities, spreading speeds and the speed
interval, checks sufficient conditions for the sign of the bistable wave
speed, verifies the comparison profiles behind them, and measures the speed
by direct simulation.
"""

from .certify import build_lower_th1, build_upper_th2, residuals
from .coefficients import (ModelParams, PeriodicCurve, TrigPoly, average, carrying_p,
                           carrying_q, check_A2, check_strong)
from .config import RunConfig, dump_config, load_config, parse_config
from .errors import (ConfigError, ConstructionError, DegenerateProblemError, FrontLostError,
                     LVWaveError, MomentDivergenceError, PreconditionError, RootFindingError,
                     SimulationError)
from .kernel import Kernel, gaussian, laplace, uniform
from .presets import example1, example2
from .report import build_report, report_json, tool_version
from .simulator import Grid, SimConfig, State, run
from .spectral import (eigen_data, lecc_pair, solve_periodic_linear, solve_root,
                       speed_interval, spreading_speed_minus, spreading_speed_plus)
from .speedsign import Y1, Y2, Y3, classify, th1_check, th2_check, th2_search

__version__ = tool_version()

__all__ = [
    "Kernel", "gaussian", "laplace", "uniform",
    "TrigPoly", "PeriodicCurve", "ModelParams", "carrying_p", "carrying_q", "average",
    "check_A2", "check_strong", "example1", "example2",
    "speed_interval", "spreading_speed_minus", "spreading_speed_plus", "solve_root",
    "solve_periodic_linear", "eigen_data", "lecc_pair",
    "Y1", "Y2", "Y3", "th1_check", "th2_check", "th2_search", "classify",
    "build_lower_th1", "build_upper_th2", "residuals",
    "Grid", "SimConfig", "State", "run",
    "RunConfig", "parse_config", "load_config", "dump_config", "build_report", "report_json",
    "LVWaveError", "ConfigError", "MomentDivergenceError", "PreconditionError",
    "DegenerateProblemError", "RootFindingError", "ConstructionError", "SimulationError",
    "FrontLostError", "__version__",
]
