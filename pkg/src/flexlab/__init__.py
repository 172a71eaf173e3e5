"""flexlab: human-in-the-loop building demand-flexibility simulator.

A lumped-capacitance multi-zone building served by a VAV/heat-pump plant is
simulated twice in lockstep — a business-as-usual baseline and a controlled
timeline that accepts live setpoint/schedule overrides — so the energy cost
or saving of an operator's demand-response actions is visible tick by tick.

Entry points: `run_day` for headless scripted runs, `create_app` for the
live web service, `flexlab` on the command line.
"""

from .config import default_config, load_config
from .engine import (
    Engine,
    RunSummary,
    SimConfig,
    TelemetryFrame,
    run_day,
    run_day_engine,
    summarize,
)
from .errors import (
    FlexlabError,
    InvalidInputError,
    ModelDivergenceError,
    ValidationError,
)
from .scenario import ScenarioScript

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "FlexlabError",
    "InvalidInputError",
    "ModelDivergenceError",
    "RunSummary",
    "ScenarioScript",
    "SimConfig",
    "TelemetryFrame",
    "ValidationError",
    "default_config",
    "load_config",
    "run_day",
    "run_day_engine",
    "summarize",
    "__version__",
]
