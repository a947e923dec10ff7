"""Rolling-horizon operational planning of offshore multi-carrier energy systems."""

from ._core import (
    ConfigError,
    IoError,
    SolverError,
    __version__,
    gas_turbine_fuel,
    read_results,
    run_cli,
    simulate,
    validate,
    well_split,
)

__all__ = [
    "ConfigError",
    "IoError",
    "SolverError",
    "__version__",
    "gas_turbine_fuel",
    "read_results",
    "run_cli",
    "simulate",
    "validate",
    "well_split",
]
