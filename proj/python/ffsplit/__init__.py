"""Python bindings for the ffsplit library."""

from ._ffsplit import (
    ConfigError,
    SplitMode,
    SystemConfig,
    __version__,
    best_pair_policy,
    glue_pour_power,
    load_config,
    mbps_to_units,
    nominal_config,
    parse_config,
    run_policy,
    run_sweep,
    solve_offline,
    units_to_mbps,
    v3_power,
)

__all__ = [
    "ConfigError",
    "SplitMode",
    "SystemConfig",
    "__version__",
    "best_pair_policy",
    "glue_pour_power",
    "load_config",
    "mbps_to_units",
    "nominal_config",
    "parse_config",
    "run_policy",
    "run_sweep",
    "solve_offline",
    "units_to_mbps",
    "v3_power",
]
