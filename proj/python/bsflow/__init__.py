"""Surface-flow verification toolkit: expressions, surface charts, the bubble
model and config-driven verification scenarios."""

from ._bsflow import (
    BubbleError,
    BubbleModel,
    ConfigError,
    Expr,
    ParseError,
    Surface,
    barotropic_pressure,
    run_config,
    run_config_file,
)

__all__ = [
    "BubbleError",
    "BubbleModel",
    "ConfigError",
    "Expr",
    "ParseError",
    "Surface",
    "barotropic_pressure",
    "run_config",
    "run_config_file",
]
