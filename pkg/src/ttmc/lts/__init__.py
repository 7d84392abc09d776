"""Operational semantics: configurations, transition steps, exploration."""

from ttmc.lts.semantics import (
    Configuration,
    StepResult,
    TransitionName,
    enabled,
    initial_configuration,
    step,
)
from ttmc.lts.explore import LtsGraph, explore

__all__ = [
    "Configuration", "StepResult", "TransitionName",
    "enabled", "initial_configuration", "step",
    "LtsGraph", "explore",
]
