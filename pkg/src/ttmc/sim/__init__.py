"""Interactive and scripted execution of flattened models."""

from ttmc.sim.session import (
    Session,
    session_enabled,
    session_fire,
    session_new,
    session_random_walk,
    session_undo,
)
from ttmc.sim.trace import lasso_to_trace, trace_export, trace_import

__all__ = [
    "Session", "session_new", "session_enabled", "session_fire",
    "session_undo", "session_random_walk",
    "trace_export", "trace_import", "lasso_to_trace",
]
