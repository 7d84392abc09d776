"""ttmc: a toolchain for timed transition models.

Parses the TTM textual notation (indexed events, synchronous events with
primed data flow, time bounds, fairness annotations), flattens module
compositions, explores the resulting labelled transition system, checks LTL
properties under weak/strong fairness and real-time scheduling, and runs
interactive or scripted simulations.
"""

__version__ = "0.1.0"

from ttmc.syntax.parser import parse, parse_model
from ttmc.syntax.ltl import parse_ltl
from ttmc.elaborate.flatten import flatten, flatten_source

__all__ = ["parse", "parse_model", "parse_ltl", "flatten", "flatten_source"]
