"""Negative-glue 2HAM simulator with graph-walking and Turing-machine compilers."""
from .model import INF, Assembly, Glue, Tile, parse_strength, format_strength
from .cuts import is_stable, min_cut_weight, enumerate_breaks, enumerate_combinations, enumerate_cuts_below
from .dynamics import AssemblySystem, Bounds, explore, run, successors, project, fuel

__version__ = "0.1.0"

__all__ = [
    "INF", "Assembly", "Glue", "Tile", "parse_strength", "format_strength",
    "is_stable", "min_cut_weight", "enumerate_breaks", "enumerate_combinations", "enumerate_cuts_below",
    "AssemblySystem", "Bounds", "explore", "run", "successors", "project", "fuel",
]
