"""Deterministic figure rendering for vortex-zbw CSV outputs.

This package draws plots from the CSV files written by the ``vzbw`` command
line tool and from nothing else.  Every plotted number must already exist in
a CSV column; no physics is recomputed here.  Input files are only accepted
together with their ``.meta.json`` provenance sidecar.
"""

from vzbwfig.io import FigureInputError, Table, load_table
from vzbwfig.render import KINDS, FigureSpec, render, render_to_file

__version__ = "0.1.0"

__all__ = [
    "FigureInputError",
    "FigureSpec",
    "KINDS",
    "Table",
    "load_table",
    "render",
    "render_to_file",
    "__version__",
]
