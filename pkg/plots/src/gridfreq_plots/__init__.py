"""Figure rendering for gridfreq sweep outputs."""

__version__ = "0.1.0"

from .render import KINDS, PlotDataError, PlotSpec, render
