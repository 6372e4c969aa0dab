"""Batch figure rendering for relay-simulator CSV outputs."""

from .render import render_cdf, render_surface
from .spec import (PlotDataError, PlotSpec, footer_text, input_hash,
                   load_cdf, load_surface)

__version__ = "0.1.0"
