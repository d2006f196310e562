"""Guided-bootstrap contextual bandits with count-based fake-sample priors."""
from .core import Batch, FieldLayout, Interaction, RngStream, argmax_tiebreak, derive_stream

__version__ = "0.1.0"

__all__ = ["Batch", "FieldLayout", "Interaction", "RngStream", "argmax_tiebreak", "derive_stream"]
