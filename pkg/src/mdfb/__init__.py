"""Rate-distortion laboratory for incremental refinement and multiple descriptions with feedback."""

__version__ = "0.1.0"
