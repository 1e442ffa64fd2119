"""Text-to-scene generation: floor plans, openings, asset retrieval and
constraint-based furniture layout."""

__version__ = "0.1.0"
