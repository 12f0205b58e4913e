"""Movement-oriented video metadata indexing."""

__version__ = "0.1.0"
