"""Road-network shelter accessibility, equity, and placement engine."""

__version__ = "0.1.0"
