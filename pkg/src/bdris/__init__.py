"""bdris: graph-theoretic tree- and forest-connected BD-RIS design and optimization."""

__version__ = "0.1.0"
__all__ = ["__version__"]
