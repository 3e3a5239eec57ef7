"""Sheaf cubical complexes over lifted Cayley graphs: cup products and invariants."""

__version__ = "0.1.0"
