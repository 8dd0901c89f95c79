# wallopt/__init__.py - Seismic retaining wall optimization with fuzzy adaptive empire search

__version__ = "1.0.0"
