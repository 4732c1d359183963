"""Module Version Information."""
__version__ = "0.1.0"
