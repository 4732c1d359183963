"""The command line interface of linsem."""
from .app import app

__all__ = ["app"]
