"""linsem: linear-encoded semantics in latent spaces.

Decorrelation regularization, semantic direction regression and manipulation,
localized component factorization of Jacobians, Ward clustering and planted
linear worlds to check them against.
"""
from linsem._version import __version__

__all__ = ["__version__"]
