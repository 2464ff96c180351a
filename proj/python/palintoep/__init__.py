"""Eigenvalue moments of highly palindromic Toeplitz ensembles."""

from ._palintoep import *  # noqa: F401,F403
from ._palintoep import __version__  # noqa: F401
