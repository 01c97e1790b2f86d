"""Numerical toolkit for the critical Choquard equation."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
