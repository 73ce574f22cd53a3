"""Grain-boundary Schrödinger spectra: python bindings for the C++ core."""

from _gbspec import *  # noqa: F401,F403
from _gbspec import __version__  # noqa: F401
