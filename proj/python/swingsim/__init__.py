"""Swing-equation simulation toolkit: C++ core with python bindings."""

from ._swingsim import *  # noqa: F401,F403
from ._swingsim import __doc__  # noqa: F401

__version__ = "0.1.0"
