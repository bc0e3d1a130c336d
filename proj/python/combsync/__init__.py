"""Clock phase caching and comb RF carrier distribution simulator."""

from combsync._core import *  # noqa: F401,F403
from combsync._core import __doc__  # noqa: F401

__version__ = "0.1.0"
