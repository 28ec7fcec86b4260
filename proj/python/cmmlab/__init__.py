"""Cooperative map matching simulation laboratory."""

from ._cmmlab import *  # noqa: F401,F403
from ._cmmlab import __version__  # noqa: F401
