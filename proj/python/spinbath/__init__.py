"""Exact central-spin dephasing model (C++ core via pybind11)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
