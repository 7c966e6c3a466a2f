"""Python bindings for the senergy library."""

from ._core import *  # noqa: F401,F403
from ._core import SenergyError, Trace  # noqa: F401
