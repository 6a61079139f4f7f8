"""Synchrosqueezed curvelet transform bindings."""

from ._ssct import *  # noqa: F401,F403
from ._ssct import __doc__  # noqa: F401
