"""Option-implied density forecasting: risk-neutral, risk-adjusted and
behaviorally corrected return densities with out-of-sample evaluation."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
