"""Trinion algebra and trinion-valued adaptive LMS prediction of 3-D wind."""

__version__ = "0.1.0"

from .counting import OpCounter
from .errors import (
    BudgetMismatchError, ConfigError, DataError, DegenerateProbeError,
    DivergenceError, RecoveryRankError, TrinionError,
)
from .hypercomplex import Quaternion, Trinion
from .filters import (
    AQLMS, ATLMS, QLMS, TLMS, Algo, DelayLine, FilterConfig, make_filter, run_prediction,
)
