"""Exception hierarchy shared by all submodules."""


class TrinionError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(TrinionError, ValueError):
    """A configuration value is out of its valid range."""


class DataError(TrinionError, ValueError):
    """Input data could not be parsed or failed validation."""


class DegenerateProbeError(TrinionError, ArithmeticError):
    """A finite-difference probe produced a non-finite function value."""


class DivergenceError(TrinionError, ArithmeticError):
    """Adaptive weights became non-finite or exceeded the divergence bound.

    Attributes
    ----------
    index : int
        Sample index at which divergence was detected.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"filter diverged at sample {self.index}")


class RecoveryRankError(TrinionError, ArithmeticError):
    """The covariance recovery system is rank deficient."""

    def __init__(self, unrecoverable):
        self.unrecoverable = list(unrecoverable)
        super().__init__(
            "real covariances not recoverable from trinion covariances: "
            + ", ".join(self.unrecoverable)
        )


class BudgetMismatchError(TrinionError, AssertionError):
    """Counted operations disagree with the closed-form per-update budget."""

    def __init__(self, algo, L, expected, counted):
        self.algo = algo
        self.L = L
        self.expected = tuple(expected)
        self.counted = tuple(counted)
        super().__init__(
            f"{algo} (L={L}): expected {self.expected[0]} mults / "
            f"{self.expected[1]} adds, counted {self.counted[0]} / {self.counted[1]}"
        )
