"""Real-arithmetic operation counters used by the algebra kernels."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class OpCounter:
    """Tally of real multiplications and additions.

    Counters only ever grow. Subtractions count as additions.
    """

    real_mults: int = 0
    real_adds: int = 0

    def add(self, mults: int = 0, adds: int = 0) -> None:
        if mults < 0 or adds < 0:
            raise ValueError("operation counts cannot decrease")
        self.real_mults += int(mults)
        self.real_adds += int(adds)

    def reset(self) -> None:
        self.real_mults = 0
        self.real_adds = 0

    def snapshot(self) -> tuple[int, int]:
        return self.real_mults, self.real_adds

    def __iadd__(self, other: "OpCounter") -> "OpCounter":
        self.add(other.real_mults, other.real_adds)
        return self
