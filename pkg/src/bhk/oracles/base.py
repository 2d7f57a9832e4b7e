"""Shared result container for the independent oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import DomainError


@dataclass(frozen=True)
class OracleResult:
    """Oracle value with a certified (or statistical) error bound.

    ``err`` is an absolute error: an analytic truncation bound for the
    series, one standard error for Monte Carlo, an extrapolation estimate
    for the hitting density.  ``work`` records effort counters (modes
    summed, paths simulated, ...) for reporting.
    """

    value: float
    err: float
    work: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if math.isnan(self.value):
            raise DomainError("oracle produced NaN")
        if not (self.err >= 0.0):
            raise DomainError("oracle err must be >= 0")
