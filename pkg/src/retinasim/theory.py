"""Closed-form results on how many inputs a cell should connect to."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ReceptiveFieldParams:
    """Constants of the inhibition-corrected summed input ``g(n)``.

    ``gain`` sets how fast a synapse saturates with its share of resource,
    ``crowding`` how fast lateral inhibition suppresses inputs as more of
    them are active, and ``floor`` the potential left after inhibition.
    """

    gain: float = 1.0
    crowding: float = 1.0
    floor: float = 0.1

    def __post_init__(self):
        if not self.gain > 0:
            raise DomainError(f"gain must be > 0, got {self.gain}")
        if not self.crowding >= 0:
            raise DomainError(f"crowding must be >= 0, got {self.crowding}")
        if not self.floor >= 0:
            raise DomainError(f"floor must be >= 0, got {self.floor}")


def frequency_sigma(m: int, n: int, budget: float, weight_gain: float, v: float) -> float:
    """Summed input of a cell with ``m`` dendrites facing ``n`` equal active inputs.

    The budget is split evenly over the ``m`` dendrites; only ``min(m, n)``
    of them see an active input.
    """
    if m < 1 or n < 1:
        raise DomainError(f"m and n must be >= 1, got m={m}, n={n}")
    return min(m, n) * -math.expm1(-weight_gain * budget / m) * v


def saturation_gap(x, m, n):
    """``(n/m)(1 - e^-x) - (1 - e^(-n x / m))``; nonnegative whenever ``m <= n``."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(n, dtype=float) / np.asarray(m, dtype=float)
    return k * -np.expm1(-x) + np.expm1(-k * x)


def receptive_field_value(n, p: ReceptiveFieldParams):
    """``g(n) = n (1 - e^(-gain/n)) (e^(-crowding n) + floor)`` for real ``n > 0``."""
    n = np.asarray(n, dtype=float)
    return n * -np.expm1(-p.gain / n) * (np.exp(-p.crowding * n) + p.floor)


def receptive_field_optimum(p: ReceptiveFieldParams, n_max: int) -> int:
    """Number of active inputs in ``1..n_max`` that maximises ``g(n)``.

    Exhaustive scan; ties go to the smaller ``n``.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    values = receptive_field_value(np.arange(1, n_max + 1), p)
    return int(np.argmax(values)) + 1
