"""Stateless cell equations: activation, receptor tuning and lateral inhibition.

Every function here is pure.  Layers of potentials are plain 1-D float
arrays (``PotentialVector``); values are never negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError

# Potentials at or below this level count as inactive during competition.
ACTIVITY_EPS = 1e-6

PotentialVector = np.ndarray


@dataclass(frozen=True)
class ActivationParams:
    """Saturating output of a bipolar or ganglion cell."""

    ceiling: float = 1.0
    gain: float = 1.0

    def __post_init__(self):
        if not self.ceiling > 0:
            raise DomainError(f"ceiling must be > 0, got {self.ceiling}")
        if not self.gain > 0:
            raise DomainError(f"gain must be > 0, got {self.gain}")


@dataclass(frozen=True)
class TuningParams:
    """Exponential fall-off of a receptor's response with attribute distance."""

    peak: float = 1.0
    decay: float = 1.0
    reach: float = 1.0

    def __post_init__(self):
        for name in ("peak", "decay", "reach"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class InhibitionParams:
    """Interneuron pool (horizontal or amacrine cells) driving competition.

    ``mode='soft'`` stops competing after ``soft_duration`` time units and may
    leave several cells active; ``mode='hard'`` runs until one cell remains.
    """

    rate_ceiling: float = 1.0
    rate_gain: float = 1.0
    soft_duration: float = 0.5
    mode: Literal["soft", "hard"] = "hard"

    def __post_init__(self):
        if not self.rate_ceiling > 0:
            raise DomainError(f"rate_ceiling must be > 0, got {self.rate_ceiling}")
        if not self.rate_gain > 0:
            raise DomainError(f"rate_gain must be > 0, got {self.rate_gain}")
        if self.mode not in ("soft", "hard"):
            raise DomainError(f"mode must be 'soft' or 'hard', got {self.mode!r}")
        if self.mode == "soft" and not self.soft_duration > 0:
            raise DomainError(f"soft_duration must be > 0, got {self.soft_duration}")


def as_potentials(values: Iterable[float]) -> PotentialVector:
    """Copy ``values`` into a float array, rejecting negative entries."""
    arr = np.array(values, dtype=float).reshape(-1)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("potentials must be >= 0")
    return arr


def activate(p: ActivationParams, weighted_inputs: Iterable[Tuple[float, float]]) -> float:
    """Output potential ``ceiling * (1 - exp(-gain * sum(w * v)))``."""
    sigma = 0.0
    for w, v in weighted_inputs:
        if w < 0 or v < 0:
            raise DomainError(f"weights and potentials must be >= 0, got ({w}, {v})")
        sigma += w * v
    return p.ceiling * -math.expm1(-p.gain * sigma)


def activate_many(p: ActivationParams, sigma: np.ndarray) -> np.ndarray:
    """Vectorised :func:`activate` for precomputed input sums."""
    return p.ceiling * -np.expm1(-p.gain * np.asarray(sigma, dtype=float))


def tuning_response(p: TuningParams, distance: float) -> float:
    """Receptor potential for a stimulus ``distance`` away on the attribute axis.

    Beyond ``reach`` the receptor is silent.
    """
    if distance < 0:
        raise DomainError(f"distance must be >= 0, got {distance}")
    if distance > p.reach:
        return 0.0
    return p.peak * math.exp(-p.decay * distance)


def inhibition_step(layer: Sequence[float], p: InhibitionParams, dt: float) -> PotentialVector:
    """One explicit Euler step of lateral inhibition through interneurons.

    Each cell is hyperpolarised at a rate set by the summed potential of the
    other cells in the layer; results are floored at zero.
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    v = as_potentials(layer)
    # rounding is monotone, so S - v keeps the neighbour sums ordered
    others = v.sum() - v
    h = p.rate_ceiling * -np.expm1(-p.rate_gain * others)
    return np.maximum(0.0, v - dt * h)


def compete(
    layer: Sequence[float],
    p: InhibitionParams,
    dt: float,
    max_steps: int = 10_000,
    mode: Optional[str] = None,
) -> Tuple[Optional[int], PotentialVector, int]:
    """Run winner-take-all competition on a layer.

    Returns ``(winner, potentials, steps_run)``.  ``winner`` is None for an
    all-zero layer.  ``mode`` overrides ``p.mode`` (used when probing a layer
    with hard competition regardless of its configuration).
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if max_steps <= 0:
        raise DomainError(f"max_steps must be > 0, got {max_steps}")
    mode = mode or p.mode
    v = as_potentials(layer)
    if not np.any(v > 0):
        return None, v, 0

    if mode == "soft":
        limit = min(max_steps, int(math.floor(p.soft_duration / dt + 1e-9)))
    else:
        limit = max_steps

    steps = 0
    last_active = v
    while steps < limit and np.count_nonzero(v > ACTIVITY_EPS) > 1:
        last_active = v
        v = inhibition_step(v, p, dt)
        steps += 1

    if np.count_nonzero(v > ACTIVITY_EPS) == 0:
        # everyone fell below threshold together: the last leader wins,
        # lowest index on exact ties
        return int(np.argmax(last_active)), v, steps
    return int(np.argmax(v)), v, steps


def occurrence_probability(gain: float, attribute_potentials: Iterable[float]) -> float:
    """Probability that at least one independent attribute signals the object.

    Each attribute with potential ``v`` misses the object with probability
    ``exp(-gain * v)``; the result is the complement of all of them missing.
    """
    miss = 1.0
    for v in attribute_potentials:
        if v < 0:
            raise DomainError(f"attribute potentials must be >= 0, got {v}")
        miss *= math.exp(-gain * v)
    return 1.0 - miss
