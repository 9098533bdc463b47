"""Dendritic synapse resources: growth, passive decay and optimal allocation.

A cell owns a limited amount of synaptic resource spread over its dendrites.
Weights are a saturating function of resource.  Stimulated dendrites of an
active cell grow into the unused budget at a rate set by a log-linear drive;
unstimulated dendrites decay and release resource into a free pool.
Plasticity only operates before ``plastic_until`` (the critical period).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .neuron import TuningParams


@dataclass(frozen=True)
class PlasticityParams:
    weight_ceiling: float = 1.0
    weight_gain: float = 2.0
    growth_rate: float = 1.0
    resource_budget: float = 1.0
    decay_rate: float = 1.0
    log_offset: float = 1.0
    plastic_until: float = math.inf

    def __post_init__(self):
        for name in ("weight_ceiling", "weight_gain", "growth_rate", "resource_budget", "decay_rate"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.plastic_until >= 0:
            raise DomainError(f"plastic_until must be >= 0, got {self.plastic_until}")


@dataclass(frozen=True, eq=False)
class SynapseState:
    """Resources held by one cell's dendrites plus resource it has released."""

    resources: np.ndarray
    free_pool: float = 0.0

    def __post_init__(self):
        r = np.array(self.resources, dtype=float).reshape(-1)
        if np.any(r < 0) or np.any(np.isnan(r)):
            raise DomainError("resources must be >= 0")
        if not self.free_pool >= 0:
            raise DomainError(f"free_pool must be >= 0, got {self.free_pool}")
        r.setflags(write=False)
        object.__setattr__(self, "resources", r)

    @property
    def total(self) -> float:
        return float(self.resources.sum())

    def __eq__(self, other):
        if not isinstance(other, SynapseState):
            return NotImplemented
        return self.free_pool == other.free_pool and np.array_equal(self.resources, other.resources)

    def __repr__(self):
        return f"SynapseState(resources={self.resources.tolist()}, free_pool={self.free_pool})"


def weight_from_resource(p: PlasticityParams, r):
    """Synaptic weight held by resource ``r`` (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("resource must be >= 0")
    w = p.weight_ceiling * -np.expm1(-p.weight_gain * r_arr)
    return float(w) if w.ndim == 0 else w


def growth_drive(v: float, p: PlasticityParams) -> float:
    """Log-linear growth drive, clamped at zero; zero input gives zero drive."""
    if v < 0:
        raise DomainError(f"potential must be >= 0, got {v}")
    if v == 0:
        return 0.0
    return max(0.0, math.log(v) + p.log_offset)


def growth_step(
    s: SynapseState,
    inputs: Sequence[float],
    p: PlasticityParams,
    dt: float,
    now: float,
    supply: float = math.inf,
) -> SynapseState:
    """One Euler step of resource growth on a cell's stimulated dendrites.

    Growth is proportional to the unused part of the budget.  It is paid for
    out of ``s.free_pool`` first and then from ``supply``; if either the budget
    or the available resource would be exceeded, all increments shrink by the
    same factor.
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    inputs = np.asarray(inputs, dtype=float).reshape(-1)
    if inputs.size != s.resources.size:
        raise DomainError(f"got {inputs.size} inputs for {s.resources.size} dendrites")
    if now > p.plastic_until:
        return s

    drives = np.array([growth_drive(v, p) for v in inputs])
    room = max(0.0, p.resource_budget - s.total)
    inc = dt * p.growth_rate * room * drives
    total = float(inc.sum())
    if total <= 0:
        return s
    limit = min(room, s.free_pool + supply)
    if total > limit:
        inc *= limit / total
        total = float(inc.sum())
    from_pool = min(s.free_pool, total)
    return SynapseState(s.resources + inc, s.free_pool - from_pool)


def decay_step(
    s: SynapseState,
    p: PlasticityParams,
    dt: float,
    stimulated: Sequence[bool],
    now: Optional[float] = None,
) -> SynapseState:
    """Passive decay of unstimulated dendrites; the lost resource is released.

    With ``now`` given, nothing happens once the critical period is over.
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    stimulated = np.asarray(stimulated, dtype=bool).reshape(-1)
    if stimulated.size != s.resources.size:
        raise DomainError(f"got {stimulated.size} flags for {s.resources.size} dendrites")
    if now is not None and now > p.plastic_until:
        return s
    r = s.resources
    w = weight_from_resource(p, r)
    new_r = np.where(stimulated, r, np.maximum(0.0, r - dt * p.decay_rate * w))
    released = float((r - new_r).sum())
    if released == 0:
        return s
    return SynapseState(new_r, s.free_pool + released)


def allocation_sigma(resources, potentials, p: PlasticityParams) -> np.ndarray:
    """Summed weighted input ``sum(w(r_i) * v_i)`` along the last axis."""
    w = p.weight_ceiling * -np.expm1(-p.weight_gain * np.asarray(resources, dtype=float))
    return np.sum(w * np.asarray(potentials, dtype=float), axis=-1)


def optimal_allocation(distances: Iterable[float], t: TuningParams, p: PlasticityParams) -> np.ndarray:
    """Resource split over dendrites that maximises the cell's summed input.

    Dendrite ``i`` sees a receptor ``distances[i]`` away from the stimulus.
    On the active set the optimum is linear in ``reach - d_i`` with slope
    ``t.decay / p.weight_gain`` (equivalently linear in the log of the
    receptor potential); the additive level is fixed by the budget, and
    dendrites whose share would be negative get nothing.
    """
    d = np.asarray(list(distances), dtype=float)
    if d.size == 0:
        raise DomainError("need at least one dendrite")
    if np.any(d < 0) or np.any(d > t.reach):
        raise DomainError(f"distances must lie in [0, {t.reach}]")
    base = (t.decay / p.weight_gain) * (t.reach - d)
    budget = p.resource_budget

    order = np.argsort(-base, kind="stable")
    ranked = base[order]
    level = 0.0
    for k in range(1, d.size + 1):
        candidate = (ranked[:k].sum() - budget) / k
        if k == d.size or ranked[k] <= candidate:
            level = candidate
            break
    r = np.maximum(0.0, base - level)
    # land exactly on the budget despite rounding
    r *= budget / r.sum()
    return r


def matched_log_offset(potentials: Sequence[float], p: PlasticityParams) -> float:
    """Drive offset under which growth from empty dendrites reaches the optimum.

    Growth keeps resource proportional to the drives, so it converges to the
    optimal split exactly when the drives sum to ``weight_gain * budget``.
    For two receptors whose distances to the stimulus add up to their
    separation, the sum of log potentials (and hence this offset) does not
    depend on where the stimulus falls between them.
    """
    logs = np.log(np.asarray(potentials, dtype=float))
    return float((p.weight_gain * p.resource_budget - logs.sum()) / logs.size)
