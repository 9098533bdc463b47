"""Motion, binocular depth and single-ear direction built on the retina model.

Motion becomes a spatial pattern of time delays.  Depth is available two
ways: the trigonometric formula below, or by overlaying both retinas into
one stimulus pattern that a detector cell can learn.  Sound direction maps
to a position on the cochlear cross-section, read out by tuned position
detectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np

from .errors import DegenerateGeometryError, DomainError, NoSignalError
from .network import StimulusPattern
from .neuron import TuningParams, tuning_response

# Rays closer to parallel than this (difference of tangents) have no usable depth.
DEPTH_GUARD = 1e-9

# Shift added to the attribute axis of right-eye samples when overlaying.
EYE_OFFSET = 1000.0


# -- motion -------------------------------------------------------------------

@dataclass(frozen=True)
class DelayPattern:
    samples: Tuple[Tuple[float, float], ...]   # (position, delay)

    def __post_init__(self):
        samples = tuple((float(p), float(d)) for p, d in self.samples)
        if any(d < 0 for _, d in samples):
            raise DomainError("delays must be >= 0")
        positions = [p for p, _ in samples]
        if len(set(positions)) != len(positions):
            raise DomainError("positions must be distinct")
        object.__setattr__(self, "samples", samples)

    @property
    def delays(self) -> np.ndarray:
        return np.array([d for _, d in self.samples])

    def to_stimulus(self, intensity: float = 1.0) -> StimulusPattern:
        """The same pattern as a retina input on the delay axis."""
        return StimulusPattern("delay", tuple((p, d, intensity) for p, d in self.samples))


def constant_velocity_trajectory(positions: Sequence[float], velocity: float,
                                 start_time: float = 0.0) -> list:
    """``(position, time)`` samples of an object moving at ``velocity``.

    Time is measured from the first position; an infinite velocity gives a
    static object seen everywhere at ``start_time``.
    """
    if velocity == 0:
        raise DomainError("velocity must be nonzero")
    x0 = positions[0]
    return [(x, start_time + abs(x - x0) / abs(velocity)) for x in positions]


def motion_to_delays(trajectory: Iterable[Tuple[float, float]], reference_time: float) -> DelayPattern:
    """Delay of each trajectory sample relative to ``reference_time``."""
    trajectory = list(trajectory)
    times = [t for _, t in trajectory]
    if any(b < a for a, b in zip(times, times[1:])):
        raise DomainError("trajectory times must not decrease")
    if any(t < reference_time for t in times):
        raise DomainError("trajectory sample earlier than reference_time")
    return DelayPattern(tuple((x, t - reference_time) for x, t in trajectory))


# -- binocular depth -----------------------------------------------------------

@dataclass(frozen=True)
class DepthScene:
    """Binocular viewing geometry.

    The eyes sit ``baseline`` apart.  At each eye, angles are measured from
    the interocular baseline on the left-eye side: ``alpha``/``theta`` are the
    fixation (oculomotor) angles of the left/right eye, and the target is seen
    ``disparity_left``/``disparity_right`` of retinal arc further round, on an
    eyeball of radius ``eyeball_radius``.
    """

    baseline: float
    eyeball_radius: float
    alpha: float
    theta: float
    disparity_left: float = 0.0
    disparity_right: float = 0.0

    def __post_init__(self):
        if not self.baseline > 0:
            raise DomainError(f"baseline must be > 0, got {self.baseline}")
        if not self.eyeball_radius > 0:
            raise DomainError(f"eyeball_radius must be > 0, got {self.eyeball_radius}")
        for name in ("alpha", "theta"):
            if not 0 < getattr(self, name) < math.pi / 2:
                raise DomainError(f"{name} must lie in (0, pi/2), got {getattr(self, name)}")


def disparity_angles(a: float, b: float, r: float) -> Tuple[float, float]:
    """Convert retinal disparities (arc lengths) to angles: ``(a/r, b/r)``."""
    if not r > 0:
        raise DomainError(f"eyeball radius must be > 0, got {r}")
    if a < 0 or b < 0:
        raise DomainError(f"disparities must be >= 0, got a={a}, b={b}")
    return a / r, b / r


def _ray_depth(baseline: float, left_angle: float, right_angle: float) -> float:
    for name, angle in (("left", left_angle), ("right", right_angle)):
        if not 0 < angle < math.pi / 2:
            raise DomainError(f"{name} ray angle must lie in (0, pi/2), got {angle}")
    tl, tr = math.tan(left_angle), math.tan(right_angle)
    if abs(tl - tr) < DEPTH_GUARD:
        raise DegenerateGeometryError("viewing rays are parallel; depth is unbounded")
    return baseline * tl * tr / (tl - tr)


def depth_from_disparity(s: DepthScene) -> float:
    """Perpendicular distance of the target from the interocular baseline.

    The result is signed: it is negative when the two target rays cross on
    the far side of the baseline, i.e. the right-eye ray is the steeper one.
    """
    eta, beta = disparity_angles(s.disparity_right, s.disparity_left, s.eyeball_radius)
    return _ray_depth(s.baseline, s.alpha + beta, s.theta + eta)


def fixation_depth(s: DepthScene) -> float:
    """Distance of the fixation point from the baseline."""
    return _ray_depth(s.baseline, s.alpha, s.theta)


def relative_depth(s: DepthScene) -> float:
    """Target depth minus fixation depth; negative when the target is nearer."""
    return depth_from_disparity(s) - fixation_depth(s)


def overlay_retinas(left: StimulusPattern, right: StimulusPattern,
                    eye_offset: float = EYE_OFFSET) -> StimulusPattern:
    """Merge both eyes' patterns into one, tagging the right eye on the attribute axis."""
    if left.attribute_kind != right.attribute_kind:
        raise DomainError(f"cannot overlay {left.attribute_kind} with {right.attribute_kind}")
    merged = left.samples + tuple((p, a + eye_offset, i) for p, a, i in right.samples)
    return StimulusPattern(left.attribute_kind, merged)


def split_retinas(merged: StimulusPattern, eye_offset: float = EYE_OFFSET
                  ) -> Tuple[StimulusPattern, StimulusPattern]:
    """Inverse of :func:`overlay_retinas` for attribute values below ``eye_offset / 2``."""
    left = tuple(s for s in merged.samples if s[1] < eye_offset / 2)
    right = tuple((p, a - eye_offset, i) for p, a, i in merged.samples if a >= eye_offset / 2)
    return StimulusPattern(merged.attribute_kind, left), StimulusPattern(merged.attribute_kind, right)


# -- single-ear direction -------------------------------------------------------

def linear_angle_to_position(angle: float) -> float:
    return (angle + math.pi / 2) / math.pi


def linear_position_to_angle(position: float) -> float:
    return position * math.pi - math.pi / 2


@dataclass(frozen=True)
class CochleaModel:
    """Position detectors along the cochlear cross-section.

    ``preferred`` gives each detector's preferred cross-section position in
    ``[0, 1]``; ``tunings`` its response curve.  The angle map must be
    strictly increasing on ``[-pi/2, pi/2]`` with ``position_to_angle`` as
    its inverse.
    """

    preferred: Tuple[float, ...]
    tunings: Tuple[TuningParams, ...]
    angle_to_position: Callable[[float], float] = linear_angle_to_position
    position_to_angle: Callable[[float], float] = linear_position_to_angle

    def __post_init__(self):
        preferred = tuple(float(p) for p in self.preferred)
        if not preferred:
            raise DomainError("need at least one detector")
        if len(self.tunings) != len(preferred):
            raise DomainError("one tuning per detector required")
        if any(b <= a for a, b in zip(preferred, preferred[1:])):
            raise DomainError("preferred positions must be strictly increasing")
        grid = np.linspace(-math.pi / 2, math.pi / 2, 257)
        mapped = [self.angle_to_position(a) for a in grid]
        if any(b <= a for a, b in zip(mapped, mapped[1:])):
            raise DomainError("angle_to_position must be strictly increasing")
        object.__setattr__(self, "preferred", preferred)
        object.__setattr__(self, "tunings", tuple(self.tunings))

    @classmethod
    def evenly_spaced(cls, count: int = 7, peak: float = 1.0, decay: float = 4.0,
                      reach_spacings: float = 1.5) -> "CochleaModel":
        """Detectors spread from one end of the membrane to the other.

        Each detector's reach covers ``reach_spacings`` detector spacings so
        that neighbours always overlap.
        """
        if count < 2:
            raise DomainError("need at least two detectors")
        spacing = 1.0 / (count - 1)
        tuning = TuningParams(peak=peak, decay=decay, reach=reach_spacings * spacing)
        return cls(tuple(np.linspace(0.0, 1.0, count)), (tuning,) * count)

    def preferred_angles(self) -> np.ndarray:
        return np.array([self.position_to_angle(p) for p in self.preferred])


def _check_angle(angle: float) -> None:
    if not -math.pi / 2 <= angle <= math.pi / 2:
        raise DomainError(f"incidence angle must lie in [-pi/2, pi/2], got {angle}")


def incidence_to_position(angle: float, m: CochleaModel) -> float:
    """Cross-section position of maximal stimulation for a sound at ``angle``."""
    _check_angle(angle)
    return float(m.angle_to_position(angle))


def membrane_responses(angle: float, m: CochleaModel, intensity: float = 1.0) -> np.ndarray:
    """Detector potentials evoked by a sound arriving at ``angle``."""
    pos = incidence_to_position(angle, m)
    return np.array([intensity * tuning_response(t, abs(pos - p)) for p, t in zip(m.preferred, m.tunings)])


def localize_direction(responses: Sequence[float], m: CochleaModel) -> float:
    """Recover the incidence angle from detector responses.

    The strongest detector wins.  If one of its neighbours also responds,
    the position is placed between the two from the log ratio of their
    responses, which does not depend on sound intensity.
    """
    v = np.asarray(responses, dtype=float)
    if v.size != len(m.preferred):
        raise DomainError(f"expected {len(m.preferred)} responses, got {v.size}")
    if np.any(v < 0):
        raise DomainError("responses must be >= 0")
    if not np.any(v > 0):
        raise NoSignalError("no detector responded")

    k = int(np.argmax(v))
    neighbours = [j for j in (k - 1, k + 1) if 0 <= j < v.size and v[j] > 0]
    if not neighbours:
        return float(m.position_to_angle(m.preferred[k]))
    j = max(neighbours, key=lambda i: (v[i], -i))
    lo, hi = sorted((k, j))
    t_lo, t_hi = m.tunings[lo], m.tunings[hi]
    p_lo, p_hi = m.preferred[lo], m.preferred[hi]
    log_ratio = math.log(v[lo] / t_lo.peak) - math.log(v[hi] / t_hi.peak)
    pos = (t_lo.decay * p_lo + t_hi.decay * p_hi - log_ratio) / (t_lo.decay + t_hi.decay)
    pos = min(max(pos, p_lo), p_hi)
    return float(m.position_to_angle(pos))
