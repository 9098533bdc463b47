"""Layered feedforward retina that grows specialised detectors.

Photoreceptors (fixed tuning curves) feed bipolar cells, which may feed
ganglion cells.  Every non-receptor layer has an interneuron pool
(horizontal cells for bipolars, amacrine cells for ganglions) running
winner-take-all competition.  While the network is inside its critical
period, the winner of each layer grows its stimulated dendrites and lets
its silent dendrites decay; resource released by decay goes to a pool
shared by the whole network, and growth draws on that pool first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .neuron import (
    ActivationParams,
    InhibitionParams,
    TuningParams,
    activate_many,
    compete,
    tuning_response,
)
from .plasticity import (
    PlasticityParams,
    SynapseState,
    decay_step,
    growth_step,
    weight_from_resource,
)

LayerKind = Literal["photoreceptor", "bipolar", "ganglion"]
AttributeKind = Literal["colour", "luminance", "delay", "position"]

# Initial resource per dendrite as a fraction of budget / fan_in.
INITIAL_RESOURCE_FRACTION = 0.01
INITIAL_JITTER = 0.1


@dataclass(frozen=True)
class LayerSpec:
    """One layer of cells.

    For photoreceptors, ``channels`` lists the preferred attribute values
    (cone types) available at every retinal position and ``cell_count`` must
    be a multiple of ``len(channels)``; receptor ``k`` sits at position
    ``k // len(channels)`` with channel ``k % len(channels)``.  Other layers
    wire each cell to ``fan_in`` consecutive cells of the layer below.
    """

    kind: LayerKind
    cell_count: int
    fan_in: int = 1
    activation: ActivationParams = field(default_factory=ActivationParams)
    tuning: TuningParams = field(default_factory=TuningParams)
    inhibition: InhibitionParams = field(default_factory=InhibitionParams)
    plasticity: PlasticityParams = field(default_factory=PlasticityParams)
    channels: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.kind not in ("photoreceptor", "bipolar", "ganglion"):
            raise DomainError(f"unknown layer kind {self.kind!r}")
        if self.cell_count <= 0:
            raise DomainError(f"cell_count must be > 0, got {self.cell_count}")
        if self.fan_in <= 0:
            raise DomainError(f"fan_in must be > 0, got {self.fan_in}")
        object.__setattr__(self, "channels", tuple(float(c) for c in self.channels))
        if self.kind == "photoreceptor":
            if not self.channels:
                raise DomainError("photoreceptor layer needs at least one channel")
            if self.cell_count % len(self.channels):
                raise DomainError("photoreceptor cell_count must be a multiple of the channel count")

    @property
    def positions(self) -> int:
        return self.cell_count // len(self.channels)


@dataclass(frozen=True)
class StimulusPattern:
    """A spatial pattern of attribute values with intensities.

    ``samples`` holds ``(position, attribute_value, intensity)`` triples.
    Two samples may share a position (e.g. both eyes after overlaying) but
    not the same (position, attribute_value) pair.
    """

    attribute_kind: AttributeKind
    samples: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        if self.attribute_kind not in ("colour", "luminance", "delay", "position"):
            raise DomainError(f"unknown attribute kind {self.attribute_kind!r}")
        samples = tuple((float(p), float(a), float(i)) for p, a, i in self.samples)
        keys = [(p, a) for p, a, _ in samples]
        if len(set(keys)) != len(keys):
            raise DomainError("duplicate (position, attribute_value) sample")
        if any(i < 0 for _, _, i in samples):
            raise DomainError("intensities must be >= 0")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def point(cls, attribute_value: float, kind: AttributeKind = "colour",
              position: float = 0, intensity: float = 1.0) -> "StimulusPattern":
        return cls(kind, ((position, attribute_value, intensity),))

    @property
    def active_count(self) -> int:
        return sum(1 for s in self.samples if s[2] > 0)


def luminance_value(level: float, polarity: Literal["on", "off"] = "on") -> float:
    """Attribute value for an on- or off-channel luminance sample.

    Off channels respond to darkening, modelled as the mirrored axis.
    """
    if polarity not in ("on", "off"):
        raise DomainError(f"polarity must be 'on' or 'off', got {polarity!r}")
    return level if polarity == "on" else -level


@dataclass(frozen=True, eq=False)
class NetworkState:
    """Complete, immutable snapshot of a network.

    ``synapses[l]`` and ``wiring[l]`` are empty for the photoreceptor layer.
    ``potentials`` and ``winners`` hold the last sweep's post-competition
    outputs (informational only).
    """

    layers: Tuple[LayerSpec, ...]
    synapses: Tuple[Tuple[SynapseState, ...], ...]
    wiring: Tuple[np.ndarray, ...]
    shared_pool: float = 0.0
    clock: float = 0.0
    seed: int = 0
    potentials: Tuple[np.ndarray, ...] = ()
    winners: Tuple[Optional[int], ...] = ()

    @property
    def detecting_layer(self) -> int:
        return len(self.layers) - 1

    def total_resource(self, layer: Optional[int] = None) -> float:
        layers = range(1, len(self.layers)) if layer is None else [layer]
        return float(sum(s.total for l in layers for s in self.synapses[l]))

    def resources(self, layer: int, cell: int) -> np.ndarray:
        return self.synapses[layer][cell].resources

    def resources_by_source(self, layer: int, cell: int) -> np.ndarray:
        """A cell's resources indexed by presynaptic cell instead of dendrite."""
        out = np.zeros(self.layers[layer - 1].cell_count)
        np.add.at(out, self.wiring[layer][cell], self.synapses[layer][cell].resources)
        return out

    def same_as(self, other: "NetworkState") -> bool:
        """Bitwise equality of specs, resources, pool and clock."""
        return (
            self.layers == other.layers
            and self.shared_pool == other.shared_pool
            and self.clock == other.clock
            and self.seed == other.seed
            and len(self.synapses) == len(other.synapses)
            and all(a == b for la, lb in zip(self.synapses, other.synapses) for a, b in zip(la, lb))
        )


@dataclass(frozen=True)
class DetectorEntry:
    layer: int
    cell: int
    input_id: int
    margin: float


@dataclass(frozen=True)
class DetectorMap:
    """Which cell detects which (canonical) input.

    Inputs identical to an earlier one are folded onto that input's id.
    Distinct inputs claiming the same winner are reported in ``collisions``
    as ``(cell, [input ids])`` and left out of ``entries``.
    """

    entries: Tuple[DetectorEntry, ...]
    collisions: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    unclaimed: Tuple[int, ...] = ()

    def cell_for(self, input_id: int) -> Optional[int]:
        for e in self.entries:
            if e.input_id == input_id:
                return e.cell
        return None


@dataclass
class ResourcePool:
    """Released resource available for growth, plus untouched reserve."""

    free: float = 0.0
    reserve: float = math.inf


# -- construction ----------------------------------------------------------

def _wire(n_pre: int, cell_count: int, fan_in: int) -> np.ndarray:
    if fan_in > n_pre:
        raise DomainError(f"fan_in {fan_in} exceeds the {n_pre} cells of the layer below")
    starts = (np.arange(cell_count) * n_pre) // cell_count
    return (starts[:, None] + np.arange(fan_in)[None, :]) % n_pre


def build_network(spec: Sequence[LayerSpec], seed: int = 0, jitter: float = INITIAL_JITTER) -> NetworkState:
    """Create a fresh network with small, seeded, near-uniform resources.

    Each dendrite starts at ``0.01 * budget / fan_in`` times a factor drawn
    uniformly from ``[1 - jitter, 1 + jitter]``.
    """
    spec = tuple(spec)
    if not spec:
        raise DomainError("network needs at least one layer")
    if spec[0].kind != "photoreceptor":
        raise DomainError("first layer must be photoreceptors")
    if any(l.kind == "photoreceptor" for l in spec[1:]):
        raise DomainError("only the first layer may be photoreceptors")
    if not 0 <= jitter < 1:
        raise DomainError(f"jitter must be in [0, 1), got {jitter}")

    rng = np.random.default_rng(seed)
    synapses: List[Tuple[SynapseState, ...]] = [()]
    wiring: List[np.ndarray] = [np.zeros((spec[0].cell_count, 0), dtype=int)]
    for below, layer in zip(spec, spec[1:]):
        wires = _wire(below.cell_count, layer.cell_count, layer.fan_in)
        wires.setflags(write=False)
        wiring.append(wires)
        r0 = INITIAL_RESOURCE_FRACTION * layer.plasticity.resource_budget / layer.fan_in
        factors = rng.uniform(1 - jitter, 1 + jitter, size=(layer.cell_count, layer.fan_in))
        synapses.append(tuple(SynapseState(r0 * f) for f in factors))
    return NetworkState(tuple(spec), tuple(synapses), tuple(wiring), seed=seed)


# -- forward pass -----------------------------------------------------------

def receptor_potentials(layer: LayerSpec, stim: StimulusPattern) -> np.ndarray:
    """Photoreceptor responses; a sample only reaches receptors at its position."""
    n_ch = len(layer.channels)
    v = np.zeros(layer.cell_count)
    for pos, value, intensity in stim.samples:
        idx = int(round(pos))
        if abs(pos - idx) > 1e-9 or not 0 <= idx < layer.positions:
            raise DomainError(f"stimulus position {pos} outside retina of {layer.positions} positions")
        if intensity == 0:
            continue
        for k, preferred in enumerate(layer.channels):
            v[idx * n_ch + k] += intensity * tuning_response(layer.tuning, abs(value - preferred))
    return v


@dataclass(frozen=True)
class LayerResponse:
    inputs: np.ndarray       # presynaptic potential per dendrite, shape (cells, fan_in)
    drive: np.ndarray        # feedforward output before competition
    output: np.ndarray       # after competition
    winner: Optional[int]


def respond(net: NetworkState, stim: StimulusPattern, dt: float, hard: bool = False) -> List[LayerResponse]:
    """Sweep a stimulus through the network without changing it.

    ``hard=True`` forces hard competition in every layer, as used when
    probing detectors.
    """
    below = receptor_potentials(net.layers[0], stim)
    out = [LayerResponse(np.zeros((below.size, 0)), below, below, None)]
    for l in range(1, len(net.layers)):
        layer = net.layers[l]
        inputs = below[net.wiring[l]]
        weights = np.array([weight_from_resource(layer.plasticity, s.resources) for s in net.synapses[l]])
        drive = activate_many(layer.activation, np.sum(weights * inputs, axis=1))
        winner, output, _ = compete(drive, layer.inhibition, dt, mode="hard" if hard else None)
        out.append(LayerResponse(inputs, drive, output, winner))
        below = output
    return out


# -- plasticity sweep -------------------------------------------------------

def _plastic_sweep(
    net: NetworkState,
    responses: List[LayerResponse],
    dt: float,
    pool: ResourcePool,
    hold_losers: bool,
    grow: bool = True,
) -> Tuple[Tuple[SynapseState, ...], ...]:
    """Apply one step of decay and winner growth to every plastic layer.

    Decay releases into ``pool.free``; growth draws on it first and then on
    ``pool.reserve``.  Both pool fields are updated in place.
    """
    new_layers = [()]
    now = net.clock
    for l in range(1, len(net.layers)):
        p = net.layers[l].plasticity
        resp = responses[l]
        cells = list(net.synapses[l])
        for c, s in enumerate(cells):
            stimulated = resp.inputs[c] > 0
            silent = not stimulated.any()
            if c == resp.winner or silent or not hold_losers:
                before = s.total
                s = decay_step(s, p, dt, stimulated, now=now)
                pool.free += before - s.total
                s = replace(s, free_pool=0.0)
            cells[c] = s
        if grow and resp.winner is not None:
            c = resp.winner
            s = replace(cells[c], free_pool=pool.free)
            grown = growth_step(s, resp.inputs[c], p, dt, now, supply=pool.reserve)
            used = grown.total - cells[c].total
            from_pool = pool.free - grown.free_pool
            pool.free = grown.free_pool
            pool.reserve -= used - from_pool
            cells[c] = replace(grown, free_pool=0.0)
        new_layers.append(tuple(cells))
    return tuple(new_layers)


def _check_step(duration: float, dt: float) -> int:
    if not duration > 0:
        raise DomainError(f"duration must be > 0, got {duration}")
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    return max(1, int(round(duration / dt)))


def present(
    net: NetworkState,
    stim: StimulusPattern,
    duration: float,
    dt: float,
    hold_losers: bool = True,
) -> NetworkState:
    """Show a stimulus for ``duration`` and let the synapses adapt.

    Each ``dt`` step runs a full forward sweep with each layer's configured
    competition, grows the winners' stimulated dendrites and decays silent
    dendrites.  Decay applies to the winner and to cells with no stimulated
    input at all; with ``hold_losers=False`` it applies to every cell.
    """
    steps = _check_step(duration, dt)
    synapses = net.synapses
    pool = ResourcePool(free=net.shared_pool)
    responses: List[LayerResponse] = []
    start = net.clock
    for k in range(steps):
        now = start + k * dt
        state = replace(net, synapses=synapses, clock=now)
        responses = respond(state, stim, dt)
        synapses = _plastic_sweep(state, responses, dt, pool, hold_losers)
    return replace(
        net,
        synapses=synapses,
        shared_pool=pool.free,
        clock=start + duration,
        potentials=tuple(r.output for r in responses),
        winners=tuple(r.winner for r in responses),
    )


# -- detectors ----------------------------------------------------------------

def probe(net: NetworkState, stim: StimulusPattern, dt: float = 0.1, layer: int = -1) -> Tuple[Optional[int], float]:
    """Hard-competition winner of ``layer`` and its margin over the runner-up."""
    resp = respond(net, stim, dt, hard=True)[layer]
    if resp.winner is None:
        return None, 0.0
    drive = np.sort(resp.drive)[::-1]
    margin = float(drive[0] - drive[1]) if drive.size > 1 else float(drive[0])
    return resp.winner, margin


def is_detector(
    net: NetworkState,
    cell: int,
    inputs: Sequence[StimulusPattern],
    target: int,
    layer: int = -1,
    dt: float = 0.1,
) -> bool:
    """True iff ``cell`` wins hard competition on ``inputs[target]`` and on no other input."""
    if not inputs:
        raise DomainError("need at least one input")
    if not 0 <= target < len(inputs):
        raise DomainError(f"target {target} out of range")
    for i, stim in enumerate(inputs):
        winner, _ = probe(net, stim, dt, layer)
        if (winner == cell) != (i == target):
            return False
    return True


def detector_map(net: NetworkState, inputs: Sequence[StimulusPattern], dt: float = 0.1, layer: int = -1) -> DetectorMap:
    """Probe every input and record which cell detects it."""
    layer_idx = layer % len(net.layers)
    canonical: List[int] = []
    for i, stim in enumerate(inputs):
        canonical.append(next(j for j in range(i + 1) if inputs[j] == stim))
    distinct = sorted(set(canonical))
    distinct_inputs = [inputs[i] for i in distinct]

    claims: Dict[int, List[Tuple[int, float]]] = {}
    unclaimed = []
    for i in distinct:
        winner, margin = probe(net, inputs[i], dt, layer)
        if winner is None:
            unclaimed.append(i)
        else:
            claims.setdefault(winner, []).append((i, margin))

    entries, collisions = [], []
    for cell in sorted(claims):
        claimed = claims[cell]
        if len(claimed) > 1:
            collisions.append((cell, tuple(i for i, _ in claimed)))
            continue
        i, margin = claimed[0]
        if margin > 0 and is_detector(net, cell, distinct_inputs, distinct.index(i), layer, dt):
            entries.append(DetectorEntry(layer_idx, cell, i, margin))
        else:
            unclaimed.append(i)
    entries.sort(key=lambda e: e.input_id)
    return DetectorMap(tuple(entries), tuple(collisions), tuple(sorted(unclaimed)))


def train(
    net: NetworkState,
    stimuli: Sequence[Tuple[StimulusPattern, int]],
    dt: float,
    duration: float = 2.0,
    hold_losers: bool = True,
) -> Tuple[NetworkState, DetectorMap]:
    """Present stimuli round-robin, then map detectors.

    Each turn shows one stimulus for ``duration``; a stimulus listed with
    ``repetitions=k`` takes part in the first ``k`` rounds.
    """
    if not stimuli:
        raise DomainError("need at least one stimulus")
    rounds = max(reps for _, reps in stimuli)
    for r in range(rounds):
        for stim, reps in stimuli:
            if r < reps:
                net = present(net, stim, duration, dt, hold_losers=hold_losers)
    return net, detector_map(net, [s for s, _ in stimuli], dt)


# -- monocular deprivation ------------------------------------------------------

def _growth_demand(net: NetworkState, responses: List[LayerResponse], dt: float) -> List[float]:
    """Resource each layer's winner would add this step with unlimited supply."""
    demand = [0.0]
    for l in range(1, len(net.layers)):
        c = responses[l].winner
        if c is None:
            demand.append(0.0)
            continue
        s = net.synapses[l][c]
        grown = growth_step(s, responses[l].inputs[c], net.layers[l].plasticity, dt, net.clock)
        demand.append(grown.total - s.total)
    return demand


def _grow_capped(net: NetworkState, responses: List[LayerResponse], dt: float,
                 pool: ResourcePool, allowance: List[float]) -> NetworkState:
    """Grow each layer's winner by at most ``allowance[l]``, pool first."""
    layers = [()]
    for l in range(1, len(net.layers)):
        cells = list(net.synapses[l])
        c = responses[l].winner
        if c is not None and allowance[l] > 0:
            s = cells[c]
            from_pool = min(pool.free, allowance[l])
            grown = growth_step(replace(s, free_pool=from_pool), responses[l].inputs[c],
                                net.layers[l].plasticity, dt, net.clock,
                                supply=allowance[l] - from_pool)
            used = grown.total - s.total
            pool_used = from_pool - grown.free_pool
            pool.free -= pool_used
            pool.reserve -= used - pool_used
            cells[c] = replace(grown, free_pool=0.0)
        layers.append(tuple(cells))
    return replace(net, synapses=tuple(layers))


def monocular_deprivation(
    left: NetworkState,
    right: NetworkState,
    shared_budget: float,
    closed: Literal["left", "right", "none"],
    duration: float,
    dt: float,
    stim: StimulusPattern,
) -> Tuple[NetworkState, NetworkState, List[Tuple[float, float, float]]]:
    """Two eyes competing for one resource budget while one is closed.

    The closed eye sees a blank field, so its synapses only decay; the
    released resource lands in a pool shared by both eyes, which the open
    eye's growth draws on first.  Beyond the pool, growth may use whatever
    of ``shared_budget`` is not yet allocated.  When the eyes together want
    more than is available, every winner's growth is scaled by the same
    factor, so two open eyes stay symmetric.

    Returns the final eyes and ``(time, left_total, right_total)`` samples,
    one per ``dt`` including the starting point.  Any pool left over is
    split evenly between the returned states.
    """
    if closed not in ("left", "right", "none"):
        raise DomainError(f"closed must be 'left', 'right' or 'none', got {closed!r}")
    steps = _check_step(duration, dt)
    blank = StimulusPattern(stim.attribute_kind, tuple((p, a, 0.0) for p, a, _ in stim.samples))
    views = {
        "left": blank if closed == "left" else stim,
        "right": blank if closed == "right" else stim,
    }
    free = left.shared_pool + right.shared_pool
    allocated = left.total_resource() + right.total_resource()
    if allocated + free > shared_budget * (1 + 1e-12):
        raise DomainError("eyes already hold more than shared_budget")
    pool = ResourcePool(free=free, reserve=max(0.0, shared_budget - allocated - free))

    eyes = {"left": left, "right": right}
    trajectory = [(left.clock, left.total_resource(), right.total_resource())]
    for _ in range(steps):
        responses = {k: respond(eyes[k], views[k], dt) for k in eyes}
        # both eyes decay before either grows, so releases are visible to both
        for k in eyes:
            syn = _plastic_sweep(eyes[k], responses[k], dt, pool, hold_losers=True, grow=False)
            eyes[k] = replace(eyes[k], synapses=syn)
        demand = {k: _growth_demand(eyes[k], responses[k], dt) for k in eyes}
        wanted = sum(sum(d) for d in demand.values())
        available = max(0.0, pool.free + pool.reserve)
        scale = 1.0 if wanted <= available else available / wanted
        for k in eyes:
            eyes[k] = _grow_capped(eyes[k], responses[k], dt, pool, [d * scale for d in demand[k]])
        clock = eyes["left"].clock + dt
        eyes = {k: replace(v, clock=clock) for k, v in eyes.items()}
        trajectory.append((clock, eyes["left"].total_resource(), eyes["right"].total_resource()))

    half = pool.free / 2
    return (
        replace(eyes["left"], shared_pool=half),
        replace(eyes["right"], shared_pool=pool.free - half),
        trajectory,
    )
