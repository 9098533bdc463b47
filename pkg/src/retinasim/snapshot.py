"""Save and restore networks as versioned JSON.

Layout (version 1)::

    {
      "format": "retinasim-network",
      "version": 1,
      "seed": 0,
      "clock": 12.5,
      "shared_pool": 0.0,
      "layers": [
        {"kind": "photoreceptor", "cell_count": 2, "fan_in": 1,
         "channels": [0.0, 1.0],
         "activation": {...}, "tuning": {...},
         "inhibition": {...}, "plasticity": {...}},
        ...
      ],
      "resources": [[], [[r, r], [r, r], ...], ...]
    }

``resources[l][c]`` lists the per-dendrite resource of cell ``c`` in layer
``l`` (empty for photoreceptors).  Wiring is rebuilt from the layer specs.
Floats are written with ``repr`` precision, so a round trip is exact.
An infinite ``plastic_until`` is stored as the string ``"inf"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from .errors import DomainError
from .network import LayerSpec, NetworkState, _wire
from .neuron import ActivationParams, InhibitionParams, TuningParams
from .plasticity import PlasticityParams, SynapseState

FORMAT = "retinasim-network"
VERSION = 1


def _encode_float(x: float):
    return "inf" if x == math.inf else x


def _layer_to_dict(layer: LayerSpec) -> Dict[str, Any]:
    plasticity = asdict(layer.plasticity)
    plasticity["plastic_until"] = _encode_float(plasticity["plastic_until"])
    return {
        "kind": layer.kind,
        "cell_count": layer.cell_count,
        "fan_in": layer.fan_in,
        "channels": list(layer.channels),
        "activation": asdict(layer.activation),
        "tuning": asdict(layer.tuning),
        "inhibition": asdict(layer.inhibition),
        "plasticity": plasticity,
    }


def _layer_from_dict(d: Dict[str, Any]) -> LayerSpec:
    plasticity = dict(d["plasticity"])
    plasticity["plastic_until"] = float(plasticity["plastic_until"])
    return LayerSpec(
        kind=d["kind"],
        cell_count=int(d["cell_count"]),
        fan_in=int(d["fan_in"]),
        channels=tuple(d["channels"]),
        activation=ActivationParams(**d["activation"]),
        tuning=TuningParams(**d["tuning"]),
        inhibition=InhibitionParams(**d["inhibition"]),
        plasticity=PlasticityParams(**plasticity),
    )


def to_dict(net: NetworkState) -> Dict[str, Any]:
    return {
        "format": FORMAT,
        "version": VERSION,
        "seed": net.seed,
        "clock": net.clock,
        "shared_pool": net.shared_pool,
        "layers": [_layer_to_dict(l) for l in net.layers],
        "resources": [[s.resources.tolist() for s in layer] for layer in net.synapses],
    }


def from_dict(d: Dict[str, Any]) -> NetworkState:
    if d.get("format") != FORMAT:
        raise DomainError(f"not a network snapshot (format={d.get('format')!r})")
    if d.get("version") != VERSION:
        raise DomainError(f"unsupported snapshot version {d.get('version')!r}")
    layers = tuple(_layer_from_dict(l) for l in d["layers"])
    wiring = [np.zeros((layers[0].cell_count, 0), dtype=int)]
    for below, layer in zip(layers, layers[1:]):
        wires = _wire(below.cell_count, layer.cell_count, layer.fan_in)
        wires.setflags(write=False)
        wiring.append(wires)
    synapses = tuple(tuple(SynapseState(np.array(r, dtype=float)) for r in layer) for layer in d["resources"])
    if len(synapses) != len(layers):
        raise DomainError("resources do not match the layer list")
    for l, layer in enumerate(layers[1:], start=1):
        if len(synapses[l]) != layer.cell_count or any(s.resources.size != layer.fan_in for s in synapses[l]):
            raise DomainError(f"resources of layer {l} do not match its spec")
    return NetworkState(
        layers=layers,
        synapses=synapses,
        wiring=tuple(wiring),
        shared_pool=float(d["shared_pool"]),
        clock=float(d["clock"]),
        seed=int(d["seed"]),
    )


def save_network(net: NetworkState, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_dict(net), indent=2) + "\n")
    return path


def load_network(path: Union[str, Path]) -> NetworkState:
    return from_dict(json.loads(Path(path).read_text()))
