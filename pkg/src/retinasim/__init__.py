"""Self-organising retina model: detector emergence, depth and sound direction."""

from .errors import DegenerateGeometryError, DomainError, NoSignalError
from .network import (
    DetectorMap,
    LayerSpec,
    NetworkState,
    StimulusPattern,
    build_network,
    is_detector,
    monocular_deprivation,
    present,
    train,
)
from .neuron import (
    ActivationParams,
    InhibitionParams,
    TuningParams,
    activate,
    compete,
    inhibition_step,
    occurrence_probability,
    tuning_response,
)
from .plasticity import (
    PlasticityParams,
    SynapseState,
    decay_step,
    growth_drive,
    growth_step,
    optimal_allocation,
    weight_from_resource,
)
from .theory import ReceptiveFieldParams, frequency_sigma, receptive_field_optimum

__version__ = "0.1.0"

__all__ = [
    "DegenerateGeometryError",
    "DomainError",
    "NoSignalError",
    "DetectorMap",
    "LayerSpec",
    "NetworkState",
    "StimulusPattern",
    "build_network",
    "is_detector",
    "monocular_deprivation",
    "present",
    "train",
    "ActivationParams",
    "InhibitionParams",
    "TuningParams",
    "activate",
    "compete",
    "inhibition_step",
    "occurrence_probability",
    "tuning_response",
    "PlasticityParams",
    "SynapseState",
    "decay_step",
    "growth_drive",
    "growth_step",
    "optimal_allocation",
    "weight_from_resource",
    "ReceptiveFieldParams",
    "frequency_sigma",
    "receptive_field_optimum",
]
