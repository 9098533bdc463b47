"""Experiment configuration: a YAML file with one section per parameter group.

Only ``scenario`` is required; everything else has a documented default.
Unknown keys anywhere are rejected.  See README.md for the full schema.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .neuron import ActivationParams, InhibitionParams, TuningParams
from .plasticity import PlasticityParams
from .theory import ReceptiveFieldParams

SCENARIOS = (
    "colour-detector",
    "frequency-sweep",
    "receptive-field",
    "deprivation",
    "depth-roundtrip",
    "cochlea-localize",
    "theorem-oracles",
)


class ConfigError(ValueError):
    """Config file could not be parsed or failed validation."""


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ActivationBlock(_Block):
    ceiling: float = Field(1.0, gt=0)
    gain: float = Field(1.0, gt=0)

    def build(self) -> ActivationParams:
        return ActivationParams(**self.model_dump())


class TuningBlock(_Block):
    peak: float = Field(1.0, gt=0)
    decay: float = Field(1.0, gt=0)
    reach: float = Field(1.0, gt=0)

    def build(self) -> TuningParams:
        return TuningParams(**self.model_dump())


class InhibitionBlock(_Block):
    rate_ceiling: float = Field(1.0, gt=0)
    rate_gain: float = Field(1.0, gt=0)
    soft_duration: float = Field(0.5, gt=0)
    mode: Literal["soft", "hard"] = "soft"

    def build(self) -> InhibitionParams:
        return InhibitionParams(**self.model_dump())


class PlasticityBlock(_Block):
    weight_ceiling: float = Field(1.0, gt=0)
    weight_gain: float = Field(2.0, gt=0)
    growth_rate: float = Field(1.0, gt=0)
    resource_budget: float = Field(1.0, gt=0)
    decay_rate: float = Field(1.0, gt=0)
    # null: match the offset to the two-cone geometry so growth lands on the optimum
    log_offset: Optional[float] = None
    plastic_until: float = Field(math.inf, ge=0)

    def build(self, log_offset: float) -> PlasticityParams:
        fields = self.model_dump()
        fields["log_offset"] = log_offset if self.log_offset is None else self.log_offset
        return PlasticityParams(**fields)


class RegimeBlock(_Block):
    gain: float = Field(..., gt=0)
    crowding: float = Field(..., ge=0)
    floor: float = Field(..., ge=0)

    def build(self) -> ReceptiveFieldParams:
        return ReceptiveFieldParams(**self.model_dump())


class ReceptiveFieldBlock(_Block):
    n_max: int = Field(50, ge=1)
    concentric: RegimeBlock = RegimeBlock(gain=0.01, crowding=1.0, floor=0.01)
    background: RegimeBlock = RegimeBlock(gain=10.0, crowding=0.001, floor=1.0)
    balanced: RegimeBlock = RegimeBlock(gain=1.0, crowding=1.0, floor=0.1)


class ColourBlock(_Block):
    cones: List[float] = [0.0, 1.0]
    bipolar_cells: int = Field(4, ge=1)
    stimulus: float = 0.4
    train_stimuli: List[float] = [-0.2, 1.2]
    repetitions: int = Field(5, ge=1)
    presentation: float = Field(2.0, gt=0)

    @field_validator("cones")
    @classmethod
    def _two_cones(cls, v):
        if len(v) != 2 or not v[0] < v[1]:
            raise ValueError("need exactly two increasing cone wavelengths")
        return v


class FrequencyBlock(_Block):
    n: int = Field(5, ge=1)
    m_max: int = Field(20, ge=1)
    budget: float = Field(1.0, gt=0)
    weight_gain: float = Field(1.0, gt=0)
    potential: float = Field(1.0, ge=0)


class DeprivationBlock(_Block):
    closed: Literal["left", "right", "none"] = "left"
    bipolar_cells: int = Field(2, ge=1)
    stimulus: float = 0.4
    # null: exactly the resource both eyes start with
    shared_budget: Optional[float] = Field(None, gt=0)


class DepthBlock(_Block):
    scenes: int = Field(100, ge=1)
    baseline_range: List[float] = [0.04, 0.08]
    radius_range: List[float] = [0.010, 0.014]
    max_ray_angle: float = Field(1.4, gt=0, lt=math.pi / 2)

    @field_validator("baseline_range", "radius_range")
    @classmethod
    def _range(cls, v):
        if len(v) != 2 or not 0 < v[0] <= v[1]:
            raise ValueError("expected [low, high] with 0 < low <= high")
        return v


class CochleaBlock(_Block):
    detectors: int = Field(7, ge=2)
    peak: float = Field(1.0, gt=0)
    decay: float = Field(4.0, gt=0)
    reach_spacings: float = Field(1.5, ge=1.0)
    angles: int = Field(100, ge=1)


class OracleBlock(_Block):
    allocation_instances: int = Field(100, ge=1)
    grid_points: int = Field(10_000, ge=2)
    frequency_draws: int = Field(50, ge=1)
    frequency_n_max: int = Field(30, ge=1)
    inequality_samples: int = Field(100_000, ge=1)


class ExperimentConfig(_Block):
    scenario: Literal[SCENARIOS]  # type: ignore[valid-type]
    seed: int = 0
    dt: float = Field(0.1, gt=0)
    steps: int = Field(200, gt=0)
    output_dir: Optional[str] = None
    workers: int = Field(1, ge=1)
    activation: ActivationBlock = ActivationBlock()
    tuning: TuningBlock = TuningBlock()
    inhibition: InhibitionBlock = InhibitionBlock()
    plasticity: PlasticityBlock = PlasticityBlock()
    receptive_field: ReceptiveFieldBlock = ReceptiveFieldBlock()
    colour: ColourBlock = ColourBlock()
    frequency: FrequencyBlock = FrequencyBlock()
    deprivation: DeprivationBlock = DeprivationBlock()
    depth: DepthBlock = DepthBlock()
    cochlea: CochleaBlock = CochleaBlock()
    oracles: OracleBlock = OracleBlock()

    @model_validator(mode="after")
    def _default_output(self):
        if self.output_dir is None:
            object.__setattr__(self, "output_dir", f"runs/{self.scenario}")
        return self

    def echo(self) -> dict:
        """Fully resolved config as plain data."""
        return self.model_dump()


def _format_error(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        where = ".".join(str(x) for x in e["loc"]) or "<root>"
        parts.append(f"{where}: {e['msg']}")
    return "; ".join(parts)


def parse_config(data: object) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_error(err)) from None


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from None
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse {path}: {err}") from None
    return parse_config(data)


def dump_config(cfg: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(cfg.echo(), sort_keys=True))
    return path
