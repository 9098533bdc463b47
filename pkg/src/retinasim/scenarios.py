"""Named experiments runnable from the command line.

Each scenario takes a validated :class:`ExperimentConfig`, writes one or
more CSV tables plus ``summary.txt`` and ``config_echo.yaml`` into the
output directory, and is fully determined by the config (seed included).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np

from .config import SCENARIOS, ExperimentConfig, dump_config
from .errors import DomainError
from .network import (
    LayerSpec,
    StimulusPattern,
    build_network,
    is_detector,
    monocular_deprivation,
    present,
    receptor_potentials,
    train,
)
from .neuron import TuningParams
from .output import emit_csv, emit_summary
from .perception import CochleaModel, DepthScene, depth_from_disparity, localize_direction, membrane_responses
from .plasticity import PlasticityParams, allocation_sigma, matched_log_offset, optimal_allocation
from .theory import frequency_sigma, receptive_field_optimum, receptive_field_value, saturation_gap


@dataclass
class RunArtifacts:
    output_dir: Path
    csv_files: List[Path] = field(default_factory=list)
    summary: Dict[str, object] = field(default_factory=dict)
    config_echo: Dict[str, object] = field(default_factory=dict)


def _trial_rngs(seed: int, count: int) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _fan_out(fn: Callable, items: Sequence, workers: int) -> list:
    """Map ``fn`` over ``items``, possibly on threads; results keep input order."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- shared network builders --------------------------------------------------

def _cone_layers(cfg: ExperimentConfig, cells: int, cones: Sequence[float], stimulus: float) -> List[LayerSpec]:
    tuning = cfg.tuning.build()
    receptors = LayerSpec("photoreceptor", 2, tuning=tuning, channels=tuple(cones))
    drive = receptor_potentials(receptors, StimulusPattern.point(stimulus))
    drive = drive[drive > 0]
    offset = matched_log_offset(drive, cfg.plasticity.build(0.0)) if drive.size else 1.0
    bipolar = LayerSpec(
        "bipolar", cells, fan_in=2,
        activation=cfg.activation.build(),
        inhibition=cfg.inhibition.build(),
        plasticity=cfg.plasticity.build(offset),
    )
    return [receptors, bipolar]


# -- scenarios ------------------------------------------------------------------

def _colour_detector(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    c = cfg.colour
    layers = _cone_layers(cfg, c.bipolar_cells, c.cones, c.stimulus)
    tuning, plasticity = layers[0].tuning, layers[1].plasticity
    distances = [abs(c.stimulus - cone) for cone in c.cones]
    optimum = optimal_allocation(distances, tuning, plasticity)

    net = build_network(layers, cfg.seed)
    stim = StimulusPattern.point(c.stimulus)
    rows = []
    for step in range(1, cfg.steps + 1):
        net = present(net, stim, cfg.dt, cfg.dt)
        winner = net.winners[1]
        r = net.resources_by_source(1, winner) if winner is not None else np.zeros(2)
        rows.append({
            "step": step,
            "time": net.clock,
            "winner": -1 if winner is None else winner,
            "winner_potential": float(net.potentials[1][winner]) if winner is not None else 0.0,
            "r_short": float(r[0]),
            "r_long": float(r[1]),
            "optimal_short": float(optimum[0]),
            "optimal_long": float(optimum[1]),
        })
    art.csv_files.append(emit_csv(rows, out / "colour_trajectory.csv"))
    final = np.array([rows[-1]["r_short"], rows[-1]["r_long"]])
    art.summary.update({
        "log_offset": plasticity.log_offset,
        "final_winner": rows[-1]["winner"],
        "max_rel_error_vs_optimum": float(np.max(np.abs(final - optimum) / optimum)),
        "sigma_ratio_vs_optimum": float(
            allocation_sigma(final, [tuning.peak * math.exp(-tuning.decay * d) for d in distances], plasticity)
            / allocation_sigma(optimum, [tuning.peak * math.exp(-tuning.decay * d) for d in distances], plasticity)),
    })

    # detector emergence for well separated stimuli
    stimuli = [StimulusPattern.point(v) for v in c.train_stimuli]
    fresh = build_network(layers, cfg.seed)
    trained, dmap = train(fresh, [(s, c.repetitions) for s in stimuli], cfg.dt, duration=c.presentation)
    det_rows = []
    for i, value in enumerate(c.train_stimuli):
        cell = dmap.cell_for(i)
        det_rows.append({
            "input_id": i,
            "stimulus": value,
            "cell": -1 if cell is None else cell,
            "is_detector": cell is not None and is_detector(trained, cell, stimuli, i, dt=cfg.dt),
        })
    art.csv_files.append(emit_csv(det_rows, out / "colour_detectors.csv"))
    art.summary.update({
        "detector_entries": len(dmap.entries),
        "detector_collisions": len(dmap.collisions),
    })


def _frequency_sweep(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    f = cfg.frequency
    sigmas = [frequency_sigma(m, f.n, f.budget, f.weight_gain, f.potential) for m in range(1, f.m_max + 1)]
    best = int(np.argmax(sigmas)) + 1
    rows = [{"m": m, "sigma": s, "is_max": m == best} for m, s in enumerate(sigmas, start=1)]
    art.csv_files.append(emit_csv(rows, out / "frequency_sweep.csv"))
    art.summary.update({"n": f.n, "argmax_m": best})


def _receptive_field(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    rf = cfg.receptive_field
    regimes = {"concentric": rf.concentric.build(), "background": rf.background.build(),
               "balanced": rf.balanced.build()}
    ns = np.arange(1, rf.n_max + 1)
    values = {k: receptive_field_value(ns, p) for k, p in regimes.items()}
    rows = [{"n": int(n), **{f"g_{k}": float(values[k][i]) for k in regimes}} for i, n in enumerate(ns)]
    art.csv_files.append(emit_csv(rows, out / "receptive_field.csv"))
    for k, p in regimes.items():
        art.summary[f"n0_{k}"] = receptive_field_optimum(p, rf.n_max)
    art.summary["n_max"] = rf.n_max


def _deprivation(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    d = cfg.deprivation
    layers = _cone_layers(cfg, d.bipolar_cells, cfg.colour.cones, d.stimulus)
    left = build_network(layers, cfg.seed)
    right = build_network(layers, cfg.seed)
    initial = left.total_resource() + right.total_resource()
    budget = initial if d.shared_budget is None else d.shared_budget
    stim = StimulusPattern.point(d.stimulus)
    _, _, trajectory = monocular_deprivation(left, right, budget, d.closed, cfg.steps * cfg.dt, cfg.dt, stim)
    rows = [
        {"step": i, "time": t, "left_total": lt, "right_total": rt, "unallocated": budget - lt - rt}
        for i, (t, lt, rt) in enumerate(trajectory)
    ]
    art.csv_files.append(emit_csv(rows, out / "deprivation.csv"))
    art.summary.update({
        "closed": d.closed,
        "shared_budget": budget,
        "left_initial": trajectory[0][1],
        "right_initial": trajectory[0][2],
        "left_final": trajectory[-1][1],
        "right_final": trajectory[-1][2],
    })


def sample_depth_trial(rng: np.random.Generator, baseline_range, radius_range, max_angle: float) -> dict:
    """Place a target and a fixation point, then record what the eyes see.

    Eyes sit at x=0 (left) and x=baseline (right); angles are measured from
    the baseline towards negative x.  The target lies at height ``depth``
    to the left of the left eye, so the left ray is the steeper one.
    """
    c = rng.uniform(*baseline_range)
    r = rng.uniform(*radius_range)
    while True:
        u = c * rng.uniform(0.0, 3.0)
        y = c * rng.uniform(0.2, 20.0)
        left_ray = math.atan2(y, u)
        right_ray = math.atan2(y, u + c)
        if left_ray < max_angle and (math.tan(left_ray) - math.tan(right_ray)) > 1e-6 * math.tan(left_ray):
            break
    alpha = left_ray * rng.uniform(0.3, 1.0)
    theta = right_ray * rng.uniform(0.3, 1.0)
    return {
        "baseline": c, "radius": r, "depth": y,
        "alpha": alpha, "theta": theta,
        "disparity_left": (left_ray - alpha) * r,
        "disparity_right": (right_ray - theta) * r,
    }


def _depth_roundtrip(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    d = cfg.depth
    rngs = _trial_rngs(cfg.seed, d.scenes)

    def trial(i):
        t = sample_depth_trial(rngs[i], d.baseline_range, d.radius_range, d.max_ray_angle)
        scene = DepthScene(t["baseline"], t["radius"], t["alpha"], t["theta"],
                           t["disparity_left"], t["disparity_right"])
        got = depth_from_disparity(scene)
        doubled = depth_from_disparity(DepthScene(2 * t["baseline"], t["radius"], t["alpha"], t["theta"],
                                                  t["disparity_left"], t["disparity_right"]))
        return {
            "trial": i,
            "baseline": t["baseline"],
            "radius": t["radius"],
            "true_depth": t["depth"],
            "recovered_depth": got,
            "rel_error": abs(got - t["depth"]) / t["depth"],
            "baseline_scaling_error": abs(doubled - 2 * got) / abs(2 * got),
        }

    rows = _fan_out(trial, range(d.scenes), cfg.workers)
    art.csv_files.append(emit_csv(rows, out / "depth_roundtrip.csv"))
    art.summary.update({
        "scenes": d.scenes,
        "max_rel_error": max(r["rel_error"] for r in rows),
        "max_baseline_scaling_error": max(r["baseline_scaling_error"] for r in rows),
    })


def _cochlea_localize(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    c = cfg.cochlea
    model = CochleaModel.evenly_spaced(c.detectors, c.peak, c.decay, c.reach_spacings)
    rng = np.random.default_rng(cfg.seed)
    span = math.pi
    angles = [(a, 0) for a in rng.uniform(-math.pi / 2, math.pi / 2, size=c.angles)]
    angles += [(a, 1) for a in model.preferred_angles()]
    rows = []
    for i, (angle, at_detector) in enumerate(angles):
        got = localize_direction(membrane_responses(angle, model), model)
        rows.append({
            "trial": i,
            "at_detector": at_detector,
            "angle": float(angle),
            "recovered": got,
            "abs_error": abs(got - angle),
            "error_fraction_of_span": abs(got - angle) / span,
        })
    art.csv_files.append(emit_csv(rows, out / "cochlea_localize.csv"))
    art.summary.update({
        "max_error_fraction_of_span": max(r["error_fraction_of_span"] for r in rows),
        "max_error_at_detectors": max(r["abs_error"] for r in rows if r["at_detector"]),
    })


def allocation_trial(rng: np.random.Generator, grid_points: int) -> dict:
    """Closed-form allocation against a brute-force grid on the 2-dendrite simplex."""
    tuning = TuningParams(peak=rng.uniform(0.5, 2.0), decay=rng.uniform(0.2, 5.0), reach=rng.uniform(0.5, 2.0))
    plasticity = PlasticityParams(resource_budget=rng.uniform(0.2, 3.0), weight_gain=rng.uniform(0.2, 5.0))
    d = rng.uniform(0.0, tuning.reach, size=2)
    v = tuning.peak * np.exp(-tuning.decay * d)
    r = optimal_allocation(d, tuning, plasticity)
    r1 = np.linspace(0.0, plasticity.resource_budget, grid_points)
    grid = np.stack([r1, plasticity.resource_budget - r1], axis=1)
    sigma_grid = float(np.max(allocation_sigma(grid, v, plasticity)))
    sigma_closed = float(allocation_sigma(r, v, plasticity))
    return {
        "d1": float(d[0]), "d2": float(d[1]),
        "budget": plasticity.resource_budget, "weight_gain": plasticity.weight_gain, "decay": tuning.decay,
        "r1": float(r[0]), "r2": float(r[1]),
        "sigma_closed": sigma_closed, "sigma_grid": sigma_grid, "gap": sigma_closed - sigma_grid,
    }


def _theorem_oracles(cfg: ExperimentConfig, out: Path, art: RunArtifacts) -> None:
    o = cfg.oracles
    rngs = _trial_rngs(cfg.seed, o.allocation_instances + o.frequency_draws + 1)

    alloc = _fan_out(lambda i: {"trial": i, **allocation_trial(rngs[i], o.grid_points)},
                     range(o.allocation_instances), cfg.workers)
    art.csv_files.append(emit_csv(alloc, out / "allocation_oracle.csv"))

    freq_rows = []
    for k in range(o.frequency_draws):
        rng = rngs[o.allocation_instances + k]
        budget, gain, v = rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.1, 2.0)
        for n in range(1, o.frequency_n_max + 1):
            ms = range(1, 2 * o.frequency_n_max + 1)
            best = max(ms, key=lambda m: (frequency_sigma(m, n, budget, gain, v), -m))
            freq_rows.append({"draw": k, "n": n, "argmax_m": best})
    art.csv_files.append(emit_csv(freq_rows, out / "frequency_oracle.csv"))

    rng = rngs[-1]
    x = rng.uniform(0.01, 20.0, size=o.inequality_samples)
    n = rng.integers(1, 31, size=o.inequality_samples)
    m = np.minimum(rng.integers(1, 31, size=o.inequality_samples), n)
    gap = saturation_gap(x, m, n)
    art.summary.update({
        "allocation_min_gap": min(r["gap"] for r in alloc),
        "frequency_argmax_mismatches": sum(r["argmax_m"] != r["n"] for r in freq_rows),
        "inequality_samples": o.inequality_samples,
        "inequality_violations": int(np.sum(gap < -1e-12)),
        "inequality_equal_when_m_lt_n": int(np.sum((m < n) & (gap <= 1e-12))),
        "inequality_unequal_when_m_eq_n": int(np.sum((m == n) & (np.abs(gap) > 1e-12))),
    })


_RUNNERS: Dict[str, Callable[[ExperimentConfig, Path, RunArtifacts], None]] = {
    "colour-detector": _colour_detector,
    "frequency-sweep": _frequency_sweep,
    "receptive-field": _receptive_field,
    "deprivation": _deprivation,
    "depth-roundtrip": _depth_roundtrip,
    "cochlea-localize": _cochlea_localize,
    "theorem-oracles": _theorem_oracles,
}
assert set(_RUNNERS) == set(SCENARIOS)


def run_scenario(cfg: ExperimentConfig) -> RunArtifacts:
    """Run the configured scenario and write its artifacts."""
    if cfg.scenario not in _RUNNERS:
        raise DomainError(f"unknown scenario {cfg.scenario!r}")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    art = RunArtifacts(output_dir=out, config_echo=cfg.echo())
    art.summary.update({"scenario": cfg.scenario, "seed": cfg.seed})
    _RUNNERS[cfg.scenario](cfg, out, art)
    emit_summary(art.summary, out / "summary.txt")
    dump_config(cfg, out / "config_echo.yaml")
    return art
