"""Shared builders for scenario documents used across the test suite."""

import json
import math
import random
from pathlib import Path

import pytest

from wsn_pathosim import ScenarioConfig, parse_scenario

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


def make_config(doc: dict) -> ScenarioConfig:
    return parse_scenario(json.dumps(doc))


def two_node_doc(*, sample_period_s: float = 120.0, poll_period_s: float = 28.0,
                 sensor: dict | None = None, defaults: dict | None = None,
                 battery_mah: float = 1100.0, ed_position: dict | None = None,
                 seed: int = 1) -> dict:
    """Coordinator at the origin plus one End Device two metres away."""
    if sensor is None:
        sensor = {"kind": "displacement",
                  "signal": {"shape": "constant", "level": 1.0}}
    doc_defaults = {"sensitivity_dbm": -40.0, "poll_period_s": poll_period_s}
    if defaults:
        doc_defaults.update(defaults)
    return {
        "seed": seed,
        "channels": {},
        "defaults": doc_defaults,
        "nodes": [
            {"id": 0, "role": "coordinator", "position": {"x": 0.0, "y": 0.0}},
            {"id": 1, "role": "end_device",
             "position": ed_position or {"x": 2.0, "y": 0.0},
             "sample_period_s": sample_period_s,
             "battery": {"capacity_mah": battery_mah},
             "sensors": [sensor]},
        ],
        "obstacles": [],
    }


_OBSTACLE_KINDS = ["window_open_blinds", "brick_wall", "wall_open_door",
                   "wall_closed_door", "window_closed_blinds"]
_SENSOR_KINDS = ["strain_gauge", "displacement", "temperature_catheter"]


def random_scenario_doc(seed: int) -> tuple[dict, float]:
    """A small random-but-valid scenario and a horizon long enough for at
    least one full collection round per End Device.

    Gauges get heat_duration equal to the warmup delay so nominal rounds can
    succeed; roughly a fifth of End Devices are placed far enough away to be
    unreachable, exercising the lost-round path.
    """
    rng = random.Random(seed)
    warmup = round(rng.uniform(1.0, 4.0), 1)
    timeout = round(rng.uniform(1.0, 2.0), 1)
    retries = rng.randint(0, 2)
    defaults = {
        "sensitivity_dbm": -60.0,
        "shadowing_sigma_db": round(rng.uniform(0.0, 3.0), 2),
        "warmup_delay_s": warmup,
        "response_timeout_s": timeout,
        "max_retries": retries,
    }
    nodes: list[dict] = [
        {"id": 0, "role": "coordinator", "position": {"x": 0.0, "y": 0.0}}]
    next_id = 1
    for _ in range(rng.randint(0, 2)):
        nodes.append({"id": next_id, "role": "router",
                      "position": {"x": round(rng.uniform(-8.0, 8.0), 2),
                                   "y": round(rng.uniform(-8.0, 8.0), 2)}})
        next_id += 1
    max_effective = 0.0
    for _ in range(rng.randint(1, 3)):
        poll = round(rng.uniform(5.0, 30.0), 1)
        sample = round(poll * rng.uniform(1.0, 4.0), 1)
        radius = 60.0 if rng.random() < 0.2 else 12.0
        kind = rng.choice(_SENSOR_KINDS)
        sensor: dict = {"kind": kind, "noise_sigma": round(rng.uniform(0.0, 0.5), 2)}
        if kind == "strain_gauge":
            sensor["heat_duration_s"] = warmup
            sensor["signal"] = {"shape": "ramp", "start": 10.0, "slope_per_hour": 1.5}
        elif kind == "displacement":
            sensor["signal"] = {"shape": "constant",
                                "level": round(rng.uniform(-2.0, 2.0), 3)}
        else:
            sensor["signal"] = {"shape": "sinusoid", "mean": 20.0,
                                "amplitude": 4.0, "period_hours": 24.0}
        nodes.append({
            "id": next_id, "role": "end_device",
            "position": {"x": round(rng.uniform(-radius, radius), 2),
                         "y": round(rng.uniform(-radius, radius), 2)},
            "radio": {"poll_period_s": poll},
            "sample_period_s": sample,
            "battery": {"capacity_mah": round(rng.uniform(100.0, 1100.0), 1)},
            "sensors": [sensor],
        })
        multiplier = max(1, math.floor(sample / poll + 0.5))
        max_effective = max(max_effective, multiplier * poll)
        next_id += 1
    obstacles = []
    for _ in range(rng.randint(0, 3)):
        x = round(rng.uniform(-10.0, 10.0), 2)
        obstacles.append({"kind": rng.choice(_OBSTACLE_KINDS),
                          "from": {"x": x, "y": -10.0},
                          "to": {"x": x, "y": 10.0}})
    doc = {"seed": rng.randrange(2 ** 32), "channels": {}, "defaults": defaults,
           "nodes": nodes, "obstacles": obstacles}
    horizon = max_effective + warmup + 3.0 * timeout + 15.0
    return doc, horizon


@pytest.fixture
def three_node_config() -> ScenarioConfig:
    return parse_scenario((SCENARIO_DIR / "three_node_building.json").read_text())


@pytest.fixture
def router_off_config() -> ScenarioConfig:
    return parse_scenario((SCENARIO_DIR / "three_node_router_off.json").read_text())


@pytest.fixture
def lifetime_config() -> ScenarioConfig:
    return parse_scenario((SCENARIO_DIR / "lifetime_single_hop.json").read_text())
