"""Radio attenuation and received power.

Free-space loss follows a measured anchor table, interpolated linearly in
log10(distance); obstacle and floor losses add on top. Connectivity is a
deterministic threshold test; RSSI measurement adds seeded Gaussian shadowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .engine import RngStream
from .model import ScenarioConfig, obstacles_on_path, ObstacleCrossing

DEFAULT_PATH_LOSS_ANCHORS: tuple[tuple[float, float], ...] = (
    (0.5, 0.00),
    (1.0, 8.16),
    (2.0, 11.65),
    (4.0, 19.91),
    (8.0, 23.93),
    (11.0, 29.61),
)

FLOOR_CROSSING_LABEL = "floor_crossing"


class NonPositiveDistanceError(ValueError):
    """Distance must be > 0 for a loss to be defined."""


class EmptyChannelMapError(ValueError):
    """Channel selection over an empty interference map."""


@dataclass(frozen=True)
class PathLossTable:
    """Distance/attenuation anchors (m, dB): strictly increasing distances,
    non-decreasing attenuations."""

    anchors: tuple[tuple[float, float], ...] = DEFAULT_PATH_LOSS_ANCHORS

    def __post_init__(self) -> None:
        if len(self.anchors) < 2:
            raise ValueError("a path-loss table needs at least two anchors")
        for (d1, a1), (d2, a2) in zip(self.anchors, self.anchors[1:]):
            if d2 <= d1:
                raise ValueError(f"anchor distances must increase: {d1} then {d2}")
            if a2 < a1:
                raise ValueError(f"anchor attenuations must not decrease: {a1} then {a2}")
        if self.anchors[0][0] <= 0:
            raise ValueError("anchor distances must be positive")


DEFAULT_PATH_LOSS_TABLE = PathLossTable()


def free_space_loss(distance_m: float, table: PathLossTable = DEFAULT_PATH_LOSS_TABLE) -> float:
    """Unobstructed attenuation (dB) at a distance, from the anchor table.

    Distances at or below the first anchor clamp to its attenuation; between
    anchors the loss is linear in log10(distance); beyond the last anchor the
    final segment's slope extrapolates.
    """
    if distance_m <= 0:
        raise NonPositiveDistanceError(f"distance must be > 0 m, got {distance_m}")
    anchors = table.anchors
    if distance_m <= anchors[0][0]:
        return anchors[0][1]
    x = math.log10(distance_m)
    xs = [math.log10(d) for d, _ in anchors]
    ys = [a for _, a in anchors]
    if x >= xs[-1]:
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        return ys[-1] + slope * (x - xs[-1])
    for i in range(len(xs) - 1):
        if x <= xs[i + 1]:
            t = (x - xs[i]) / (xs[i + 1] - xs[i])
            return ys[i] * (1.0 - t) + ys[i + 1] * t
    return ys[-1]  # unreachable; the extrapolation branch covers x >= xs[-1]


@dataclass(frozen=True)
class LinkBudget:
    """Itemized attenuation of one directed link.

    obstacle_losses holds (label, dB) pairs in path order, floor crossings
    labeled "floor_crossing". total_attenuation = free_space_loss + their sum;
    received_power = tx_power - total_attenuation. All figures in dB(m).
    """

    distance: float
    free_space_loss: float
    obstacle_losses: tuple[tuple[str, float], ...]
    total_attenuation: float
    tx_power: float
    received_power: float


def link_budget(config: ScenarioConfig, a: int, b: int,
                table: PathLossTable = DEFAULT_PATH_LOSS_TABLE) -> LinkBudget:
    """Budget of the a -> b link using a's transmit power.

    Distance is 2-D (in-plane); floor separation enters as per-floor crossing
    losses instead. Attenuation is symmetric in a and b, so swapping the nodes
    changes the budget only if their transmit powers differ.
    """
    node_a = config.node(a)
    node_b = config.node(b)
    distance = math.hypot(node_b.position.x - node_a.position.x,
                          node_b.position.y - node_a.position.y)
    fsl = free_space_loss(distance, table)
    losses: list[tuple[str, float]] = []
    for crossing in obstacles_on_path(config, a, b):
        if isinstance(crossing, ObstacleCrossing):
            losses.append((crossing.kind.value, crossing.loss_db))
        else:
            losses.append((FLOOR_CROSSING_LABEL, crossing.loss_db))
    total = fsl + sum(loss for _, loss in losses)
    tx_power = node_a.radio.tx_power_dbm
    return LinkBudget(distance=distance, free_space_loss=fsl,
                      obstacle_losses=tuple(losses), total_attenuation=total,
                      tx_power=tx_power, received_power=tx_power - total)


def is_connected(budget: LinkBudget, sensitivity_dbm: float) -> bool:
    """Deterministic link test: received power meets the receiver's sensitivity
    (inclusive). Shadowing plays no part here."""
    return budget.received_power >= sensitivity_dbm


def measure_rssi(budget: LinkBudget, sigma_db: float, n_messages: int,
                 repetitions: int, rng: RngStream) -> float:
    """Grand mean RSSI (dBm) over repetitions x n_messages shadowed readings.

    Each reading is received_power + Normal(0, sigma_db) from the caller's
    stream; sigma 0 returns received_power exactly without consuming it.
    """
    if n_messages < 1 or repetitions < 1:
        raise ValueError("n_messages and repetitions must be >= 1")
    if sigma_db < 0:
        raise ValueError(f"shadowing sigma must be >= 0, got {sigma_db}")
    if sigma_db == 0:
        return budget.received_power
    count = n_messages * repetitions
    readings = (budget.received_power + rng.normal(0.0, sigma_db) for _ in range(count))
    return math.fsum(readings) / count


def select_channel(channels: Mapping[int, float]) -> int:
    """Channel id with the least measured interference, lowest id on ties."""
    if not channels:
        raise EmptyChannelMapError("cannot select a channel from an empty map")
    return min(channels, key=lambda cid: (channels[cid], cid))
