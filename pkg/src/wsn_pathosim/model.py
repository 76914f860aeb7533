"""Scenario model: nodes, geometry, obstacles, radios, batteries, timing.

Scenario files are UTF-8 JSON with a strict schema (unknown keys are errors);
see docs/scenario-schema.md. Parsing applies documented defaults, building a
plain-dataclass configuration that serialize_scenario() reproduces exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .power import ConsumptionProfile
from .sensors import Constant, Ramp, SensorKind, SensorSpec, Signal, Sinusoid

DEFAULT_TX_POWER_DBM = 3.0
DEFAULT_POLL_PERIOD_S = 28.0
DEFAULT_BITRATE_BPS = 250_000.0
DEFAULT_BATTERY_CAPACITY_MAH = 1100.0
DEFAULT_FLOOR_LOSS_DB = 13.08
DEFAULT_WARMUP_DELAY_S = 120.0
DEFAULT_RESPONSE_TIMEOUT_S = 5.0
DEFAULT_MAX_RETRIES = 2
DEFAULT_POLL_WAKE_DURATION_S = 0.1

MAX_NODE_ID = 0xFFFF
CHANNEL_RANGE = range(11, 27)


class ScenarioError(Exception):
    """Base for every scenario loading/validation problem."""


class ScenarioSyntaxError(ScenarioError):
    """Malformed JSON; carries the position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(ScenarioError):
    """Structurally invalid scenario: unknown key, wrong type, missing field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnknownNodeError(ScenarioError):
    """A node id that does not exist in the scenario."""


class NodeRole(Enum):
    COORDINATOR = "coordinator"
    ROUTER = "router"
    END_DEVICE = "end_device"


class ObstacleKind(Enum):
    """Obstruction categories with their measured default attenuation."""

    WINDOW_OPEN_BLINDS = "window_open_blinds"
    WINDOW_CLOSED_BLINDS = "window_closed_blinds"
    WALL_OPEN_DOOR = "wall_open_door"
    WALL_CLOSED_DOOR = "wall_closed_door"
    BRICK_WALL = "brick_wall"

    @property
    def attenuation_db(self) -> float:
        return _OBSTACLE_ATTENUATION_DB[self]


_OBSTACLE_ATTENUATION_DB = {
    ObstacleKind.WINDOW_OPEN_BLINDS: 1.04,
    ObstacleKind.WINDOW_CLOSED_BLINDS: 3.95,
    ObstacleKind.WALL_OPEN_DOOR: 0.39,
    ObstacleKind.WALL_CLOSED_DOOR: 1.19,
    ObstacleKind.BRICK_WALL: 1.46,
}


@dataclass(frozen=True)
class Position:
    """Metres in the floor plane plus an integer floor index."""

    x: float
    y: float
    floor: int = 0


@dataclass(frozen=True)
class Obstacle:
    """A 2-D wall/window segment on one floor. attenuation_db None means the
    kind's measured default."""

    kind: ObstacleKind
    start: Position
    end: Position
    attenuation_db: float | None = None

    @property
    def loss_db(self) -> float:
        return self.kind.attenuation_db if self.attenuation_db is None else self.attenuation_db


@dataclass(frozen=True)
class ObstacleCrossing:
    kind: ObstacleKind
    loss_db: float


@dataclass(frozen=True)
class FloorCrossing:
    loss_db: float


Crossing = ObstacleCrossing | FloorCrossing


@dataclass(frozen=True)
class RadioConfig:
    """Per-node radio parameters. Sensitivity has no universal default and must
    come from the node or the scenario defaults section."""

    sensitivity_dbm: float
    tx_power_dbm: float = DEFAULT_TX_POWER_DBM
    shadowing_sigma_db: float = 0.0
    poll_period_s: float = DEFAULT_POLL_PERIOD_S
    bitrate_bps: float = DEFAULT_BITRATE_BPS


@dataclass
class BatteryState:
    capacity_mah: float = DEFAULT_BATTERY_CAPACITY_MAH
    remaining_mah: float | None = None

    def __post_init__(self) -> None:
        if self.remaining_mah is None:
            self.remaining_mah = self.capacity_mah


@dataclass(frozen=True)
class NodeSpec:
    id: int
    role: NodeRole
    position: Position
    radio: RadioConfig
    battery: BatteryState | None = None
    sensors: tuple[SensorSpec, ...] = ()
    sample_period_s: float | None = None

    @property
    def primary_sensor(self) -> SensorSpec | None:
        return self.sensors[0] if self.sensors else None


@dataclass
class ScenarioConfig:
    nodes: tuple[NodeSpec, ...]
    obstacles: tuple[Obstacle, ...] = ()
    channels: dict[int, float] = field(default_factory=dict)
    seed: int = 0
    floor_loss_db: float = DEFAULT_FLOOR_LOSS_DB
    warmup_delay_s: float = DEFAULT_WARMUP_DELAY_S
    response_timeout_s: float = DEFAULT_RESPONSE_TIMEOUT_S
    max_retries: int = DEFAULT_MAX_RETRIES
    tx_airtime_override_s: float | None = None
    poll_wake_duration_s: float = DEFAULT_POLL_WAKE_DURATION_S
    consumption: ConsumptionProfile = field(default_factory=ConsumptionProfile)

    def node(self, node_id: int) -> NodeSpec:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise UnknownNodeError(f"no node with id {node_id}")

    def has_node(self, node_id: int) -> bool:
        return any(node.id == node_id for node in self.nodes)

    def coordinator(self) -> NodeSpec:
        for node in self.nodes:
            if node.role is NodeRole.COORDINATOR:
                return node
        raise ScenarioError("scenario has no coordinator")

    def routers(self) -> list[NodeSpec]:
        return [n for n in self.nodes if n.role is NodeRole.ROUTER]

    def end_devices(self) -> list[NodeSpec]:
        return [n for n in self.nodes if n.role is NodeRole.END_DEVICE]


@dataclass(frozen=True)
class Violation:
    """One broken scenario invariant, naming the node/field and the rule."""

    rule: str
    node: int | None = None
    field: str | None = None
    message: str = ""

    def __str__(self) -> str:
        where = f"node {self.node}" if self.node is not None else "scenario"
        if self.field:
            where += f".{self.field}"
        return f"{where}: {self.rule}" + (f" ({self.message})" if self.message else "")


# --------------------------------------------------------------------------
# Strict JSON helpers
# --------------------------------------------------------------------------

def _expect_object(value: object, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {type(value).__name__}")
    return value


def _expect_array(value: object, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected an array, got {type(value).__name__}")
    return value


def _expect_number(value: object, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise SchemaError(path, f"expected a finite number, got {value}")
    return float(value)


def _expect_int(value: object, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _expect_string(value: object, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected a string, got {type(value).__name__}")
    return value


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(path, f"unknown key(s): {', '.join(sorted(unknown))}")


def _enum_value(enum_cls, value: object, path: str):
    name = _expect_string(value, path)
    for member in enum_cls:
        if member.value == name:
            return member
    options = ", ".join(m.value for m in enum_cls)
    raise SchemaError(path, f"expected one of [{options}], got {name!r}")


def _parse_position(value: object, path: str) -> Position:
    obj = _expect_object(value, path)
    _check_keys(obj, {"x", "y", "floor"}, path)
    if "x" not in obj or "y" not in obj:
        raise SchemaError(path, "x and y are required")
    floor = _expect_int(obj["floor"], f"{path}.floor") if "floor" in obj else 0
    return Position(x=_expect_number(obj["x"], f"{path}.x"),
                    y=_expect_number(obj["y"], f"{path}.y"),
                    floor=floor)


def _parse_signal(value: object, path: str) -> Signal:
    obj = _expect_object(value, path)
    shape = _expect_string(obj.get("shape"), f"{path}.shape") if "shape" in obj else None
    if shape is None:
        raise SchemaError(path, "shape is required")
    if shape == "constant":
        _check_keys(obj, {"shape", "level"}, path)
        if "level" not in obj:
            raise SchemaError(path, "constant signal requires level")
        return Constant(level=_expect_number(obj["level"], f"{path}.level"))
    if shape == "ramp":
        _check_keys(obj, {"shape", "start", "slope_per_hour"}, path)
        missing = {"start", "slope_per_hour"} - set(obj)
        if missing:
            raise SchemaError(path, f"ramp signal requires {', '.join(sorted(missing))}")
        return Ramp(start=_expect_number(obj["start"], f"{path}.start"),
                    slope_per_hour=_expect_number(obj["slope_per_hour"],
                                                  f"{path}.slope_per_hour"))
    if shape == "sinusoid":
        _check_keys(obj, {"shape", "mean", "amplitude", "period_hours"}, path)
        missing = {"mean", "amplitude", "period_hours"} - set(obj)
        if missing:
            raise SchemaError(path, f"sinusoid signal requires {', '.join(sorted(missing))}")
        period = _expect_number(obj["period_hours"], f"{path}.period_hours")
        if period <= 0:
            raise SchemaError(f"{path}.period_hours", "must be > 0")
        return Sinusoid(mean=_expect_number(obj["mean"], f"{path}.mean"),
                        amplitude=_expect_number(obj["amplitude"], f"{path}.amplitude"),
                        period_hours=period)
    raise SchemaError(f"{path}.shape",
                      f"expected one of [constant, ramp, sinusoid], got {shape!r}")


def _parse_sensor(value: object, path: str) -> SensorSpec:
    obj = _expect_object(value, path)
    _check_keys(obj, {"kind", "signal", "noise_sigma", "heat_duration_s"}, path)
    if "kind" not in obj or "signal" not in obj:
        raise SchemaError(path, "kind and signal are required")
    kind = _enum_value(SensorKind, obj["kind"], f"{path}.kind")
    noise = _expect_number(obj["noise_sigma"], f"{path}.noise_sigma") if "noise_sigma" in obj else 0.0
    heat = None
    if "heat_duration_s" in obj and obj["heat_duration_s"] is not None:
        heat = _expect_number(obj["heat_duration_s"], f"{path}.heat_duration_s")
    return SensorSpec(kind=kind, signal=_parse_signal(obj["signal"], f"{path}.signal"),
                      noise_sigma=noise, heat_duration_s=heat)


_DEFAULTS_KEYS = {
    "tx_power_dbm", "sensitivity_dbm", "shadowing_sigma_db", "poll_period_s",
    "bitrate_bps", "battery_capacity_mah", "floor_loss_db", "warmup_delay_s",
    "response_timeout_s", "max_retries", "tx_airtime_s", "poll_wake_duration_s",
    "consumption_profile",
}

_RADIO_KEYS = {"tx_power_dbm", "sensitivity_dbm", "shadowing_sigma_db",
               "poll_period_s", "bitrate_bps"}


def _parse_radio(obj: dict | None, defaults: dict, path: str) -> RadioConfig:
    obj = obj or {}
    _check_keys(obj, _RADIO_KEYS, path)

    def pick(key: str, fallback: float | None) -> float | None:
        if key in obj:
            return _expect_number(obj[key], f"{path}.{key}")
        return defaults.get(key, fallback)

    sensitivity = pick("sensitivity_dbm", None)
    if sensitivity is None:
        raise SchemaError(f"{path}.sensitivity_dbm",
                          "required: no built-in default (set it on the node or in defaults)")
    return RadioConfig(
        sensitivity_dbm=sensitivity,
        tx_power_dbm=pick("tx_power_dbm", DEFAULT_TX_POWER_DBM),
        shadowing_sigma_db=pick("shadowing_sigma_db", 0.0),
        poll_period_s=pick("poll_period_s", DEFAULT_POLL_PERIOD_S),
        bitrate_bps=pick("bitrate_bps", DEFAULT_BITRATE_BPS),
    )


def _parse_battery(obj: dict, path: str) -> BatteryState:
    _check_keys(obj, {"capacity_mah", "remaining_mah"}, path)
    capacity = (_expect_number(obj["capacity_mah"], f"{path}.capacity_mah")
                if "capacity_mah" in obj else DEFAULT_BATTERY_CAPACITY_MAH)
    remaining = (_expect_number(obj["remaining_mah"], f"{path}.remaining_mah")
                 if "remaining_mah" in obj else None)
    return BatteryState(capacity_mah=capacity, remaining_mah=remaining)


def _parse_node(value: object, defaults: dict, path: str) -> NodeSpec:
    obj = _expect_object(value, path)
    _check_keys(obj, {"id", "role", "position", "radio", "battery", "sensors",
                      "sample_period_s"}, path)
    for required in ("id", "role", "position"):
        if required not in obj:
            raise SchemaError(path, f"{required} is required")
    node_id = _expect_int(obj["id"], f"{path}.id")
    if not 0 <= node_id <= MAX_NODE_ID:
        raise SchemaError(f"{path}.id", f"must be in 0..{MAX_NODE_ID}, got {node_id}")
    role = _enum_value(NodeRole, obj["role"], f"{path}.role")
    radio = _parse_radio(obj.get("radio"), defaults, f"{path}.radio")

    battery = None
    if "battery" in obj and obj["battery"] is not None:
        battery = _parse_battery(_expect_object(obj["battery"], f"{path}.battery"),
                                 f"{path}.battery")
    elif role is NodeRole.END_DEVICE:
        battery = BatteryState(capacity_mah=defaults.get(
            "battery_capacity_mah", DEFAULT_BATTERY_CAPACITY_MAH))

    sensors: list[SensorSpec] = []
    if "sensors" in obj:
        for i, item in enumerate(_expect_array(obj["sensors"], f"{path}.sensors")):
            sensors.append(_parse_sensor(item, f"{path}.sensors[{i}]"))

    sample_period = None
    if "sample_period_s" in obj and obj["sample_period_s"] is not None:
        sample_period = _expect_number(obj["sample_period_s"], f"{path}.sample_period_s")

    return NodeSpec(id=node_id, role=role,
                    position=_parse_position(obj["position"], f"{path}.position"),
                    radio=radio, battery=battery, sensors=tuple(sensors),
                    sample_period_s=sample_period)


def _parse_obstacle(value: object, path: str) -> Obstacle:
    obj = _expect_object(value, path)
    _check_keys(obj, {"kind", "from", "to", "attenuation_db"}, path)
    for required in ("kind", "from", "to"):
        if required not in obj:
            raise SchemaError(path, f"{required} is required")
    attenuation = None
    if "attenuation_db" in obj and obj["attenuation_db"] is not None:
        attenuation = _expect_number(obj["attenuation_db"], f"{path}.attenuation_db")
    return Obstacle(kind=_enum_value(ObstacleKind, obj["kind"], f"{path}.kind"),
                    start=_parse_position(obj["from"], f"{path}.from"),
                    end=_parse_position(obj["to"], f"{path}.to"),
                    attenuation_db=attenuation)


def _parse_defaults(value: object, path: str) -> tuple[dict, dict]:
    """Returns (radio/battery fallbacks, scenario-level settings)."""
    obj = _expect_object(value, path)
    _check_keys(obj, _DEFAULTS_KEYS, path)
    fallbacks: dict = {}
    for key in ("tx_power_dbm", "sensitivity_dbm", "shadowing_sigma_db",
                "poll_period_s", "bitrate_bps", "battery_capacity_mah"):
        if key in obj:
            fallbacks[key] = _expect_number(obj[key], f"{path}.{key}")
    settings: dict = {}
    if "floor_loss_db" in obj:
        settings["floor_loss_db"] = _expect_number(obj["floor_loss_db"], f"{path}.floor_loss_db")
    if "warmup_delay_s" in obj:
        settings["warmup_delay_s"] = _expect_number(obj["warmup_delay_s"], f"{path}.warmup_delay_s")
    if "response_timeout_s" in obj:
        settings["response_timeout_s"] = _expect_number(
            obj["response_timeout_s"], f"{path}.response_timeout_s")
    if "max_retries" in obj:
        settings["max_retries"] = _expect_int(obj["max_retries"], f"{path}.max_retries")
    if "tx_airtime_s" in obj and obj["tx_airtime_s"] is not None:
        settings["tx_airtime_override_s"] = _expect_number(
            obj["tx_airtime_s"], f"{path}.tx_airtime_s")
    if "poll_wake_duration_s" in obj:
        settings["poll_wake_duration_s"] = _expect_number(
            obj["poll_wake_duration_s"], f"{path}.poll_wake_duration_s")
    if "consumption_profile" in obj:
        prof = _expect_object(obj["consumption_profile"], f"{path}.consumption_profile")
        _check_keys(prof, {"sleeping_ma", "awake_idle_ma", "transmitting_ma"},
                    f"{path}.consumption_profile")
        base = ConsumptionProfile()
        settings["consumption"] = ConsumptionProfile(
            sleeping_ma=_expect_number(prof["sleeping_ma"], f"{path}.consumption_profile.sleeping_ma")
            if "sleeping_ma" in prof else base.sleeping_ma,
            awake_idle_ma=_expect_number(prof["awake_idle_ma"], f"{path}.consumption_profile.awake_idle_ma")
            if "awake_idle_ma" in prof else base.awake_idle_ma,
            transmitting_ma=_expect_number(prof["transmitting_ma"], f"{path}.consumption_profile.transmitting_ma")
            if "transmitting_ma" in prof else base.transmitting_ma,
        )
    return fallbacks, settings


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse a scenario document, applying documented defaults.

    Raises ScenarioSyntaxError for malformed JSON and SchemaError for
    structural problems (unknown keys anywhere, wrong types, missing required
    fields, duplicate node ids, no coordinator).
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(exc.msg, exc.lineno, exc.colno) from exc

    root = _expect_object(document, "$")
    _check_keys(root, {"nodes", "obstacles", "channels", "seed", "defaults"}, "$")
    if "nodes" not in root:
        raise SchemaError("$", "nodes is required")

    fallbacks: dict = {}
    settings: dict = {}
    if "defaults" in root:
        fallbacks, settings = _parse_defaults(root["defaults"], "$.defaults")

    nodes: list[NodeSpec] = []
    seen_ids: set[int] = set()
    for i, item in enumerate(_expect_array(root["nodes"], "$.nodes")):
        node = _parse_node(item, fallbacks, f"$.nodes[{i}]")
        if node.id in seen_ids:
            raise SchemaError(f"$.nodes[{i}].id", f"duplicate node id {node.id}")
        seen_ids.add(node.id)
        nodes.append(node)
    if not any(n.role is NodeRole.COORDINATOR for n in nodes):
        raise SchemaError("$.nodes", "scenario declares no coordinator")

    obstacles: list[Obstacle] = []
    if "obstacles" in root:
        for i, item in enumerate(_expect_array(root["obstacles"], "$.obstacles")):
            obstacles.append(_parse_obstacle(item, f"$.obstacles[{i}]"))

    channels: dict[int, float] = {}
    if "channels" in root:
        mapping = _expect_object(root["channels"], "$.channels")
        for key, value in mapping.items():
            if not key.lstrip("-").isdigit():
                raise SchemaError(f"$.channels.{key}", "channel ids must be integers")
            channels[int(key)] = _expect_number(value, f"$.channels.{key}")

    seed = 0
    if "seed" in root:
        seed = _expect_int(root["seed"], "$.seed")
        if not 0 <= seed < (1 << 64):
            raise SchemaError("$.seed", "must be an unsigned 64-bit integer")

    return ScenarioConfig(nodes=tuple(nodes), obstacles=tuple(obstacles),
                          channels=channels, seed=seed, **settings)


def load_scenario(path: str) -> ScenarioConfig:
    """Read and parse a scenario file."""
    with open(path, encoding="utf-8") as handle:
        return parse_scenario(handle.read())


# --------------------------------------------------------------------------
# Serialization (inverse of parse_scenario)
# --------------------------------------------------------------------------

def _position_doc(position: Position) -> dict:
    return {"x": position.x, "y": position.y, "floor": position.floor}


def _signal_doc(signal: Signal) -> dict:
    if isinstance(signal, Constant):
        return {"shape": "constant", "level": signal.level}
    if isinstance(signal, Ramp):
        return {"shape": "ramp", "start": signal.start,
                "slope_per_hour": signal.slope_per_hour}
    return {"shape": "sinusoid", "mean": signal.mean, "amplitude": signal.amplitude,
            "period_hours": signal.period_hours}


def serialize_scenario(config: ScenarioConfig) -> str:
    """Render a config back to scenario JSON. parse_scenario() of the result
    reproduces the config field for field."""
    defaults: dict = {
        "floor_loss_db": config.floor_loss_db,
        "warmup_delay_s": config.warmup_delay_s,
        "response_timeout_s": config.response_timeout_s,
        "max_retries": config.max_retries,
        "poll_wake_duration_s": config.poll_wake_duration_s,
        "consumption_profile": {
            "sleeping_ma": config.consumption.sleeping_ma,
            "awake_idle_ma": config.consumption.awake_idle_ma,
            "transmitting_ma": config.consumption.transmitting_ma,
        },
    }
    if config.tx_airtime_override_s is not None:
        defaults["tx_airtime_s"] = config.tx_airtime_override_s

    nodes = []
    for node in config.nodes:
        doc: dict = {
            "id": node.id,
            "role": node.role.value,
            "position": _position_doc(node.position),
            "radio": {
                "sensitivity_dbm": node.radio.sensitivity_dbm,
                "tx_power_dbm": node.radio.tx_power_dbm,
                "shadowing_sigma_db": node.radio.shadowing_sigma_db,
                "poll_period_s": node.radio.poll_period_s,
                "bitrate_bps": node.radio.bitrate_bps,
            },
        }
        if node.battery is not None:
            doc["battery"] = {"capacity_mah": node.battery.capacity_mah,
                              "remaining_mah": node.battery.remaining_mah}
        if node.sensors:
            sensor_docs = []
            for sensor in node.sensors:
                sensor_doc: dict = {"kind": sensor.kind.value,
                                    "signal": _signal_doc(sensor.signal),
                                    "noise_sigma": sensor.noise_sigma}
                if sensor.heat_duration_s is not None:
                    sensor_doc["heat_duration_s"] = sensor.heat_duration_s
                sensor_docs.append(sensor_doc)
            doc["sensors"] = sensor_docs
        if node.sample_period_s is not None:
            doc["sample_period_s"] = node.sample_period_s
        nodes.append(doc)

    document = {
        "seed": config.seed,
        "defaults": defaults,
        "nodes": nodes,
        "obstacles": [
            {"kind": o.kind.value, "from": _position_doc(o.start),
             "to": _position_doc(o.end),
             **({"attenuation_db": o.attenuation_db} if o.attenuation_db is not None else {})}
            for o in config.obstacles
        ],
        "channels": {str(cid): level for cid, level in sorted(config.channels.items())},
    }
    return json.dumps(document, indent=2) + "\n"


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

def validate_scenario(config: ScenarioConfig) -> list[Violation]:
    """Check every structural invariant; empty list means the scenario is sound.

    Unlike parse_scenario (which rejects malformed documents), this also covers
    configs built programmatically.
    """
    violations: list[Violation] = []
    seen: set[int] = set()
    coordinators = [n for n in config.nodes if n.role is NodeRole.COORDINATOR]
    if len(coordinators) != 1:
        violations.append(Violation(rule="exactly one coordinator required",
                                    message=f"found {len(coordinators)}"))
    elif coordinators[0].id != 0:
        violations.append(Violation(rule="coordinator must use the reserved id 0",
                                    node=coordinators[0].id, field="id"))

    for node in config.nodes:
        prefix = node.id
        if node.id in seen:
            violations.append(Violation(rule="duplicate node id", node=node.id, field="id"))
        seen.add(node.id)
        if not 0 <= node.id <= MAX_NODE_ID:
            violations.append(Violation(rule=f"node id outside 0..{MAX_NODE_ID}",
                                        node=node.id, field="id"))
        if node.id == 0 and node.role is not NodeRole.COORDINATOR:
            violations.append(Violation(rule="id 0 is reserved for the coordinator",
                                        node=node.id, field="id"))
        for coordinate in (node.position.x, node.position.y):
            if not math.isfinite(coordinate):
                violations.append(Violation(rule="position must be finite",
                                            node=prefix, field="position"))
                break
        if node.radio.shadowing_sigma_db < 0:
            violations.append(Violation(rule="shadowing sigma must be >= 0",
                                        node=prefix, field="radio.shadowing_sigma_db"))
        if node.radio.bitrate_bps <= 0:
            violations.append(Violation(rule="bitrate must be > 0",
                                        node=prefix, field="radio.bitrate_bps"))
        if node.radio.poll_period_s <= 0:
            violations.append(Violation(rule="poll period must be > 0",
                                        node=prefix, field="radio.poll_period_s"))
        if not math.isfinite(node.radio.tx_power_dbm):
            violations.append(Violation(rule="tx power must be finite",
                                        node=prefix, field="radio.tx_power_dbm"))

        if node.role is NodeRole.END_DEVICE:
            if node.battery is None:
                violations.append(Violation(rule="end devices are battery powered",
                                            node=prefix, field="battery"))
            if node.sample_period_s is None or node.sample_period_s <= 0:
                violations.append(Violation(rule="end devices need sample_period_s > 0",
                                            node=prefix, field="sample_period_s"))
            elif node.sample_period_s < node.radio.poll_period_s:
                violations.append(Violation(
                    rule="sample period must be >= poll period", node=prefix,
                    field="sample_period_s",
                    message=f"{node.sample_period_s} < {node.radio.poll_period_s}"))
        else:
            if node.battery is not None:
                violations.append(Violation(rule="coordinator/router are mains powered (no battery)",
                                            node=prefix, field="battery"))
            if node.sample_period_s is not None:
                violations.append(Violation(rule="sample_period_s applies to end devices only",
                                            node=prefix, field="sample_period_s"))
            if node.sensors:
                violations.append(Violation(rule="sensors attach to end devices only",
                                            node=prefix, field="sensors"))

        if node.battery is not None:
            remaining = node.battery.remaining_mah or 0.0
            if node.battery.capacity_mah < 0 or not 0 <= remaining <= node.battery.capacity_mah:
                violations.append(Violation(
                    rule="battery must satisfy 0 <= remaining <= capacity",
                    node=prefix, field="battery"))

        for i, sensor in enumerate(node.sensors):
            if sensor.noise_sigma < 0:
                violations.append(Violation(rule="noise sigma must be >= 0",
                                            node=prefix, field=f"sensors[{i}].noise_sigma"))
            if sensor.kind is SensorKind.STRAIN_GAUGE:
                if sensor.heat_duration_s is not None and sensor.heat_duration_s <= 0:
                    violations.append(Violation(rule="heat duration must be > 0",
                                                node=prefix, field=f"sensors[{i}].heat_duration_s"))
            elif sensor.heat_duration_s is not None:
                violations.append(Violation(rule="heat duration applies to strain gauges only",
                                            node=prefix, field=f"sensors[{i}].heat_duration_s"))

    for i, obstacle in enumerate(config.obstacles):
        if obstacle.start.floor != obstacle.end.floor:
            violations.append(Violation(rule="obstacle endpoints must share a floor",
                                        field=f"obstacles[{i}]"))
        if (obstacle.start.x, obstacle.start.y) == (obstacle.end.x, obstacle.end.y):
            violations.append(Violation(rule="obstacle segment must have nonzero length",
                                        field=f"obstacles[{i}]"))
        if obstacle.loss_db < 0:
            violations.append(Violation(rule="obstacle attenuation must be >= 0",
                                        field=f"obstacles[{i}].attenuation_db"))

    for channel_id, interference in config.channels.items():
        if channel_id not in CHANNEL_RANGE:
            violations.append(Violation(rule="channel ids must be in 11..26",
                                        field=f"channels.{channel_id}"))
        if interference < 0:
            violations.append(Violation(rule="interference must be >= 0",
                                        field=f"channels.{channel_id}"))

    if config.floor_loss_db < 0:
        violations.append(Violation(rule="floor loss must be >= 0", field="floor_loss_db"))
    if config.warmup_delay_s < 0:
        violations.append(Violation(rule="warmup delay must be >= 0", field="warmup_delay_s"))
    if config.response_timeout_s <= 0:
        violations.append(Violation(rule="response timeout must be > 0",
                                    field="response_timeout_s"))
    if config.max_retries < 0:
        violations.append(Violation(rule="max retries must be >= 0", field="max_retries"))
    if config.tx_airtime_override_s is not None and config.tx_airtime_override_s <= 0:
        violations.append(Violation(rule="airtime override must be > 0",
                                    field="tx_airtime_s"))
    if config.poll_wake_duration_s < 0:
        violations.append(Violation(rule="poll wake duration must be >= 0",
                                    field="poll_wake_duration_s"))
    profile = config.consumption
    if not (0 <= profile.sleeping_ma <= profile.awake_idle_ma <= profile.transmitting_ma):
        violations.append(Violation(
            rule="consumption must satisfy 0 <= sleeping <= awake_idle <= transmitting",
            field="consumption_profile"))
    return violations


# --------------------------------------------------------------------------
# Path geometry
# --------------------------------------------------------------------------

def _crossing_param(ax: float, ay: float, bx: float, by: float,
                    cx: float, cy: float, dx: float, dy: float) -> float | None:
    """Parameter along a->b of a proper crossing with segment c->d, else None.

    Proper means the segments cross at an interior point of both: touching at
    an endpoint or running collinearly does not count.
    """
    rx, ry = bx - ax, by - ay
    sx, sy = dx - cx, dy - cy
    denominator = rx * sy - ry * sx
    if denominator == 0:
        return None
    t = ((cx - ax) * sy - (cy - ay) * sx) / denominator
    u = ((cx - ax) * ry - (cy - ay) * rx) / denominator
    if 0.0 < t < 1.0 and 0.0 < u < 1.0:
        return t
    return None


def obstacles_on_path(config: ScenarioConfig, a: int, b: int) -> list[Crossing]:
    """Obstructions on the straight path between two nodes, ordered from a to b.

    An obstacle participates when its floor lies within the endpoints' floor
    range and its segment properly crosses the 2-D projection of the path.
    One FloorCrossing (at floor_loss_db each) is appended per unit of floor
    difference. Swapping a and b permutes only the ordering.
    """
    node_a = config.node(a)
    node_b = config.node(b)
    pa, pb = node_a.position, node_b.position
    lo, hi = min(pa.floor, pb.floor), max(pa.floor, pb.floor)

    hits: list[tuple[float, ObstacleCrossing]] = []
    for obstacle in config.obstacles:
        if not lo <= obstacle.start.floor <= hi:
            continue
        t = _crossing_param(pa.x, pa.y, pb.x, pb.y,
                            obstacle.start.x, obstacle.start.y,
                            obstacle.end.x, obstacle.end.y)
        if t is not None:
            hits.append((t, ObstacleCrossing(kind=obstacle.kind, loss_db=obstacle.loss_db)))
    hits.sort(key=lambda item: item[0])

    crossings: list[Crossing] = [crossing for _, crossing in hits]
    crossings.extend(FloorCrossing(loss_db=config.floor_loss_db)
                     for _ in range(hi - lo))
    return crossings
