"""Collection protocol: wire frames, device/coordinator state machines, routing.

Frame layout (big-endian, checksum = XOR of all preceding bytes):

    magic 0xA5 | version 0x01 | kind u8 | src u16 | dst u16 | seq u16
    | payload (length fixed per kind) | checksum u8

See docs/protocol.md for worked examples. The state machines are step
functions: (state, stimulus, now) -> outputs; they mutate only the passed
state and the caller-supplied RNG stream, so independent simulations share
nothing.
"""

from __future__ import annotations

import logging
import struct
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum

from .engine import RngStream, Ticks, ticks_from_seconds
from .model import NodeRole, NodeSpec, ScenarioConfig
from .power import PowerState
from .propagation import PathLossTable, DEFAULT_PATH_LOSS_TABLE, is_connected, link_budget
from .sensors import GaugeNotHeatedError, GaugeState, SensorKind, sample

logger = logging.getLogger(__name__)

FRAME_MAGIC = 0xA5
FRAME_VERSION = 0x01
FRAME_OVERHEAD = 10  # 9 header bytes + 1 checksum
MAX_PAYLOAD = 64
PARENT_BUFFER_CAPACITY = 16


class MessageKind(IntEnum):
    """Wire-stable command codes."""

    AWAKE = 0x01
    HEAT_GAUGE_REQ = 0x02
    SAMPLE_REQ = 0x03
    SAMPLE_RESP = 0x04
    SLEEP_REQ = 0x05
    SET_PERIOD = 0x06
    ACK = 0x07
    ERR = 0x08


class ErrorReason(IntEnum):
    """Payload byte of an ERR frame."""

    GAUGE_NOT_HEATED = 0x01
    ILLEGAL_STIMULUS = 0x02
    NO_SENSOR = 0x03
    BAD_PERIOD = 0x04


_SENSOR_CODE = {
    SensorKind.STRAIN_GAUGE: 0x01,
    SensorKind.DISPLACEMENT: 0x02,
    SensorKind.TEMPERATURE_CATHETER: 0x03,
}
_SENSOR_FROM_CODE = {code: kind for kind, code in _SENSOR_CODE.items()}

# Fixed payload length per kind; SAMPLE_RESP carries sensor code + f64 value
# + u64 sample ticks, SET_PERIOD a u32 period in seconds, ERR a reason byte.
_PAYLOAD_LENGTH = {
    MessageKind.AWAKE: 0,
    MessageKind.HEAT_GAUGE_REQ: 0,
    MessageKind.SAMPLE_REQ: 0,
    MessageKind.SAMPLE_RESP: 17,
    MessageKind.SLEEP_REQ: 0,
    MessageKind.SET_PERIOD: 4,
    MessageKind.ACK: 0,
    MessageKind.ERR: 1,
}


class FrameDecodeError(Exception):
    """Base for every frame decoding failure."""


class TruncatedFrameError(FrameDecodeError):
    pass


class ChecksumError(FrameDecodeError):
    pass


class BadMagicError(FrameDecodeError):
    pass


class UnknownKindError(FrameDecodeError):
    pass


class PayloadLayoutMismatchError(FrameDecodeError):
    """Payload length inconsistent with the frame kind (encode or decode)."""


@dataclass(frozen=True)
class MessageFrame:
    kind: MessageKind
    src: int
    dst: int
    seq: int
    payload: bytes = b""

    @property
    def wire_length(self) -> int:
        return FRAME_OVERHEAD + len(self.payload)

    def summary(self) -> str:
        return f"{self.kind.name} {self.src}->{self.dst} seq={self.seq}"


def encode_frame(frame: MessageFrame) -> bytes:
    """Serialize a frame; total length is FRAME_OVERHEAD + payload length."""
    expected = _PAYLOAD_LENGTH[frame.kind]
    if len(frame.payload) != expected:
        raise PayloadLayoutMismatchError(
            f"{frame.kind.name} payload must be {expected} bytes, got {len(frame.payload)}")
    if len(frame.payload) > MAX_PAYLOAD:
        raise PayloadLayoutMismatchError(f"payload exceeds {MAX_PAYLOAD} bytes")
    for label, value in (("src", frame.src), ("dst", frame.dst), ("seq", frame.seq)):
        if not 0 <= value <= 0xFFFF:
            raise ValueError(f"{label} must fit in 16 bits, got {value}")
    body = struct.pack(">BBBHHH", FRAME_MAGIC, FRAME_VERSION, int(frame.kind),
                       frame.src, frame.dst, frame.seq) + frame.payload
    checksum = 0
    for byte in body:
        checksum ^= byte
    return body + bytes([checksum])


def decode_frame(data: bytes) -> MessageFrame:
    """Parse wire bytes back into a frame.

    The checksum is verified over the whole buffer before any field is
    interpreted, so flipping any single bit of a valid encoding surfaces as
    ChecksumError rather than a field-specific failure.
    """
    if len(data) < FRAME_OVERHEAD:
        raise TruncatedFrameError(f"frame needs >= {FRAME_OVERHEAD} bytes, got {len(data)}")
    checksum = 0
    for byte in data[:-1]:
        checksum ^= byte
    if checksum != data[-1]:
        raise ChecksumError(f"checksum mismatch: computed {checksum:#04x}, got {data[-1]:#04x}")
    magic, version, kind_code, src, dst, seq = struct.unpack(">BBBHHH", data[:9])
    if magic != FRAME_MAGIC:
        raise BadMagicError(f"bad magic {magic:#04x}")
    if version != FRAME_VERSION:
        raise BadMagicError(f"unsupported version {version:#04x}")
    try:
        kind = MessageKind(kind_code)
    except ValueError as exc:
        raise UnknownKindError(f"unknown kind {kind_code:#04x}") from exc
    payload = data[9:-1]
    if len(payload) != _PAYLOAD_LENGTH[kind]:
        raise PayloadLayoutMismatchError(
            f"{kind.name} payload must be {_PAYLOAD_LENGTH[kind]} bytes, got {len(payload)}")
    return MessageFrame(kind=kind, src=src, dst=dst, seq=seq, payload=payload)


def sample_resp_payload(sensor_kind: SensorKind, value: float, sampled_at: Ticks) -> bytes:
    return struct.pack(">BdQ", _SENSOR_CODE[sensor_kind], value, sampled_at)


def parse_sample_resp(frame: MessageFrame) -> tuple[SensorKind, float, Ticks]:
    code, value, sampled_at = struct.unpack(">BdQ", frame.payload)
    return _SENSOR_FROM_CODE[code], value, sampled_at


def set_period_payload(period_s: int) -> bytes:
    return struct.pack(">I", period_s)


def parse_set_period(frame: MessageFrame) -> int:
    return struct.unpack(">I", frame.payload)[0]


def err_payload(reason: ErrorReason) -> bytes:
    return bytes([int(reason)])


def parse_err(frame: MessageFrame) -> ErrorReason:
    return ErrorReason(frame.payload[0])


@dataclass(frozen=True)
class SampleRecord:
    """One measurement persisted by the coordinator."""

    node: int
    sensor: SensorKind
    value: float
    sampled_at: Ticks
    received_at: Ticks
    rssi_dbm: float


SAMPLE_LOG_HEADER = "ticks,node,sensor,value,sampled_ticks,rssi_dbm"


def sample_log_row(record: SampleRecord) -> str:
    return (f"{record.received_at},{record.node},{record.sensor.value},"
            f"{record.value!r},{record.sampled_at},{record.rssi_dbm!r}")


# --------------------------------------------------------------------------
# End-device state machine
# --------------------------------------------------------------------------

class DevicePhase(Enum):
    SLEEPING = "sleeping"
    AWAKE_IDLE = "awake_idle"
    HEATING = "heating"
    SAMPLING = "sampling"


@dataclass
class EndDeviceState:
    """Mutable protocol state of one End Device."""

    node_id: int
    sample_period_s: float
    poll_period_s: float
    phase: DevicePhase = DevicePhase.SLEEPING
    pending_period_s: float | None = None
    gauge: GaugeState = field(default_factory=GaugeState)
    guard_until: Ticks | None = None
    frame_seq: int = 0

    def next_seq(self) -> int:
        seq = self.frame_seq
        self.frame_seq = (self.frame_seq + 1) & 0xFFFF
        return seq


@dataclass(frozen=True)
class ExternalWakeStimulus:
    pass


@dataclass(frozen=True)
class GuardExpiredStimulus:
    deadline: Ticks


@dataclass(frozen=True)
class DeliveredFrame:
    frame: MessageFrame
    rssi_dbm: float


DeviceStimulus = ExternalWakeStimulus | GuardExpiredStimulus | DeliveredFrame


@dataclass
class DeviceStepResult:
    state: EndDeviceState
    frames: list[MessageFrame] = field(default_factory=list)
    power_state: PowerState | None = None
    round_ended: bool = False
    round_lost: bool = False
    applied_period_s: float | None = None
    error: ErrorReason | None = None


def end_device_step(state: EndDeviceState, stimulus: DeviceStimulus, now: Ticks,
                    device: NodeSpec, rng: RngStream, *, coordinator_id: int = 0,
                    guard_s: float = 125.0) -> DeviceStepResult:
    """Advance an End Device by one stimulus.

    Illegal stimuli are answered with ERR and leave the state unchanged. The
    guard deadline (re-armed on every stimulus while awake) makes the device
    give the round up and sleep if the coordinator goes silent; a pending
    period change commits whenever the round ends, normally or not.
    """
    result = DeviceStepResult(state=state)

    if isinstance(stimulus, ExternalWakeStimulus):
        if state.phase is not DevicePhase.SLEEPING:
            logger.debug("node %d external wake ignored in phase %s",
                         state.node_id, state.phase.value)
            return result
        state.phase = DevicePhase.AWAKE_IDLE
        state.guard_until = now + ticks_from_seconds(guard_s)
        result.power_state = PowerState.AWAKE_IDLE
        result.frames.append(MessageFrame(MessageKind.AWAKE, state.node_id,
                                          coordinator_id, state.next_seq()))
        return result

    if isinstance(stimulus, GuardExpiredStimulus):
        if (state.phase is DevicePhase.SLEEPING or state.guard_until is None
                or stimulus.deadline != state.guard_until or now < state.guard_until):
            return result  # stale guard
        _finish_round(state, result, lost=True)
        return result

    frame = stimulus.frame
    reply_to = frame.src

    def err(reason: ErrorReason) -> DeviceStepResult:
        result.error = reason
        result.frames.append(MessageFrame(MessageKind.ERR, state.node_id, reply_to,
                                          state.next_seq(), err_payload(reason)))
        return result

    if state.phase is not DevicePhase.SLEEPING:
        state.guard_until = now + ticks_from_seconds(guard_s)

    if frame.kind is MessageKind.SET_PERIOD:
        # Accepted in any phase: reaches sleeping devices at their poll wakes.
        period = parse_set_period(frame)
        if period <= 0:
            return err(ErrorReason.BAD_PERIOD)
        state.pending_period_s = float(period)
        result.frames.append(MessageFrame(MessageKind.ACK, state.node_id, reply_to,
                                          state.next_seq()))
        return result

    if frame.kind is MessageKind.SLEEP_REQ:
        result.frames.append(MessageFrame(MessageKind.ACK, state.node_id, reply_to,
                                          state.next_seq()))
        if state.phase is not DevicePhase.SLEEPING:
            _finish_round(state, result, lost=False)
        return result

    if frame.kind is MessageKind.HEAT_GAUGE_REQ:
        if state.phase not in (DevicePhase.AWAKE_IDLE, DevicePhase.HEATING):
            return err(ErrorReason.ILLEGAL_STIMULUS)
        sensor = device.primary_sensor
        if sensor is None or not sensor.requires_heating:
            return err(ErrorReason.NO_SENSOR)
        state.phase = DevicePhase.HEATING
        state.gauge.begin_heating(now, sensor.heat_duration_ticks)
        result.frames.append(MessageFrame(MessageKind.ACK, state.node_id, reply_to,
                                          state.next_seq()))
        return result

    if frame.kind is MessageKind.SAMPLE_REQ:
        if state.phase not in (DevicePhase.AWAKE_IDLE, DevicePhase.HEATING):
            return err(ErrorReason.ILLEGAL_STIMULUS)
        sensor = device.primary_sensor
        if sensor is None:
            return err(ErrorReason.NO_SENSOR)
        try:
            value = sample(sensor, state.gauge, now, rng)
        except GaugeNotHeatedError:
            return err(ErrorReason.GAUGE_NOT_HEATED)
        state.phase = DevicePhase.AWAKE_IDLE
        result.frames.append(MessageFrame(
            MessageKind.SAMPLE_RESP, state.node_id, reply_to, state.next_seq(),
            sample_resp_payload(sensor.kind, value, now)))
        return result

    if frame.kind is MessageKind.ERR:
        return result  # never answer an error with an error

    return err(ErrorReason.ILLEGAL_STIMULUS)


def _finish_round(state: EndDeviceState, result: DeviceStepResult, *, lost: bool) -> None:
    state.phase = DevicePhase.SLEEPING
    state.guard_until = None
    if state.pending_period_s is not None:
        state.sample_period_s = state.pending_period_s
        result.applied_period_s = state.pending_period_s
        state.pending_period_s = None
    result.power_state = PowerState.SLEEPING
    result.round_ended = True
    result.round_lost = lost


# --------------------------------------------------------------------------
# Coordinator state machine
# --------------------------------------------------------------------------

class SessionPhase(Enum):
    WAITING_AWAKE = "waiting_awake"
    HEAT_REQUESTED = "heat_requested"
    WAITING_SAMPLE = "waiting_sample"
    DONE = "done"


@dataclass
class CoordinatorSession:
    """Per-device collection session; phases advance monotonically per round and
    the session returns to WAITING_AWAKE for the next one."""

    device: int
    phase: SessionPhase = SessionPhase.WAITING_AWAKE
    round_no: int = 0
    attempt: int = 0
    retries_left: int = 0
    started_at: Ticks = 0
    rounds_completed: int = 0
    rounds_aborted: int = 0


@dataclass(frozen=True)
class WarmupDoneStimulus:
    round_no: int


@dataclass(frozen=True)
class ResponseTimeoutStimulus:
    round_no: int
    attempt: int


CoordinatorStimulus = DeliveredFrame | WarmupDoneStimulus | ResponseTimeoutStimulus


@dataclass
class CoordinatorStepResult:
    session: CoordinatorSession
    frames: list[MessageFrame] = field(default_factory=list)
    records: list[SampleRecord] = field(default_factory=list)
    warmup_delay_s: float | None = None    # schedule WarmupDone(round_no) after this
    arm_timeout_s: float | None = None     # schedule ResponseTimeout(round_no, attempt)
    round_completed: bool = False
    round_aborted: bool = False
    error_seen: ErrorReason | None = None


def coordinator_step(session: CoordinatorSession, stimulus: CoordinatorStimulus,
                     now: Ticks, config: ScenarioConfig, device: NodeSpec,
                     next_seq, coordinator_id: int = 0) -> CoordinatorStepResult:
    """Advance one device's collection session.

    next_seq is a callable yielding the coordinator's next frame sequence
    number. Heating is skipped for sensors that need none; a response timeout
    retries SAMPLE_REQ up to config.max_retries, after which the round aborts
    but SLEEP_REQ is still sent so the device never hangs awake.
    """
    result = CoordinatorStepResult(session=session)

    def send(kind: MessageKind, payload: bytes = b"") -> None:
        result.frames.append(MessageFrame(kind, coordinator_id, session.device,
                                          next_seq(), payload))

    def request_sample() -> None:
        session.attempt += 1
        session.phase = SessionPhase.WAITING_SAMPLE
        send(MessageKind.SAMPLE_REQ)
        result.arm_timeout_s = config.response_timeout_s

    if isinstance(stimulus, WarmupDoneStimulus):
        if session.phase is SessionPhase.HEAT_REQUESTED and stimulus.round_no == session.round_no:
            request_sample()
        return result

    if isinstance(stimulus, ResponseTimeoutStimulus):
        if (session.phase is not SessionPhase.WAITING_SAMPLE
                or stimulus.round_no != session.round_no
                or stimulus.attempt != session.attempt):
            return result  # stale timer
        if session.retries_left > 0:
            session.retries_left -= 1
            request_sample()
        else:
            send(MessageKind.SLEEP_REQ)
            session.phase = SessionPhase.DONE
            session.rounds_aborted += 1
            result.round_aborted = True
        return result

    frame = stimulus.frame

    if frame.kind is MessageKind.AWAKE:
        if session.phase not in (SessionPhase.WAITING_AWAKE, SessionPhase.DONE):
            logger.debug("stale AWAKE from node %d ignored mid-round", session.device)
            return result
        session.round_no += 1
        session.attempt = 0
        session.retries_left = config.max_retries
        session.started_at = now
        sensor = device.primary_sensor
        if sensor is not None and sensor.requires_heating:
            session.phase = SessionPhase.HEAT_REQUESTED
            send(MessageKind.HEAT_GAUGE_REQ)
            result.warmup_delay_s = config.warmup_delay_s
        else:
            request_sample()
        return result

    if frame.kind is MessageKind.SAMPLE_RESP:
        # Persist every delivered sample, even a late one after an abort.
        sensor_kind, value, sampled_at = parse_sample_resp(frame)
        result.records.append(SampleRecord(node=frame.src, sensor=sensor_kind,
                                           value=value, sampled_at=sampled_at,
                                           received_at=now, rssi_dbm=stimulus.rssi_dbm))
        if session.phase is SessionPhase.WAITING_SAMPLE:
            send(MessageKind.SLEEP_REQ)
            session.phase = SessionPhase.DONE
            session.rounds_completed += 1
            result.round_completed = True
        return result

    if frame.kind is MessageKind.ERR:
        # Log only; the armed response timeout drives any retry.
        result.error_seen = parse_err(frame)
        logger.info("node %d reported %s", frame.src, result.error_seen.name)
        return result

    if frame.kind is MessageKind.ACK:
        return result

    logger.debug("coordinator ignoring unexpected %s", frame.summary())
    return result


# --------------------------------------------------------------------------
# Parent table and routing
# --------------------------------------------------------------------------

@dataclass
class ParentTable:
    """Static routing tree rooted at the coordinator.

    parent maps node id -> parent id (None for the root); nodes absent from
    parent are unreachable. buffers hold frames addressed to sleeping End
    Devices, capped at PARENT_BUFFER_CAPACITY each (oldest dropped first).
    """

    root: int
    parent: dict[int, int | None]
    received_power: dict[int, float]
    unreachable: tuple[int, ...]
    buffers: dict[int, deque[MessageFrame]] = field(default_factory=dict)

    def buffer_for(self, child: int) -> deque[MessageFrame]:
        return self.buffers.setdefault(child, deque())

    def path_to_root(self, node: int) -> list[int] | None:
        if node not in self.parent:
            return None
        path = [node]
        while (up := self.parent[path[-1]]) is not None:
            path.append(up)
        return path


def build_parent_table(config: ScenarioConfig,
                       table: PathLossTable = DEFAULT_PATH_LOSS_TABLE) -> ParentTable:
    """Choose each node's parent from downlink budgets.

    A link counts as connected when the candidate parent's transmission meets
    the child's sensitivity. Routers attach to a connected infrastructure node
    strictly fewer hops from the coordinator (best received power, then lowest
    id); End Devices attach to the best connected reachable coordinator/router.
    End Devices never appear as parents, so the result is a tree.
    """
    coordinator = config.coordinator()
    budgets: dict[tuple[int, int], float] = {}

    def received_at(child: NodeSpec, parent: NodeSpec) -> float:
        key = (parent.id, child.id)
        if key not in budgets:
            budgets[key] = link_budget(config, parent.id, child.id, table).received_power
        return budgets[key]

    def connected(child: NodeSpec, parent: NodeSpec) -> bool:
        return received_at(child, parent) >= child.radio.sensitivity_dbm

    infrastructure = [coordinator] + config.routers()
    hops: dict[int, int] = {coordinator.id: 0}
    frontier = [coordinator]
    level = 0
    while frontier:
        level += 1
        nxt = []
        for candidate in infrastructure:
            if candidate.id in hops:
                continue
            if any(connected(candidate, up) for up in frontier):
                hops[candidate.id] = level
                nxt.append(candidate)
        frontier = nxt

    parent: dict[int, int | None] = {coordinator.id: None}
    received: dict[int, float] = {}
    unreachable: list[int] = []

    for router in config.routers():
        if router.id not in hops:
            unreachable.append(router.id)
            continue
        options = [up for up in infrastructure
                   if hops.get(up.id) == hops[router.id] - 1 and connected(router, up)]
        best = max(options, key=lambda up: (received_at(router, up), -up.id))
        parent[router.id] = best.id
        received[router.id] = received_at(router, best)

    for device in config.end_devices():
        options = [up for up in infrastructure
                   if up.id in parent and connected(device, up)]
        if not options:
            unreachable.append(device.id)
            continue
        best = max(options, key=lambda up: (received_at(device, up), -up.id))
        parent[device.id] = best.id
        received[device.id] = received_at(device, best)

    return ParentTable(root=coordinator.id, parent=parent, received_power=received,
                       unreachable=tuple(sorted(unreachable)))


def route_path(table: ParentTable, src: int, dst: int) -> list[int] | None:
    """Node sequence from src to dst along tree edges, or None when either
    side is unreachable."""
    up_src = table.path_to_root(src)
    up_dst = table.path_to_root(dst)
    if up_src is None or up_dst is None:
        return None
    ancestors = {node: i for i, node in enumerate(up_src)}
    for j, node in enumerate(up_dst):
        if node in ancestors:
            return up_src[:ancestors[node]] + up_dst[:j + 1][::-1]
    return None
