"""World orchestration: wires the scenario, protocol, radio, and power models
into one deterministic event loop.

Identical (scenario, seed) pairs replay bit for bit: every random draw comes
from a derived named stream, every container iterates in insertion order, and
virtual time is integer microseconds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .engine import (EventKind, EventQueue, RngStream, SimEvent, Ticks, derive_seed,
                     seconds_from_ticks, ticks_from_seconds)
from .model import (NodeRole, NodeSpec, ScenarioConfig, ScenarioError, UnknownNodeError,
                    Violation, validate_scenario)
from .power import CyclicSleepConfig, PowerLedger, PowerState
from .propagation import LinkBudget, link_budget, select_channel
from .protocol import (CoordinatorSession, CoordinatorStepResult, DeliveredFrame,
                       DeviceStepResult, DevicePhase, EndDeviceState, ErrorReason,
                       ExternalWakeStimulus, GuardExpiredStimulus, MessageFrame,
                       MessageKind, PARENT_BUFFER_CAPACITY, ParentTable,
                       ResponseTimeoutStimulus, SampleRecord, WarmupDoneStimulus,
                       build_parent_table, coordinator_step, end_device_step,
                       route_path, set_period_payload)

logger = logging.getLogger(__name__)

DROP_NO_ROUTE = "no_route"
DROP_NODE_DEAD = "node_dead"
DROP_BUFFER_FULL = "buffer_full"


class InvalidScenarioError(ScenarioError):
    """A scenario that fails validation cannot be simulated."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass
class NodeRuntime:
    spec: NodeSpec
    ledger: PowerLedger
    device_state: EndDeviceState | None = None
    sensor_rng: RngStream | None = None
    sleep: CyclicSleepConfig | None = None
    last_external_wake: Ticks = 0
    rounds_lost: int = 0
    death_logged: bool = False

    @property
    def is_end_device(self) -> bool:
        return self.device_state is not None


@dataclass
class NodeEnergy:
    durations_s: dict[str, float]
    consumed_mah: float
    average_ma: float | None
    battery_capacity_mah: float | None
    remaining_mah: float | None
    dead_at_s: float | None


@dataclass
class RunStats:
    events_processed: int
    clock_ticks: Ticks
    frames_sent: int
    frames_delivered: int
    frames_dropped: dict[str, int]
    frames_buffered_pending: int
    frames_in_flight: int
    samples_per_node: dict[int, int]
    rounds: dict[int, dict[str, int]]
    energy: dict[int, NodeEnergy]
    unreachable: tuple[int, ...]
    channel: int | None
    cyclic_sleep: dict[int, CyclicSleepConfig]
    errors_seen: dict[str, int] = field(default_factory=dict)

    @property
    def clock_s(self) -> float:
        return seconds_from_ticks(self.clock_ticks)

    @property
    def total_dropped(self) -> int:
        return sum(self.frames_dropped.values())


class Simulation:
    """One runnable world built from a validated scenario."""

    def __init__(self, config: ScenarioConfig, *, seed: int | None = None,
                 trace: bool = False) -> None:
        violations = validate_scenario(config)
        if violations:
            raise InvalidScenarioError(violations)
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.queue = EventQueue()
        self.parent_table: ParentTable = build_parent_table(config)
        self.channel: int | None = (select_channel(config.channels)
                                    if config.channels else None)
        self.records: list[SampleRecord] = []
        self.trace_enabled = trace
        self.trace_lines: list[str] = []
        self.events_processed = 0
        self.dead_skips = 0
        self.frames_sent = 0
        self.frames_delivered = 0
        self.frames_dropped: dict[str, int] = {}
        self.errors_seen: dict[str, int] = {}
        self._guard_s = config.warmup_delay_s + config.response_timeout_s
        self._coordinator = config.coordinator()
        self._coord_seq = 0
        self._budgets: dict[tuple[int, int], LinkBudget] = {}
        self._shadow_rng = RngStream(derive_seed(self.seed, "shadowing"))

        self.runtimes: dict[int, NodeRuntime] = {}
        for node in config.nodes:
            if node.role is NodeRole.END_DEVICE:
                assert node.battery is not None and node.sample_period_s is not None
                ledger = PowerLedger(profile=config.consumption,
                                     state=PowerState.SLEEPING,
                                     battery_capacity_mah=node.battery.capacity_mah,
                                     battery_remaining_mah=node.battery.remaining_mah)
                runtime = NodeRuntime(
                    spec=node, ledger=ledger,
                    device_state=EndDeviceState(node_id=node.id,
                                                sample_period_s=node.sample_period_s,
                                                poll_period_s=node.radio.poll_period_s),
                    sensor_rng=RngStream(derive_seed(self.seed, "sensor", node.id)),
                    sleep=CyclicSleepConfig.from_periods(node.sample_period_s,
                                                         node.radio.poll_period_s))
            else:
                runtime = NodeRuntime(spec=node, ledger=PowerLedger(
                    profile=config.consumption, state=PowerState.AWAKE_IDLE))
            self.runtimes[node.id] = runtime

        self.sessions: dict[int, CoordinatorSession] = {
            device.id: CoordinatorSession(device=device.id)
            for device in config.end_devices()}

        for runtime in self.runtimes.values():
            if runtime.is_end_device:
                poll = ticks_from_seconds(runtime.spec.radio.poll_period_s)
                self.queue.schedule(poll, EventKind.POLL_WAKE, runtime.spec.id)
        for runtime in self.runtimes.values():
            if runtime.is_end_device:
                assert runtime.sleep is not None
                first = ticks_from_seconds(runtime.sleep.effective_period_s)
                self.queue.schedule(first, EventKind.EXTERNAL_WAKE, runtime.spec.id)

    # ------------------------------------------------------------------
    # Public control
    # ------------------------------------------------------------------

    @property
    def now(self) -> Ticks:
        return self.queue.now

    def run_until(self, horizon_s: float) -> RunStats:
        """Process every event up to the horizon (virtual seconds), then
        advance the clock to it and return the statistics snapshot."""
        limit = ticks_from_seconds(horizon_s)
        if limit < self.queue.now:
            raise ValueError(f"horizon {horizon_s} s is before the current clock")
        while (event := self.queue.pop_due(limit)) is not None:
            self._dispatch(event)
        self.queue.now = limit
        self._settle_ledgers(limit)
        return self.stats()

    def step(self) -> SimEvent | None:
        """Process exactly one pending event (advancing the clock to it)."""
        event = self.queue.pop_next()
        if event is not None:
            self._dispatch(event)
        return event

    def inject_set_period(self, node_id: int, period_s: int) -> None:
        """Queue a coordinator-issued SET_PERIOD command at the current clock."""
        node = self.config.node(node_id)
        if node.role is not NodeRole.END_DEVICE:
            raise UnknownNodeError(f"node {node_id} is not an end device")
        if period_s <= 0 or period_s > 0xFFFFFFFF:
            raise ValueError(f"period must be in 1..2^32-1 s, got {period_s}")
        self.queue.schedule(self.queue.now, EventKind.COMMAND_INJECTED,
                            self._coordinator.id,
                            payload=("set_period", node_id, int(period_s)))

    def stats(self) -> RunStats:
        samples: dict[int, int] = {}
        for record in self.records:
            samples[record.node] = samples.get(record.node, 0) + 1
        rounds: dict[int, dict[str, int]] = {}
        energy: dict[int, NodeEnergy] = {}
        cyclic: dict[int, CyclicSleepConfig] = {}
        elapsed_h = seconds_from_ticks(self.queue.now) / 3600.0
        for node_id, runtime in self.runtimes.items():
            ledger = runtime.ledger
            consumed = ledger.consumed_mah
            energy[node_id] = NodeEnergy(
                durations_s={state.value: ticks / 1e6
                             for state, ticks in ledger.durations.items()},
                consumed_mah=consumed,
                average_ma=(consumed / elapsed_h) if elapsed_h > 0 else None,
                battery_capacity_mah=ledger.battery_capacity_mah,
                remaining_mah=ledger.battery_remaining_mah,
                dead_at_s=(seconds_from_ticks(ledger.dead_at)
                           if ledger.dead_at is not None else None))
            if runtime.is_end_device:
                session = self.sessions[node_id]
                rounds[node_id] = {"completed": session.rounds_completed,
                                   "aborted": session.rounds_aborted,
                                   "lost": runtime.rounds_lost}
                assert runtime.sleep is not None
                cyclic[node_id] = runtime.sleep
        pending = sum(len(buffer) for buffer in self.parent_table.buffers.values())
        in_flight = sum(1 for event in self.queue.pending()
                        if event.kind is EventKind.FRAME_DELIVERED)
        return RunStats(events_processed=self.events_processed,
                        clock_ticks=self.queue.now,
                        frames_sent=self.frames_sent,
                        frames_delivered=self.frames_delivered,
                        frames_dropped=dict(self.frames_dropped),
                        frames_buffered_pending=pending,
                        frames_in_flight=in_flight,
                        samples_per_node=samples, rounds=rounds, energy=energy,
                        unreachable=self.parent_table.unreachable,
                        channel=self.channel, cyclic_sleep=cyclic,
                        errors_seen=dict(self.errors_seen))

    # ------------------------------------------------------------------
    # Event dispatch
    # ------------------------------------------------------------------

    def _dispatch(self, event: SimEvent) -> None:
        now = event.at
        if event.node is not None and event.node in self.runtimes:
            runtime = self.runtimes[event.node]
            self._advance_ledger(runtime, now)
            if runtime.ledger.is_dead:
                if event.kind is EventKind.FRAME_DELIVERED:
                    frame, _ = event.payload  # type: ignore[misc]
                    self._drop(frame, DROP_NODE_DEAD, now)
                self.dead_skips += 1
                return
        self.events_processed += 1
        self._trace_event(event)

        if event.kind is EventKind.POLL_WAKE:
            self._on_poll_wake(event.node, now)
        elif event.kind is EventKind.EXTERNAL_WAKE:
            self._on_external_wake(event.node, now)
        elif event.kind is EventKind.FRAME_DELIVERED:
            frame, rssi = event.payload  # type: ignore[misc]
            self.frames_delivered += 1
            self._on_frame(event.node, frame, rssi, now)
        elif event.kind is EventKind.TIMER_FIRED:
            _, deadline = event.payload  # type: ignore[misc]
            self._on_guard(event.node, deadline, now)
        elif event.kind is EventKind.WARMUP_DONE:
            device, round_no = event.payload  # type: ignore[misc]
            self._coordinator_stimulus(device, WarmupDoneStimulus(round_no), now)
        elif event.kind is EventKind.TIMEOUT:
            device, round_no, attempt = event.payload  # type: ignore[misc]
            self._coordinator_stimulus(
                device, ResponseTimeoutStimulus(round_no, attempt), now)
        elif event.kind is EventKind.COMMAND_INJECTED:
            _, node_id, period_s = event.payload  # type: ignore[misc]
            frame = MessageFrame(MessageKind.SET_PERIOD, self._coordinator.id,
                                 node_id, self._next_coord_seq(),
                                 set_period_payload(period_s))
            self._send_frame(frame, now)

    def _on_poll_wake(self, node_id: int, now: Ticks) -> None:
        runtime = self.runtimes[node_id]
        poll = ticks_from_seconds(runtime.spec.radio.poll_period_s)
        self.queue.schedule(now + poll, EventKind.POLL_WAKE, node_id)
        state = runtime.device_state
        assert state is not None
        if state.phase is not DevicePhase.SLEEPING:
            return  # radio already on; the poll grid just keeps ticking
        runtime.ledger.charge_slice(
            PowerState.AWAKE_IDLE,
            ticks_from_seconds(self.config.poll_wake_duration_s), now)
        if runtime.ledger.is_dead:
            self._note_death(runtime, now)
            return
        buffer = self.parent_table.buffers.get(node_id)
        parent_id = self.parent_table.parent.get(node_id)
        while buffer and parent_id is not None:
            frame = buffer.popleft()
            parent_rt = self.runtimes[parent_id]
            parent_rt.ledger.charge_slice(
                PowerState.TRANSMITTING, self._airtime_ticks(frame, parent_rt.spec), now)
            rssi = self._rssi(parent_id, node_id)
            self.frames_delivered += 1
            self._trace_action("deliver", node_id, f"{frame.summary()} rssi={rssi!r}", now)
            self._on_frame(node_id, frame, rssi, now)

    def _on_external_wake(self, node_id: int, now: Ticks) -> None:
        runtime = self.runtimes[node_id]
        state = runtime.device_state
        assert state is not None
        if state.phase is not DevicePhase.SLEEPING:
            logger.debug("node %d still awake at its external wake", node_id)
            return
        runtime.last_external_wake = now
        result = end_device_step(state, ExternalWakeStimulus(), now, runtime.spec,
                                 runtime.sensor_rng, coordinator_id=self._coordinator.id,
                                 guard_s=self._guard_s)
        self._apply_device_result(runtime, result, now)

    def _on_guard(self, node_id: int, deadline: Ticks, now: Ticks) -> None:
        runtime = self.runtimes[node_id]
        state = runtime.device_state
        if state is None:
            return
        result = end_device_step(state, GuardExpiredStimulus(deadline), now,
                                 runtime.spec, runtime.sensor_rng,
                                 coordinator_id=self._coordinator.id,
                                 guard_s=self._guard_s)
        self._apply_device_result(runtime, result, now)

    def _on_frame(self, node_id: int, frame: MessageFrame, rssi: float, now: Ticks) -> None:
        runtime = self.runtimes[node_id]
        if runtime.spec.role is NodeRole.COORDINATOR:
            self._coordinator_stimulus(frame.src, DeliveredFrame(frame, rssi), now)
        elif runtime.is_end_device:
            result = end_device_step(runtime.device_state, DeliveredFrame(frame, rssi),
                                     now, runtime.spec, runtime.sensor_rng,
                                     coordinator_id=self._coordinator.id,
                                     guard_s=self._guard_s)
            self._apply_device_result(runtime, result, now)
        else:
            logger.debug("router %d ignoring %s", node_id, frame.summary())

    # ------------------------------------------------------------------
    # State-machine plumbing
    # ------------------------------------------------------------------

    def _apply_device_result(self, runtime: NodeRuntime, result: DeviceStepResult,
                             now: Ticks) -> None:
        if result.error is not None:
            name = result.error.name.lower()
            self.errors_seen[name] = self.errors_seen.get(name, 0) + 1
        if result.power_state is not None:
            runtime.ledger.set_state(result.power_state, now)
        for frame in result.frames:
            self._send_frame(frame, now)
        state = runtime.device_state
        assert state is not None
        if result.round_ended:
            self._on_device_round_end(runtime, result, now)
        elif state.phase is not DevicePhase.SLEEPING and state.guard_until is not None:
            self.queue.schedule(state.guard_until, EventKind.TIMER_FIRED,
                                runtime.spec.id, payload=("guard", state.guard_until))

    def _on_device_round_end(self, runtime: NodeRuntime, result: DeviceStepResult,
                             now: Ticks) -> None:
        if result.round_lost:
            runtime.rounds_lost += 1
            self._trace_action("round", runtime.spec.id, "outcome=lost", now)
        if result.applied_period_s is not None:
            assert runtime.sleep is not None
            runtime.sleep = CyclicSleepConfig.from_periods(
                result.applied_period_s, runtime.sleep.poll_period_s)
            self._trace_action(
                "period", runtime.spec.id,
                f"effective_s={runtime.sleep.effective_period_s!r}"
                f" multiplier={runtime.sleep.multiplier}", now)
        assert runtime.sleep is not None
        effective = ticks_from_seconds(runtime.sleep.effective_period_s)
        next_wake = runtime.last_external_wake + effective
        while next_wake <= now:
            next_wake += effective
        self.queue.schedule(next_wake, EventKind.EXTERNAL_WAKE, runtime.spec.id)

    def _coordinator_stimulus(self, device_id: int, stimulus, now: Ticks) -> None:
        session = self.sessions.get(device_id)
        if session is None:
            logger.debug("coordinator has no session for node %d", device_id)
            return
        result = coordinator_step(session, stimulus, now, self.config,
                                  self.config.node(device_id), self._next_coord_seq,
                                  coordinator_id=self._coordinator.id)
        self._apply_coordinator_result(session, result, now)

    def _apply_coordinator_result(self, session: CoordinatorSession,
                                  result: CoordinatorStepResult, now: Ticks) -> None:
        if result.error_seen is not None:
            name = f"coordinator_saw_{result.error_seen.name.lower()}"
            self.errors_seen[name] = self.errors_seen.get(name, 0) + 1
        for record in result.records:
            self.records.append(record)
        for frame in result.frames:
            self._send_frame(frame, now)
        if result.warmup_delay_s is not None:
            self.queue.schedule(now + ticks_from_seconds(result.warmup_delay_s),
                                EventKind.WARMUP_DONE, self._coordinator.id,
                                payload=(session.device, session.round_no))
        if result.arm_timeout_s is not None:
            self.queue.schedule(now + ticks_from_seconds(result.arm_timeout_s),
                                EventKind.TIMEOUT, self._coordinator.id,
                                payload=(session.device, session.round_no, session.attempt))
        if result.round_completed:
            self._trace_action("round", session.device, "outcome=completed", now)
        if result.round_aborted:
            self._trace_action("round", session.device, "outcome=aborted", now)

    # ------------------------------------------------------------------
    # Radio transport
    # ------------------------------------------------------------------

    def _send_frame(self, frame: MessageFrame, now: Ticks) -> None:
        self.frames_sent += 1
        self._trace_action("send", frame.src, frame.summary(), now)
        route = route_path(self.parent_table, frame.src, frame.dst)
        if route is None or len(route) < 2:
            self._drop(frame, DROP_NO_ROUTE, now)
            return
        destination = self.runtimes[frame.dst]
        if destination.ledger.is_dead:
            self._drop(frame, DROP_NODE_DEAD, now)
            return

        buffering = (destination.is_end_device
                     and destination.device_state.phase is DevicePhase.SLEEPING)
        hops = list(zip(route, route[1:]))
        if buffering:
            hops = hops[:-1]  # the parent holds the frame; the last hop waits
        elapsed = 0
        for sender_id, _receiver_id in hops:
            sender = self.runtimes[sender_id]
            air = self._airtime_ticks(frame, sender.spec)
            sender.ledger.charge_slice(PowerState.TRANSMITTING, air, now + elapsed)
            elapsed += air
        if buffering:
            parent_id = route[-2]
            buffer = self.parent_table.buffer_for(frame.dst)
            if len(buffer) >= PARENT_BUFFER_CAPACITY:
                oldest = buffer.popleft()
                logger.warning("parent %d buffer full for node %d; dropping %s",
                               parent_id, frame.dst, oldest.summary())
                self._drop(oldest, DROP_BUFFER_FULL, now)
            buffer.append(frame)
            self._trace_action("buffer", frame.dst,
                               f"{frame.summary()} at_parent={parent_id}", now)
            return
        rssi = self._rssi(route[-2], frame.dst)
        self.queue.schedule(now + elapsed, EventKind.FRAME_DELIVERED, frame.dst,
                            payload=(frame, rssi))

    def _drop(self, frame: MessageFrame, reason: str, now: Ticks) -> None:
        self.frames_dropped[reason] = self.frames_dropped.get(reason, 0) + 1
        self._trace_action("drop", frame.dst, f"{frame.summary()} reason={reason}", now)
        logger.info("dropped %s (%s)", frame.summary(), reason)

    def _airtime_ticks(self, frame: MessageFrame, sender: NodeSpec) -> Ticks:
        if self.config.tx_airtime_override_s is not None:
            return ticks_from_seconds(self.config.tx_airtime_override_s)
        return ticks_from_seconds(frame.wire_length * 8 / sender.radio.bitrate_bps)

    def _rssi(self, sender_id: int, receiver_id: int) -> float:
        key = (sender_id, receiver_id)
        budget = self._budgets.get(key)
        if budget is None:
            budget = link_budget(self.config, sender_id, receiver_id)
            self._budgets[key] = budget
        sigma = self.runtimes[receiver_id].spec.radio.shadowing_sigma_db
        if sigma > 0:
            return budget.received_power + self._shadow_rng.normal(0.0, sigma)
        return budget.received_power

    def _next_coord_seq(self) -> int:
        seq = self._coord_seq
        self._coord_seq = (self._coord_seq + 1) & 0xFFFF
        return seq

    # ------------------------------------------------------------------
    # Power bookkeeping
    # ------------------------------------------------------------------

    def _advance_ledger(self, runtime: NodeRuntime, now: Ticks) -> None:
        runtime.ledger.advance(now)
        if runtime.ledger.is_dead:
            self._note_death(runtime, now)

    def _note_death(self, runtime: NodeRuntime, now: Ticks) -> None:
        if runtime.death_logged:
            return
        runtime.death_logged = True
        dead_at = runtime.ledger.dead_at
        self._trace_action("death", runtime.spec.id, f"dead_at={dead_at}", now)
        logger.info("node %d battery exhausted at %s ticks", runtime.spec.id, dead_at)
        buffer = self.parent_table.buffers.get(runtime.spec.id)
        while buffer:
            self._drop(buffer.popleft(), DROP_NODE_DEAD, now)

    def _settle_ledgers(self, limit: Ticks) -> None:
        for runtime in self.runtimes.values():
            self._advance_ledger(runtime, limit)

    # ------------------------------------------------------------------
    # Trace
    # ------------------------------------------------------------------

    def _trace_event(self, event: SimEvent) -> None:
        if not self.trace_enabled:
            return
        detail = ""
        if event.kind is EventKind.FRAME_DELIVERED:
            frame, rssi = event.payload  # type: ignore[misc]
            detail = f"{frame.summary()} rssi={rssi!r}"
        elif event.kind is EventKind.TIMER_FIRED:
            _, deadline = event.payload  # type: ignore[misc]
            detail = f"guard deadline={deadline}"
        elif event.kind is EventKind.WARMUP_DONE:
            device, round_no = event.payload  # type: ignore[misc]
            detail = f"device={device} round={round_no}"
        elif event.kind is EventKind.TIMEOUT:
            device, round_no, attempt = event.payload  # type: ignore[misc]
            detail = f"device={device} round={round_no} attempt={attempt}"
        elif event.kind is EventKind.COMMAND_INJECTED:
            _, node_id, period_s = event.payload  # type: ignore[misc]
            detail = f"set_period node={node_id} seconds={period_s}"
        node = event.node if event.node is not None else "-"
        self.trace_lines.append(
            f"{event.at}\t{event.seq}\t{event.kind.value}\t{node}\t{detail}")

    def _trace_action(self, kind: str, node: int, detail: str, now: Ticks) -> None:
        if self.trace_enabled:
            self.trace_lines.append(f"{now}\t-\t{kind}\t{node}\t{detail}")

    def trace_text(self) -> str:
        return "\n".join(self.trace_lines) + ("\n" if self.trace_lines else "")
