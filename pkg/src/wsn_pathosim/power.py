"""Duty-cycle arithmetic, piecewise-constant current integration, coulomb counting.

Current draw is modeled as a constant per radio state; battery charge is the
time integral of that draw. Durations are kept as integer microsecond ticks
per state so the conservation identity (consumed == sum over states of
duration x current) holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .engine import Ticks, ticks_from_seconds

TICKS_PER_HOUR = 3_600 * 1_000_000


class PowerState(Enum):
    SLEEPING = "sleeping"
    AWAKE_IDLE = "awake_idle"
    TRANSMITTING = "transmitting"
    DEAD = "dead"


@dataclass(frozen=True)
class ConsumptionProfile:
    """Measured module draw (mA) per state. Dead nodes draw nothing."""

    sleeping_ma: float = 21.10
    awake_idle_ma: float = 69.80
    transmitting_ma: float = 109.80

    def current_ma(self, state: PowerState) -> float:
        if state is PowerState.SLEEPING:
            return self.sleeping_ma
        if state is PowerState.AWAKE_IDLE:
            return self.awake_idle_ma
        if state is PowerState.TRANSMITTING:
            return self.transmitting_ma
        return 0.0


class NonPositivePeriodError(ValueError):
    """A sleep or poll period that is zero or negative."""


class ActiveExceedsCycleError(ValueError):
    """Active time larger than the cycle it is supposed to fit in."""


class NonPositiveCurrentError(ValueError):
    """Average current must be > 0 for a lifetime to be finite."""


def cyclic_sleep_multiplier(sample_period_s: float, poll_period_s: float) -> tuple[int, float]:
    """Whole number of poll periods closest to the requested external period.

    Returns (multiplier, effective_period_s): the radio can only wake on its
    poll grid, so the externally requested period quantizes to
    multiplier x poll_period with half-up rounding and a minimum of one.
    """
    if sample_period_s <= 0 or poll_period_s <= 0:
        raise NonPositivePeriodError(
            f"periods must be positive, got sample={sample_period_s} poll={poll_period_s}")
    multiplier = max(1, math.floor(sample_period_s / poll_period_s + 0.5))
    return multiplier, multiplier * poll_period_s


@dataclass(frozen=True)
class CyclicSleepConfig:
    """Resolved wake schedule for one End Device."""

    sample_period_s: float
    poll_period_s: float
    multiplier: int
    effective_period_s: float

    @classmethod
    def from_periods(cls, sample_period_s: float, poll_period_s: float) -> "CyclicSleepConfig":
        multiplier, effective = cyclic_sleep_multiplier(sample_period_s, poll_period_s)
        return cls(sample_period_s, poll_period_s, multiplier, effective)


def wake_timeline(config: CyclicSleepConfig, horizon_s: float) -> tuple[list[float], list[float]]:
    """(poll wake times, external wake times) in seconds, within the horizon.

    Polls land at k x poll_period for k >= 1; every multiplier-th poll is also
    an external wake. t = 0 is not a wake. External wakes are a subset of the
    poll wakes by construction.
    """
    polls: list[float] = []
    externals: list[float] = []
    k = 1
    while True:
        t = k * config.poll_period_s
        if t > horizon_s:
            break
        polls.append(t)
        if k % config.multiplier == 0:
            externals.append(t)
        k += 1
    return polls, externals


def average_current(profile: ConsumptionProfile, cycle_s: float, active_s: float,
                    active_state: PowerState) -> float:
    """Closed-form mean draw (mA) of a cycle spent sleeping except for one
    active stretch of `active_s` seconds in `active_state`."""
    if cycle_s <= 0:
        raise NonPositivePeriodError(f"cycle must be positive, got {cycle_s}")
    if active_s < 0 or active_s > cycle_s:
        raise ActiveExceedsCycleError(
            f"active time {active_s} s does not fit in a {cycle_s} s cycle")
    active_ma = profile.current_ma(active_state)
    sleep_ma = profile.sleeping_ma
    return (active_ma * active_s + sleep_ma * (cycle_s - active_s)) / cycle_s


def estimate_lifetime(capacity_mah: float, average_ma: float) -> float:
    """Hours until a battery of capacity_mah empties at a constant average_ma."""
    if average_ma <= 0:
        raise NonPositiveCurrentError(f"average current must be > 0, got {average_ma}")
    if capacity_mah < 0:
        raise ValueError(f"capacity must be >= 0, got {capacity_mah}")
    return capacity_mah / average_ma


@dataclass
class PowerLedger:
    """Per-node energy account: current state, per-state tick totals, battery.

    The ledger has its own time cursor. advance() integrates the present state
    up to a later tick; charge_slice() books a transient excursion (a frame's
    airtime, a poll window) without disturbing the base state. Overlapping
    excursions serialize: a slice starting before the cursor is shifted to it,
    which keeps every microsecond single-counted. A slice books its whole span
    at once, so the cursor may run a little ahead of the event clock when an
    excursion straddles a run horizon.

    Mains-powered nodes pass battery capacity None and simply accumulate
    consumption. Battery nodes die the exact tick their charge crosses zero;
    from then on the state is DEAD and nothing accrues.
    """

    profile: ConsumptionProfile
    state: PowerState
    battery_capacity_mah: float | None = None
    battery_remaining_mah: float | None = None
    cursor: Ticks = 0
    dead_at: Ticks | None = None
    durations: dict[PowerState, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.battery_capacity_mah is not None and self.battery_remaining_mah is None:
            self.battery_remaining_mah = self.battery_capacity_mah
        self._initial_remaining_mah = self.battery_remaining_mah

    @property
    def is_dead(self) -> bool:
        return self.dead_at is not None

    @property
    def consumed_mah(self) -> float:
        """Derived from the per-state tick totals; never accumulated separately."""
        return sum(self.profile.current_ma(state) * ticks / TICKS_PER_HOUR
                   for state, ticks in self.durations.items())

    def duration_ticks(self, state: PowerState) -> int:
        return self.durations.get(state, 0)

    def advance(self, now: Ticks) -> None:
        """Integrate the current state up to `now` (no-op if now <= cursor)."""
        if now <= self.cursor:
            return
        span = now - self.cursor
        current = self.profile.current_ma(self.state)
        if self.battery_remaining_mah is not None and current > 0:
            demand = current * span / TICKS_PER_HOUR
            if demand >= self.battery_remaining_mah:
                # Died partway through the span: book only the live part.
                live = math.floor(self.battery_remaining_mah * TICKS_PER_HOUR / current)
                live = min(live, span)
                self._book(self.state, live)
                self.battery_remaining_mah = 0.0
                self.dead_at = self.cursor + live
                self._book(PowerState.DEAD, span - live)
                self.state = PowerState.DEAD
                self.cursor = now
                return
            self._book(self.state, span)
            self.cursor = now
            # Re-derive from the tick totals rather than subtracting demand:
            # the result is then independent of how often advance() was called.
            self.battery_remaining_mah = self._initial_remaining_mah - self.consumed_mah
            return
        self._book(self.state, span)
        self.cursor = now

    def set_state(self, state: PowerState, now: Ticks) -> None:
        """Integrate up to `now`, then switch the base state."""
        self.advance(now)
        if not self.is_dead:
            self.state = state

    def charge_slice(self, state: PowerState, duration: Ticks, now: Ticks) -> None:
        """Book a transient excursion of `duration` starting at `now` (or at
        the cursor, if later), returning to the current base state after."""
        base = self.state
        self.set_state(state, max(now, self.cursor))
        self.set_state(base, self.cursor + duration)

    def _book(self, state: PowerState, span: Ticks) -> None:
        if span > 0:
            self.durations[state] = self.durations.get(state, 0) + span

    def conservation_error_mah(self) -> float:
        """|booked battery draw - derived consumption|; ~0 up to float rounding."""
        if self.battery_capacity_mah is None or self.battery_remaining_mah is None:
            return 0.0
        drawn = self.battery_capacity_mah - self.battery_remaining_mah
        return abs(drawn - self.consumed_mah)
