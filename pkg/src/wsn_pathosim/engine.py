"""Deterministic discrete-event core: virtual clock, event queue, seeded RNG streams.

Virtual time is an integer count of microseconds so that every scheduling
decision is exact and a run is reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
import heapq
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

US_PER_SECOND = 1_000_000
MASK64 = (1 << 64) - 1

Ticks = int


def ticks_from_seconds(seconds: float | int) -> Ticks:
    """Convert seconds to microsecond ticks (exact for multiples of 1 us)."""
    return round(seconds * US_PER_SECOND)


def seconds_from_ticks(ticks: Ticks) -> float:
    return ticks / US_PER_SECOND


class EventKind(Enum):
    TIMER_FIRED = "timer_fired"
    FRAME_DELIVERED = "frame_delivered"
    POLL_WAKE = "poll_wake"
    EXTERNAL_WAKE = "external_wake"
    WARMUP_DONE = "warmup_done"
    TIMEOUT = "timeout"
    COMMAND_INJECTED = "command_injected"


@dataclass(slots=True)
class SimEvent:
    """A scheduled occurrence. (at, seq) is unique; seq is the insertion counter,
    so simultaneous events execute in scheduling order."""

    at: Ticks
    seq: int
    kind: EventKind
    node: int | None = None
    payload: object = None
    cancelled: bool = False


class SchedulingInPastError(ValueError):
    """Raised when an event is scheduled before the current virtual clock."""


class EventQueue:
    """Min-heap of SimEvents ordered by (at, seq), with tombstone cancellation."""

    def __init__(self, start: Ticks = 0) -> None:
        self.now: Ticks = start
        self._heap: list[tuple[Ticks, int, SimEvent]] = []
        self._next_seq = 0
        self._pending = 0

    def __len__(self) -> int:
        return self._pending

    def schedule(self, at: Ticks, kind: EventKind, node: int | None = None,
                 payload: object = None) -> SimEvent:
        """Schedule an event and return a handle usable with cancel()."""
        if at < self.now:
            raise SchedulingInPastError(
                f"cannot schedule {kind.value} at {at} ticks; clock is {self.now}")
        event = SimEvent(at=at, seq=self._next_seq, kind=kind, node=node, payload=payload)
        self._next_seq += 1
        self._pending += 1
        heapq.heappush(self._heap, (at, event.seq, event))
        return event

    def cancel(self, event: SimEvent) -> None:
        """Mark an event so it never executes. Cancelling twice is a no-op."""
        if not event.cancelled:
            event.cancelled = True
            self._pending -= 1

    def peek_time(self) -> Ticks | None:
        """Time of the earliest pending event, or None when the queue is empty."""
        while self._heap and self._heap[0][2].cancelled:
            heapq.heappop(self._heap)
        return self._heap[0][0] if self._heap else None

    def pending(self) -> Iterator[SimEvent]:
        """Live (uncancelled) events, in no particular order."""
        return (event for _, _, event in self._heap if not event.cancelled)

    def pop_due(self, limit: Ticks) -> SimEvent | None:
        """Pop the earliest pending event with at <= limit, advancing the clock.

        Returns None (clock untouched) when nothing is due.
        """
        while self._heap and self._heap[0][0] <= limit:
            _, _, event = heapq.heappop(self._heap)
            if event.cancelled:
                continue
            self._pending -= 1
            self.now = event.at
            return event
        return None

    def pop_next(self) -> SimEvent | None:
        """Pop the earliest pending event regardless of time (single-step use)."""
        while self._heap:
            _, _, event = heapq.heappop(self._heap)
            if event.cancelled:
                continue
            self._pending -= 1
            self.now = event.at
            return event
        return None


def derive_seed(root: int, *tags: object) -> int:
    """Stable 64-bit substream seed from a root seed and arbitrary tags.

    blake2b output depends only on the byte string, so derived streams are
    reproducible across platforms and processes.
    """
    digest = hashlib.blake2b(digest_size=8)
    digest.update(str(root & MASK64).encode())
    for tag in tags:
        digest.update(b"/")
        digest.update(str(tag).encode())
    return int.from_bytes(digest.digest(), "big")


class RngStream:
    """Seeded, portable pseudo-random stream.

    Uniforms come from random.Random.random() (Mersenne Twister), whose output
    sequence for a given seed is guaranteed stable by the Python documentation.
    Normal variates use an explicit Box-Muller transform over those uniforms so
    no unpinned library algorithm enters the stream.
    """

    def __init__(self, seed: int) -> None:
        self.seed = seed & MASK64
        self._random = random.Random(self.seed).random

    def uniform(self) -> float:
        """Next uniform variate in [0, 1)."""
        return self._random()

    def normal(self, mean: float = 0.0, sigma: float = 1.0) -> float:
        """Next normal variate; consumes exactly two uniforms."""
        u1 = 1.0 - self._random()  # (0, 1], keeps log() finite
        u2 = self._random()
        return mean + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
