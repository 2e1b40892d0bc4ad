"""Musical transport: tempo, tick arithmetic, metronome grid, swing timing.

The transport is an immutable snapshot; the engine loop owns the only mutable
reference and hands copies to everyone else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

DEFAULT_PPQ = 480


def _round_half_up(x: float) -> int:
    # banker's rounding differs across platforms' libm paths; pin the rule
    return int(math.floor(x + 0.5))


class Subdivision(Enum):
    EIGHTH = "eighth"
    SIXTEENTH = "sixteenth"


@dataclass(frozen=True)
class SwingProfile:
    """Long:short ratio of a subdivided beat; 1.0 is straight time."""

    ratio: float = 1.0
    subdivision: Subdivision = Subdivision.EIGHTH

    def __post_init__(self) -> None:
        if not 1.0 <= self.ratio <= 3.0:
            raise ValueError(f"swing ratio out of range [1.0, 3.0]: {self.ratio}")


@dataclass(frozen=True)
class Transport:
    tempo_bpm: float = 120.0
    ppq: int = DEFAULT_PPQ
    running: bool = False
    position_tick: int = 0
    beats_per_bar: int = 4
    beat_unit: int = 4

    def __post_init__(self) -> None:
        if self.tempo_bpm <= 0:
            raise ValueError(f"tempo must be positive: {self.tempo_bpm}")
        if self.ppq <= 0:
            raise ValueError(f"ppq must be positive: {self.ppq}")
        if self.beats_per_bar <= 0:
            raise ValueError(f"beats_per_bar must be positive: {self.beats_per_bar}")
        if self.beat_unit not in (2, 4, 8):
            raise ValueError(f"beat unit must be 2, 4 or 8: {self.beat_unit}")

    @property
    def beat_ticks(self) -> int:
        return self.ppq * 4 // self.beat_unit

    @property
    def bar_ticks(self) -> int:
        return self.beat_ticks * self.beats_per_bar

    def started(self) -> "Transport":
        return replace(self, running=True)

    def stopped(self) -> "Transport":
        return replace(self, running=False)

    def rewound(self) -> "Transport":
        return replace(self, position_tick=0)

    def at(self, tick: int) -> "Transport":
        return replace(self, position_tick=tick)


def tick_to_ms(t: Transport, tick: int) -> float:
    """Milliseconds from tick 0 at the transport's tempo."""
    return tick * (60_000.0 / t.tempo_bpm) / t.ppq


def ms_to_tick(t: Transport, ms: float) -> int:
    """Inverse of tick_to_ms, rounded to the tick grid."""
    return _round_half_up(ms * t.tempo_bpm * t.ppq / 60_000.0)


def advance(t: Transport, elapsed_ms: float) -> Transport:
    """Move the position forward by wall-clock time; deterministic rounding."""
    if not t.running:
        raise ValueError("advance on a stopped transport")
    if elapsed_ms < 0:
        raise ValueError(f"negative elapsed time: {elapsed_ms}")
    return replace(t, position_tick=t.position_tick + ms_to_tick(t, elapsed_ms))


def _swing_unit_ticks(profile: SwingProfile, ppq: int) -> int:
    # the span of one long+short pair: a beat for eighths, half for sixteenths
    return ppq if profile.subdivision is Subdivision.EIGHTH else ppq // 2


def apply_swing(profile: SwingProfile, straight_tick: int, ppq: int) -> int:
    """Map a straight-grid tick onto the swung grid.

    Within each subdivision pair the midpoint moves from unit/2 to
    unit * ratio/(ratio+1); unit boundaries are fixed points and the map is
    piecewise linear (hence strictly monotone) in between.
    """
    unit = _swing_unit_ticks(profile, ppq)
    base, offset = divmod(straight_tick, unit)
    mid = unit / 2
    swung_mid = unit * profile.ratio / (profile.ratio + 1)
    if offset <= mid:
        swung = offset * swung_mid / mid
    else:
        swung = swung_mid + (offset - mid) * (unit - swung_mid) / (unit - mid)
    return base * unit + _round_half_up(swung)


def remove_swing(profile: SwingProfile, swung_tick: int, ppq: int) -> int:
    """Inverse of apply_swing, within one tick of round-trip error."""
    unit = _swing_unit_ticks(profile, ppq)
    base, offset = divmod(swung_tick, unit)
    mid = unit / 2
    swung_mid = unit * profile.ratio / (profile.ratio + 1)
    if offset <= swung_mid:
        straight = offset * mid / swung_mid
    else:
        straight = mid + (offset - swung_mid) * (unit - mid) / (unit - swung_mid)
    return base * unit + _round_half_up(straight)


def metronome_events(t: Transport, bars: int) -> list[tuple[int, bool]]:
    """(tick, accent) click events for `bars` bars; accent on each downbeat."""
    if bars < 1:
        raise ValueError(f"bars must be >= 1: {bars}")
    out = []
    for bar in range(bars):
        for beat in range(t.beats_per_bar):
            out.append((bar * t.bar_ticks + beat * t.beat_ticks, beat == 0))
    return out
