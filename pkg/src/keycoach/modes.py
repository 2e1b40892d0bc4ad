"""Lesson modes: deterministic keyboard-highlight state machines.

Four playing modes share one frame vocabulary:

* ``guided_press``   static highlights for the active progression chord
* ``rolling_improv`` falling notes ahead of the playhead, reveal on arrival
* ``onwait_roll``    rolling view that only advances on a correct press
* ``expert_press``   highlights driven by live chord recognition

Every frame is a pure function of (state, tick, config), so identical
inputs serialize to identical bytes. Keys strictly below the split pitch
carry progression guidance (yellow), keys at or above it carry
improvisation guidance (pink chord tones, purple approach notes).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Iterable, Optional, Sequence

from .clock import Transport, _round_half_up, tick_to_ms
from .midi import EventKind, MidiEvent
from .recognition import HeldNotes, recognize_chord
from .theory import (
    Chord,
    Key,
    NoChordScale,
    TimedChord,
    chord_scale,
    chord_tones,
    half_step_approaches,
    pc,
    scale_above_approaches,
)

PITCH_MIN = 21
PITCH_MAX = 108
KEY_COUNT = PITCH_MAX - PITCH_MIN + 1


class KeyColor(IntEnum):
    """Per-key highlight; integer values double as wire digits."""

    OFF = 0
    PROGRESSION_YELLOW = 1
    CHORD_TONE_PINK = 2
    APPROACH_PURPLE = 3


class PlayMode(str, Enum):
    GUIDED_PRESS = "guided_press"
    ROLLING_IMPROV = "rolling_improv"
    ONWAIT_ROLL = "onwait_roll"
    EXPERT_PRESS = "expert_press"


class ApproachKind(str, Enum):
    HALF_STEP = "half_step"
    SCALE_ABOVE = "scale_above"
    BOTH = "both"


class PressClass(str, Enum):
    CHORD_TONE_HIT = "chord_tone_hit"
    APPROACH_HIT = "approach_hit"
    PROGRESSION_HIT = "progression_hit"
    OUT_OF_SET = "out_of_set"
    EARLY = "early"
    LATE = "late"


@dataclass(frozen=True)
class FallingNote:
    pitch: int
    hit_tick: int
    duration_ticks: int
    color: KeyColor

    def __post_init__(self) -> None:
        if not PITCH_MIN <= self.pitch <= PITCH_MAX:
            raise ValueError(f"pitch {self.pitch} outside the 88-key range")
        if self.duration_ticks <= 0:
            raise ValueError("falling note needs a positive duration")
        if self.color not in (KeyColor.PROGRESSION_YELLOW, KeyColor.CHORD_TONE_PINK):
            raise ValueError("falling notes are yellow or pink")


@dataclass(frozen=True)
class HighlightFrame:
    frame_tick: int
    key_colors: tuple[KeyColor, ...]
    falling: tuple[FallingNote, ...] = ()
    active_chord: Optional[Chord] = None

    def __post_init__(self) -> None:
        if len(self.key_colors) != KEY_COUNT:
            raise ValueError(f"expected {KEY_COUNT} key colors, got {len(self.key_colors)}")
        ticks = [note.hit_tick for note in self.falling]
        if ticks != sorted(ticks):
            raise ValueError("falling notes must be sorted by hit_tick")

    def color_at(self, pitch: int) -> KeyColor:
        if not PITCH_MIN <= pitch <= PITCH_MAX:
            raise ValueError(f"pitch {pitch} outside the 88-key range")
        return self.key_colors[pitch - PITCH_MIN]


_ALL_OFF = (KeyColor.OFF,) * KEY_COUNT


@dataclass(frozen=True)
class ModeConfig:
    mode: PlayMode
    approaches_on: bool = False
    approach_kind: ApproachKind = ApproachKind.HALF_STEP
    split_pitch: int = 60
    hit_window_ms: float = 100.0
    lookahead_beats: float = 4.0
    gate_on_approaches: bool = False
    required_hits: int = 1

    def __post_init__(self) -> None:
        if not PITCH_MIN <= self.split_pitch <= PITCH_MAX:
            raise ValueError("split_pitch must sit on the 88-key keyboard")
        if self.hit_window_ms <= 0:
            raise ValueError("hit_window_ms must be positive")
        if self.lookahead_beats <= 0:
            raise ValueError("lookahead_beats must be positive")
        if self.required_hits < 1:
            raise ValueError("required_hits must be at least 1")


def set_mode(cfg: ModeConfig, new_mode: PlayMode) -> ModeConfig:
    return replace(cfg, mode=new_mode)


def toggle_approaches(cfg: ModeConfig) -> ModeConfig:
    return replace(cfg, approaches_on=not cfg.approaches_on)


def approach_pitch_classes(chord: Chord, key: Key, cfg: ModeConfig) -> frozenset[int]:
    """Purple set for a chord under the current config.

    Chords with no conventional chord-scale simply contribute no
    scale-above approaches; half-step approaches always exist.
    """
    if not cfg.approaches_on:
        return frozenset()
    out: set[int] = set()
    if cfg.approach_kind in (ApproachKind.HALF_STEP, ApproachKind.BOTH):
        out |= half_step_approaches(chord)
    if cfg.approach_kind in (ApproachKind.SCALE_ABOVE, ApproachKind.BOTH):
        try:
            scale = chord_scale(chord, key)
        except NoChordScale:
            pass
        else:
            out |= scale_above_approaches(chord, scale)
    return frozenset(out)


def _paint(
    tones: frozenset[int],
    approaches: frozenset[int],
    split_pitch: int,
    yellow_below: bool,
) -> tuple[KeyColor, ...]:
    colors = []
    for pitch in range(PITCH_MIN, PITCH_MAX + 1):
        klass = pc(pitch)
        if pitch < split_pitch:
            on = yellow_below and klass in tones
            colors.append(KeyColor.PROGRESSION_YELLOW if on else KeyColor.OFF)
        elif klass in tones:
            colors.append(KeyColor.CHORD_TONE_PINK)
        elif klass in approaches:
            colors.append(KeyColor.APPROACH_PURPLE)
        else:
            colors.append(KeyColor.OFF)
    return tuple(colors)


def guided_press_frame(
    realized: Sequence[TimedChord],
    index: int,
    key: Key,
    cfg: ModeConfig,
) -> HighlightFrame:
    """Static frame for one progression step.

    Yellow comping targets below the split, pink chord tones (plus
    purple approaches when enabled) above it. No falling notes.
    """
    step = realized[index]
    tones = chord_tones(step.chord)
    approaches = approach_pitch_classes(step.chord, key, cfg)
    return HighlightFrame(
        frame_tick=step.start_tick,
        key_colors=_paint(tones, approaches, cfg.split_pitch, yellow_below=True),
        active_chord=step.chord,
    )


def _active_step(realized: Sequence[TimedChord], position_tick: int) -> Optional[TimedChord]:
    for step in realized:
        if step.start_tick <= position_tick < step.end_tick:
            return step
    return None


def rolling_frame(
    realized: Sequence[TimedChord],
    t: Transport,
    key: Key,
    cfg: ModeConfig,
) -> HighlightFrame:
    """Roll-view frame at the transport position.

    Falling lane holds a yellow note for every below-split key of each
    chord whose start lands in [position, position + lookahead], both
    ends included. Key colors reveal only the chord currently sounding;
    below-split guidance lives entirely in the falling lane here.
    """
    if not t.running:
        raise ValueError("rolling frames need a running transport")
    position = t.position_tick
    horizon = position + _round_half_up(cfg.lookahead_beats * t.beat_ticks)
    falling = []
    for step in realized:
        if not position <= step.start_tick <= horizon:
            continue
        tones = chord_tones(step.chord)
        for pitch in range(PITCH_MIN, cfg.split_pitch):
            if pc(pitch) in tones:
                falling.append(
                    FallingNote(pitch, step.start_tick, step.duration_ticks, KeyColor.PROGRESSION_YELLOW)
                )
    falling.sort(key=lambda note: (note.hit_tick, note.pitch))

    active = _active_step(realized, position)
    if active is None:
        colors = _ALL_OFF
        chord = None
    else:
        chord = active.chord
        approaches = approach_pitch_classes(chord, key, cfg)
        colors = _paint(chord_tones(chord), approaches, cfg.split_pitch, yellow_below=False)
    return HighlightFrame(
        frame_tick=position,
        key_colors=colors,
        falling=tuple(falling),
        active_chord=chord,
    )


@dataclass(frozen=True)
class OnWaitState:
    """Roll position that waits for correct presses instead of a clock."""

    realized: tuple[TimedChord, ...]
    transport: Transport
    index: int = 0
    hits: int = 0

    @classmethod
    def start(cls, realized: Iterable[TimedChord], transport: Transport) -> "OnWaitState":
        steps = tuple(realized)
        if not steps:
            raise ValueError("onwait needs at least one chord")
        return cls(realized=steps, transport=transport.started())

    @property
    def finished(self) -> bool:
        return self.index >= len(self.realized)

    @property
    def virtual_tick(self) -> int:
        if self.finished:
            return self.realized[-1].end_tick
        return self.realized[self.index].start_tick


def onwait_render(state: OnWaitState, key: Key, cfg: ModeConfig) -> HighlightFrame:
    return rolling_frame(state.realized, state.transport.at(state.virtual_tick), key, cfg)


def onwait_step(
    state: OnWaitState,
    event: MidiEvent,
    key: Key,
    cfg: ModeConfig,
) -> tuple[OnWaitState, HighlightFrame]:
    """Advance on a correct above-split note_on; anything else is inert.

    A press counts when its pitch class is in the active chord's tone
    set (widened to approaches only when gate_on_approaches is set).
    After required_hits such presses the position jumps to the next
    chord; past the last chord the state is terminal.
    """
    advanced = state
    if (
        not state.finished
        and event.kind is EventKind.NOTE_ON
        and event.velocity > 0
        and event.pitch >= cfg.split_pitch
    ):
        active = state.realized[state.index].chord
        gate = chord_tones(active)
        if cfg.gate_on_approaches:
            gate |= approach_pitch_classes(active, key, cfg)
        if pc(event.pitch) in gate:
            hits = state.hits + 1
            if hits >= cfg.required_hits:
                advanced = replace(state, index=state.index + 1, hits=0)
            else:
                advanced = replace(state, hits=hits)
    return advanced, onwait_render(advanced, key, cfg)


def expert_press_frame(held: HeldNotes, cfg: ModeConfig, key: Key) -> HighlightFrame:
    """Recognition-driven frame: comp a chord below the split, the
    matching tone set lights up above it. No recognition, no lights.

    The comping region includes the split pitch itself so common
    voicings topping out on middle C still recognize intact.
    """
    below = frozenset(n for n in held.notes if n[0] <= cfg.split_pitch)
    chord = recognize_chord(HeldNotes(below))
    if chord is None:
        return HighlightFrame(frame_tick=0, key_colors=_ALL_OFF)
    approaches = approach_pitch_classes(chord, key, cfg)
    return HighlightFrame(
        frame_tick=0,
        key_colors=_paint(chord_tones(chord), approaches, cfg.split_pitch, yellow_below=False),
        active_chord=chord,
    )


def classify_press(
    event: MidiEvent, frame: HighlightFrame, t: Transport, cfg: ModeConfig
) -> PressClass:
    """Grade one note_on against the most recent frame.

    Lit keys classify by their color. Unlit keys that match a falling
    note classify as progression hits, except in rolling mode where a
    press outside the hit window becomes early or late instead. The
    frame may be slightly stale relative to the transport; timing is
    measured against the live position, so late presses still resolve
    while the note lingers in the last frame.
    """
    if event.kind is not EventKind.NOTE_ON or event.velocity <= 0:
        raise ValueError("classify_press grades note_on events only")
    pitch = event.pitch
    if not PITCH_MIN <= pitch <= PITCH_MAX:
        return PressClass.OUT_OF_SET

    color = frame.color_at(pitch)
    if color is KeyColor.CHORD_TONE_PINK:
        return PressClass.CHORD_TONE_HIT
    if color is KeyColor.APPROACH_PURPLE:
        return PressClass.APPROACH_HIT
    if color is KeyColor.PROGRESSION_YELLOW:
        return PressClass.PROGRESSION_HIT

    matches = [note for note in frame.falling if note.pitch == pitch]
    if not matches:
        return PressClass.OUT_OF_SET
    if cfg.mode is not PlayMode.ROLLING_IMPROV:
        return PressClass.PROGRESSION_HIT
    offsets = [tick_to_ms(t, note.hit_tick - t.position_tick) for note in matches]
    nearest = min(offsets, key=abs)
    if abs(nearest) <= cfg.hit_window_ms:
        return PressClass.PROGRESSION_HIT
    return PressClass.EARLY if nearest > 0 else PressClass.LATE


def timing_error_ms(event: MidiEvent, frame: HighlightFrame, t: Transport) -> Optional[float]:
    """Signed ms offset to the nearest falling note of the pressed key.

    Positive means the press came early. None when no falling note
    shares the pitch, so only timed targets accrue timing error.
    """
    offsets = [
        tick_to_ms(t, note.hit_tick - t.position_tick)
        for note in frame.falling
        if note.pitch == event.pitch
    ]
    if not offsets:
        return None
    return min(offsets, key=abs)
