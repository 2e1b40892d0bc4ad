"""Session engine: the single owner of all musical state.

One engine instance holds the transport, the active lesson and mode,
held notes and the running score. It is synchronous and deterministic:
callers (the WebSocket server, the replayer, tests) feed it client
messages and time advances, and it returns the server messages to
deliver. Nothing here reads the wall clock.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Optional, Sequence

from . import protocol
from .clock import SwingProfile, Transport, advance as transport_advance, apply_swing
from .curriculum import (
    Exercise,
    LessonNotFound,
    LessonSpec,
    SessionReport,
    builtin_lessons,
    lesson_by_id,
    report_payload,
    score_session,
)
from .midi import EventKind, MidiEvent, MidiFile, note_on
from .modes import (
    KEY_COUNT,
    HighlightFrame,
    KeyColor,
    ModeConfig,
    OnWaitState,
    PlayMode,
    PressClass,
    classify_press,
    expert_press_frame,
    guided_press_frame,
    onwait_render,
    onwait_step,
    rolling_frame,
    timing_error_ms,
)
from .recognition import HeldNotes
from .theory import TWO_FIVE_ONE, Key, TimedChord, realize_progression

DEFAULT_PPQ = 480
ContentResolver = Callable[[str], MidiFile]


def _rescale_tick(tick: int, src_ppq: int, dst_ppq: int) -> int:
    if src_ppq == dst_ppq:
        return tick
    # round half up, pinned for determinism
    return (tick * dst_ppq * 2 + src_ppq) // (2 * src_ppq)


class SessionEngine:
    """Synchronous state machine behind the gateway.

    `handle_message` and `advance_to_tick` both return the ordered list
    of server messages produced by that step. `speed` scales tempo up
    and hit windows down together, which keeps press classification
    invariant across replay speeds.
    """

    def __init__(
        self,
        *,
        lessons: Optional[Sequence[LessonSpec]] = None,
        content_resolver: Optional[ContentResolver] = None,
        tempo_bpm: float = 120.0,
        ppq: int = DEFAULT_PPQ,
        key: Key = Key(0),
        cfg: Optional[ModeConfig] = None,
        swing: SwingProfile = SwingProfile(),
        speed: float = 1.0,
    ):
        if speed <= 0:
            raise ValueError(f"speed must be positive: {speed}")
        self.lessons = list(builtin_lessons(key) if lessons is None else lessons)
        self.content_resolver = content_resolver
        self.speed = speed
        self.key = key
        self.swing = swing
        self.cfg = self._scaled(cfg or ModeConfig(PlayMode.GUIDED_PRESS))
        self.transport = Transport(tempo_bpm=tempo_bpm * speed, ppq=ppq)
        self.lesson: Optional[LessonSpec] = None
        self.exercise: Optional[Exercise] = None
        self.realized: list[TimedChord] = realize_progression(TWO_FIVE_ONE, key, ppq)
        self.onwait: Optional[OnWaitState] = None
        self.held: dict[int, int] = {}
        self.classified: list[tuple[MidiEvent, PressClass, Optional[float]]] = []
        self.accompaniment: list[MidiEvent] = []
        self.last_report: Optional[SessionReport] = None
        self.seq = 0
        self._sync_mode_state()
        self.last_frame: HighlightFrame = self._current_frame()

    def _scaled(self, cfg: ModeConfig) -> ModeConfig:
        if self.speed == 1.0:
            return cfg
        return replace(cfg, hit_window_ms=cfg.hit_window_ms / self.speed)

    # -- frame construction ------------------------------------------------

    def _active_index(self) -> int:
        position = self.transport.position_tick
        for i, step in enumerate(self.realized):
            if step.start_tick <= position < step.end_tick:
                return i
        return len(self.realized) - 1 if self.realized else 0

    def _held_notes(self) -> HeldNotes:
        return HeldNotes(frozenset((p, float(t)) for p, t in self.held.items()))

    def _current_frame(self) -> HighlightFrame:
        mode = self.cfg.mode
        if mode is PlayMode.EXPERT_PRESS:
            return expert_press_frame(self._held_notes(), self.cfg, self.key)
        if mode is PlayMode.ONWAIT_ROLL and self.onwait is not None:
            return onwait_render(self.onwait, self.key, self.cfg)
        if mode is PlayMode.ROLLING_IMPROV and self.realized:
            running = self.transport if self.transport.running else self.transport.started()
            return rolling_frame(self.realized, running, self.key, self.cfg)
        if self.realized:
            return guided_press_frame(self.realized, self._active_index(), self.key, self.cfg)
        return HighlightFrame(self.transport.position_tick, (KeyColor.OFF,) * KEY_COUNT)

    def _frame_message(self) -> dict:
        self.last_frame = self._current_frame()
        self.seq += 1
        return protocol.frame_message(self.last_frame, self.seq)

    def snapshot_frame_message(self) -> dict:
        """A fresh copy of the current frame, for late joiners."""
        self.seq += 1
        return protocol.frame_message(self.last_frame, self.seq)

    # -- message handling --------------------------------------------------

    def handle_message(self, msg: dict) -> list[dict]:
        try:
            parsed = protocol.validate_client_message(msg)
        except protocol.ProtocolError as exc:
            return [protocol.error_message(str(exc))]
        handler = getattr(self, f"_on_{parsed['type']}")
        return handler(parsed)

    def _on_note_on(self, msg: dict) -> list[dict]:
        if msg["velocity"] == 0:
            return self._on_note_off(msg)
        tick = self.transport.position_tick
        event = note_on(tick, msg["pitch"], msg["velocity"])
        out: list[dict] = []
        grading_frame = self.last_frame
        skip_grading = (
            self.cfg.mode is PlayMode.EXPERT_PRESS and event.pitch <= self.cfg.split_pitch
        )
        self.held[event.pitch] = tick
        if self.cfg.mode is PlayMode.ONWAIT_ROLL and self.onwait is not None:
            self.onwait, _ = onwait_step(self.onwait, event, self.key, self.cfg)
        if not skip_grading:
            klass = classify_press(event, grading_frame, self.transport, self.cfg)
            error = None
            if self.cfg.mode is PlayMode.ROLLING_IMPROV and klass in (
                PressClass.PROGRESSION_HIT,
                PressClass.EARLY,
                PressClass.LATE,
            ):
                error = timing_error_ms(event, grading_frame, self.transport)
            self.classified.append((event, klass, error))
            out.append(protocol.press_message(event.pitch, klass, error))
        out.append(self._frame_message())
        return out

    def _on_note_off(self, msg: dict) -> list[dict]:
        self.held.pop(msg["pitch"], None)
        return [self._frame_message()]

    def _on_set_mode(self, msg: dict) -> list[dict]:
        try:
            mode = PlayMode(msg["mode"])
        except ValueError:
            return [protocol.error_message(f"unknown mode: {msg['mode']!r}")]
        self.cfg = replace(self.cfg, mode=mode)
        self._sync_mode_state()
        return [self._frame_message()]

    def _on_toggle_approaches(self, msg: dict) -> list[dict]:
        self.cfg = replace(self.cfg, approaches_on=not self.cfg.approaches_on)
        return [self._frame_message()]

    def _on_set_tempo(self, msg: dict) -> list[dict]:
        if msg["tempo_bpm"] <= 0:
            return [protocol.error_message(f"tempo must be positive: {msg['tempo_bpm']}")]
        self.transport = replace(self.transport, tempo_bpm=msg["tempo_bpm"] * self.speed)
        return []

    def _on_set_swing(self, msg: dict) -> list[dict]:
        try:
            self.swing = replace(self.swing, ratio=msg["ratio"])
        except ValueError as exc:
            return [protocol.error_message(str(exc))]
        return []

    def _on_select_lesson(self, msg: dict) -> list[dict]:
        try:
            lesson = lesson_by_id(msg["lesson_id"], self.lessons)
        except LessonNotFound as exc:
            return [protocol.error_message(str(exc))]
        self.lesson = lesson
        out = self._apply_exercise(lesson.exercises[0])
        out.append(self._frame_message())
        return out

    def _apply_exercise(self, exercise: Exercise) -> list[dict]:
        self.exercise = exercise
        self.cfg = self._scaled(exercise.mode)
        self.key = exercise.key
        self.swing = exercise.swing
        ppq = self.transport.ppq
        if exercise.progression is not None:
            self.realized = realize_progression(exercise.progression, exercise.key, ppq)
        else:
            self.realized = []
        self.transport = self.transport.rewound().stopped()
        self.held.clear()
        self.classified.clear()
        self.accompaniment = []
        out: list[dict] = []
        if exercise.content_ref is not None and self.content_resolver is not None:
            try:
                self._load_accompaniment(self.content_resolver(exercise.content_ref))
            except LookupError as exc:
                out.append(protocol.error_message(str(exc)))
        self._sync_mode_state()
        return out

    def _sync_mode_state(self) -> None:
        if self.cfg.mode is PlayMode.ONWAIT_ROLL and self.realized:
            self.onwait = OnWaitState.start(self.realized, self.transport)
        else:
            self.onwait = None

    def _on_start(self, msg: dict) -> list[dict]:
        self.transport = self.transport.started()
        position = self.transport.position_tick
        out: list[dict] = []
        # events exactly at the start position; advance_to_tick covers (prev, target]
        if position % self.transport.beat_ticks == 0:
            out.append(protocol.metronome_message(position, position % self.transport.bar_ticks == 0))
        for ev in self.accompaniment:
            if self._swung_tick(ev.tick) == position:
                kind = "note_on" if ev.kind is EventKind.NOTE_ON else "note_off"
                out.append(protocol.accompaniment_message(position, kind, ev.pitch, ev.velocity))
        out.append(self._frame_message())
        return out

    def _on_stop(self, msg: dict) -> list[dict]:
        self.transport = self.transport.stopped()
        report = self.finalize()
        return [protocol.report_message(report_payload(report)), self._frame_message()]

    def _on_load_content(self, msg: dict) -> list[dict]:
        if self.content_resolver is None:
            return [protocol.error_message("no content library attached")]
        try:
            parsed = self.content_resolver(msg["content_id"])
        except LookupError as exc:
            return [protocol.error_message(str(exc))]
        self._load_accompaniment(parsed)
        return []

    def _load_accompaniment(self, parsed: MidiFile) -> None:
        ppq = self.transport.ppq
        events = []
        for ev in parsed.all_events():
            if ev.kind in (EventKind.NOTE_ON, EventKind.NOTE_OFF):
                events.append(replace(ev, tick=_rescale_tick(ev.tick, parsed.ppq, ppq)))
        self.accompaniment = events

    # -- time --------------------------------------------------------------

    def advance_time(self, elapsed_ms: float) -> list[dict]:
        if not self.transport.running:
            return []
        target = transport_advance(self.transport, elapsed_ms).position_tick
        return self.advance_to_tick(target)

    def advance_to_tick(self, target: int) -> list[dict]:
        """Move the playhead, emitting everything due in (prev, target]."""
        if not self.transport.running:
            raise ValueError("advance on a stopped transport")
        prev = self.transport.position_tick
        if target < prev:
            raise ValueError(f"cannot rewind from {prev} to {target}")
        self.transport = self.transport.at(target)
        out: list[dict] = []
        beat = self.transport.beat_ticks
        first_beat = prev // beat + 1 if prev >= 0 else 0
        for b in range(first_beat, target // beat + 1):
            tick = b * beat
            if prev < tick <= target:
                accent = tick % self.transport.bar_ticks == 0
                out.append(protocol.metronome_message(tick, accent))
        for ev in self.accompaniment:
            swung = self._swung_tick(ev.tick)
            if prev < swung <= target:
                kind = "note_on" if ev.kind is EventKind.NOTE_ON else "note_off"
                out.append(protocol.accompaniment_message(swung, kind, ev.pitch, ev.velocity))
        out.append(self._frame_message())
        return out

    def _swung_tick(self, tick: int) -> int:
        if self.swing.ratio == 1.0:
            return tick
        return apply_swing(self.swing, tick, self.transport.ppq)

    # -- scoring -----------------------------------------------------------

    def finalize(self) -> SessionReport:
        """Score the take so far and reset the running log."""
        report = score_session(
            self.classified,
            lesson_id=self.lesson.id if self.lesson is not None else 0,
        )
        self.classified = []
        self.last_report = report
        return report
