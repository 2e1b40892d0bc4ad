"""Headless replay: run a recorded performance through a lesson.

The virtual clock advances exactly to each event's tick, so a replay is
a pure function of (content, lesson, speed) and two runs produce
byte-identical reports. Speed scales tempo up and hit windows down in
lockstep, leaving press classification unchanged.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional, Sequence

from .content import ContentLibrary
from .curriculum import LessonSpec, SessionReport, report_payload
from .engine import SessionEngine, _rescale_tick
from .midi import EventKind, MidiFile
from .protocol import canonical_json


def replay_file(
    parsed: MidiFile,
    lesson_id: int,
    *,
    speed: float = 1.0,
    lessons: Optional[Sequence[LessonSpec]] = None,
    engine: Optional[SessionEngine] = None,
) -> SessionReport:
    """Feed a parsed SMF through one lesson on a virtual clock."""
    engine = engine or SessionEngine(lessons=lessons, speed=speed)
    engine.handle_message({"type": "select_lesson", "lesson_id": lesson_id})
    engine.handle_message({"type": "start"})
    ppq = engine.transport.ppq
    for ev in parsed.all_events():
        if ev.kind not in (EventKind.NOTE_ON, EventKind.NOTE_OFF):
            continue
        tick = _rescale_tick(ev.tick, parsed.ppq, ppq)
        if tick > engine.transport.position_tick:
            engine.advance_to_tick(tick)
        if ev.kind is EventKind.NOTE_ON and ev.velocity > 0:
            engine.handle_message({"type": "note_on", "pitch": ev.pitch, "velocity": ev.velocity})
        else:
            engine.handle_message({"type": "note_off", "pitch": ev.pitch})
    engine.handle_message({"type": "stop"})
    assert engine.last_report is not None
    return engine.last_report


def replay_content(
    library: ContentLibrary,
    content_id: str,
    lesson_id: int,
    *,
    speed: float = 1.0,
    lessons: Optional[Sequence[LessonSpec]] = None,
) -> SessionReport:
    """Resolve content by id and replay it; ContentNotFound propagates."""
    parsed = library.resolve(content_id)
    engine = SessionEngine(lessons=lessons, content_resolver=library.resolve, speed=speed)
    return replay_file(parsed, lesson_id, speed=speed, engine=engine)


def report_json(report: SessionReport) -> str:
    return canonical_json(report_payload(report))


def write_report(report: SessionReport, directory: Path | str) -> Path:
    """Persist a report; the timestamp lives in the filename only."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())
    path = directory / f"{stamp}-lesson{report.lesson_id:02d}.json"
    n = 1
    while path.exists():
        path = directory / f"{stamp}-lesson{report.lesson_id:02d}-{n}.json"
        n += 1
    path.write_text(report_json(report) + "\n")
    return path
