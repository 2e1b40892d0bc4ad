"""Wire protocol: message validation and canonical JSON.

One JSON object per WebSocket text frame. Serialization is canonical
(sorted keys, no whitespace) so identical state always produces
identical bytes; golden tests and replay reports depend on that.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Optional, Sequence

from .curriculum import LessonSpec, lesson_payload
from .modes import HighlightFrame, PressClass


class ProtocolError(ValueError):
    pass


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _require(msg: Mapping, field: str, kinds: tuple[type, ...], label: str):
    if field not in msg:
        raise ProtocolError(f"{label} message needs a '{field}' field")
    value = msg[field]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise ProtocolError(f"'{field}' has the wrong type in {label} message")
    return value


def _int_field(msg: Mapping, field: str, label: str, lo: int, hi: int) -> int:
    value = _require(msg, field, (int,), label)
    if not lo <= value <= hi:
        raise ProtocolError(f"'{field}' out of range [{lo},{hi}]: {value}")
    return value


CLIENT_TYPES = (
    "note_on",
    "note_off",
    "set_mode",
    "toggle_approaches",
    "set_tempo",
    "set_swing",
    "select_lesson",
    "start",
    "stop",
    "load_content",
)


def validate_client_message(msg: Any) -> dict:
    """Normalize one inbound message; ProtocolError on anything off-schema.

    The returned dict carries exactly the schema fields, so canonical
    serialization of a valid message is a fixed point.
    """
    if not isinstance(msg, Mapping):
        raise ProtocolError("client message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in CLIENT_TYPES:
        raise ProtocolError(f"unknown message type: {mtype!r}")
    if mtype == "note_on":
        return {
            "type": mtype,
            "pitch": _int_field(msg, "pitch", mtype, 0, 127),
            "velocity": _int_field(msg, "velocity", mtype, 0, 127),
        }
    if mtype == "note_off":
        return {"type": mtype, "pitch": _int_field(msg, "pitch", mtype, 0, 127)}
    if mtype == "set_mode":
        mode = _require(msg, "mode", (str,), mtype)
        return {"type": mtype, "mode": mode}
    if mtype == "set_tempo":
        tempo = _require(msg, "tempo_bpm", (int, float), mtype)
        return {"type": mtype, "tempo_bpm": float(tempo)}
    if mtype == "set_swing":
        ratio = _require(msg, "ratio", (int, float), mtype)
        return {"type": mtype, "ratio": float(ratio)}
    if mtype == "select_lesson":
        return {"type": mtype, "lesson_id": _int_field(msg, "lesson_id", mtype, 1, 6)}
    if mtype == "load_content":
        content_id = _require(msg, "content_id", (str,), mtype)
        return {"type": mtype, "content_id": content_id}
    # toggle_approaches, start, stop carry no payload
    return {"type": mtype}


SERVER_TYPES = (
    "frame",
    "press_class",
    "report",
    "lesson_list",
    "content_list",
    "accompaniment_event",
    "metronome_event",
    "error",
)

_PRESS_CLASS_VALUES = tuple(k.value for k in PressClass)


def _number_or_null(msg: Mapping, field: str, label: str) -> Optional[float]:
    if field not in msg:
        raise ProtocolError(f"{label} message needs a '{field}' field")
    value = msg[field]
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProtocolError(f"'{field}' has the wrong type in {label} message")
    return float(value)


def validate_server_message(msg: Any) -> dict:
    """Structural check of one outbound message; mirrors the client schema.

    Exists so the schema corpus can be round-tripped from both ends:
    canonical_json(validate_server_message(m)) == canonical_json(m) for
    every valid server message.
    """
    if not isinstance(msg, Mapping):
        raise ProtocolError("server message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in SERVER_TYPES:
        raise ProtocolError(f"unknown message type: {mtype!r}")
    if mtype == "frame":
        colors = _require(msg, "key_colors", (str,), mtype)
        if len(colors) != 88 or any(c not in "0123" for c in colors):
            raise ProtocolError("'key_colors' must be 88 digits in 0..3")
        falling = _require(msg, "falling", (list,), mtype)
        for note in falling:
            if (
                not isinstance(note, list)
                or len(note) != 4
                or any(isinstance(v, bool) or not isinstance(v, int) for v in note)
            ):
                raise ProtocolError("each falling note must be [pitch, hit_tick, duration, color]")
        chord = msg.get("active_chord")
        if chord is not None:
            if not isinstance(chord, Mapping):
                raise ProtocolError("'active_chord' must be null or an object")
            _int_field(chord, "root", "active_chord", 0, 11)
            _require(chord, "quality", (str,), "active_chord")
            _require(chord, "name", (str,), "active_chord")
            chord = {"root": chord["root"], "quality": chord["quality"], "name": chord["name"]}
        return {
            "type": mtype,
            "seq": _int_field(msg, "seq", mtype, 1, 2**53),
            "frame_tick": _int_field(msg, "frame_tick", mtype, 0, 2**53),
            "key_colors": colors,
            "falling": [list(note) for note in falling],
            "active_chord": chord,
        }
    if mtype == "press_class":
        klass = _require(msg, "press_class", (str,), mtype)
        if klass not in _PRESS_CLASS_VALUES:
            raise ProtocolError(f"unknown press class: {klass!r}")
        return {
            "type": mtype,
            "pitch": _int_field(msg, "pitch", mtype, 0, 127),
            "press_class": klass,
            "timing_error_ms": _number_or_null(msg, "timing_error_ms", mtype),
        }
    if mtype == "report":
        report = _require(msg, "report", (Mapping,), mtype)
        _int_field(report, "lesson_id", "report", 0, 2**31)
        counts = _require(report, "counts", (Mapping,), "report")
        for name, value in counts.items():
            if name not in _PRESS_CLASS_VALUES or isinstance(value, bool) or not isinstance(value, int):
                raise ProtocolError(f"bad count entry: {name!r}")
        _require(report, "accuracy_percent", (int, float), "report")
        _require(report, "mean_abs_timing_error_ms", (int, float), "report")
        if not isinstance(report.get("empty"), bool):
            raise ProtocolError("report needs a boolean 'empty' field")
        return {"type": mtype, "report": dict(report)}
    if mtype == "lesson_list":
        lessons = _require(msg, "lessons", (list,), mtype)
        for lesson in lessons:
            if not isinstance(lesson, Mapping):
                raise ProtocolError("each lesson must be an object")
            _int_field(lesson, "id", "lesson", 1, 2**31)
            _require(lesson, "title", (str,), "lesson")
            _require(lesson, "objective", (str,), "lesson")
            _require(lesson, "tools", (list,), "lesson")
            _require(lesson, "exercises", (list,), "lesson")
        return {"type": mtype, "lessons": [dict(l) for l in lessons]}
    if mtype == "content_list":
        entries = _require(msg, "entries", (list,), mtype)
        for entry in entries:
            if not isinstance(entry, Mapping):
                raise ProtocolError("each content entry must be an object")
            _require(entry, "content_id", (str,), "content entry")
            _require(entry, "title", (str,), "content entry")
            _int_field(entry, "ppq", "content entry", 1, 32767)
            _int_field(entry, "duration_ticks", "content entry", 0, 2**53)
        return {"type": mtype, "entries": [dict(e) for e in entries]}
    if mtype == "metronome_event":
        if not isinstance(msg.get("accent"), bool):
            raise ProtocolError("metronome_event needs a boolean 'accent' field")
        return {
            "type": mtype,
            "tick": _int_field(msg, "tick", mtype, 0, 2**53),
            "accent": msg["accent"],
        }
    if mtype == "accompaniment_event":
        kind = _require(msg, "kind", (str,), mtype)
        if kind not in ("note_on", "note_off"):
            raise ProtocolError(f"accompaniment kind must be note_on/note_off: {kind!r}")
        return {
            "type": mtype,
            "tick": _int_field(msg, "tick", mtype, 0, 2**53),
            "kind": kind,
            "pitch": _int_field(msg, "pitch", mtype, 0, 127),
            "velocity": _int_field(msg, "velocity", mtype, 0, 127),
        }
    # error
    return {"type": mtype, "message": _require(msg, "message", (str,), mtype)}


def frame_payload(frame: HighlightFrame) -> dict:
    """JSON view of a frame; key colors pack into an 88-digit string."""
    chord = None
    if frame.active_chord is not None:
        chord = {
            "root": frame.active_chord.root,
            "quality": frame.active_chord.quality.value,
            "name": frame.active_chord.name,
        }
    return {
        "frame_tick": frame.frame_tick,
        "key_colors": "".join(str(int(c)) for c in frame.key_colors),
        "falling": [
            [n.pitch, n.hit_tick, n.duration_ticks, int(n.color)] for n in frame.falling
        ],
        "active_chord": chord,
    }


def frame_message(frame: HighlightFrame, seq: int) -> dict:
    out = frame_payload(frame)
    out["type"] = "frame"
    out["seq"] = seq
    return out


def press_message(pitch: int, klass: PressClass, timing_error_ms: Optional[float]) -> dict:
    return {
        "type": "press_class",
        "pitch": pitch,
        "press_class": klass.value,
        "timing_error_ms": timing_error_ms,
    }


def report_message(report_doc: dict) -> dict:
    return {"type": "report", "report": report_doc}


def lesson_list_message(lessons: Sequence[LessonSpec]) -> dict:
    return {"type": "lesson_list", "lessons": [lesson_payload(l) for l in lessons]}


def content_list_message(entries: Sequence[dict]) -> dict:
    return {"type": "content_list", "entries": list(entries)}


def metronome_message(tick: int, accent: bool) -> dict:
    return {"type": "metronome_event", "tick": tick, "accent": accent}


def accompaniment_message(tick: int, kind: str, pitch: int, velocity: int) -> dict:
    return {
        "type": "accompaniment_event",
        "tick": tick,
        "kind": kind,
        "pitch": pitch,
        "velocity": velocity,
    }


def error_message(detail: str) -> dict:
    return {"type": "error", "message": detail}
