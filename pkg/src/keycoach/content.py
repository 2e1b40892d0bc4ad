"""Content library: ingested expert MIDI plus generated starter files.

Layout under the library root:

    content/<id>.mid      one standard MIDI file per entry
    content/manifest.json index of entries

Ingested ids are a digest of the file bytes, so re-ingesting the same
recording lands on the same entry and ids survive restarts. Built-in
starter content (a question phrase and a comp accompaniment) is
generated deterministically on first use under reserved ids.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .curriculum import BUILTIN_ACCOMPANIMENT_CONTENT, BUILTIN_QA_CONTENT, ContentId
from .midi import (
    MidiEvent,
    MidiFile,
    MidiTrack,
    end_event,
    note_off,
    note_on,
    parse_smf,
    serialize_smf,
    tempo_event,
)
from .theory import TWO_FIVE_ONE, Key, TimedChord, chord_tones, realize_progression

DEFAULT_PPQ = 480


class ContentNotFound(LookupError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    content_id: ContentId
    filename: str
    title: str
    tags: tuple[str, ...]
    ppq: int
    duration_ticks: int

    def payload(self) -> dict:
        return {
            "content_id": self.content_id,
            "filename": self.filename,
            "title": self.title,
            "tags": list(self.tags),
            "ppq": self.ppq,
            "duration_ticks": self.duration_ticks,
        }


def _entry_from_payload(doc: dict) -> ManifestEntry:
    return ManifestEntry(
        content_id=doc["content_id"],
        filename=doc["filename"],
        title=doc["title"],
        tags=tuple(doc.get("tags", ())),
        ppq=doc["ppq"],
        duration_ticks=doc["duration_ticks"],
    )


class ContentLibrary:
    """File-backed store; every mutation rewrites the manifest atomically."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._entries: dict[ContentId, ManifestEntry] = {}
        self._load_manifest()

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def _load_manifest(self) -> None:
        if not self.manifest_path.exists():
            return
        doc = json.loads(self.manifest_path.read_text())
        for raw in doc.get("entries", []):
            entry = _entry_from_payload(raw)
            self._entries[entry.content_id] = entry

    def _save_manifest(self) -> None:
        doc = {"entries": [e.payload() for e in self.entries()]}
        tmp = self.manifest_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, sort_keys=True))
        os.replace(tmp, self.manifest_path)

    def entries(self) -> list[ManifestEntry]:
        return sorted(self._entries.values(), key=lambda e: e.content_id)

    def ingest(
        self,
        smf_bytes: bytes,
        title: str = "",
        tags: Iterable[str] = (),
        content_id: Optional[ContentId] = None,
    ) -> ContentId:
        """Store one SMF; the parse must succeed before anything is written."""
        parsed = parse_smf(smf_bytes)
        if content_id is None:
            content_id = hashlib.sha256(smf_bytes).hexdigest()[:16]
        filename = f"{content_id}.mid"
        (self.root / filename).write_bytes(smf_bytes)
        self._entries[content_id] = ManifestEntry(
            content_id=content_id,
            filename=filename,
            title=title or content_id,
            tags=tuple(tags),
            ppq=parsed.ppq,
            duration_ticks=parsed.duration_ticks,
        )
        self._save_manifest()
        return content_id

    def resolve(self, content_id: ContentId) -> MidiFile:
        entry = self._entries.get(content_id)
        if entry is None:
            raise ContentNotFound(f"no content {content_id!r}")
        return parse_smf((self.root / entry.filename).read_bytes())

    def entry(self, content_id: ContentId) -> ManifestEntry:
        if content_id not in self._entries:
            raise ContentNotFound(f"no content {content_id!r}")
        return self._entries[content_id]

    def ensure_builtins(self) -> None:
        """Generate the starter files the stock lessons reference."""
        if BUILTIN_QA_CONTENT not in self._entries:
            self.ingest(
                qa_question_smf(),
                title="Question phrases (D dorian)",
                tags=("builtin", "qa"),
                content_id=BUILTIN_QA_CONTENT,
            )
        if BUILTIN_ACCOMPANIMENT_CONTENT not in self._entries:
            realized = realize_progression(TWO_FIVE_ONE, Key(0), DEFAULT_PPQ)
            self.ingest(
                progression_smf(realized, DEFAULT_PPQ, register="comp"),
                title="ii-V-I comp accompaniment",
                tags=("builtin", "accompaniment"),
                content_id=BUILTIN_ACCOMPANIMENT_CONTENT,
            )


def _voice(pitch_class: int, low: int) -> int:
    """The instance of a pitch class in the octave starting at `low`."""
    return low + (pitch_class - low) % 12


def progression_smf(
    realized: Sequence[TimedChord],
    ppq: int = DEFAULT_PPQ,
    register: str = "comp",
    tempo_bpm: float = 120.0,
) -> bytes:
    """Render realized chords to a format-0 SMF.

    register "comp" voices block chords just below middle C, "melody"
    walks the chord tones one per beat above it.
    """
    events: list[MidiEvent] = [tempo_event(0, int(round(60_000_000 / tempo_bpm)))]
    for step in realized:
        tones = sorted(chord_tones(step.chord))
        if register == "comp":
            for tone in tones:
                pitch = _voice(tone, 48)
                events.append(note_on(step.start_tick, pitch, 72))
                events.append(note_off(step.end_tick, pitch))
        elif register == "melody":
            beat = 0
            for tone in tones:
                onset = step.start_tick + beat * ppq
                if onset >= step.end_tick:
                    break
                pitch = _voice(tone, 60)
                events.append(note_on(onset, pitch, 84))
                events.append(note_off(min(onset + ppq, step.end_tick), pitch))
                beat += 1
        else:
            raise ValueError(f"unknown register: {register}")
    events.sort(key=lambda e: e.tick)
    end = realized[-1].end_tick if realized else 0
    events.append(end_event(end))
    return serialize_smf(MidiFile(format=0, ppq=ppq, tracks=(MidiTrack(tuple(events)),)))


def qa_question_smf(ppq: int = DEFAULT_PPQ) -> bytes:
    """A two-bar call phrase in D dorian, the question side of Q&A work."""
    phrase = [
        (62, 0, ppq // 2),
        (65, ppq // 2, ppq // 2),
        (69, ppq, ppq),
        (67, 2 * ppq, ppq // 2),
        (65, 5 * ppq // 2, ppq // 2),
        (62, 3 * ppq, ppq),
    ]
    events: list[MidiEvent] = [tempo_event(0)]
    for pitch, onset, duration in phrase:
        events.append(note_on(onset, pitch, 84))
        events.append(note_off(onset + duration, pitch))
    events.sort(key=lambda e: e.tick)
    events.append(end_event(8 * ppq))
    return serialize_smf(MidiFile(format=0, ppq=ppq, tracks=(MidiTrack(tuple(events)),)))
