"""Standard MIDI File codec and realtime byte-stream decoding.

The file side is bit-faithful at the event level: parse -> serialize -> parse
preserves ticks, kinds, channels, pitches and velocities, and unrecognized
messages travel through as opaque `OTHER` events.  Only metrical (PPQ) time
division and formats 0/1 are supported; lesson takes are linear by nature.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

VLQ_MAX = 0x0FFFFFFF

DEFAULT_TEMPO_US = 500_000  # microseconds per quarter note, 120 BPM


class MidiCodecError(ValueError):
    """Base class for codec failures."""


class NotSmf(MidiCodecError):
    """Input is not a Standard MIDI File (bad magic or malformed structure)."""


class Truncated(MidiCodecError):
    """Input ended mid-chunk or mid-message."""


class MalformedVlq(MidiCodecError):
    """More than 4 continuation bytes in a variable-length quantity."""


class VlqRange(MidiCodecError):
    """Value outside the 4-byte variable-length-quantity domain."""


class UnsupportedTimeDivision(MidiCodecError):
    """SMPTE (or zero) time division; only PPQ files are accepted."""


class UnsupportedFormat(MidiCodecError):
    """SMF format 2 (or unknown) is not accepted."""


class EventKind(Enum):
    NOTE_ON = "note_on"
    NOTE_OFF = "note_off"
    CONTROL_CHANGE = "control_change"
    PROGRAM_CHANGE = "program_change"
    META_TEMPO = "meta_tempo"
    META_END = "meta_end"
    OTHER = "other"


@dataclass(frozen=True)
class MidiEvent:
    """One decoded event at an absolute tick.

    Field use by kind:
      note_on/note_off   channel, pitch, velocity
      control_change     channel, data = (controller, value)
      program_change     channel, data = (program,)
      meta_tempo         data = 3-byte big-endian microseconds per quarter
      meta_end           no payload
      other              data = complete raw message image (status byte first)
    """

    kind: EventKind
    tick: int
    channel: int = 0
    pitch: int = 0
    velocity: int = 0
    data: bytes = b""

    @property
    def tempo_us(self) -> int:
        if self.kind is not EventKind.META_TEMPO:
            raise ValueError("not a tempo event")
        return int.from_bytes(self.data, "big")

    @property
    def tempo_bpm(self) -> float:
        return 60_000_000 / self.tempo_us


def note_on(tick: int, pitch: int, velocity: int = 80, channel: int = 0) -> MidiEvent:
    if velocity <= 0:
        return note_off(tick, pitch, 0, channel)
    return MidiEvent(EventKind.NOTE_ON, tick, channel, pitch, velocity)


def note_off(tick: int, pitch: int, velocity: int = 0, channel: int = 0) -> MidiEvent:
    return MidiEvent(EventKind.NOTE_OFF, tick, channel, pitch, velocity)


def tempo_event(tick: int, us_per_quarter: int = DEFAULT_TEMPO_US) -> MidiEvent:
    return MidiEvent(EventKind.META_TEMPO, tick, data=us_per_quarter.to_bytes(3, "big"))


def end_event(tick: int) -> MidiEvent:
    return MidiEvent(EventKind.META_END, tick)


@dataclass(frozen=True)
class MidiTrack:
    events: tuple[MidiEvent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))

    def notes(self) -> Iterator[MidiEvent]:
        for ev in self.events:
            if ev.kind in (EventKind.NOTE_ON, EventKind.NOTE_OFF):
                yield ev


@dataclass(frozen=True)
class MidiFile:
    format: int
    ppq: int
    tracks: tuple[MidiTrack, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tracks", tuple(self.tracks))
        if self.format == 0 and len(self.tracks) != 1:
            raise ValueError(f"format 0 requires exactly 1 track, got {len(self.tracks)}")

    def all_events(self) -> list[MidiEvent]:
        """Events of every track merged and sorted by tick (stable)."""
        merged = [ev for track in self.tracks for ev in track.events]
        merged.sort(key=lambda ev: ev.tick)
        return merged

    @property
    def duration_ticks(self) -> int:
        return max((ev.tick for t in self.tracks for ev in t.events), default=0)

    def initial_tempo_us(self) -> int:
        for ev in self.all_events():
            if ev.kind is EventKind.META_TEMPO:
                return ev.tempo_us
        return DEFAULT_TEMPO_US


# --------------------------------------------------------------------------
# Variable-length quantities
# --------------------------------------------------------------------------

def decode_vlq(data: bytes, offset: int = 0) -> tuple[int, int]:
    """Decode a variable-length quantity; returns (value, bytes consumed)."""
    if offset >= len(data):
        raise Truncated("empty input for variable-length quantity")
    value = 0
    for i in range(4):
        if offset + i >= len(data):
            raise Truncated("variable-length quantity cut short")
        byte = data[offset + i]
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, i + 1
    raise MalformedVlq("no terminating byte within 4 bytes")


def encode_vlq(value: int) -> bytes:
    """Encode a value as a minimal-length variable-length quantity."""
    if not 0 <= value <= VLQ_MAX:
        raise VlqRange(f"value out of range: {value}")
    out = bytearray([value & 0x7F])
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


# --------------------------------------------------------------------------
# Standard MIDI File parsing
# --------------------------------------------------------------------------

def parse_smf(data: bytes) -> MidiFile:
    """Parse SMF bytes into absolute-tick events.

    Honors running status, normalizes note_on velocity 0 to note_off, skips
    alien chunks, and keeps unknown messages as opaque events.
    """
    if data[:4] != b"MThd":
        raise NotSmf("no MThd header")
    if len(data) < 14:
        raise Truncated("shorter than an SMF header")
    header_len = struct.unpack(">I", data[4:8])[0]
    if header_len < 6:
        raise NotSmf(f"header length {header_len} < 6")
    fmt, ntracks, division = struct.unpack(">HHH", data[8:14])
    if fmt not in (0, 1):
        raise UnsupportedFormat(f"SMF format {fmt}")
    if division & 0x8000:
        raise UnsupportedTimeDivision("SMPTE time division")
    if division == 0:
        raise UnsupportedTimeDivision("zero ticks per quarter")

    pos = 8 + header_len
    tracks: list[MidiTrack] = []
    while len(tracks) < ntracks and pos < len(data):
        if pos + 8 > len(data):
            raise Truncated("chunk header cut short")
        tag = data[pos:pos + 4]
        length = struct.unpack(">I", data[pos + 4:pos + 8])[0]
        body_end = pos + 8 + length
        if body_end > len(data):
            raise Truncated(f"chunk {tag!r} cut short")
        if tag == b"MTrk":
            tracks.append(_parse_track(data[pos + 8:body_end]))
        # unknown chunk types are skipped per the SMF spec
        pos = body_end
    if len(tracks) < ntracks:
        raise Truncated(f"header promises {ntracks} tracks, found {len(tracks)}")
    if fmt == 0 and len(tracks) != 1:
        raise NotSmf(f"format 0 with {len(tracks)} tracks")
    return MidiFile(fmt, division, tuple(tracks))


_CHANNEL_DATA_LEN = {0x8: 2, 0x9: 2, 0xA: 2, 0xB: 2, 0xC: 1, 0xD: 1, 0xE: 2}


def _parse_track(body: bytes) -> MidiTrack:
    events: list[MidiEvent] = []
    pos = 0
    tick = 0
    running: Optional[int] = None
    ended = False
    while pos < len(body) and not ended:
        delta, used = decode_vlq(body, pos)
        pos += used
        tick += delta
        if pos >= len(body):
            raise Truncated("event cut short after delta time")
        status = body[pos]
        if status & 0x80:
            pos += 1
        else:
            if running is None:
                raise NotSmf("data byte with no running status")
            status = running

        if status == 0xFF:
            if pos >= len(body):
                raise Truncated("meta event cut short")
            meta_type = body[pos]
            length, used = decode_vlq(body, pos + 1)
            start = pos + 1 + used
            if start + length > len(body):
                raise Truncated("meta payload cut short")
            payload = body[start:start + length]
            pos = start + length
            running = None
            if meta_type == 0x2F:
                events.append(MidiEvent(EventKind.META_END, tick))
                ended = True
            elif meta_type == 0x51 and length == 3:
                events.append(MidiEvent(EventKind.META_TEMPO, tick, data=payload))
            else:
                raw = bytes([0xFF, meta_type]) + encode_vlq(length) + payload
                events.append(MidiEvent(EventKind.OTHER, tick, data=raw))
        elif status in (0xF0, 0xF7):
            length, used = decode_vlq(body, pos)
            start = pos + used
            if start + length > len(body):
                raise Truncated("sysex payload cut short")
            payload = body[start:start + length]
            pos = start + length
            running = None
            raw = bytes([status]) + encode_vlq(length) + payload
            events.append(MidiEvent(EventKind.OTHER, tick, data=raw))
        elif status >= 0xF0:
            raise NotSmf(f"unexpected system message 0x{status:02X} in track")
        else:
            running = status
            kind_nibble = status >> 4
            channel = status & 0x0F
            need = _CHANNEL_DATA_LEN[kind_nibble]
            if pos + need > len(body):
                raise Truncated("channel message cut short")
            operands = body[pos:pos + need]
            pos += need
            events.append(_channel_event(kind_nibble, channel, operands, tick, status))
    if not events or events[-1].kind is not EventKind.META_END:
        events.append(MidiEvent(EventKind.META_END, tick))
    return MidiTrack(tuple(events))


def _channel_event(kind_nibble: int, channel: int, operands: bytes, tick: int, status: int) -> MidiEvent:
    if kind_nibble == 0x9:
        pitch, velocity = operands
        if velocity == 0:
            return MidiEvent(EventKind.NOTE_OFF, tick, channel, pitch, 0)
        return MidiEvent(EventKind.NOTE_ON, tick, channel, pitch, velocity)
    if kind_nibble == 0x8:
        pitch, velocity = operands
        return MidiEvent(EventKind.NOTE_OFF, tick, channel, pitch, velocity)
    if kind_nibble == 0xB:
        return MidiEvent(EventKind.CONTROL_CHANGE, tick, channel, data=bytes(operands))
    if kind_nibble == 0xC:
        return MidiEvent(EventKind.PROGRAM_CHANGE, tick, channel, data=bytes(operands))
    return MidiEvent(EventKind.OTHER, tick, channel, data=bytes([status]) + bytes(operands))


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def serialize_smf(midi_file: MidiFile) -> bytes:
    """Render a MidiFile back to bytes; inverse of parse_smf at event level."""
    out = bytearray(b"MThd")
    out += struct.pack(">IHHH", 6, midi_file.format, len(midi_file.tracks), midi_file.ppq)
    for track in midi_file.tracks:
        body = _serialize_track(track)
        out += b"MTrk" + struct.pack(">I", len(body)) + body
    return bytes(out)


def _serialize_track(track: MidiTrack) -> bytes:
    body = bytearray()
    prev_tick = 0
    ended = False
    for ev in track.events:
        if ev.tick < prev_tick:
            raise ValueError(f"ticks not monotone: {ev.tick} after {prev_tick}")
        if ended:
            raise ValueError("events after end-of-track")
        body += encode_vlq(ev.tick - prev_tick)
        body += _event_bytes(ev)
        prev_tick = ev.tick
        ended = ev.kind is EventKind.META_END
    if not ended:
        body += encode_vlq(0) + b"\xff\x2f\x00"
    return bytes(body)


def _event_bytes(ev: MidiEvent) -> bytes:
    if ev.kind is EventKind.NOTE_ON:
        if ev.velocity == 0:
            raise ValueError("note_on with velocity 0; normalize to note_off first")
        return bytes([0x90 | ev.channel, ev.pitch, ev.velocity])
    if ev.kind is EventKind.NOTE_OFF:
        return bytes([0x80 | ev.channel, ev.pitch, ev.velocity])
    if ev.kind is EventKind.CONTROL_CHANGE:
        if len(ev.data) != 2:
            raise ValueError("control_change needs (controller, value) payload")
        return bytes([0xB0 | ev.channel]) + ev.data
    if ev.kind is EventKind.PROGRAM_CHANGE:
        if len(ev.data) != 1:
            raise ValueError("program_change needs (program,) payload")
        return bytes([0xC0 | ev.channel]) + ev.data
    if ev.kind is EventKind.META_TEMPO:
        if len(ev.data) != 3:
            raise ValueError("meta_tempo needs a 3-byte payload")
        return b"\xff\x51\x03" + ev.data
    if ev.kind is EventKind.META_END:
        return b"\xff\x2f\x00"
    if not ev.data or not ev.data[0] & 0x80:
        raise ValueError("opaque event must start with a status byte")
    return ev.data


# --------------------------------------------------------------------------
# Realtime stream decoding
# --------------------------------------------------------------------------

_SYSTEM_COMMON_DATA_LEN = {0xF1: 1, 0xF2: 2, 0xF3: 1}


class RealtimeDecoder:
    """Incremental decoder for a live MIDI 1.0 byte stream.

    One instance per input stream.  Feed bytes one at a time; a MidiEvent is
    returned whenever a message completes.  System-realtime bytes (0xF8-0xFF)
    are transparent and never disturb an in-flight message.  Unusable bytes
    are dropped and counted in `skipped`.
    """

    def __init__(self) -> None:
        self._status: Optional[int] = None
        self._buf: list[int] = []
        self._in_sysex = False
        self._pending_skip = 0
        self.skipped = 0

    def feed(self, byte: int, tick: int = 0) -> Optional[MidiEvent]:
        if not 0 <= byte <= 0xFF:
            raise ValueError(f"not a byte: {byte}")
        if byte >= 0xF8:  # system realtime: transparent
            return None
        if byte & 0x80:
            return self._on_status(byte)
        return self._on_data(byte, tick)

    def _on_status(self, byte: int) -> None:
        self._buf.clear()
        self._pending_skip = 0
        self._in_sysex = False
        if byte == 0xF0:
            self._in_sysex = True
            self._status = None
        elif byte == 0xF7:
            self._status = None
        elif byte >= 0xF0:  # other system common: swallow with operands
            self._status = None
            self._pending_skip = _SYSTEM_COMMON_DATA_LEN.get(byte, 0)
            if byte in (0xF4, 0xF5):
                self.skipped += 1
        else:
            self._status = byte
        return None

    def _on_data(self, byte: int, tick: int) -> Optional[MidiEvent]:
        if self._in_sysex:
            return None
        if self._pending_skip:
            self._pending_skip -= 1
            return None
        if self._status is None:
            self.skipped += 1
            return None
        self._buf.append(byte)
        kind_nibble = self._status >> 4
        if len(self._buf) < _CHANNEL_DATA_LEN[kind_nibble]:
            return None
        operands = bytes(self._buf)
        self._buf.clear()  # keep status: running status
        return _channel_event(kind_nibble, self._status & 0x0F, operands, tick, self._status)
