"""SMF codec and realtime decoder tests.

The minimal file bytes below were written out by hand and cross-checked with
an unrelated MIDI dumper before being frozen here.
"""

from __future__ import annotations

import random

import pytest

from keycoach.midi import (
    VLQ_MAX,
    EventKind,
    MalformedVlq,
    MidiEvent,
    MidiFile,
    MidiTrack,
    NotSmf,
    RealtimeDecoder,
    Truncated,
    UnsupportedFormat,
    UnsupportedTimeDivision,
    VlqRange,
    decode_vlq,
    encode_vlq,
    end_event,
    note_off,
    note_on,
    parse_smf,
    serialize_smf,
    tempo_event,
)

# Format 0, ppq 480, one C4 note held for one beat.
MINIMAL_SMF = bytes([
    0x4D, 0x54, 0x68, 0x64, 0x00, 0x00, 0x00, 0x06,  # MThd, length 6
    0x00, 0x00, 0x00, 0x01, 0x01, 0xE0,              # format 0, 1 track, ppq 480
    0x4D, 0x54, 0x72, 0x6B, 0x00, 0x00, 0x00, 0x0D,  # MTrk, length 13
    0x00, 0x90, 0x3C, 0x50,                          # +0    note_on  ch0 60 vel 80
    0x83, 0x60, 0x80, 0x3C, 0x00,                    # +480  note_off ch0 60
    0x00, 0xFF, 0x2F, 0x00,                          # +0    end of track
])


def test_decode_vlq_examples():
    assert decode_vlq(bytes([0x00])) == (0, 1)
    assert decode_vlq(bytes([0x81, 0x48])) == (200, 2)
    assert decode_vlq(bytes([0xFF, 0xFF, 0xFF, 0x7F])) == (268435455, 4)


def test_decode_vlq_errors():
    with pytest.raises(Truncated):
        decode_vlq(b"")
    with pytest.raises(Truncated):
        decode_vlq(bytes([0x81]))
    with pytest.raises(MalformedVlq):
        decode_vlq(bytes([0xFF, 0xFF, 0xFF, 0xFF, 0x7F]))


def test_encode_vlq_examples():
    assert encode_vlq(0) == bytes([0x00])
    assert encode_vlq(200) == bytes([0x81, 0x48])
    assert encode_vlq(128) == bytes([0x81, 0x00])


def test_encode_vlq_range():
    with pytest.raises(VlqRange):
        encode_vlq(-1)
    with pytest.raises(VlqRange):
        encode_vlq(VLQ_MAX + 1)


def test_vlq_identity_at_boundaries():
    boundaries = [0, 1, 127, 128, 16383, 16384, 2097151, 2097152, VLQ_MAX]
    for value in boundaries:
        encoded = encode_vlq(value)
        assert decode_vlq(encoded) == (value, len(encoded))


def test_parse_minimal_file():
    mf = parse_smf(MINIMAL_SMF)
    assert mf.format == 0
    assert mf.ppq == 480
    assert len(mf.tracks) == 1
    events = mf.tracks[0].events
    assert len(events) == 3
    assert events[0] == MidiEvent(EventKind.NOTE_ON, 0, 0, 60, 80)
    assert events[1] == MidiEvent(EventKind.NOTE_OFF, 480, 0, 60, 0)
    assert events[2].kind is EventKind.META_END


def test_bad_magic():
    with pytest.raises(NotSmf):
        parse_smf(b"MThe" + MINIMAL_SMF[4:])


def test_note_on_velocity_zero_normalized():
    data = bytearray(MINIMAL_SMF)
    # rewrite the note_off (0x80 0x3C 0x00) as note_on with velocity 0
    idx = data.index(0x80, 20)
    data[idx] = 0x90
    mf = parse_smf(bytes(data))
    assert mf.tracks[0].events[1].kind is EventKind.NOTE_OFF


def test_running_status():
    # two note_ons sharing one status byte
    body = bytes([0x00, 0x90, 0x3C, 0x50, 0x10, 0x3E, 0x40, 0x00, 0xFF, 0x2F, 0x00])
    data = (
        b"MThd" + (6).to_bytes(4, "big") + (0).to_bytes(2, "big")
        + (1).to_bytes(2, "big") + (480).to_bytes(2, "big")
        + b"MTrk" + len(body).to_bytes(4, "big") + body
    )
    events = parse_smf(data).tracks[0].events
    assert events[0] == MidiEvent(EventKind.NOTE_ON, 0, 0, 60, 80)
    assert events[1] == MidiEvent(EventKind.NOTE_ON, 16, 0, 62, 64)


def test_smpte_division_rejected():
    data = bytearray(MINIMAL_SMF)
    data[12] = 0xE7  # negative division -> SMPTE
    with pytest.raises(UnsupportedTimeDivision):
        parse_smf(bytes(data))


def test_format_two_rejected():
    data = bytearray(MINIMAL_SMF)
    data[9] = 2
    with pytest.raises(UnsupportedFormat):
        parse_smf(bytes(data))


def test_truncated_chunk():
    with pytest.raises(Truncated):
        parse_smf(MINIMAL_SMF[:-4])


def test_serialize_round_trip_minimal():
    mf = parse_smf(MINIMAL_SMF)
    again = parse_smf(serialize_smf(mf))
    assert again == mf


def test_serialize_empty_track_list():
    mf = MidiFile(1, 480, ())
    again = parse_smf(serialize_smf(mf))
    assert again.format == 1 and again.ppq == 480 and again.tracks == ()


def random_midi_file(rng: random.Random) -> MidiFile:
    fmt = rng.choice([0, 1])
    ppq = rng.choice([96, 192, 480, 960])
    n_tracks = 1 if fmt == 0 else rng.randint(1, 4)
    tracks = []
    for _ in range(n_tracks):
        events: list[MidiEvent] = []
        tick = 0
        for _ in range(rng.randint(0, 40)):
            tick += rng.randint(0, 2000)
            channel = rng.randrange(16)
            roll = rng.random()
            if roll < 0.35:
                events.append(note_on(tick, rng.randrange(128), rng.randint(1, 127), channel))
            elif roll < 0.65:
                events.append(note_off(tick, rng.randrange(128), rng.randint(0, 127), channel))
            elif roll < 0.75:
                events.append(MidiEvent(
                    EventKind.CONTROL_CHANGE, tick, channel,
                    data=bytes([rng.randrange(120), rng.randrange(128)]),
                ))
            elif roll < 0.82:
                events.append(MidiEvent(
                    EventKind.PROGRAM_CHANGE, tick, channel, data=bytes([rng.randrange(128)]),
                ))
            elif roll < 0.90:
                events.append(tempo_event(tick, rng.randint(200_000, 1_500_000)))
            elif roll < 0.96:
                payload = bytes(rng.randrange(128) for _ in range(rng.randint(0, 8)))
                raw = bytes([0xFF, rng.choice([0x01, 0x03, 0x58, 0x59])]) + encode_vlq(len(payload)) + payload
                events.append(MidiEvent(EventKind.OTHER, tick, data=raw))
            else:
                payload = bytes(rng.randrange(128) for _ in range(rng.randint(0, 6)))
                raw = bytes([0xF0]) + encode_vlq(len(payload)) + payload
                events.append(MidiEvent(EventKind.OTHER, tick, data=raw))
        events.append(end_event(tick))
        tracks.append(MidiTrack(tuple(events)))
    return MidiFile(fmt, ppq, tuple(tracks))


def test_round_trip_random_files():
    rng = random.Random(0xC0DE)
    for _ in range(100):
        mf = random_midi_file(rng)
        assert parse_smf(serialize_smf(mf)) == mf


def test_parsed_ticks_monotone():
    rng = random.Random(7)
    for _ in range(25):
        mf = parse_smf(serialize_smf(random_midi_file(rng)))
        for track in mf.tracks:
            ticks = [ev.tick for ev in track.events]
            assert ticks == sorted(ticks)


def test_realtime_basic_and_running_status():
    dec = RealtimeDecoder()
    assert dec.feed(0x90) is None
    assert dec.feed(0x3C) is None
    ev = dec.feed(0x50)
    assert ev == MidiEvent(EventKind.NOTE_ON, 0, 0, 60, 80)
    # running status: next two data bytes reuse 0x90
    assert dec.feed(0x3E) is None
    ev = dec.feed(0x40)
    assert ev == MidiEvent(EventKind.NOTE_ON, 0, 0, 62, 64)


def test_realtime_velocity_zero_is_note_off():
    dec = RealtimeDecoder()
    for b in (0x90, 0x3C):
        dec.feed(b)
    ev = dec.feed(0x00)
    assert ev is not None and ev.kind is EventKind.NOTE_OFF and ev.pitch == 60


def test_realtime_clock_bytes_do_not_disturb_assembly():
    dec = RealtimeDecoder()
    out = [dec.feed(b) for b in (0x90, 0xF8, 0x3C, 0xFE, 0x50)]
    events = [ev for ev in out if ev is not None]
    assert events == [MidiEvent(EventKind.NOTE_ON, 0, 0, 60, 80)]


def test_realtime_stray_data_bytes_counted():
    dec = RealtimeDecoder()
    assert dec.feed(0x3C) is None
    assert dec.feed(0x50) is None
    assert dec.skipped == 2


def test_realtime_sysex_swallowed():
    dec = RealtimeDecoder()
    for b in (0xF0, 0x01, 0x02, 0x03, 0xF7):
        assert dec.feed(b) is None
    # running status was cancelled; next data byte is stray
    assert dec.feed(0x3C) is None
    assert dec.skipped == 1


def test_realtime_values_in_range():
    rng = random.Random(3)
    dec = RealtimeDecoder()
    for _ in range(5000):
        ev = dec.feed(rng.randrange(256))
        if ev is not None and ev.kind in (EventKind.NOTE_ON, EventKind.NOTE_OFF):
            assert 0 <= ev.pitch <= 127
            assert 0 <= ev.velocity <= 127
