import json
from pathlib import Path

import pytest

from keycoach.modes import (
    FallingNote,
    HighlightFrame,
    KEY_COUNT,
    KeyColor,
    PressClass,
)
from keycoach.protocol import (
    CLIENT_TYPES,
    ProtocolError,
    SERVER_TYPES,
    canonical_json,
    error_message,
    frame_message,
    frame_payload,
    metronome_message,
    press_message,
    validate_client_message,
    validate_server_message,
)
from keycoach.theory import Chord, Quality

CORPUS = json.loads((Path(__file__).parent.parent / "docs" / "protocol-examples.json").read_text())


def blank_colors():
    return (KeyColor.OFF,) * KEY_COUNT


class TestClientValidation:
    def test_note_on_normalizes(self):
        msg = validate_client_message({"type": "note_on", "pitch": 60, "velocity": 80})
        assert msg == {"type": "note_on", "pitch": 60, "velocity": 80}

    def test_extra_fields_dropped(self):
        msg = validate_client_message({"type": "start", "junk": 1})
        assert msg == {"type": "start"}

    def test_unknown_type_rejected(self):
        with pytest.raises(ProtocolError):
            validate_client_message({"type": "selfdestruct"})

    def test_missing_field_rejected(self):
        with pytest.raises(ProtocolError):
            validate_client_message({"type": "note_on"})

    def test_pitch_range_checked(self):
        with pytest.raises(ProtocolError):
            validate_client_message({"type": "note_on", "pitch": 128, "velocity": 1})

    def test_bool_is_not_an_int(self):
        with pytest.raises(ProtocolError):
            validate_client_message({"type": "note_off", "pitch": True})

    def test_non_object_rejected(self):
        with pytest.raises(ProtocolError):
            validate_client_message([1, 2, 3])

    def test_tempo_coerced_to_float(self):
        msg = validate_client_message({"type": "set_tempo", "tempo_bpm": 90})
        assert msg["tempo_bpm"] == 90.0
        assert isinstance(msg["tempo_bpm"], float)


class TestServerValidation:
    def test_metronome_shape(self):
        msg = validate_server_message(metronome_message(480, False))
        assert msg == {"type": "metronome_event", "tick": 480, "accent": False}

    def test_bad_key_colors_length(self):
        frame = frame_message(HighlightFrame(0, blank_colors()), 1)
        frame["key_colors"] = frame["key_colors"][:-1]
        with pytest.raises(ProtocolError):
            validate_server_message(frame)

    def test_bad_press_class_value(self):
        msg = press_message(60, PressClass.EARLY, -12.0)
        msg["press_class"] = "banana"
        with pytest.raises(ProtocolError):
            validate_server_message(msg)

    def test_error_needs_message(self):
        with pytest.raises(ProtocolError):
            validate_server_message({"type": "error"})
        assert validate_server_message(error_message("x")) == {"type": "error", "message": "x"}


class TestFramePayload:
    def test_key_colors_pack_as_digits(self):
        colors = list(blank_colors())
        colors[0] = KeyColor.PROGRESSION_YELLOW
        colors[39] = KeyColor.CHORD_TONE_PINK
        colors[87] = KeyColor.APPROACH_PURPLE
        payload = frame_payload(HighlightFrame(96, tuple(colors)))
        assert len(payload["key_colors"]) == 88
        assert payload["key_colors"][0] == "1"
        assert payload["key_colors"][39] == "2"
        assert payload["key_colors"][87] == "3"
        assert payload["frame_tick"] == 96
        assert payload["active_chord"] is None

    def test_falling_notes_as_quadruples(self):
        falling = (FallingNote(40, 480, 240, KeyColor.PROGRESSION_YELLOW),)
        chord = Chord(2, Quality.MIN7)
        payload = frame_payload(HighlightFrame(0, blank_colors(), falling, chord))
        assert payload["falling"] == [[40, 480, 240, 1]]
        assert payload["active_chord"] == {"root": 2, "quality": "min7", "name": "Dmin7"}

    def test_frame_message_carries_seq(self):
        msg = frame_message(HighlightFrame(0, blank_colors()), 7)
        assert msg["type"] == "frame"
        assert msg["seq"] == 7


class TestCanonicalJson:
    def test_sorted_and_compact(self):
        assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'

    def test_stable_across_dict_order(self):
        a = {"type": "note_on", "pitch": 60, "velocity": 80}
        b = {"velocity": 80, "pitch": 60, "type": "note_on"}
        assert canonical_json(a) == canonical_json(b)


class TestCorpusRoundTrip:
    def test_corpus_covers_every_type(self):
        assert {m["type"] for m in CORPUS["client"]} == set(CLIENT_TYPES)
        assert {m["type"] for m in CORPUS["server"]} == set(SERVER_TYPES)

    @pytest.mark.parametrize("msg", CORPUS["client"], ids=lambda m: m["type"])
    def test_client_serialize_deserialize_fixed_point(self, msg):
        assert canonical_json(validate_client_message(msg)) == canonical_json(msg)

    @pytest.mark.parametrize("msg", CORPUS["server"], ids=lambda m: m["type"])
    def test_server_serialize_deserialize_fixed_point(self, msg):
        assert canonical_json(validate_server_message(msg)) == canonical_json(msg)
