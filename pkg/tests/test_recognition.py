"""Chord recognition and motif relation tests."""

from __future__ import annotations

import random

import pytest

from keycoach.recognition import (
    HeldNotes,
    Motif,
    MotifRelation,
    NotDiatonic,
    RelationKind,
    classify_variation,
    is_repeat,
    is_sequence,
    recognize_chord,
    rhythmic_match,
    segment_motifs,
    transpose_degrees,
)
from keycoach.theory import CHORD_TEMPLATES, Chord, Mode, Quality, Scale, chord_tones


def brute_force_matches(pcs: frozenset[int]) -> list[Chord]:
    """All chords whose transposed template equals the set (oracle path)."""
    out = []
    for root in range(12):
        for quality in Quality:
            if {(root + o) % 12 for o in CHORD_TEMPLATES[quality]} == pcs:
                out.append(Chord(root, quality))
    return out


def test_recognize_examples():
    assert recognize_chord([64, 67, 71, 72]) == Chord(0, Quality.MAJ7)
    assert recognize_chord([60, 62]) is None
    # {2,5,9,0} is both Dm7 and F maj6; bass D picks Dm7
    assert recognize_chord([50, 53, 57, 60]) == Chord(2, Quality.MIN7)


def test_recognize_bass_disambiguates_shared_sets():
    # same set voiced from F picks the maj6 reading
    assert recognize_chord([53, 57, 60, 62]) == Chord(5, Quality.MAJ6)
    # dim7 is fully symmetric: four roots share the set
    assert recognize_chord([60, 63, 66, 69]) == Chord(0, Quality.DIM7)
    assert recognize_chord([63, 66, 69, 72]) == Chord(3, Quality.DIM7)


def test_recognize_fewer_than_three_pitch_classes():
    assert recognize_chord([]) is None
    assert recognize_chord([60]) is None
    assert recognize_chord([60, 72, 64, 76]) is None  # two classes, doubled


def test_recognize_held_notes_wrapper():
    held = HeldNotes(frozenset([(50, 0.0), (53, 10.0), (57, 20.0), (60, 30.0)]))
    assert recognize_chord(held) == Chord(2, Quality.MIN7)


def random_voicing(rng: random.Random, chord: Chord, n_notes: int) -> list[int]:
    """Octave-spread voicing covering every chord tone, with doublings."""
    tones = sorted(chord_tones(chord))
    pitches = set()
    for tone in tones:
        pitches.add(tone + 12 * rng.randint(2, 7))
    while len(pitches) < n_notes:
        pitches.add(rng.choice(tones) + 12 * rng.randint(2, 7))
    return sorted(pitches)


def test_recognition_invariant_under_voicing():
    rng = random.Random(21)
    for root in range(12):
        for quality in Quality:
            chord = Chord(root, quality)
            lo = len(chord_tones(chord))
            for _ in range(20):
                voicing = random_voicing(rng, chord, rng.randint(lo, 10))
                got = recognize_chord(voicing)
                assert got is not None
                assert chord_tones(got) == chord_tones(chord)


def test_non_matching_sets_return_none():
    rng = random.Random(99)
    checked = 0
    while checked < 300:
        pcs = frozenset(rng.sample(range(12), rng.randint(3, 7)))
        if brute_force_matches(pcs):
            continue
        voicing = [p + 60 for p in sorted(pcs)]
        assert recognize_chord(voicing) is None
        checked += 1


def test_recognition_agrees_with_brute_force_on_matches():
    rng = random.Random(4)
    for _ in range(300):
        pcs = frozenset(rng.sample(range(12), rng.randint(3, 5)))
        voicing = [p + 60 for p in sorted(pcs)]
        got = recognize_chord(voicing)
        matches = brute_force_matches(pcs)
        if not matches:
            assert got is None
        else:
            assert got in matches


M1 = Motif.of([(60, 0, 240), (62, 240, 240), (64, 480, 480)])


def test_is_repeat_identity():
    assert is_repeat(M1, M1, 0)


def test_is_repeat_ignores_global_offset():
    shifted = Motif.of([(60, 1920, 240), (62, 2160, 240), (64, 2400, 480)])
    assert is_repeat(M1, shifted, 0)


def test_is_repeat_pitch_mismatch():
    other = Motif.of([(60, 0, 240), (62, 240, 240), (65, 480, 480)])
    assert not is_repeat(M1, other, 0)


def test_is_sequence_examples():
    c_major = Scale(0, Mode.IONIAN)
    up = Motif.of([(62, 0, 240), (64, 240, 240), (65, 480, 480)])
    assert is_sequence(M1, up, c_major, 0) == 1
    assert is_sequence(up, M1, c_major, 0) == -1
    assert is_sequence(M1, M1, c_major, 0) is None  # shift 0 is a repeat


def test_is_sequence_brute_force_shift_oracle():
    c_major = Scale(0, Mode.IONIAN)
    rng = random.Random(13)
    for _ in range(50):
        base = [60, 64, 65, 67]
        onsets = [0, 240, 480, 720]
        a = Motif.of([(p, o, 120) for p, o in zip(base, onsets)])
        shift = rng.choice([-7, -3, -1, 1, 2, 5, 7])
        shifted = [transpose_degrees(p, shift, c_major) for p in base]
        b = Motif.of([(p, o, 120) for p, o in zip(shifted, onsets)])
        # oracle: scan every candidate shift in [-7, 7]
        found = [
            k
            for k in range(-7, 8)
            if k != 0 and [transpose_degrees(p, k, c_major) for p in a.pitches] == list(b.pitches)
        ]
        assert found == [shift]
        assert is_sequence(a, b, c_major, 0) == shift


def test_is_sequence_rejects_non_diatonic():
    c_major = Scale(0, Mode.IONIAN)
    chromatic = Motif.of([(61, 0, 240), (62, 240, 240)])
    with pytest.raises(NotDiatonic):
        is_sequence(chromatic, chromatic, c_major, 0)


def test_classify_variation_cases():
    assert classify_variation(M1, M1, 0).kind is RelationKind.REPEAT
    doubled = Motif.of([(60, 0, 480), (62, 480, 480), (64, 960, 960)])
    assert classify_variation(M1, doubled, 0).kind is RelationKind.RHYTHMIC_VARIATION
    retoned = Motif.of([(60, 0, 240), (62, 240, 240), (67, 480, 480)])
    assert classify_variation(M1, retoned, 0).kind is RelationKind.MELODIC_VARIATION
    other = Motif.of([(50, 0, 100), (51, 777, 100)])
    assert classify_variation(M1, other, 0).kind is RelationKind.UNRELATED


def test_classify_never_repeat_when_not_repeat():
    rng = random.Random(2)
    for _ in range(100):
        a = Motif.of([(rng.randint(60, 80), i * 240, 120) for i in range(3)])
        b = Motif.of([(rng.randint(60, 80), i * 240, 120) for i in range(3)])
        rel = classify_variation(a, b, 0)
        if rel.kind is RelationKind.REPEAT:
            assert is_repeat(a, b, 0)


def test_rhythmic_match_cases():
    same_rhythm = Motif.of([(70, 0, 240), (72, 240, 240), (74, 480, 480)])
    assert rhythmic_match(M1, same_rhythm, 0)
    two_notes = Motif.of([(60, 0, 240), (62, 240, 240)])
    assert not rhythmic_match(M1, two_notes, 0)
    near = Motif.of([(60, 0, 240), (62, 480, 240), (64, 720, 240)])
    far = Motif.of([(60, 0, 240), (62, 480, 240), (64, 721, 240)])
    assert rhythmic_match(near, far, 10)


def test_sequence_relation_requires_nonzero_shift():
    with pytest.raises(ValueError):
        MotifRelation(RelationKind.SEQUENCE, 0)


def test_segment_motifs_rest_boundary():
    notes = [(60, 0, 240), (62, 240, 240), (64, 960, 240), (65, 1200, 240)]
    segments = segment_motifs(notes, ppq=480)
    assert segments == [[(60, 0, 240), (62, 240, 240)], [(64, 960, 240), (65, 1200, 240)]]


def test_segment_motifs_length_cap():
    notes = [(60, i * 100, 50) for i in range(20)]
    segments = segment_motifs(notes, ppq=480, max_notes=16)
    assert [len(s) for s in segments] == [16, 4]
