"""Chord recognition from held notes and motif relationship classification."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .theory import CHORD_TEMPLATES, Chord, Quality, Scale, chord_tones, scale_pitch_classes

DEFAULT_TICK_TOLERANCE = 60  # 1/8 beat at 480 ppq
MOTIF_MAX_NOTES = 16
MOTIF_REST_BEATS = 1.0


class NotDiatonic(ValueError):
    """A motif pitch falls outside the scale required for degree arithmetic."""


# Pitch-class sets are octave-free, so templates sharing a set (min7/maj6,
# min6/min7b5, the four dim7 rotations) are resolved by the bass note.
_SET_TO_CHORDS: dict[frozenset[int], list[Chord]] = {}
for _root in range(12):
    for _quality in Quality:
        _chord = Chord(_root, _quality)
        _SET_TO_CHORDS.setdefault(chord_tones(_chord), []).append(_chord)


@dataclass(frozen=True)
class HeldNotes:
    """Snapshot of currently sounding keys: (pitch, onset_ms) pairs."""

    notes: frozenset[tuple[int, float]]

    @classmethod
    def of(cls, pitches: Iterable[int]) -> "HeldNotes":
        return cls(frozenset((p, 0.0) for p in pitches))

    @property
    def pitches(self) -> frozenset[int]:
        return frozenset(p for p, _ in self.notes)


def recognize_chord(held: HeldNotes | Iterable[int]) -> Optional[Chord]:
    """Identify the chord whose tones equal the held pitch-class set.

    Invariant under inversion and octave doubling.  Fewer than three distinct
    pitch classes, or no matching template, yields None.  When several chords
    share the set, the one rooted on the lowest sounding pitch wins, falling
    back to the numerically smallest root.
    """
    pitches = held.pitches if isinstance(held, HeldNotes) else frozenset(held)
    if not pitches:
        return None
    pcs = frozenset(p % 12 for p in pitches)
    if len(pcs) < 3:
        return None
    candidates = _SET_TO_CHORDS.get(pcs)
    if not candidates:
        return None
    if len(candidates) == 1:
        return candidates[0]
    bass = min(pitches) % 12
    for chord in candidates:
        if chord.root == bass:
            return chord
    return min(candidates, key=lambda c: c.root)


@dataclass(frozen=True)
class MotifNote:
    pitch: int
    onset_tick: int
    duration_ticks: int


@dataclass(frozen=True)
class Motif:
    """A short phrase: ordered notes with strictly increasing onsets."""

    notes: tuple[MotifNote, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "notes", tuple(self.notes))
        if len(self.notes) < 2:
            raise ValueError("a motif needs at least 2 notes")
        onsets = [n.onset_tick for n in self.notes]
        if any(b <= a for a, b in zip(onsets, onsets[1:])):
            raise ValueError("motif onsets must be strictly increasing")

    @classmethod
    def of(cls, triples: Iterable[tuple[int, int, int]]) -> "Motif":
        return cls(tuple(MotifNote(*t) for t in triples))

    @property
    def pitches(self) -> tuple[int, ...]:
        return tuple(n.pitch for n in self.notes)

    def aligned_onsets(self) -> tuple[int, ...]:
        first = self.notes[0].onset_tick
        return tuple(n.onset_tick - first for n in self.notes)

    def durations(self) -> tuple[int, ...]:
        return tuple(n.duration_ticks for n in self.notes)

    def inter_onset_intervals(self) -> tuple[int, ...]:
        onsets = [n.onset_tick for n in self.notes]
        return tuple(b - a for a, b in zip(onsets, onsets[1:]))


class RelationKind(Enum):
    REPEAT = "repeat"
    SEQUENCE = "sequence"
    RHYTHMIC_VARIATION = "rhythmic_variation"
    MELODIC_VARIATION = "melodic_variation"
    UNRELATED = "unrelated"


@dataclass(frozen=True)
class MotifRelation:
    kind: RelationKind
    shift_degrees: int = 0  # nonzero only for SEQUENCE

    def __post_init__(self) -> None:
        if self.kind is RelationKind.SEQUENCE and self.shift_degrees == 0:
            raise ValueError("a sequence must shift by a nonzero degree count")


def _within(a: Sequence[int], b: Sequence[int], tolerance: int) -> bool:
    return len(a) == len(b) and all(abs(x - y) <= tolerance for x, y in zip(a, b))


def _rhythm_matches(a: Motif, b: Motif, tolerance: int) -> bool:
    return _within(a.aligned_onsets(), b.aligned_onsets(), tolerance) and _within(
        a.durations(), b.durations(), tolerance
    )


def is_repeat(a: Motif, b: Motif, tick_tolerance: int = DEFAULT_TICK_TOLERANCE) -> bool:
    """Same pitches in the same rhythm, ignoring where the phrase starts."""
    return a.pitches == b.pitches and _rhythm_matches(a, b, tick_tolerance)


def _degree_index(pitch: int, ordered_pcs: list[int]) -> int:
    """Position of a pitch in the ascending sequence of all scale pitches."""
    try:
        i = ordered_pcs.index(pitch % 12)
    except ValueError:
        raise NotDiatonic(f"pitch {pitch} not in scale") from None
    return (pitch // 12) * 7 + i


def _pitch_at_degree_index(index: int, ordered_pcs: list[int]) -> int:
    octave, i = divmod(index, 7)
    return octave * 12 + ordered_pcs[i]


def transpose_degrees(pitch: int, shift: int, scale: Scale) -> int:
    """Move a scale pitch up or down by whole scale degrees."""
    ordered = sorted(scale_pitch_classes(scale))
    return _pitch_at_degree_index(_degree_index(pitch, ordered) + shift, ordered)


def is_sequence(
    a: Motif,
    b: Motif,
    scale: Scale,
    tick_tolerance: int = DEFAULT_TICK_TOLERANCE,
) -> Optional[int]:
    """Degree shift that maps motif a onto motif b within the scale, if any.

    Returns the signed shift in scale degrees (never 0: an unshifted match is
    a repeat, not a sequence), or None.  Raises NotDiatonic when either motif
    leaves the scale.
    """
    ordered = sorted(scale_pitch_classes(scale))
    a_idx = [_degree_index(p, ordered) for p in a.pitches]
    b_idx = [_degree_index(p, ordered) for p in b.pitches]
    if len(a_idx) != len(b_idx) or not _rhythm_matches(a, b, tick_tolerance):
        return None
    shift = b_idx[0] - a_idx[0]
    if shift == 0:
        return None
    if all(x + shift == y for x, y in zip(a_idx, b_idx)):
        return shift
    return None


def classify_variation(
    a: Motif,
    b: Motif,
    tick_tolerance: int = DEFAULT_TICK_TOLERANCE,
) -> MotifRelation:
    """Repeat / rhythmic variation / melodic variation / unrelated.

    Sequence detection needs a scale and stays the caller's concern via
    is_sequence.
    """
    if is_repeat(a, b, tick_tolerance):
        return MotifRelation(RelationKind.REPEAT)
    if a.pitches == b.pitches:
        return MotifRelation(RelationKind.RHYTHMIC_VARIATION)
    if _rhythm_matches(a, b, tick_tolerance):
        return MotifRelation(RelationKind.MELODIC_VARIATION)
    return MotifRelation(RelationKind.UNRELATED)


def rhythmic_match(a: Motif, b: Motif, tick_tolerance: int = DEFAULT_TICK_TOLERANCE) -> bool:
    """Same note count and inter-onset intervals within tolerance; pitches ignored."""
    return _within(a.inter_onset_intervals(), b.inter_onset_intervals(), tick_tolerance)


def segment_motifs(
    notes: Sequence[tuple[int, int, int]],
    ppq: int,
    rest_beats: float = MOTIF_REST_BEATS,
    max_notes: int = MOTIF_MAX_NOTES,
) -> list[list[tuple[int, int, int]]]:
    """Split (pitch, onset, duration) notes into phrases.

    A boundary opens after a rest of at least `rest_beats`, or when a phrase
    reaches `max_notes`.  Segments may be shorter than a valid Motif; the
    caller decides what to do with fragments.
    """
    rest_ticks = int(rest_beats * ppq)
    ordered = sorted(notes, key=lambda n: n[1])
    segments: list[list[tuple[int, int, int]]] = []
    current: list[tuple[int, int, int]] = []
    prev_end = None
    for note in ordered:
        if current and (
            len(current) >= max_notes
            or (prev_end is not None and note[1] - prev_end >= rest_ticks)
        ):
            segments.append(current)
            current = []
        current.append(note)
        end = note[1] + note[2]
        prev_end = end if prev_end is None else max(prev_end, end)
    if current:
        segments.append(current)
    return segments
