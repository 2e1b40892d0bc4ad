"""Pitch-class algebra: chords, scales, keys, progressions, approach notes.

Everything in this module is a pure function over immutable values.  Pitch
classes are plain integers 0..11 (C=0); pitches are MIDI note numbers 0..127.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

NOTE_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]

BeatCount = Union[int, float, Fraction]


class InvalidProgression(ValueError):
    """A progression step references a scale degree outside 1..7."""


class NoChordScale(LookupError):
    """No scale is mapped for the requested chord quality."""


def pc(value: int) -> int:
    """Reduce any integer to a pitch class in [0, 11]."""
    return value % 12


def pitch_class(pitch: int) -> int:
    """Pitch class of a MIDI note number."""
    return pitch % 12


def octave(pitch: int) -> int:
    """Scientific octave of a MIDI note number (60 -> 4)."""
    return pitch // 12 - 1


def pc_name(value: int) -> str:
    return NOTE_NAMES[pc(value)]


class Quality(Enum):
    """Chord quality, keyed by its interval template."""

    MAJ7 = "maj7"
    MIN7 = "min7"
    DOM7 = "dom7"
    MIN7B5 = "min7b5"
    DIM7 = "dim7"
    MAJ6 = "maj6"
    MIN6 = "min6"
    TRIAD_MAJ = "maj"
    TRIAD_MIN = "min"


# Semitone offsets from the root, strictly increasing, first always 0.
CHORD_TEMPLATES: dict[Quality, tuple[int, ...]] = {
    Quality.MAJ7: (0, 4, 7, 11),
    Quality.MIN7: (0, 3, 7, 10),
    Quality.DOM7: (0, 4, 7, 10),
    Quality.MIN7B5: (0, 3, 6, 10),
    Quality.DIM7: (0, 3, 6, 9),
    Quality.MAJ6: (0, 4, 7, 9),
    Quality.MIN6: (0, 3, 7, 9),
    Quality.TRIAD_MAJ: (0, 4, 7),
    Quality.TRIAD_MIN: (0, 3, 7),
}


class Mode(Enum):
    """The seven diatonic modes."""

    IONIAN = "ionian"
    DORIAN = "dorian"
    PHRYGIAN = "phrygian"
    LYDIAN = "lydian"
    MIXOLYDIAN = "mixolydian"
    AEOLIAN = "aeolian"
    LOCRIAN = "locrian"


# Interval patterns from the tonic; each mode is a rotation of the ionian
# pattern 2-2-1-2-2-2-1.
MODE_INTERVALS: dict[Mode, tuple[int, ...]] = {
    Mode.IONIAN: (0, 2, 4, 5, 7, 9, 11),
    Mode.DORIAN: (0, 2, 3, 5, 7, 9, 10),
    Mode.PHRYGIAN: (0, 1, 3, 5, 7, 8, 10),
    Mode.LYDIAN: (0, 2, 4, 6, 7, 9, 11),
    Mode.MIXOLYDIAN: (0, 2, 4, 5, 7, 9, 10),
    Mode.AEOLIAN: (0, 2, 3, 5, 7, 8, 10),
    Mode.LOCRIAN: (0, 1, 3, 5, 6, 8, 10),
}

# Semitones from a mode's tonic down to the tonic of its parent ionian scale.
MODE_PARENT_OFFSET: dict[Mode, int] = {
    mode: MODE_INTERVALS[Mode.IONIAN][i] for i, mode in enumerate(Mode)
}


class Tonality(Enum):
    MAJOR = "major"
    MINOR = "minor"


@dataclass(frozen=True)
class Chord:
    root: int
    quality: Quality

    def __post_init__(self) -> None:
        object.__setattr__(self, "root", pc(self.root))

    @property
    def name(self) -> str:
        return f"{pc_name(self.root)}{self.quality.value}"


@dataclass(frozen=True)
class Scale:
    tonic: int
    mode: Mode

    def __post_init__(self) -> None:
        object.__setattr__(self, "tonic", pc(self.tonic))

    @property
    def name(self) -> str:
        return f"{pc_name(self.tonic)} {self.mode.value}"


@dataclass(frozen=True)
class Key:
    tonic: int
    tonality: Tonality = Tonality.MAJOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "tonic", pc(self.tonic))

    @property
    def scale(self) -> Scale:
        mode = Mode.IONIAN if self.tonality is Tonality.MAJOR else Mode.AEOLIAN
        return Scale(self.tonic, mode)

    @property
    def name(self) -> str:
        return f"{pc_name(self.tonic)} {self.tonality.value}"


@dataclass(frozen=True)
class ProgressionStep:
    degree: int  # scale degree 1..7
    quality: Quality
    duration_beats: BeatCount = 4

    def __post_init__(self) -> None:
        if not 1 <= self.degree <= 7:
            raise InvalidProgression(f"scale degree out of range: {self.degree}")
        if self.duration_beats <= 0:
            raise InvalidProgression(f"non-positive step duration: {self.duration_beats}")


@dataclass(frozen=True)
class Progression:
    name: str
    steps: tuple[ProgressionStep, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise InvalidProgression("progression has no steps")
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass(frozen=True)
class TimedChord:
    """One chord of a realized progression on the tick grid."""

    chord: Chord
    start_tick: int
    duration_ticks: int

    @property
    def end_tick(self) -> int:
        return self.start_tick + self.duration_ticks


def _steps(entries: Iterable[tuple[int, Quality]], beats: BeatCount = 4) -> tuple[ProgressionStep, ...]:
    return tuple(ProgressionStep(d, q, beats) for d, q in entries)


# The stock cadences.  The four-chord variant appends a dominant-quality
# turnaround on the sixth degree.
TWO_FIVE_ONE = Progression(
    "ii-V-I",
    _steps([(2, Quality.MIN7), (5, Quality.DOM7), (1, Quality.MAJ7)]),
)
TWO_FIVE_ONE_SIX = Progression(
    "ii-V-I-VI",
    _steps([(2, Quality.MIN7), (5, Quality.DOM7), (1, Quality.MAJ7), (6, Quality.DOM7)]),
)
TWO_FIVE_ONE_MINOR = Progression(
    "ii-V-i (minor)",
    _steps([(2, Quality.MIN7B5), (5, Quality.DOM7), (1, Quality.MIN7)]),
)

PROGRESSIONS: dict[str, Progression] = {
    p.name: p for p in (TWO_FIVE_ONE, TWO_FIVE_ONE_SIX, TWO_FIVE_ONE_MINOR)
}


def chord_tones(chord: Chord) -> frozenset[int]:
    """Pitch classes of a chord: its template transposed to the root."""
    return frozenset(pc(chord.root + o) for o in CHORD_TEMPLATES[chord.quality])


def scale_pitch_classes(scale: Scale) -> list[int]:
    """The 7 pitch classes of a scale, in order starting at the tonic."""
    return [pc(scale.tonic + step) for step in MODE_INTERVALS[scale.mode]]


def scale_pc_set(scale: Scale) -> frozenset[int]:
    return frozenset(scale_pitch_classes(scale))


def degree_pitch_class(key: Key, degree: int) -> int:
    """Pitch class of a 1-based scale degree of the key."""
    if not 1 <= degree <= 7:
        raise InvalidProgression(f"scale degree out of range: {degree}")
    return scale_pitch_classes(key.scale)[degree - 1]


def realize_progression(
    progression: Progression,
    key: Key,
    ppq: int,
    tempo_meta: Optional[float] = None,
) -> list[TimedChord]:
    """Place a progression on the tick grid of the given key.

    Chords are contiguous from tick 0; each step lasts duration_beats * ppq
    ticks.  `tempo_meta` is carried by callers that export the result to a
    MIDI file and does not affect tick arithmetic.
    """
    del tempo_meta
    if ppq <= 0:
        raise ValueError(f"ppq must be positive, got {ppq}")
    out: list[TimedChord] = []
    tick = 0
    for step in progression.steps:
        root = degree_pitch_class(key, step.degree)
        duration = int(round(Fraction(step.duration_beats) * ppq))
        if duration <= 0:
            raise InvalidProgression(
                f"step duration rounds to zero ticks: {step.duration_beats} beats at ppq {ppq}"
            )
        out.append(TimedChord(Chord(root, step.quality), tick, duration))
        tick += duration
    return out


def half_step_approaches(chord: Chord) -> frozenset[int]:
    """Pitch classes one semitone below each chord tone, minus the tones themselves."""
    tones = chord_tones(chord)
    return frozenset(pc(t - 1) for t in tones) - tones


# Default chord-to-scale pairings; extendable per call.
CHORD_SCALE_TABLE: dict[Quality, Mode] = {
    Quality.MIN7: Mode.DORIAN,
    Quality.DOM7: Mode.MIXOLYDIAN,
    Quality.MAJ7: Mode.IONIAN,
    Quality.MIN7B5: Mode.LOCRIAN,
}


def chord_scale(
    chord: Chord,
    key: Key,
    table: Optional[dict[Quality, Mode]] = None,
) -> Scale:
    """The improvisation scale conventionally paired with a chord.

    The default table covers the cadence vocabulary (min7 -> dorian,
    dom7 -> mixolydian, maj7 -> ionian, min7b5 -> locrian), each built on
    the chord root.  Pass `table` to extend or override the mapping.
    """
    del key  # reserved for key-sensitive mappings
    mapping = CHORD_SCALE_TABLE if table is None else {**CHORD_SCALE_TABLE, **table}
    mode = mapping.get(chord.quality)
    if mode is None:
        raise NoChordScale(f"no scale mapped for quality {chord.quality.value}")
    return Scale(chord.root, mode)


def scale_above_approaches(chord: Chord, scale: Scale) -> frozenset[int]:
    """For each chord tone, the nearest scale pitch class strictly above it.

    Chord tones are removed from the result, so the set only contains notes
    that resolve *into* the chord.
    """
    tones = chord_tones(chord)
    in_scale = scale_pc_set(scale)
    if not (in_scale - tones):
        raise ValueError("scale contains no pitch class outside the chord tones")
    above: set[int] = set()
    for tone in tones:
        step = min((s - tone) % 12 for s in in_scale if (s - tone) % 12 > 0)
        above.add(pc(tone + step))
    return frozenset(above) - tones
