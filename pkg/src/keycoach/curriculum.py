"""Six built-in lessons plus session scoring.

Lesson content (titles, objectives, tools) is product data shipped with
the engine; the mode bindings live in this data so a teacher can rebind
them without code changes. Scoring aggregates press classifications
into an objective report and leaves judgment to the teacher.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .clock import SwingProfile
from .midi import EventKind, MidiEvent
from .modes import ApproachKind, ModeConfig, PlayMode, PressClass
from .recognition import (
    DEFAULT_TICK_TOLERANCE,
    Motif,
    MotifRelation,
    classify_variation,
    rhythmic_match,
    segment_motifs,
)
from .theory import (
    TWO_FIVE_ONE,
    TWO_FIVE_ONE_SIX,
    Key,
    Mode,
    Progression,
    Scale,
)

ContentId = str

# ids of content the library bootstraps on first run
BUILTIN_QA_CONTENT: ContentId = "builtin-qa-dorian"
BUILTIN_ACCOMPANIMENT_CONTENT: ContentId = "builtin-accompaniment-251"


class LessonNotFound(LookupError):
    pass


class EmptyAnswer(ValueError):
    pass


class Evaluation(str, Enum):
    PRESS_ACCURACY = "press_accuracy"
    MOTIF_REPEAT = "motif_repeat"
    MOTIF_SEQUENCE = "motif_sequence"
    RHYTHM_MATCH = "rhythm_match"
    QA_EXCHANGE = "qa_exchange"
    FREE_IMPROV = "free_improv"


@dataclass(frozen=True)
class Exercise:
    mode: ModeConfig
    key: Key
    evaluation: Evaluation
    progression: Optional[Progression] = None
    scale: Optional[Scale] = None
    content_ref: Optional[ContentId] = None
    swing: SwingProfile = SwingProfile()

    def __post_init__(self) -> None:
        if self.evaluation is Evaluation.QA_EXCHANGE and self.content_ref is None:
            raise ValueError("qa_exchange exercises need question phrases as content")


@dataclass(frozen=True)
class LessonSpec:
    id: int
    title: str
    objective: str
    tools: tuple[str, ...]
    exercises: tuple[Exercise, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.id <= 6:
            raise ValueError(f"lesson id out of range: {self.id}")
        if not self.exercises:
            raise ValueError("a lesson needs at least one exercise")


def builtin_lessons(
    key: Key = Key(0),
    dorian_tonic: int = 2,
    qa_content: ContentId = BUILTIN_QA_CONTENT,
    accompaniment: ContentId = BUILTIN_ACCOMPANIMENT_CONTENT,
) -> list[LessonSpec]:
    """The stock six-lesson course.

    Repeated calls build structurally identical specs. The dorian tonic
    defaults to the second degree of C so motif work sits over the ii
    chord most exercises comp on.
    """
    dorian = Scale(dorian_tonic, Mode.DORIAN)
    swung = SwingProfile(ratio=2.0)
    return [
        LessonSpec(
            1,
            "Swing",
            "Learning modes and extensions",
            ("Show different modes", "play modes in swing"),
            (
                Exercise(
                    ModeConfig(PlayMode.ROLLING_IMPROV),
                    key,
                    Evaluation.PRESS_ACCURACY,
                    progression=TWO_FIVE_ONE,
                    swing=swung,
                ),
                Exercise(
                    ModeConfig(PlayMode.ROLLING_IMPROV, approaches_on=True, approach_kind=ApproachKind.BOTH),
                    key,
                    Evaluation.PRESS_ACCURACY,
                    progression=TWO_FIVE_ONE,
                    swing=swung,
                ),
            ),
        ),
        LessonSpec(
            2,
            "Motifs",
            "Understand motifs",
            (
                "Repeat motifs",
                "sequence the motifs",
                "learn how to form new motifs in Dorian scale",
            ),
            (
                Exercise(
                    ModeConfig(PlayMode.ONWAIT_ROLL),
                    key,
                    Evaluation.MOTIF_REPEAT,
                    progression=TWO_FIVE_ONE,
                    scale=dorian,
                ),
                Exercise(
                    ModeConfig(PlayMode.ONWAIT_ROLL),
                    key,
                    Evaluation.MOTIF_SEQUENCE,
                    progression=TWO_FIVE_ONE,
                    scale=dorian,
                ),
            ),
        ),
        LessonSpec(
            3,
            "Rhythmic patterns",
            "Be familiar with different rhythmic patterns",
            (
                "Practice with an audio accompaniement",
                "repeat and invent motifs",
                "questions and answers",
            ),
            (
                Exercise(
                    ModeConfig(PlayMode.ROLLING_IMPROV),
                    key,
                    Evaluation.RHYTHM_MATCH,
                    progression=TWO_FIVE_ONE,
                    content_ref=accompaniment,
                    swing=swung,
                ),
                Exercise(
                    ModeConfig(PlayMode.ROLLING_IMPROV),
                    key,
                    Evaluation.QA_EXCHANGE,
                    progression=TWO_FIVE_ONE,
                    content_ref=qa_content,
                    swing=swung,
                ),
            ),
        ),
        LessonSpec(
            4,
            "Relationship between the melody and harmony",
            "Learn phrases",
            (
                "Apply and learn a chosen chord progression",
                "learn chord tones",
                "repeat phrases over the chords",
            ),
            (
                Exercise(
                    ModeConfig(PlayMode.GUIDED_PRESS),
                    key,
                    Evaluation.PRESS_ACCURACY,
                    progression=TWO_FIVE_ONE,
                ),
                Exercise(
                    ModeConfig(PlayMode.GUIDED_PRESS, approaches_on=True, approach_kind=ApproachKind.BOTH),
                    key,
                    Evaluation.PRESS_ACCURACY,
                    progression=TWO_FIVE_ONE_SIX,
                ),
            ),
        ),
        LessonSpec(
            5,
            "Composition (Sequence, Q&A, Variation)",
            "Learn basic composition techniques",
            (
                "Repeat questions and repeat answers",
                "ask question and give your own answer",
                "apply modes and be familiar with the vocabulary",
            ),
            (
                Exercise(
                    ModeConfig(PlayMode.EXPERT_PRESS),
                    key,
                    Evaluation.PRESS_ACCURACY,
                ),
                Exercise(
                    ModeConfig(PlayMode.EXPERT_PRESS),
                    key,
                    Evaluation.QA_EXCHANGE,
                    content_ref=qa_content,
                ),
            ),
        ),
        LessonSpec(
            6,
            "Improvise (Compose in the moment)",
            "Apply different styles",
            ("Apply rhythmic patterns", "use tools and all above lessons"),
            (
                Exercise(
                    ModeConfig(PlayMode.EXPERT_PRESS, approaches_on=True, approach_kind=ApproachKind.BOTH),
                    key,
                    Evaluation.FREE_IMPROV,
                    swing=swung,
                ),
            ),
        ),
    ]


def lesson_by_id(lesson_id: int, lessons: Optional[Sequence[LessonSpec]] = None) -> LessonSpec:
    for lesson in builtin_lessons() if lessons is None else lessons:
        if lesson.id == lesson_id:
            return lesson
    raise LessonNotFound(f"no lesson {lesson_id}")


def next_exercise(lesson: LessonSpec, progress: int) -> Optional[Exercise]:
    """The exercise at the given progress mark; None once complete."""
    if progress < 0:
        raise ValueError(f"negative progress: {progress}")
    if progress >= len(lesson.exercises):
        return None
    return lesson.exercises[progress]


@dataclass(frozen=True)
class QAResult:
    question: Motif
    answer: Motif
    relation: MotifRelation
    rhythm_matched: bool


def _notes_from_events(events: Iterable[MidiEvent]) -> list[tuple[int, int, int]]:
    """(pitch, onset, duration) triples from a raw event stream.

    Overlapping same-pitch presses close in arrival order; a note left
    hanging gets closed at the last event tick. Simultaneous onsets
    collapse to the highest pitch, melody reading of a chord.
    """
    open_notes: dict[int, list[int]] = {}
    done: list[tuple[int, int, int]] = []
    last_tick = 0
    for ev in events:
        last_tick = max(last_tick, ev.tick)
        if ev.kind is EventKind.NOTE_ON and ev.velocity > 0:
            open_notes.setdefault(ev.pitch, []).append(ev.tick)
        elif ev.kind in (EventKind.NOTE_ON, EventKind.NOTE_OFF):
            starts = open_notes.get(ev.pitch)
            if starts:
                onset = starts.pop(0)
                done.append((ev.pitch, onset, max(1, ev.tick - onset)))
    for pitch, starts in open_notes.items():
        for onset in starts:
            done.append((pitch, onset, max(1, last_tick - onset)))
    by_onset: dict[int, tuple[int, int, int]] = {}
    for pitch, onset, duration in sorted(done, key=lambda n: (n[1], n[0])):
        by_onset[onset] = (pitch, onset, duration)
    return list(by_onset.values())


def qa_exchange(
    question: Motif,
    answer_events: Sequence[MidiEvent],
    ppq: int,
    tolerance_ticks: int = DEFAULT_TICK_TOLERANCE,
) -> QAResult:
    """Grade a played answer against a question phrase."""
    notes = _notes_from_events(answer_events)
    if len(notes) < 2:
        raise EmptyAnswer("an answer needs at least two notes")
    segments = segment_motifs(notes, ppq)
    answer = Motif.of(segments[0])
    return QAResult(
        question=question,
        answer=answer,
        relation=classify_variation(question, answer, tolerance_ticks),
        rhythm_matched=rhythmic_match(question, answer, tolerance_ticks),
    )


@dataclass(frozen=True)
class SessionReport:
    lesson_id: int
    counts: dict[PressClass, int]
    accuracy_percent: float
    mean_abs_timing_error_ms: float
    empty: bool
    motif_results: tuple[MotifRelation, ...] = ()
    qa_results: tuple[QAResult, ...] = ()


def score_session(
    classified: Sequence[tuple],
    motif_results: Iterable[MotifRelation] = (),
    qa_results: Iterable[QAResult] = (),
    lesson_id: int = 1,
) -> SessionReport:
    """Aggregate one session's presses into a report.

    Items are (event, PressClass) pairs, optionally extended with the
    press's signed timing error in ms; the mean uses only items that
    carry one. Approach hits count as correct: they are taught
    guidance, not mistakes.
    """
    counts = {klass: 0 for klass in PressClass}
    errors: list[float] = []
    for item in classified:
        klass = item[1]
        counts[klass] += 1
        if len(item) > 2 and item[2] is not None:
            errors.append(abs(float(item[2])))
    total = sum(counts.values())
    if total == 0:
        accuracy = 0.0
    else:
        good = counts[PressClass.CHORD_TONE_HIT] + counts[PressClass.APPROACH_HIT]
        accuracy = good / total * 100.0
    return SessionReport(
        lesson_id=lesson_id,
        counts=counts,
        accuracy_percent=accuracy,
        mean_abs_timing_error_ms=sum(errors) / len(errors) if errors else 0.0,
        empty=total == 0,
        motif_results=tuple(motif_results),
        qa_results=tuple(qa_results),
    )


def motif_payload(motif: Motif) -> list[list[int]]:
    return [[n.pitch, n.onset_tick, n.duration_ticks] for n in motif.notes]


def relation_payload(relation: MotifRelation) -> dict:
    return {"kind": relation.kind.value, "shift_degrees": relation.shift_degrees}


def report_payload(report: SessionReport) -> dict:
    """JSON-ready view of a report; key order left to the serializer."""
    return {
        "lesson_id": report.lesson_id,
        "counts": {klass.value: n for klass, n in report.counts.items()},
        "accuracy_percent": report.accuracy_percent,
        "mean_abs_timing_error_ms": report.mean_abs_timing_error_ms,
        "empty": report.empty,
        "motif_results": [relation_payload(r) for r in report.motif_results],
        "qa_results": [
            {
                "question": motif_payload(r.question),
                "answer": motif_payload(r.answer),
                "relation": relation_payload(r.relation),
                "rhythm_matched": r.rhythm_matched,
            }
            for r in report.qa_results
        ],
    }


def exercise_payload(exercise: Exercise) -> dict:
    cfg = exercise.mode
    out = {
        "mode": {
            "mode": cfg.mode.value,
            "approaches_on": cfg.approaches_on,
            "approach_kind": cfg.approach_kind.value,
            "split_pitch": cfg.split_pitch,
            "hit_window_ms": cfg.hit_window_ms,
            "lookahead_beats": cfg.lookahead_beats,
            "gate_on_approaches": cfg.gate_on_approaches,
            "required_hits": cfg.required_hits,
        },
        "key": {"tonic": exercise.key.tonic, "tonality": exercise.key.tonality.value},
        "evaluation": exercise.evaluation.value,
        "swing": {"ratio": exercise.swing.ratio, "subdivision": exercise.swing.subdivision.value},
        "progression": None,
        "scale": None,
        "content_ref": exercise.content_ref,
    }
    if exercise.progression is not None:
        out["progression"] = {
            "name": exercise.progression.name,
            "steps": [
                {"degree": s.degree, "quality": s.quality.value, "beats": float(s.duration_beats)}
                for s in exercise.progression.steps
            ],
        }
    if exercise.scale is not None:
        out["scale"] = {"tonic": exercise.scale.tonic, "mode": exercise.scale.mode.value}
    return out


def lesson_payload(lesson: LessonSpec) -> dict:
    return {
        "id": lesson.id,
        "title": lesson.title,
        "objective": lesson.objective,
        "tools": list(lesson.tools),
        "exercises": [exercise_payload(e) for e in lesson.exercises],
    }
