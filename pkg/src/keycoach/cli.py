"""Command line entry point."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import load_config
from .content import ContentLibrary, ContentNotFound
from .curriculum import LessonNotFound, builtin_lessons
from .midi import MidiCodecError, parse_smf
from .replay import replay_content, report_json, write_report


def _library(args) -> ContentLibrary:
    library = ContentLibrary(Path(args.content_dir))
    library.ensure_builtins()
    return library


def _cmd_serve(args) -> int:
    from .server import run_server

    config = load_config(args.config)
    if args.port is not None:
        config = type(config)(**{**config.__dict__, "port": args.port})
    try:
        run_server(config)
    except OSError as exc:
        print(f"could not bind port {config.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_ingest(args) -> int:
    try:
        data = Path(args.file).read_bytes()
    except OSError as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return 1
    library = _library(args)
    try:
        content_id = library.ingest(
            data,
            title=args.title or Path(args.file).stem,
            tags=tuple(t for t in (args.tags or "").split(",") if t),
        )
    except MidiCodecError as exc:
        print(f"not a usable MIDI file: {exc}", file=sys.stderr)
        return 1
    print(content_id)
    return 0


def _cmd_lessons(args) -> int:
    for lesson in builtin_lessons():
        print(f"{lesson.id:02d} {lesson.title}")
    return 0


def _cmd_replay(args) -> int:
    library = _library(args)
    try:
        report = replay_content(library, args.content_id, args.lesson_id, speed=args.speed)
    except (ContentNotFound, LessonNotFound) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(report_json(report))
    if args.save:
        path = write_report(report, Path(args.save))
        print(f"saved {path}", file=sys.stderr)
    return 0


def _cmd_dump(args) -> int:
    target = Path(args.content)
    if target.exists():
        data = target.read_bytes()
    else:
        library = _library(args)
        try:
            entry = library.entry(args.content)
        except ContentNotFound as exc:
            print(str(exc), file=sys.stderr)
            return 1
        data = (library.root / entry.filename).read_bytes()
    try:
        parsed = parse_smf(data)
    except MidiCodecError as exc:
        print(f"not a usable MIDI file: {exc}", file=sys.stderr)
        return 1
    print(f"format {parsed.format}  ppq {parsed.ppq}  tracks {len(parsed.tracks)}")
    for i, track in enumerate(parsed.tracks):
        print(f"track {i} ({len(track.events)} events)")
        for ev in track.events:
            if ev.kind.name in ("NOTE_ON", "NOTE_OFF"):
                print(f"  {ev.tick:>8} {ev.kind.name.lower():<9} pitch={ev.pitch} vel={ev.velocity}")
            elif ev.kind.name == "META_TEMPO":
                print(f"  {ev.tick:>8} tempo     {ev.tempo_bpm:.2f} bpm")
            elif ev.kind.name == "META_END":
                print(f"  {ev.tick:>8} end")
            else:
                print(f"  {ev.tick:>8} {ev.kind.name.lower()} {ev.data.hex()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="keycoach",
        description="piano improvisation trainer: serve, manage content, replay sessions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the WebSocket gateway")
    serve.add_argument("--config", default=None, help="JSON config file")
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(fn=_cmd_serve)

    ingest = sub.add_parser("ingest", help="add a MIDI file to the content library")
    ingest.add_argument("file")
    ingest.add_argument("--title", default=None)
    ingest.add_argument("--tags", default=None, help="comma separated")
    ingest.add_argument("--content-dir", default="content")
    ingest.set_defaults(fn=_cmd_ingest)

    lessons = sub.add_parser("lessons", help="list the built-in lessons")
    lessons.set_defaults(fn=_cmd_lessons)

    rep = sub.add_parser("replay", help="run recorded content through a lesson")
    rep.add_argument("content_id")
    rep.add_argument("lesson_id", type=int)
    rep.add_argument("--speed", type=float, default=1.0)
    rep.add_argument("--content-dir", default="content")
    rep.add_argument("--save", default=None, help="directory for the report file")
    rep.set_defaults(fn=_cmd_replay)

    dump = sub.add_parser("dump", help="print the events of a content entry or file")
    dump.add_argument("content", help="content id or path to a .mid file")
    dump.add_argument("--content-dir", default="content")
    dump.set_defaults(fn=_cmd_dump)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
