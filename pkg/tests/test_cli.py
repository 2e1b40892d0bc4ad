import json

import pytest

from keycoach.cli import main
from keycoach.content import progression_smf
from keycoach.theory import TWO_FIVE_ONE, Key, realize_progression

EXPECTED_LESSON_LINES = [
    "01 Swing",
    "02 Motifs",
    "03 Rhythmic patterns",
    "04 Relationship between the melody and harmony",
    "05 Composition (Sequence, Q&A, Variation)",
    "06 Improvise (Compose in the moment)",
]


def melody_bytes():
    realized = realize_progression(TWO_FIVE_ONE, Key(0), 480)
    return progression_smf(realized, register="melody")


class TestLessons:
    def test_lists_all_six(self, capsys):
        assert main(["lessons"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out == EXPECTED_LESSON_LINES


class TestIngest:
    def test_prints_the_new_id(self, tmp_path, capsys):
        smf = tmp_path / "take.mid"
        smf.write_bytes(melody_bytes())
        code = main(
            ["ingest", str(smf), "--title", "take", "--content-dir", str(tmp_path / "lib")]
        )
        assert code == 0
        printed = capsys.readouterr().out.strip()
        assert printed
        manifest = json.loads((tmp_path / "lib" / "manifest.json").read_text())
        assert printed in [e["content_id"] for e in manifest["entries"]]

    def test_corrupt_file_fails_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.mid"
        bad.write_bytes(b"not a midi file at all")
        code = main(["ingest", str(bad), "--content-dir", str(tmp_path / "lib")])
        assert code != 0
        assert capsys.readouterr().err.strip()

    def test_missing_file_fails_nonzero(self, tmp_path, capsys):
        code = main(["ingest", str(tmp_path / "ghost.mid"), "--content-dir", str(tmp_path)])
        assert code != 0


class TestReplay:
    def test_prints_report_json(self, tmp_path, capsys):
        smf = tmp_path / "take.mid"
        smf.write_bytes(melody_bytes())
        lib = str(tmp_path / "lib")
        main(["ingest", str(smf), "--content-dir", lib])
        content_id = capsys.readouterr().out.strip()
        code = main(["replay", content_id, "4", "--content-dir", lib])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["lesson_id"] == 4
        assert report["accuracy_percent"] == 100.0

    def test_unknown_content_fails(self, tmp_path, capsys):
        code = main(["replay", "ghost", "4", "--content-dir", str(tmp_path)])
        assert code != 0
        assert capsys.readouterr().err.strip()

    def test_save_writes_report_file(self, tmp_path, capsys):
        smf = tmp_path / "take.mid"
        smf.write_bytes(melody_bytes())
        lib = str(tmp_path / "lib")
        main(["ingest", str(smf), "--content-dir", lib])
        content_id = capsys.readouterr().out.strip()
        reports = tmp_path / "reports"
        code = main(["replay", content_id, "4", "--content-dir", lib, "--save", str(reports)])
        assert code == 0
        assert list(reports.glob("*-lesson04.json"))


class TestDump:
    def test_dump_by_path(self, tmp_path, capsys):
        smf = tmp_path / "take.mid"
        smf.write_bytes(melody_bytes())
        assert main(["dump", str(smf)]) == 0
        out = capsys.readouterr().out
        assert "ppq 480" in out
        assert "note_on" in out

    def test_dump_by_content_id(self, tmp_path, capsys):
        lib = str(tmp_path / "lib")
        smf = tmp_path / "take.mid"
        smf.write_bytes(melody_bytes())
        main(["ingest", str(smf), "--content-dir", lib])
        content_id = capsys.readouterr().out.strip()
        assert main(["dump", content_id, "--content-dir", lib]) == 0
        assert "note_on" in capsys.readouterr().out

    def test_dump_unknown_id_fails(self, tmp_path, capsys):
        code = main(["dump", "ghost", "--content-dir", str(tmp_path)])
        assert code != 0


class TestUsage:
    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_no_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
