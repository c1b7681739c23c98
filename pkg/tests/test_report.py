import csv

from promptmixer.report import write_report
from tests.conftest import make_engine


def make_session_log(config, tmp_path):
    path = tmp_path / "session.log"
    engine = make_engine(config, log_path=path)
    engine.apply({"kind": "place_tile", "row": 0, "col": 0, "word": "ocean"})
    engine.apply({"kind": "place_tile", "row": 0, "col": 1, "word": "dream"})
    engine.apply({"kind": "select_personality_preset", "id": "Guru"})
    engine.apply({"kind": "set_control", "id": "sarcasm", "raw": 1.0})
    engine.apply({"kind": "submit"})
    engine.close()
    return path


def test_report_writes_csv_and_figures(config, tmp_path):
    log = make_session_log(config, tmp_path)
    out_dir = tmp_path / "report"
    written = write_report(log, out_dir, config)
    names = {p.name for p in written}
    assert names == {"events.csv", "fader_trajectories.png",
                     "final_surface.png"}
    for path in written:
        assert path.exists()
        assert path.stat().st_size > 0


def test_csv_rows_mirror_log_records(config, tmp_path):
    log = make_session_log(config, tmp_path)
    out_dir = tmp_path / "report"
    write_report(log, out_dir, config)
    with open(out_dir / "events.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    record_count = len(log.read_text(encoding="utf-8").splitlines())
    assert len(rows) == record_count
    kinds = [r["kind"] for r in rows]
    assert kinds[0] == "tile_placed"
    assert "submitted" in kinds
    assert "response_received" in kinds
    submitted = next(r for r in rows if r["kind"] == "submitted")
    assert submitted["detail"] == "ocean dream"
