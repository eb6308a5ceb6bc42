import json

import pandas as pd
import pytest

from experiments import ROW_COLUMNS, build_report, emit, read_report
from freelimits import multiplicativity_verdict
from models import ConvergenceRecord, SeedSpec


def _records():
    seed = SeedSpec(3)
    return [
        ConvergenceRecord("w_max", 100, t, 9.0 + 0.01 * t, 9.0, seed.child(0).child(t), within_tolerance=True)
        for t in range(3)
    ]


def test_empty_csv_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit(build_report("convergence"), "csv", path)
    assert path.read_text(encoding="utf-8") == ",".join(ROW_COLUMNS["convergence"]) + "\n"


def test_json_round_trip(tmp_path):
    report = build_report("convergence", _records(), summary={"w_max": {"100": {"trials": 3}}}, engineering=True)
    path = tmp_path / "report.json"
    emit(report, "json", path)
    again = read_report(path)
    assert again == report
    assert again.schema_version == "1.0"
    assert "tolerance_model" in again.metadata["engineering_choices"]
    assert again.rows[1]["seed"] == "3:0/0/1"


def test_csv_rows(tmp_path):
    path = tmp_path / "records.csv"
    emit(build_report("convergence", _records()), "csv", path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ROW_COLUMNS["convergence"]
    assert frame["trial"].tolist() == [0, 1, 2]
    assert frame["within_tolerance"].all()


def test_verdict_rows_to_stdout(capsys):
    emit(build_report("limits", [multiplicativity_verdict(16, "inf")]))
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "limits"
    assert payload["rows"][0]["violated"] is True
    assert payload["rows"][0]["p"] == "inf"


def test_free_form_kind_and_bad_format():
    report = build_report("violation-table", summary={"minimal_violating_k": 23})
    assert report.columns == []
    assert report.frame().empty
    with pytest.raises(ValueError):
        emit(report, "xml")
