import json
import math

import pytest

from src.exceptions import ConfigError
from src.reporting.charts import html_bar_chart, svg_bar_chart, svg_line_chart
from src.reporting.report_writer import ReportWriter, ensure_output_dir, markdown_table


def test_markdown_table_formats_cells():
    table = markdown_table([{"name": "a|b", "value": 1.23456, "ok": True, "gap": math.nan}], digits=2)
    lines = table.splitlines()
    assert lines[0] == "| name | value | ok | gap |"
    assert lines[1] == "| --- | --- | --- | --- |"
    assert lines[2] == "| a\\|b | 1.23 | yes |  |"


def test_writer_tracks_files_and_manifest(tmp_path):
    writer = ReportWriter(tmp_path / "run", "optimize", seed=5, no_timestamp=True)
    writer.write_csv("rows.csv", [{"x": 1.0, "y": None}])
    writer.write_json("payload.json", {"value": float("nan")})
    manifest = json.loads(writer.write_manifest({"agrees": True}).read_text(encoding="utf-8"))
    assert manifest["files"] == ["payload.json", "rows.csv"]
    assert manifest["seed"] == 5 and manifest["agrees"] is True
    assert "created_at" not in manifest
    assert json.loads((tmp_path / "run" / "payload.json").read_text(encoding="utf-8")) == {"value": None}
    assert (tmp_path / "run" / "rows.csv").read_bytes() == b"x,y\n1.0,\n"


def test_manifest_timestamp_when_enabled(tmp_path):
    writer = ReportWriter(tmp_path, "sweep")
    manifest = json.loads(writer.write_manifest().read_text(encoding="utf-8"))
    assert manifest["created_at"].endswith("Z")


def test_output_directory_must_be_writable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(ConfigError):
        ensure_output_dir(blocker / "nested")


def test_markdown_sections(tmp_path):
    writer = ReportWriter(tmp_path, "sectors", no_timestamp=True)
    path = writer.write_markdown("report.md", "Title", [("Part", "body\n")])
    assert path.read_text(encoding="utf-8") == "# Title\n\n## Part\n\nbody\n"


def test_svg_charts_are_deterministic():
    bar = svg_bar_chart(["a", "b<c"], [1.0, -2.0], "Bars", "units")
    assert bar == svg_bar_chart(["a", "b<c"], [1.0, -2.0], "Bars", "units")
    assert bar.startswith("<svg") and bar.rstrip().endswith("</svg>")
    assert "b&lt;c" in bar
    line = svg_line_chart([2015, 2016], {"s": [1.0, 1.0]}, "Flat")
    assert line.count("<polyline") == 1


def test_html_chart_uses_fixed_div_id():
    page = html_bar_chart(["a"], [1.0], "Bars", "fixed-id")
    assert 'id="fixed-id"' in page
    assert "cdn.plot.ly" in page
