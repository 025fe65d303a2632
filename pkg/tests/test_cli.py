import json

import pandas as pd
import pytest

from src.cli.main import EXIT_OK, EXIT_USAGE, build_parser, main


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_gen_data_writes_all_datasets_reproducibly(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert run_cli("gen-data", "--all", "--no-timestamp", "--out", first) == EXIT_OK
    assert run_cli("gen-data", "--all", "--no-timestamp", "--out", second) == EXIT_OK
    names = ["llm_energy.csv", "sustainability.csv", "renewable_market.csv", "entrepreneurship.csv"]
    for name in names + ["manifest.json"]:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert len(pd.read_csv(first / "sustainability.csv")) == 530
    manifest = read_json(first / "manifest.json")
    assert "created_at" not in manifest
    assert sorted(d["name"] for d in manifest["datasets"]) == sorted(n[:-4] for n in names)


def test_gen_data_single_dataset_with_missing_cells(tmp_path):
    assert run_cli("gen-data", "--dataset", "llm_energy", "--missing", "0.05", "--out", tmp_path) == EXIT_OK
    frame = pd.read_csv(tmp_path / "llm_energy.csv")
    assert len(frame) == 200
    assert frame.isna().to_numpy().sum() > 0


def test_unknown_dataset_is_usage_error(tmp_path):
    assert run_cli("gen-data", "--dataset", "weather", "--out", tmp_path) == EXIT_USAGE


def test_unwritable_output_directory(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    assert run_cli("optimize", "--out", blocker / "out") == EXIT_USAGE


def test_optimize_reports_corner_and_divergence(tmp_path):
    assert run_cli("optimize", "--out", tmp_path) == EXIT_OK
    payload = read_json(tmp_path / "optimize.json")
    assert payload["solver"]["optimum"]["ai_investment"] == pytest.approx(1000.0)
    assert payload["solver"]["objective_value"] == pytest.approx(2.946730, abs=1e-4)
    assert payload["agrees"] is True
    assert any("202.48" in line for line in payload["divergence"])
    report = (tmp_path / "optimize.md").read_text(encoding="utf-8")
    assert "| variable |" in report
    assert "| --- |" in report


def test_optimize_with_balanced_weights(tmp_path):
    assert run_cli("optimize", "--weights", "0.33,0.33,0.34", "--out", tmp_path) == EXIT_OK
    payload = read_json(tmp_path / "optimize.json")
    assert payload["solver"]["objective_value"] == pytest.approx(1.779431, abs=1e-4)


def test_weights_not_summing_to_one(tmp_path):
    assert run_cli("optimize", "--weights", "0.5,0.6,0.1", "--out", tmp_path) == EXIT_USAGE


def test_sweep_rows(tmp_path):
    assert run_cli("sweep", "--out", tmp_path) == EXIT_OK
    sweep = pd.read_csv(tmp_path / "weight_sweep.csv")
    assert len(sweep) == 5
    assert read_json(tmp_path / "manifest.json")["identical_optimum"] is True


def test_sensitivity_ranking(tmp_path):
    assert run_cli("sensitivity", "--out", tmp_path, "--svg") == EXIT_OK
    rows = pd.read_csv(tmp_path / "sensitivity.csv")
    assert rows["parameter"].iloc[0] == "ai_adoption"
    assert len(rows) == 9
    assert (tmp_path / "sensitivity.svg").read_text(encoding="utf-8").startswith("<svg")


def test_countries_experiment(tmp_path):
    assert run_cli("experiment", "countries", "--out", tmp_path) == EXIT_OK
    top = pd.read_csv(tmp_path / "countries.csv")
    assert len(top) == 10
    assert top["rank"].tolist() == list(range(1, 11))
    means = top[["sustainability_score", "resilience_score", "ai_readiness_index"]].mean(axis=1)
    assert top["composite"].to_numpy() == pytest.approx(means.to_numpy(), abs=1e-6)
    assert top["composite"].is_monotonic_decreasing


def test_sectors_experiment_reuses_generated_data(tmp_path):
    data = tmp_path / "data"
    assert run_cli("gen-data", "--dataset", "entrepreneurship", "--out", data) == EXIT_OK
    out = tmp_path / "report"
    assert run_cli("experiment", "sectors", "--data-dir", data, "--out", out) == EXIT_OK
    sectors = pd.read_csv(out / "sectors.csv")
    assert len(sectors) == 14
    assert sectors["companies"].sum() == 500
    assert read_json(out / "manifest.json")["experiment"] == "sectors"


def test_unknown_experiment(tmp_path):
    assert run_cli("experiment", "forecast", "--out", tmp_path) == EXIT_USAGE


def test_config_file_rejects_unknown_keys(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"seed": 1, "colour": "green"}), encoding="utf-8")
    assert run_cli("optimize", "--config", config, "--out", tmp_path / "out") == EXIT_USAGE


def test_seed_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("ECOOPT_SEED", "7")
    assert run_cli("optimize", "--no-timestamp", "--out", tmp_path / "env") == EXIT_OK
    assert read_json(tmp_path / "env" / "manifest.json")["seed"] == 7
    assert run_cli("optimize", "--seed", "9", "--out", tmp_path / "flag") == EXIT_OK
    assert read_json(tmp_path / "flag" / "manifest.json")["seed"] == 9


def test_malformed_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("ECOOPT_SEED", "forty-two")
    assert run_cli("optimize", "--out", tmp_path) == EXIT_USAGE


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_config_file_bounds_merge_over_defaults(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"bounds": {"ai_investment": [10, 500]}}), encoding="utf-8")
    assert run_cli("optimize", "--config", config, "--out", tmp_path / "out") == EXIT_OK
    optimum = read_json(tmp_path / "out" / "optimize.json")["solver"]["optimum"]
    assert optimum["ai_investment"] == pytest.approx(500.0)
    assert optimum["renewable_energy"] == pytest.approx(100.0)


def assert_same_outputs(first, second):
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_optimize_is_byte_reproducible(tmp_path):
    for run in ("a", "b"):
        assert run_cli("optimize", "--threads", "1", "--no-timestamp", "--out", tmp_path / run) == EXIT_OK
    assert_same_outputs(tmp_path / "a", tmp_path / "b")


def test_compare_experiment_ordering_and_reproducibility(tmp_path):
    for run in ("a", "b"):
        argv = ("experiment", "compare", "--seed", "7", "--threads", "1", "--no-timestamp", "--out", tmp_path / run)
        assert run_cli(*argv) == EXIT_OK
    assert_same_outputs(tmp_path / "a", tmp_path / "b")

    r2 = pd.read_csv(tmp_path / "a" / "compare.csv").set_index("model")["r2"]
    assert r2["Linear Regression"] < r2["Random Forest"] < r2["Gradient Boosting"]
    assert r2["Gradient Boosting"] >= 0.98
    assert read_json(tmp_path / "a" / "manifest.json")["ordering_holds"] is True

    tests = pd.read_csv(tmp_path / "a" / "compare_tests.csv").set_index("comparison")
    assert tests.loc["Gradient Boosting vs Linear Regression", "p_value"] < 0.05


def test_baseline_experiment_realizes_published_correlation(tmp_path):
    for run in ("a", "b"):
        assert run_cli("experiment", "baseline", "--no-timestamp", "--out", tmp_path / run) == EXIT_OK
    assert_same_outputs(tmp_path / "a", tmp_path / "b")

    correlations = pd.read_csv(tmp_path / "a" / "baseline_correlations.csv")
    row = correlations[
        (correlations["variable_a"] == "renewable_energy_pct")
        & (correlations["variable_b"] == "sustainability_score")
    ].iloc[0]
    assert row["realized_r"] == pytest.approx(0.71, abs=0.05)
    trends = pd.read_csv(tmp_path / "a" / "baseline_trends.csv").set_index("metric")
    assert trends.loc["ai_readiness_index", "annual_change"] > 0


def test_validate_experiment_scores_every_component(tmp_path):
    for run in ("a", "b"):
        assert run_cli("experiment", "validate", "--no-timestamp", "--out", tmp_path / run) == EXIT_OK
    assert_same_outputs(tmp_path / "a", tmp_path / "b")

    cv = pd.read_csv(tmp_path / "a" / "validate_cv.csv")
    assert cv["component"].tolist() == ["sustainability", "resilience", "environmental", "composite"]
    assert (cv["r2_mean"] > 0.9).all()
    importance = pd.read_csv(tmp_path / "a" / "feature_importance.csv")
    assert len(importance) == 4 * 5
