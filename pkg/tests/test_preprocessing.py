import numpy as np
import pandas as pd
import pytest

from src.datagen.data_table import CATEGORICAL, NUMERIC, DataTable
from src.exceptions import ContractError, FitError
from src.preprocessing.preprocessing_pipeline import (
    FittedPipeline,
    PipelineConfig,
    PreprocessingPipeline,
    fit,
    transform,
)

RAW = PipelineConfig(scale=False, outlier_action="none", interaction_pairs=())


def numeric_table(**columns) -> DataTable:
    frame = pd.DataFrame({name: np.asarray(values, dtype=float) for name, values in columns.items()})
    return DataTable(name="t", frame=frame, kinds={c: NUMERIC for c in frame.columns})


def test_mean_imputation():
    table = numeric_table(x=[1.0, np.nan, 3.0])
    fitted = fit(table, RAW)
    assert fitted.numeric["x"].mean == 2.0
    assert transform(fitted, table).frame["x"].tolist() == [1.0, 2.0, 3.0]


def test_quartiles_and_fences():
    fitted = fit(numeric_table(x=[1, 2, 3, 4, 100]), RAW)
    stats = fitted.numeric["x"]
    assert (stats.q1, stats.q3, stats.iqr) == (2.0, 4.0, 2.0)
    assert stats.fences(1.5) == (-1.0, 7.0)


def test_winsorize_clips_to_fences():
    table = numeric_table(x=[1, 2, 3, 4, 100])
    config = PipelineConfig(scale=False, outlier_action="winsorize", interaction_pairs=())
    out = PreprocessingPipeline(config).transform(fit(table, config), table)
    assert out.frame["x"].tolist() == [1.0, 2.0, 3.0, 4.0, 7.0]


def test_drop_removes_outlier_rows():
    table = numeric_table(x=[1, 2, 3, 4, 100], y=[5, 6, 7, 8, 9])
    config = PipelineConfig(scale=False, outlier_action="drop", interaction_pairs=())
    out = transform(fit(table, config), table)
    assert out.n_rows == 4
    assert any("dropped 1 rows" in note for note in out.notes)


def test_population_scaling():
    table = numeric_table(x=[0.0, 10.0])
    config = PipelineConfig(outlier_action="none", interaction_pairs=())
    fitted = fit(table, config)
    assert (fitted.numeric["x"].mean, fitted.numeric["x"].std) == (5.0, 5.0)
    assert transform(fitted, table).frame["x"].tolist() == [-1.0, 1.0]


def test_zero_std_column_left_unscaled():
    table = numeric_table(x=[3.0, 3.0, 3.0], y=[1.0, 2.0, 3.0])
    config = PipelineConfig(outlier_action="none", interaction_pairs=())
    out = transform(fit(table, config), table)
    assert out.frame["x"].tolist() == [3.0, 3.0, 3.0]
    assert any("zero std" in note for note in out.notes)


def test_interaction_features_follow_scaling():
    table = numeric_table(sustainability_score=[0.0, 10.0], resilience_score=[2.0, 4.0])
    out = transform(fit(table, PipelineConfig(outlier_action="none")), table)
    assert out.frame["sustainability_score_x_resilience_score"].tolist() == [1.0, 1.0]
    assert out.kinds["sustainability_score_x_resilience_score"] == NUMERIC


def test_missing_interaction_column_is_noted():
    fitted = fit(numeric_table(x=[1.0, 2.0]), PipelineConfig())
    assert fitted.interactions == []
    assert fitted.notes


def test_identifiers_and_categoricals():
    frame = pd.DataFrame(
        {
            "country": ["A", "B", "C"],
            "year": [2015.0, 2016.0, np.nan],
            "deployment_type": ["Edge", None, "Edge"],
            "x": [1.0, 2.0, 3.0],
        }
    )
    kinds = {"country": CATEGORICAL, "year": NUMERIC, "deployment_type": CATEGORICAL, "x": NUMERIC}
    table = DataTable(name="t", frame=frame, kinds=kinds, key_columns=("country", "year"))
    out = transform(fit(table, RAW), table)
    assert out.frame["deployment_type"].tolist() == ["Edge", "Edge", "Edge"]
    assert np.isnan(out.frame["year"].iloc[2])


def test_idempotent_imputation_on_complete_table():
    table = numeric_table(x=[1.0, 2.0, 4.0])
    out = transform(fit(table, RAW), table)
    assert out.frame.equals(table.frame)


def test_all_missing_column_fails_fit():
    with pytest.raises(FitError):
        fit(numeric_table(x=[np.nan, np.nan]), RAW)


def test_schema_mismatch_is_rejected():
    fitted = fit(numeric_table(x=[1.0, 2.0]), RAW)
    with pytest.raises(ContractError):
        transform(fitted, numeric_table(z=[1.0, 2.0]))


def test_fitted_pipeline_persists(tmp_path):
    table = numeric_table(x=[1.0, np.nan, 5.0], y=[2.0, 3.0, 4.0])
    fitted = fit(table, PipelineConfig(interaction_pairs=(("x", "y"),)))
    loaded = FittedPipeline.load(fitted.save(tmp_path / "pipeline.json"))
    assert transform(loaded, table).frame.equals(transform(fitted, table).frame)


def test_scaled_columns_are_standardized():
    rng = np.random.default_rng(8)
    table = numeric_table(a=rng.normal(50.0, 12.0, 300), b=rng.exponential(3.0, 300), c=rng.integers(0, 9, 300))
    out = transform(fit(table, PipelineConfig(outlier_action="none", interaction_pairs=())), table)
    for column in ("a", "b", "c"):
        values = out.frame[column].to_numpy()
        assert values.mean() == pytest.approx(0.0, abs=1e-12)
        assert values.std() == pytest.approx(1.0, abs=1e-12)
