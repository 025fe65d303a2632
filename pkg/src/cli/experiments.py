"""Report generators for the five experiments run on the synthetic datasets."""

import logging
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from src.cli.run_config import RunConfig
from src.config.config import PUBLISHED_REFERENCE
from src.datagen.builtin_specs import builtin_spec
from src.datagen.data_table import DataTable
from src.datagen.generator import generate, inject_missing
from src.exceptions import ConfigError, DegenerateError, UndefinedCorrelationError
from src.preprocessing.preprocessing_pipeline import PipelineConfig, PreprocessingPipeline
from src.reporting.charts import html_bar_chart, html_line_chart, svg_bar_chart, svg_line_chart
from src.reporting.report_writer import ReportWriter, markdown_table
from src.stats.statistical_tests import describe, paired_t_test, pearson_r, trend_slope
from src.surrogate.targets import COMPONENTS, FRAMEWORK_INTERACTIONS, build_targets
from src.surrogate.validation import (
    cross_validate,
    default_model_specs,
    holdout_split,
    regression_metrics,
)

logger = logging.getLogger(__name__)

EXPERIMENTS = ("baseline", "validate", "compare", "sectors", "countries")
TOP_FEATURES = 5
TOP_COUNTRIES = 10
COUNTRY_COLUMNS = ("sustainability_score", "resilience_score", "ai_readiness_index")
SECTOR_COLUMNS = ("sustainability_impact", "business_resilience", "ai_adoption")


class ExperimentRunner:
    def __init__(self, cfg: RunConfig, writer: ReportWriter):
        self.cfg = cfg
        self.writer = writer
        self.sources: Dict[str, str] = {}
        logger.info("ExperimentRunner initialized")

    def run(self, name: str) -> Dict:
        handlers = {
            "baseline": self.baseline,
            "validate": self.validate,
            "compare": self.compare,
            "sectors": self.sectors,
            "countries": self.countries,
        }
        if name not in handlers:
            raise ConfigError(f"Unknown experiment '{name}'; choose from {', '.join(EXPERIMENTS)}")
        try:
            logger.info(f"Starting experiment '{name}'")
            summary = handlers[name]()
            self.writer.write_manifest({"experiment": name, "data_sources": self.sources, **summary})
            logger.info(f"Successfully completed experiment '{name}'")
            return summary
        except Exception as e:
            logger.error(f"Error in experiment '{name}': {e}")
            raise

    def load_table(self, dataset: str) -> DataTable:
        """CSV from --data-dir when given, otherwise generated with the run seed"""
        if self.cfg.data_dir:
            path = Path(self.cfg.data_dir) / f"{dataset}.csv"
            table = DataTable.read_csv(path, name=dataset)
            self.sources[dataset] = str(path)
        else:
            table = generate(builtin_spec(dataset, self.cfg.seed))
            self.sources[dataset] = f"generated (seed {self.cfg.seed})"
        if self.cfg.missing_fraction > 0:
            table = inject_missing(table, self.cfg.missing_fraction, self.cfg.seed)
        if table.frame[table.value_columns].isna().to_numpy().any():
            config = PipelineConfig(scale=False, outlier_action="none", interaction_pairs=())
            fitted = PreprocessingPipeline(config).fit(table)
            table = PreprocessingPipeline.transform(fitted, table)
            logger.info(f"Imputed missing values in '{dataset}'")
        return table

    def _charts(self, stem: str, labels: List[str], values: List[float], title: str, y_label: str) -> None:
        if self.cfg.svg:
            self.writer.write_text(f"{stem}.svg", svg_bar_chart(labels, values, title, y_label))
        if self.cfg.html:
            self.writer.write_text(f"{stem}.html", html_bar_chart(labels, values, title, stem.replace("_", "-")))

    def baseline(self) -> Dict:
        table = self.load_table("sustainability")
        frame = table.frame

        summary = [{"column": c, **describe(frame[c].to_numpy(float))} for c in table.value_columns]
        self.writer.write_csv("baseline_summary.csv", summary)

        correlations = []
        for key, published in PUBLISHED_REFERENCE["correlations"].items():
            a, b = key.split("|")
            pair = frame[[a, b]].dropna()
            try:
                realized = pearson_r(pair[a].to_numpy(float), pair[b].to_numpy(float))
            except UndefinedCorrelationError as e:
                logger.warning(f"Correlation {a} / {b} undefined: {e}")
                realized = float("nan")
            correlations.append(
                {"variable_a": a, "variable_b": b, "published_r": published,
                 "realized_r": realized, "difference": realized - published}
            )
        self.writer.write_csv("baseline_correlations.csv", correlations)

        years = sorted(frame["year"].unique())
        yearly = frame.groupby("year")[list(PUBLISHED_REFERENCE["trends"])].mean()
        trends = []
        for column, (first, last, change) in PUBLISHED_REFERENCE["trends"].items():
            trends.append(
                {
                    "metric": column,
                    "first_year_avg": float(yearly.loc[years[0], column]),
                    "last_year_avg": float(yearly.loc[years[-1], column]),
                    "annual_change": trend_slope(frame["year"].to_numpy(float), frame[column].to_numpy(float)),
                    "published_first_year_avg": first,
                    "published_last_year_avg": last,
                    "published_annual_change": change,
                }
            )
        self.writer.write_csv("baseline_trends.csv", trends)

        self.writer.write_markdown(
            "baseline.md",
            f"Baseline analysis ({table.n_rows} country-year rows, {int(years[0])}-{int(years[-1])})",
            [
                ("Summary statistics", markdown_table(summary)),
                ("Correlations", markdown_table(correlations)),
                ("Temporal trends", markdown_table(trends)),
                ("Notes", "\n".join(f"- {n}" for n in table.notes) or "- none"),
            ],
        )

        # yearly means indexed to the first year so the five metrics share one axis
        indexed = {c: (100.0 * yearly[c] / yearly[c].iloc[0]).tolist() for c in yearly.columns}
        title = "Yearly means (first year = 100)"
        if self.cfg.svg:
            self.writer.write_text("baseline_trends.svg", svg_line_chart(years, indexed, title, "index"))
        if self.cfg.html:
            self.writer.write_text("baseline_trends.html", html_line_chart(years, indexed, title, "baseline-trends"))
        return {"rows": table.n_rows}

    def _targets(self):
        table = self.load_table("sustainability")
        return build_targets(
            table, self.cfg.weight_config(), self.cfg.model_coefficients(), seed=self.cfg.seed
        )

    def validate(self) -> Dict:
        targets = self._targets()
        X, names = targets.features, targets.feature_names
        framework = default_model_specs(FRAMEWORK_INTERACTIONS)[-1]
        published = PUBLISHED_REFERENCE["component_cv_r2"]
        train, test = holdout_split(X.shape[0], 0.2, self.cfg.seed)

        cv_rows, holdout_rows, importance_rows = [], [], []
        for component in COMPONENTS:
            y = targets.labels[component]
            cv = cross_validate(framework, X, y, k=self.cfg.folds, seed=self.cfg.seed,
                                feature_names=names, threads=self.cfg.threads)
            cv_rows.append(
                {"component": component, "r2_mean": cv.mean.r2, "r2_std": cv.std.r2,
                 "mse": cv.mean.mse, "mae": cv.mean.mae, "rmse": cv.mean.rmse,
                 "published_r2": published[component]}
            )

            model = framework.fit(X[train], y[train], feature_names=names, seed=self.cfg.seed,
                                  threads=self.cfg.threads)
            for split, rows in (("train", train), ("test", test)):
                metrics = regression_metrics(y[rows], model.predict(X[rows]))
                holdout_rows.append({"component": component, "split": split, **metrics.to_dict()})

            importance = np.asarray(model.feature_importance)
            engineered = model.engineered_names
            for rank, k in enumerate(np.argsort(-importance, kind="stable")[:TOP_FEATURES], start=1):
                importance_rows.append(
                    {"component": component, "rank": rank, "feature": engineered[k],
                     "importance": float(importance[k])}
                )

        self.writer.write_csv("validate_cv.csv", cv_rows)
        self.writer.write_csv("validate_holdout.csv", holdout_rows)
        self.writer.write_csv("feature_importance.csv", importance_rows)
        self.writer.write_markdown(
            "validate.md",
            f"Model validation ({self.cfg.folds}-fold cross-validation)",
            [
                ("Cross-validation", markdown_table(cv_rows)),
                ("Holdout (80/20)", markdown_table(holdout_rows)),
                (f"Top {TOP_FEATURES} features per component", markdown_table(importance_rows)),
                ("Targets", "Labels are closed-form component scores of each row's mapped strategy "
                            "plus Gaussian noise at 1% of each target's standard deviation."),
            ],
        )
        return {"components": list(COMPONENTS)}

    def _paired(self, label: str, y: np.ndarray, a: np.ndarray, b: np.ndarray) -> Dict:
        row = {"comparison": label}
        try:
            result = paired_t_test(np.abs(y - a), np.abs(y - b))
            row.update(result.to_dict())
        except DegenerateError as e:
            logger.warning(f"Paired test '{label}' skipped: {e}")
            row.update({"t_statistic": float("nan"), "degrees_of_freedom": y.size - 1,
                        "p_value": float("nan"), "cohens_d": float("nan"), "mean_difference": 0.0})
        return row

    def compare(self) -> Dict:
        targets = self._targets()
        X, names = targets.features, targets.feature_names
        y = targets.labels["composite"]
        published = PUBLISHED_REFERENCE["model_r2"]

        results = [
            cross_validate(spec, X, y, k=self.cfg.folds, seed=self.cfg.seed,
                           feature_names=names, threads=self.cfg.threads)
            for spec in default_model_specs(FRAMEWORK_INTERACTIONS)
        ]
        by_name = {r.model: r for r in results}
        self.writer.write_csv("compare_folds.csv", [row for r in results for row in r.to_records()])

        summary = [
            {"model": r.model, "r2": r.mean.r2, "r2_std": r.std.r2, "mse": r.mean.mse,
             "mae": r.mean.mae, "rmse": r.mean.rmse, "published_r2": published.get(r.model)}
            for r in results
        ]
        self.writer.write_csv("compare.csv", summary)

        framework = results[-1]
        pairs: List[Tuple[str, str]] = [(framework.model, r.model) for r in results[:-1]]
        pairs.append(("Gradient Boosting", "Linear Regression"))
        tests = [
            self._paired(f"{a} vs {b}", y, by_name[a].oof_predictions, by_name[b].oof_predictions)
            for a, b in pairs
        ]
        self.writer.write_csv("compare_tests.csv", tests)

        r2 = [by_name[m].mean.r2 for m in ("Linear Regression", "Random Forest", "Gradient Boosting")]
        ordered = r2[0] < r2[1] < r2[2]
        self.writer.write_markdown(
            "compare.md",
            "Comparison with baseline methods (composite target)",
            [
                ("Cross-validated metrics", markdown_table(summary)),
                ("Paired t-tests on absolute out-of-fold residuals", markdown_table(tests)),
                ("Ordering", f"Linear Regression < Random Forest < Gradient Boosting by mean R2: "
                             f"{'yes' if ordered else 'no'}"),
            ],
        )
        self._charts("compare", [r.model for r in results], [r.mean.r2 for r in results],
                     "Cross-validated R2 by model", "R2")
        return {"ordering_holds": ordered}

    def sectors(self) -> Dict:
        table = self.load_table("entrepreneurship")
        grouped = table.frame.groupby("sector")
        frame = grouped[list(SECTOR_COLUMNS)].mean()
        frame.insert(0, "companies", grouped.size())
        frame = frame.reset_index().sort_values("sustainability_impact", ascending=False, kind="mergesort")
        records = frame.to_dict(orient="records")
        self.writer.write_csv("sectors.csv", records)
        self.writer.write_markdown(
            "sectors.md",
            "Sector analysis",
            [
                ("Sectors by mean sustainability impact", markdown_table(records, digits=2)),
                ("Notes", "\n".join(f"- {n}" for n in table.notes) or "- none"),
            ],
        )
        self._charts("sectors", frame["sector"].tolist(), frame["sustainability_impact"].tolist(),
                     "Mean sustainability impact by sector", "sustainability impact")
        return {"sectors": len(records)}

    def countries(self) -> Dict:
        table = self.load_table("sustainability")
        frame = table.frame.groupby("country")[list(COUNTRY_COLUMNS)].mean()
        frame["composite"] = frame[list(COUNTRY_COLUMNS)].mean(axis=1)
        frame = frame.reset_index().sort_values("composite", ascending=False, kind="mergesort")
        top = frame.head(TOP_COUNTRIES).reset_index(drop=True)
        top.insert(0, "rank", np.arange(1, len(top) + 1))
        records = top.to_dict(orient="records")
        self.writer.write_csv("countries.csv", records)

        note = (
            f"Composite is the unweighted mean of {', '.join(COUNTRY_COLUMNS)}. The published "
            f"leader's composite of {PUBLISHED_REFERENCE['top_country_composite']:.2f} does not equal "
            f"the mean of its displayed components ({PUBLISHED_REFERENCE['top_country_component_mean']:.2f}), "
            "so the published composite cannot be rebuilt from the listed columns."
        )
        self.writer.write_markdown(
            "countries.md",
            f"Top {TOP_COUNTRIES} countries by composite score",
            [("Ranking", markdown_table(records, digits=2)),
             ("Divergence from published values", note),
             ("Notes", "\n".join(f"- {n}" for n in table.notes) or "- none")],
        )
        self._charts("countries", top["country"].tolist(), top["composite"].tolist(),
                     "Composite score, top countries", "composite")
        return {"countries": len(records)}
