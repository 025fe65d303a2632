import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src.cli.run_config import RunConfig
from src.config.config import PUBLISHED_REFERENCE
from src.datagen.builtin_specs import builtin_spec, builtin_specs
from src.datagen.generator import GeneratorSpec, generate, inject_missing, realized_statistics
from src.exceptions import ConfigError, OracleInapplicableError, SpecError
from src.model.domain import UNITS, VARIABLES, BoundsSet
from src.optimization.oracles import corner_oracle, grid_oracle
from src.optimization.sensitivity import parameter_sensitivity, sweep_weights
from src.optimization.solver import OptimizationResult, compare_results, maximize
from src.reporting.charts import html_bar_chart, svg_bar_chart
from src.reporting.report_writer import ReportWriter, markdown_table

logger = logging.getLogger(__name__)


def _load_spec_file(path: str) -> GeneratorSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Spec file {path} not found")
    except json.JSONDecodeError as e:
        raise SpecError(f"Spec file {path} is not valid JSON: {e}")
    return GeneratorSpec.from_dict(data)


def cmd_gen_data(
    cfg: RunConfig,
    writer: ReportWriter,
    dataset: Optional[str] = None,
    spec_file: Optional[str] = None,
    keep_file_seed: bool = False,
) -> List[Dict]:
    """Materialize datasets as CSV plus a manifest of realized statistics"""
    if spec_file:
        spec = _load_spec_file(spec_file)
        specs = [spec if keep_file_seed else spec.with_seed(cfg.seed)]
    elif dataset:
        try:
            specs = [builtin_spec(dataset, cfg.seed)]
        except KeyError:
            raise ConfigError(f"Unknown dataset '{dataset}'")
    else:
        specs = builtin_specs(cfg.seed)

    datasets = []
    for spec in specs:
        table = generate(spec)
        if cfg.missing_fraction > 0:
            table = inject_missing(table, cfg.missing_fraction, cfg.seed)
        path = writer.write_table(table)
        datasets.append(
            {
                "name": spec.name,
                "file": path.name,
                "rows": table.n_rows,
                "seed": int(spec.seed),
                "missing_fraction": cfg.missing_fraction,
                "statistics": realized_statistics(table, spec),
                "notes": table.notes,
            }
        )
    writer.write_manifest({"datasets": datasets})
    return datasets


def divergence_lines(result: OptimizationResult, bounds: BoundsSet) -> List[str]:
    published = PUBLISHED_REFERENCE["optimum"]
    optimum = result.optimum.to_dict()
    span = dict(zip(VARIABLES, bounds.span))
    differing = [
        name for name in VARIABLES
        if abs(optimum[name] - published[name]) > 1e-6 * span[name]
    ]
    lines = []
    if differing:
        listed = ", ".join(
            f"{name} {optimum[name]:g} (published {published[name]:g})" for name in differing
        )
        lines.append(f"Verified optimum differs from the published strategy in: {listed}.")
        lines.append(
            "The stated objective is monotone in every variable, so its maximum over the "
            "box is a corner; the published values sit near the initial strategy and are "
            "not a stationary point of the stated model."
        )
    lines.append(
        f"Objective at the verified optimum is {result.objective_value:.6f}; "
        f"the published objective is {PUBLISHED_REFERENCE['objective']:.2f}."
    )
    return lines


def cmd_optimize(cfg: RunConfig, writer: ReportWriter) -> Dict:
    w, c, b = cfg.weight_config(), cfg.model_coefficients(), cfg.bounds_set()
    result = maximize(w, c, b, cfg.solver_config())

    notes = []
    try:
        oracle = corner_oracle(w, c, b)
        agrees = compare_results(result, oracle, b)
    except OracleInapplicableError as e:
        logger.warning(f"Corner oracle not applicable: {e}")
        oracle, agrees = None, None
        notes.append(str(e))
    grid = grid_oracle(w, c, b, cfg.grid_points, threads=cfg.threads) if cfg.grid_points else None
    notes.extend(divergence_lines(result, b))

    payload = {
        "weights": w.to_dict(),
        "log_base": cfg.log_base,
        "solver": result.to_dict(),
        "corner_oracle": oracle.to_dict() if oracle else None,
        "grid_oracle": grid.to_dict() if grid else None,
        "agrees": agrees,
        "divergence": notes,
    }
    writer.write_json("optimize.json", payload)

    published = PUBLISHED_REFERENCE["optimum"]
    rows = []
    for name in VARIABLES:
        row = {"variable": name, "unit": UNITS[name], "solver": result.optimum.to_dict()[name]}
        if oracle:
            row["corner_oracle"] = oracle.optimum.to_dict()[name]
        row["published"] = published[name]
        rows.append(row)
    summary = (
        f"Objective: {result.objective_value:.6f} | converged: {result.converged} | "
        f"iterations: {result.iterations} | KKT residual: {result.kkt_residual:.3e} | "
        f"agrees with corner oracle: {agrees}"
    )
    writer.write_markdown(
        "optimize.md",
        "Optimal deployment strategy",
        [("Summary", summary), ("Strategy", markdown_table(rows)),
         ("Divergence from published values", "\n".join(f"- {n}" for n in notes))],
    )
    writer.write_manifest({"agrees": agrees, "converged": result.converged})
    return payload


def cmd_sweep(cfg: RunConfig, writer: ReportWriter) -> List[Dict]:
    c, b = cfg.model_coefficients(), cfg.bounds_set()
    rows = sweep_weights(None, c, b, cfg.solver_config(), threads=cfg.threads)
    records = [row.to_record() for row in rows]
    writer.write_csv("weight_sweep.csv", records)

    first = rows[0].optimum.to_array()
    identical = all(
        np.all(np.abs(row.optimum.to_array() - first) <= 1e-4 * b.span) for row in rows
    )
    columns = ["label", "alpha", "beta", "gamma", "objective", "oracle_objective", "agrees"]
    writer.write_markdown(
        "weight_sweep.md",
        "Weight sensitivity",
        [
            ("Configurations", markdown_table(records, columns)),
            ("Optimum", f"Identical optimal strategy across configurations: {'yes' if identical else 'no'}"),
        ],
    )
    labels = [r["label"] for r in records]
    objectives = [r["objective"] for r in records]
    if cfg.svg:
        writer.write_text("weight_sweep.svg", svg_bar_chart(labels, objectives, "Objective by weight configuration", "F"))
    if cfg.html:
        writer.write_text("weight_sweep.html", html_bar_chart(labels, objectives, "Objective by weight configuration", "weight-sweep"))
    writer.write_manifest({"identical_optimum": identical})
    return records


def cmd_sensitivity(cfg: RunConfig, writer: ReportWriter) -> List[Dict]:
    w, c, b = cfg.weight_config(), cfg.model_coefficients(), cfg.bounds_set()
    result = maximize(w, c, b, cfg.solver_config())
    rows = parameter_sensitivity(result.optimum, w, c, b, cfg.delta)
    published = PUBLISHED_REFERENCE["sensitivity_pct"]
    records = [{**row.to_record(), "published_pct": published[row.parameter]} for row in rows]
    writer.write_csv("sensitivity.csv", records)

    note = (
        "Published magnitudes rank innovation_index well above market_stability although both "
        "enter resilience with equal weight over identical normalized ranges; computed values "
        "are reported instead."
    )
    writer.write_markdown(
        "sensitivity.md",
        f"Parameter sensitivity (delta = {cfg.delta:g})",
        [("Coefficients", markdown_table(records, ["parameter", "coefficient_pct", "level", "published_pct"])),
         ("Divergence from published values", note)],
    )
    labels = [r["parameter"] for r in records]
    values = [r["coefficient_pct"] for r in records]
    if cfg.svg:
        writer.write_text("sensitivity.svg", svg_bar_chart(labels, values, "Parameter sensitivity", "% change in F"))
    if cfg.html:
        writer.write_text("sensitivity.html", html_bar_chart(labels, values, "Parameter sensitivity", "sensitivity"))
    writer.write_manifest({"delta": cfg.delta, "objective": result.objective_value})
    return records
