"""The four synthetic datasets the experiments run on.

Ranges, means, standard deviations, correlations and yearly trends follow the
published dataset descriptions. Columns without a published mean or standard
deviation default to the range midpoint and range/6; those choices are listed
in each table's notes.
"""

from typing import Dict, List

import numpy as np

from src.datagen.generator import ColumnSpec, CorrelationTarget, EntitySpec, GeneratorSpec

SUSTAINABILITY_YEARS = (2015, 2024)

SECTORS = (
    "Smart Cities",
    "Clean Energy",
    "Energy Storage",
    "Green Finance",
    "Carbon Capture",
    "Climate Tech",
    "Green Transportation",
    "Waste Management",
    "Sustainable Agriculture",
    # only nine sector names are published; the rest complete the fourteen
    "Circular Economy",
    "Water Technology",
    "Green Buildings",
    "Environmental Monitoring",
    "Sustainable Fashion",
)

# sustainability impact, business resilience, ai adoption per sector
SECTOR_LEVELS = {
    "Smart Cities": (38.9, 47.2, 7.8),
    "Clean Energy": (38.7, 46.8, 7.6),
    "Energy Storage": (37.8, 46.1, 7.4),
    "Green Finance": (37.3, 45.8, 7.2),
    "Carbon Capture": (37.2, 45.5, 7.1),
    "Climate Tech": (33.9, 45.9, 6.9),
    "Green Transportation": (36.2, 45.7, 6.8),
    "Waste Management": (37.0, 44.9, 6.5),
    "Sustainable Agriculture": (35.5, 44.5, 6.3),
    "Circular Economy": (35.0, 44.1, 6.1),
    "Water Technology": (34.6, 43.8, 5.9),
    "Green Buildings": (34.2, 43.4, 5.8),
    "Environmental Monitoring": (33.6, 43.0, 5.6),
    "Sustainable Fashion": (33.2, 42.6, 5.5),
}

DEPLOYMENT_TYPES = ("Cloud", "Edge", "Hybrid", "On-Premise")


def _sector_means(position: int) -> Dict[str, float]:
    return {sector: levels[position] for sector, levels in SECTOR_LEVELS.items()}


def _weighted_mean(group_means: Dict[str, float], n_rows: int) -> float:
    """Mean of per-row group levels under round-robin assignment"""
    levels = [group_means[SECTORS[i % len(SECTORS)]] for i in range(n_rows)]
    return float(np.mean(levels))


def sustainability_spec(seed: int = 42) -> GeneratorSpec:
    columns = (
        ColumnSpec("gdp_per_capita", 5380.0, 79831.0, mean=43705.0, std=21009.0),
        ColumnSpec("renewable_energy_pct", 10.4, 89.8, mean=52.1, std=23.4, slope=0.67),
        ColumnSpec("sustainability_score", 35.8, 85.5, mean=60.0, std=9.6, slope=0.89),
        ColumnSpec("resilience_score", 17.4, 38.1),
        ColumnSpec("environmental_policy_score", 20.0, 95.0, mean=60.0, std=14.0),
        ColumnSpec("innovation_index", 20.0, 100.0, mean=62.0, std=12.0, slope=0.82),
        ColumnSpec("ai_readiness_index", 5.0, 95.0, mean=40.0, std=22.0, slope=1.12),
        ColumnSpec("economic_complexity_index", -2.0, 2.5, mean=0.4, std=0.8),
        ColumnSpec("digital_infrastructure_score", 20.0, 100.0, mean=62.0, std=15.0),
        ColumnSpec("green_finance_index", 0.0, 100.0, mean=45.0, std=18.0),
        ColumnSpec("energy_efficiency_index", 20.0, 100.0, mean=60.0, std=15.0),
        ColumnSpec("regulatory_quality", -2.5, 2.5, mean=0.6, std=0.9),
        ColumnSpec("ai_investment_per_capita", 10.0, 1000.0, mean=300.0, std=200.0),
        ColumnSpec("carbon_intensity", 0.1, 0.8, mean=0.43, std=0.09, slope=-0.012),
        ColumnSpec("ai_energy_mwh", 50.0, 2000.0, mean=634.0, std=450.0),
        ColumnSpec("ai_water_l", 100.0, 5000.0, mean=1500.0, std=900.0),
    )
    correlations = (
        CorrelationTarget("economic_complexity_index", "resilience_score", 0.82),
        CorrelationTarget("renewable_energy_pct", "sustainability_score", 0.71),
        CorrelationTarget("environmental_policy_score", "sustainability_score", 0.55),
        CorrelationTarget("innovation_index", "ai_readiness_index", 0.48),
        CorrelationTarget("gdp_per_capita", "digital_infrastructure_score", 0.43),
        CorrelationTarget("ai_investment_per_capita", "ai_energy_mwh", 0.45),
    )
    return GeneratorSpec(
        name="sustainability",
        columns=columns,
        entities=EntitySpec(
            entity_column="country",
            entity_prefix="Country",
            n_entities=53,
            year_start=SUSTAINABILITY_YEARS[0],
            year_end=SUSTAINABILITY_YEARS[1],
        ),
        correlations=correlations,
        seed=seed,
        notes=(
            "Country labels are synthetic; no row describes a real country.",
            "The published 2015/2024 averages of sustainability_score imply a lower "
            "overall mean than the stated 60.0; the stated mean is used.",
        ),
    )


def llm_energy_spec(seed: int = 42) -> GeneratorSpec:
    columns = (
        ColumnSpec("parameters_billion", 0.1, 179.8, mean=34.2, std=52.6),
        ColumnSpec("training_energy_mwh", 50.5, 1997.7, mean=634.0, std=472.6),
        ColumnSpec("carbon_emissions_t", 20.2, 1198.6),
        ColumnSpec("water_usage_l", 100.0, 5000.0),
        ColumnSpec("efficiency_score", 0.0, 100.0),
    )
    correlations = (
        CorrelationTarget("parameters_billion", "training_energy_mwh", 0.65),
        CorrelationTarget("training_energy_mwh", "carbon_emissions_t", 0.85),
        CorrelationTarget("training_energy_mwh", "water_usage_l", 0.50),
        CorrelationTarget("parameters_billion", "carbon_emissions_t", 0.60),
        CorrelationTarget("parameters_billion", "water_usage_l", 0.35),
        CorrelationTarget("carbon_emissions_t", "water_usage_l", 0.45),
    )
    return GeneratorSpec(
        name="llm_energy",
        columns=columns,
        entities=EntitySpec(
            entity_column="model_id",
            entity_prefix="Model",
            n_entities=200,
            group_column="deployment_type",
            groups=DEPLOYMENT_TYPES,
        ),
        correlations=correlations,
        seed=seed,
    )


def renewable_market_spec(seed: int = 42) -> GeneratorSpec:
    columns = (
        ColumnSpec("capacity_mw", 1000.0, 50000.0, slope=1200.0),
        ColumnSpec("green_finance_busd", 0.5, 20.0, slope=0.4),
        ColumnSpec("market_concentration_index", 0.1, 0.9),
        ColumnSpec("policy_support_score", 0.0, 100.0),
    )
    correlations = (
        CorrelationTarget("capacity_mw", "green_finance_busd", 0.60),
        CorrelationTarget("policy_support_score", "green_finance_busd", 0.40),
        CorrelationTarget("market_concentration_index", "capacity_mw", -0.30),
    )
    return GeneratorSpec(
        name="renewable_market",
        columns=columns,
        entities=EntitySpec(
            entity_column="country",
            entity_prefix="Market",
            n_entities=20,
            year_start=2015,
            year_end=2024,
            records_per_cell=5,
        ),
        correlations=correlations,
        seed=seed,
        notes=("Five project records per country-year give the published 1000 rows.",),
    )


def entrepreneurship_spec(seed: int = 42) -> GeneratorSpec:
    n = 500
    impact, resilience, adoption = (_sector_means(k) for k in range(3))
    columns = (
        ColumnSpec("ai_adoption", 1.0, 10.0, mean=_weighted_mean(adoption, n), std=1.5,
                   group_means=adoption),
        ColumnSpec("sustainability_impact", 10.9, 80.7, mean=_weighted_mean(impact, n),
                   std=11.6, group_means=impact),
        ColumnSpec("business_resilience", 10.9, 80.7, mean=_weighted_mean(resilience, n),
                   std=11.6, group_means=resilience),
        ColumnSpec("revenue_growth_pct", -20.0, 60.0, mean=12.0, std=12.0),
    )
    correlations = (
        CorrelationTarget("ai_adoption", "sustainability_impact", 0.35),
        CorrelationTarget("ai_adoption", "business_resilience", 0.30),
        CorrelationTarget("sustainability_impact", "business_resilience", 0.45),
        CorrelationTarget("business_resilience", "revenue_growth_pct", 0.25),
    )
    return GeneratorSpec(
        name="entrepreneurship",
        columns=columns,
        entities=EntitySpec(
            entity_column="company",
            entity_prefix="Company",
            n_entities=n,
            group_column="sector",
            groups=SECTORS,
        ),
        correlations=correlations,
        seed=seed,
        notes=(
            "sustainability_impact and business_resilience share the published "
            "range 10.9-80.7, reproduced as stated.",
            "Only nine sector names are published; Circular Economy, Water Technology, "
            "Green Buildings, Environmental Monitoring and Sustainable Fashion are "
            "placeholders completing the fourteen.",
        ),
    )


def builtin_specs(seed: int = 42) -> List[GeneratorSpec]:
    return [
        llm_energy_spec(seed),
        sustainability_spec(seed),
        renewable_market_spec(seed),
        entrepreneurship_spec(seed),
    ]


def builtin_spec(name: str, seed: int = 42) -> GeneratorSpec:
    for spec in builtin_specs(seed):
        if spec.name == name:
            return spec
    raise KeyError(name)
