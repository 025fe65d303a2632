import os
import sys

import pytest

current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(current_dir)
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.model.domain import BoundsSet, DeploymentStrategy, ModelCoefficients, WeightConfig

CORNER = (10.0, 100.0, 80.0, 100.0, 10.0, 1000.0, 50.0, 20.0, 100.0)


@pytest.fixture
def corner() -> DeploymentStrategy:
    return DeploymentStrategy(*CORNER)


@pytest.fixture
def default_weights() -> WeightConfig:
    return WeightConfig(0.6, 0.3, 0.1)


@pytest.fixture
def coefficients() -> ModelCoefficients:
    return ModelCoefficients()


@pytest.fixture
def bounds() -> BoundsSet:
    return BoundsSet()


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("ECOOPT_SEED", raising=False)
    monkeypatch.delenv("ECOOPT_OUT_DIR", raising=False)
