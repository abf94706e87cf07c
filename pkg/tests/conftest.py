import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from forecasting.schemas import PipelineConfig  # noqa: E402
from preprocessing.load_data import LoadSeries  # noqa: E402


def synthetic_load(days: int, seed: int = 0, noise: float = 0.02) -> np.ndarray:
    """기저 700 + 일주기(진폭 100) + 주주기(진폭 50) + 비례 잡음"""
    t = np.arange(days * 24, dtype=np.float64)
    base = 700.0 + 100.0 * np.sin(2 * np.pi * t / 24) + 50.0 * np.sin(2 * np.pi * t / (24 * 7))
    rng = np.random.default_rng(seed)
    return base * (1.0 + noise * rng.standard_normal(base.size))


def write_load_csv(path: Path, values, start: str = "2024-01-01 00:00") -> Path:
    stamps = pd.date_range(start, periods=len(values), freq="h").strftime("%Y-%m-%dT%H:%M:%S")
    pd.DataFrame({"timestamp": stamps, "load": values}).to_csv(path, index=False)
    return path


@pytest.fixture
def make_series():
    def _make(days: int = 30, seed: int = 0, noise: float = 0.02) -> LoadSeries:
        return LoadSeries(pd.Timestamp("2024-01-01"), synthetic_load(days, seed, noise))

    return _make


@pytest.fixture
def load_csv_file(tmp_path):
    def _write(values, name: str = "load.csv", start: str = "2024-01-01 00:00") -> Path:
        return write_load_csv(tmp_path / name, values, start)

    return _write


@pytest.fixture
def fast_config() -> PipelineConfig:
    """몇 초 안에 끝나는 작은 학습/PSO 설정"""
    return PipelineConfig.model_validate(
        {
            "train": {"hidden_dim": 4, "epochs": 3, "batch_size": 16},
            "swarm": {"m": 3, "n": 2, "fitness_epochs": 1},
            "window_days": 3,
            "mix_index": 1,
            "seed": 7,
        }
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
