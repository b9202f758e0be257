import numpy as np
import pytest

from otdetect import ModelConfig


def random_config(rng: np.random.Generator, **overrides) -> ModelConfig:
    """A valid random model configuration for property tests."""
    params = dict(
        n_sensors=int(rng.integers(1, 30)),
        signal=float(rng.uniform(0.5, 5.0)),
        noise_var=float(rng.uniform(0.3, 3.0)),
        byz_frac=float(rng.uniform(0.0, 1.0)),
        attack_strength=float(rng.uniform(0.0, 10.0)),
        prior_h1=float(rng.uniform(0.1, 0.9)),
    )
    params.update(overrides)
    return ModelConfig(**params)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
