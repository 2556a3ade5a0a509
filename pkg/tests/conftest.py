import numpy as np
import pytest

from asymduality import ExperimentConfig, derive_amplitudes


def make_config(**overrides) -> ExperimentConfig:
    base = dict(
        p1=0.5, p2=0.5, x0=10.0, epsilon=1.0, xi=1.0,
        wavelength=0.5, screen_distance=1.0e4, overlap=0.5, theta=0.0, kappa=1.0,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def amplitude_ratio(p1: float, xi: float) -> float:
    """c2/c1 for given beam weight and width ratio, without building objects."""
    r = (xi * (1.0 - p1) / p1) ** 0.5
    return min(r, 1.0 / r)


def random_case_a_config(rng: np.random.Generator, kappa: float = 1.0) -> ExperimentConfig:
    p1 = rng.uniform(0.05, 0.95)
    xi = rng.uniform(0.2, 5.0)
    bound = amplitude_ratio(p1, xi)
    return make_config(
        p1=p1, p2=1.0 - p1, xi=xi,
        overlap=rng.uniform(0.0, bound),
        theta=rng.uniform(-np.pi, np.pi),
        kappa=kappa,
    )


def random_case_b_config(rng: np.random.Generator, kappa: float = 1.0) -> ExperimentConfig:
    # c2 > 0 and overlap strictly above the case boundary.
    p1 = rng.uniform(0.05, 0.95)
    xi = rng.uniform(0.2, 5.0)
    bound = amplitude_ratio(p1, xi)
    if bound >= 1.0 - 1e-9:  # c1 = c2 leaves no CaseB region; nudge the weights
        p1 = 0.75
        xi = 1.0
        bound = amplitude_ratio(p1, xi)
    return make_config(
        p1=p1, p2=1.0 - p1, xi=xi,
        overlap=rng.uniform(bound * (1.0 + 1e-9) + 1e-12, 1.0),
        theta=rng.uniform(-np.pi, np.pi),
        kappa=kappa,
    )


def random_config(rng: np.random.Generator, kappa: float | None = None) -> ExperimentConfig:
    p1 = rng.uniform(0.02, 0.98)
    return make_config(
        p1=p1, p2=1.0 - p1,
        xi=rng.uniform(0.2, 5.0),
        overlap=rng.uniform(0.0, 1.0),
        theta=rng.uniform(-np.pi, np.pi),
        kappa=rng.uniform(0.0, 1.0) if kappa is None else kappa,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
