"""factory-boy factories for seeded systems, sequences and regression instances"""

from typing import List

import factory
import numpy as np

from src.models.schemas import HankelPair, OutputSequence, StateSpaceModel
from src.services.datagen import random_observable_system, random_regression_instance, simulate

REAL_GRID = np.linspace(0.55, 0.95, 5)
ANGLE_GRID = np.array([0.3, 0.7, 1.1, 1.6, 2.2])


def stable_spectrum(n: int, seed: int, max_modulus: float = 0.98) -> List[complex]:
    """Distinct eigenvalues closed under conjugation, moduli in [0.5, max_modulus]"""
    rng = np.random.default_rng(1000 + seed)
    pairs = int(rng.integers(0, n // 2 + 1))
    reals = rng.choice(REAL_GRID * max_modulus / 0.98, size=n - 2 * pairs, replace=False)
    spectrum = [complex(v) for v in reals]
    for angle in rng.choice(ANGLE_GRID, size=pairs, replace=False):
        radius = rng.uniform(0.6, max_modulus)
        spectrum += [radius * np.exp(1j * angle), radius * np.exp(-1j * angle)]
    return spectrum


class ObservableSystemFactory(factory.Factory):
    class Meta:
        model = StateSpaceModel

    n = 2
    m = 1
    seed = factory.Sequence(lambda k: k)
    max_modulus = 0.98
    spectrum = factory.LazyAttribute(lambda o: stable_spectrum(o.n, o.seed, o.max_modulus))

    @classmethod
    def _create(cls, model_class, n, m, seed, max_modulus, spectrum):
        return random_observable_system(n, m, spectrum, seed=seed)

    _build = _create


class TrajectoryFactory(factory.Factory):
    """Output sequence of a seeded observable system driven from a random state"""

    class Meta:
        model = OutputSequence

    system = factory.SubFactory(ObservableSystemFactory)
    steps = 60
    noise_std = 0.0
    seed = 0

    @classmethod
    def _create(cls, model_class, system, steps, noise_std, seed):
        x0 = np.random.default_rng(seed).standard_normal(system.n) + 1.0
        return simulate(system, x0, steps, noise_std=noise_std, seed=seed)

    _build = _create


class RegressionInstanceFactory(factory.Factory):
    class Meta:
        model = HankelPair

    ms = 6
    ell = 12
    seed = factory.Sequence(lambda k: k)
    row_rank = None

    @classmethod
    def _create(cls, model_class, ms, ell, seed, row_rank):
        return random_regression_instance(ms, ell, seed, row_rank=row_rank)

    _build = _create
