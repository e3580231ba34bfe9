import numpy as np
import pytest

from app.core.models import Dataset
from app.services.synth import BetaMixture, GeneratorConfig, MarkovModel, generate_iid, generate_markov

# ~10^6 comentarios: 20 000 hilos de longitud geométrica con media 50
BIG = dict(thread_count=20_000, mean_length=50.0)


@pytest.fixture
def two_threads() -> Dataset:
    return Dataset.from_arrays(
        ["a", "b"],
        [2, 3],
        [0.1, 0.9, 0.5, 0.95, 1.0],
        [0.95, 0.92, 0.30, 0.91, 0.0],
        "fixture",
    )


@pytest.fixture
def cluster_thread_dataset() -> Dataset:
    return Dataset.from_arrays(["x"], [4], [0.5, 0.5, 0.5, 0.5], [0.95, 0.92, 0.30, 0.91])


@pytest.fixture(scope="session")
def markov2() -> MarkovModel:
    return MarkovModel.persistent(2, 0.9)


@pytest.fixture(scope="session")
def markov3() -> MarkovModel:
    return MarkovModel.persistent(3, 0.8)


@pytest.fixture(scope="session")
def markov2_big(markov2) -> Dataset:
    return generate_markov(markov2, GeneratorConfig(seed=11, **BIG))


@pytest.fixture(scope="session")
def markov3_big(markov3) -> Dataset:
    return generate_markov(markov3, GeneratorConfig(seed=12, **BIG))


@pytest.fixture(scope="session")
def iid_big() -> Dataset:
    return generate_iid(BetaMixture.extremes(), GeneratorConfig(seed=13, **BIG))


@pytest.fixture(scope="session")
def uniform_big() -> Dataset:
    return generate_iid(BetaMixture.uniform(), GeneratorConfig(seed=14, **BIG))


@pytest.fixture(scope="session")
def markov2_small(markov2) -> Dataset:
    return generate_markov(markov2, GeneratorConfig(thread_count=400, mean_length=25.0, seed=21))


@pytest.fixture
def constant_dataset():
    """Fábrica de datasets con todos los valores iguales."""
    def make(value: float, threads: int = 5, length: int = 4) -> Dataset:
        n = threads * length
        return Dataset.from_arrays([f"c{i}" for i in range(threads)], [length] * threads, np.full(n, value), np.full(n, value))
    return make
