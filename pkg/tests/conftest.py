import numpy as np
import pytest

from psbound.sampling import random_density, random_pd, trial_seed


def random_hermitian(rng, dim):
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (G + G.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def pd_pairs():
    """Seeded PD pairs over dims 2..5."""
    return [
        (random_pd(d, trial_seed(7, "a", d, i)), random_pd(d, trial_seed(7, "b", d, i)))
        for d in range(2, 6)
        for i in range(10)
    ]


@pytest.fixture
def density_pairs():
    return [
        (random_density(d, trial_seed(5, "r", d, i)), random_density(d, trial_seed(5, "s", d, i)))
        for d in range(2, 5)
        for i in range(10)
    ]


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call":
                continue
            lines += [v for k, v in getattr(rep, "user_properties", []) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
