import math

import numpy as np
import pytest

from selfdual_ricci.ansatz import Configuration, Gauge
from selfdual_ricci.hyperbolic import HPoint, dist


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_point(rng, spread=1.0):
    return HPoint(*rng.uniform(-spread, spread, 2), float(math.exp(rng.uniform(-spread, spread))))


def random_config(rng, n, gauge=None):
    centers = []
    while len(centers) < n:
        c = random_point(rng)
        if all(dist(c, d) > 0.2 for d in centers):
            centers.append(c)
    return Configuration(tuple(centers), gauge or Gauge.mean_distance())


def point_away(rng, cfg, min_dist=0.05, spread=1.5):
    while True:
        p = random_point(rng, spread)
        if not cfg.centers or min(dist(p, c) for c in cfg.centers) > min_dist:
            return p


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    """Record one pass/fail line for the terminal summary and echo it."""

    def log(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        request.config.stash[ACCEPTANCE].append((number, line))
        print(line)

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = sorted(config.stash.get(ACCEPTANCE, []))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in lines:
            terminalreporter.write_line(line)
