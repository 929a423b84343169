"""Random instance generators shared by the test modules."""
import numpy as np

from aoif.model import SourceSpec, SystemSpec
from aoif.phase_type import PHDistribution


def random_ph(rng, max_order=3, mean_range=(0.2, 2.0)):
    m = int(rng.integers(1, max_order + 1))
    sigma = rng.dirichlet(np.ones(m))
    off = rng.uniform(0.0, 2.0, (m, m)) * (rng.random((m, m)) < 0.6)
    np.fill_diagonal(off, 0.0)
    exit_rates = rng.uniform(0.2, 3.0, m)
    S = off - np.diag(off.sum(axis=1) + exit_rates)
    dist = PHDistribution(sigma, S)
    target = rng.uniform(*mean_range)
    return PHDistribution(sigma, S * (dist.mean / target))


def random_system(rng, max_sources=4, max_order=3, errors=True):
    N = int(rng.integers(1, max_sources + 1))
    sources = []
    for _ in range(N):
        e = float(rng.uniform(0.0, 0.5)) if errors and rng.random() < 0.5 else 0.0
        r = float(rng.uniform(0.0, 1.0)) if e > 0 else 0.0
        sources.append(SourceSpec(float(rng.uniform(0.2, 3.0)), random_ph(rng, max_order), e, r))
    P = np.round(rng.random((N, N)), 2)
    return SystemSpec(tuple(sources), P)
