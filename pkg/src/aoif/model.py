"""Description of the multi-source bufferless status-update system.

Source indices are 1-based on the public surface.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .phase_type import PHDistribution

PRESETS = ("non_preemptive", "global", "self_", "prioritized")


@dataclass(frozen=True)
class SourceSpec:
    """One Poisson source with its service law and error/retransmission probabilities."""

    lam: float
    service: PHDistribution
    error_prob: float = 0.0
    retx_prob: float = 0.0

    @property
    def q(self) -> float:
        return 1.0 - self.error_prob

    @property
    def d(self) -> float:
        return 1.0 - self.retx_prob

    @property
    def mu(self) -> float:
        return 1.0 / self.service.mean

    @property
    def rho(self) -> float:
        return self.lam / self.mu

    def check(self, path: str = "source"):
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ConfigError(f"{path}.lambda", f"arrival rate must be positive, got {self.lam}")
        if not isinstance(self.service, PHDistribution):
            raise ConfigError(f"{path}.service", "must be a PHDistribution")
        if self.service.sigma0 > 1e-12:
            raise ConfigError(f"{path}.service", "service law must have no mass at zero")
        for name, val in (("error_prob", self.error_prob), ("retx_prob", self.retx_prob)):
            if not (0.0 <= val <= 1.0):
                raise ConfigError(f"{path}.{name}", f"probability must lie in [0, 1], got {val}")


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Sources, preemption matrix and the tagged source (1-based).

    ``preemption[n, m]`` is the probability that an arriving source-(m+1)
    packet preempts a source-(n+1) packet in service.
    """

    sources: tuple[SourceSpec, ...]
    preemption: np.ndarray
    tagged: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        P = np.array(self.preemption, dtype=float)
        P.setflags(write=False)
        object.__setattr__(self, "preemption", P)
        validate(self)

    def __eq__(self, other):
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return (self.sources == other.sources and self.tagged == other.tagged
                and np.array_equal(self.preemption, other.preemption))

    __hash__ = None

    @property
    def N(self) -> int:
        return len(self.sources)

    @cached_property
    def lams(self) -> np.ndarray:
        return np.array([s.lam for s in self.sources])

    @property
    def total_rate(self) -> float:
        return float(self.lams.sum())

    @cached_property
    def loads(self) -> np.ndarray:
        return np.array([s.rho for s in self.sources])

    @property
    def load(self) -> float:
        return float(self.loads.sum())

    @cached_property
    def preempting_rates(self) -> np.ndarray:
        """``lambda_bar[n] = sum_m lambda_m P[n, m]``."""
        return self.preemption @ self.lams

    @property
    def total_order(self) -> int:
        return sum(s.service.order for s in self.sources)

    def with_preemption(self, P) -> "SystemSpec":
        return replace(self, preemption=np.asarray(P, dtype=float))


def validate(system: SystemSpec) -> SystemSpec:
    """Check every invariant of ``system``; raise :class:`ConfigError` naming the field."""
    if len(system.sources) < 1:
        raise ConfigError("sources", "at least one source is required")
    for i, src in enumerate(system.sources):
        if not isinstance(src, SourceSpec):
            raise ConfigError(f"sources[{i}]", "expected a SourceSpec")
        src.check(f"sources[{i}]")
    N = len(system.sources)
    P = system.preemption
    if P.shape != (N, N):
        raise ConfigError("preemption", f"expected a {N}x{N} matrix, got shape {P.shape}")
    bad = np.argwhere(~((P >= 0) & (P <= 1)))
    if bad.size:
        i, j = bad[0]
        raise ConfigError(f"preemption[{i}][{j}]", f"probability must lie in [0, 1], got {P[i, j]}")
    if int(system.tagged) != system.tagged or not 1 <= system.tagged <= N:
        raise ConfigError("tagged", f"must be a source index in 1..{N}, got {system.tagged}")
    return system


def preset_preemption(kind: str, N: int) -> np.ndarray:
    """Preemption matrix for a named policy.

    ``prioritized`` lets an arriving class-i packet preempt class j iff ``i <= j``,
    i.e. ones at and below the main diagonal.
    """
    if N < 1:
        raise ConfigError("N", "need at least one source")
    if kind == "non_preemptive":
        return np.zeros((N, N))
    if kind == "global":
        return np.ones((N, N))
    if kind in ("self_", "self"):
        return np.eye(N)
    if kind == "prioritized":
        return np.tril(np.ones((N, N)))
    raise ConfigError("preemption.preset", f"unknown preset {kind!r}; choose from {PRESETS}")


def retag(system: SystemSpec, n: int) -> SystemSpec:
    """Equivalent system with source ``n`` moved to position 1 and tagged."""
    N = system.N
    if int(n) != n or not 1 <= n <= N:
        raise ConfigError("tagged", f"source index {n} out of range 1..{N}")
    perm = [n - 1] + [i for i in range(N) if i != n - 1]
    P = system.preemption[np.ix_(perm, perm)]
    return SystemSpec(tuple(system.sources[i] for i in perm), P, tagged=1)


def homogeneous_system(lams: Sequence[float], service: PHDistribution, preemption,
                       error_prob: float = 0.0, retx_prob: float = 0.0) -> SystemSpec:
    """All sources share one service law and error/retransmission pair.

    ``preemption`` is either a matrix or a preset name.
    """
    N = len(lams)
    P = preset_preemption(preemption, N) if isinstance(preemption, str) else preemption
    sources = tuple(SourceSpec(float(l), service, error_prob, retx_prob) for l in lams)
    return SystemSpec(sources, P)
