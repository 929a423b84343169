"""Phase-type distributions: construction, evaluation, two-moment fitting and sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import ConfigError, DomainError
from .linalg import expm, solve_linear

_ROW_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PHDistribution:
    """Time to absorption of a CTMC with initial vector ``sigma`` and sub-generator ``S``.

    ``nu = -S 1`` is the exit-rate vector and ``sigma0 = 1 - sigma 1`` the
    probability mass at zero.  All invariants are checked on construction.
    """

    sigma: np.ndarray
    S: np.ndarray
    nu: np.ndarray = field(init=False, repr=False)
    sigma0: float = field(init=False, repr=False)

    def __post_init__(self):
        sigma = np.atleast_1d(np.asarray(self.sigma, dtype=float)).ravel()
        S = np.atleast_2d(np.asarray(self.S, dtype=float))
        m = sigma.size
        if m < 1 or S.shape != (m, m):
            raise ConfigError("S", f"expected a {m}x{m} sub-generator, got shape {S.shape}")
        if not (np.all(np.isfinite(sigma)) and np.all(np.isfinite(S))):
            raise ConfigError("", "non-finite entries in PH representation")
        if np.any(sigma < 0) or np.any(sigma > 1) or sigma.sum() > 1 + _ROW_SUM_TOL:
            raise ConfigError("sigma", "initial probabilities must lie in [0, 1] and sum to at most 1")
        diag = np.diag(S)
        if np.any(diag >= 0):
            raise ConfigError("S", "diagonal entries must be strictly negative")
        if np.any(S - np.diag(diag) < 0):
            raise ConfigError("S", "off-diagonal entries must be non-negative")
        rows = S.sum(axis=1)
        scale = np.abs(diag)
        if np.any(rows > _ROW_SUM_TOL * scale):
            raise ConfigError("S", "row sums must be non-positive")
        if np.max(np.linalg.eigvals(S).real) >= 0:
            raise ConfigError("S", "sub-generator must be invertible (every phase must reach absorption)")
        sigma.setflags(write=False)
        S.setflags(write=False)
        nu = np.maximum(-rows, 0.0)
        nu.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "sigma0", float(max(0.0, 1.0 - sigma.sum())))

    @property
    def order(self) -> int:
        return self.sigma.size

    def __repr__(self):
        return f"PHDistribution(order={self.order}, mean={self.mean:.6g})"

    def __eq__(self, other):
        if not isinstance(other, PHDistribution):
            return NotImplemented
        return (self.order == other.order
                and np.array_equal(self.sigma, other.sigma)
                and np.array_equal(self.S, other.S))

    def __hash__(self):
        return hash((self.sigma.tobytes(), self.S.tobytes()))

    def pdf_cdf(self, x: float) -> tuple[float, float]:
        """Continuous density and cdf at ``x``; the atom ``sigma0`` is in the cdf only."""
        return ph_pdf_cdf(self, x)

    def moment(self, k: int) -> float:
        return ph_moment(self, k)

    @cached_property
    def mean(self) -> float:
        return ph_moment(self, 1)

    @cached_property
    def scv(self) -> float:
        m1 = self.mean
        return ph_moment(self, 2) / m1 ** 2 - 1.0

    @cached_property
    def _tables(self):
        return _kernels.jump_tables(self.sigma, self.S)

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Absorption time(s) simulated phase by phase."""
        init_cum, rates, trans_cum = self._tables
        if size is None:
            return float(_kernels.draw_ph(rng, init_cum, rates, trans_cum))
        return _kernels.draw_ph_many(rng, init_cum, rates, trans_cum, int(size))


def ph_pdf_cdf(dist: PHDistribution, x: float) -> tuple[float, float]:
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x}")
    row = dist.sigma @ expm(dist.S * x)
    return float(row @ dist.nu), float(1.0 - row.sum())


def ph_moment(dist: PHDistribution, k: int) -> float:
    """``E[X^k] = (-1)^k k! sigma S^{-k} 1``."""
    if int(k) != k or k < 1:
        raise DomainError(f"moment order must be a positive integer, got {k}")
    v = np.ones(dist.order)
    for _ in range(int(k)):
        v = solve_linear(dist.S, v)
    return float((-1) ** k * math.factorial(k) * (dist.sigma @ v))


def exponential(rate: float) -> PHDistribution:
    if rate <= 0:
        raise DomainError(f"rate must be positive, got {rate}")
    return PHDistribution(np.array([1.0]), np.array([[-float(rate)]]))


def erlang(mean: float, order: int) -> PHDistribution:
    """Erlang law with ``order`` phases of common rate ``order / mean``."""
    if mean <= 0 or int(order) != order or order < 1:
        raise DomainError(f"Erlang needs mean > 0 and a positive integer order, got {mean}, {order}")
    return _erlang_chain(np.eye(1, int(order)).ravel(), order / mean)


def _erlang_chain(sigma, rate) -> PHDistribution:
    m = len(sigma)
    S = -rate * np.eye(m) + rate * np.eye(m, k=1)
    return PHDistribution(np.asarray(sigma, dtype=float), S)


def hyperexp_balanced(mean: float, scv: float) -> PHDistribution:
    """Two-phase hyperexponential with balanced means ``p1/mu1 = p2/mu2``; needs ``scv >= 1``."""
    if mean <= 0 or scv < 1:
        raise DomainError(f"balanced hyperexponential needs mean > 0 and scv >= 1, got {mean}, {scv}")
    p1 = 0.5 * (1.0 + math.sqrt((scv - 1.0) / (scv + 1.0)))
    p2 = 1.0 - p1
    mu = np.array([2.0 * p1 / mean, 2.0 * p2 / mean])
    return PHDistribution(np.array([p1, p2]), -np.diag(mu))


def ph_fit_two_moments(mean: float, scv: float) -> PHDistribution:
    """PH law matching a mean and a squared coefficient of variation.

    * ``scv = 1/j`` for integer ``j``: Erlang of order ``j``;
    * ``scv < 1`` otherwise: mixture of Erlang(j) and Erlang(j+1) with a
      common rate, ``j = floor(1/scv)``;
    * ``scv > 1``: balanced-means hyperexponential.
    """
    if not (mean > 0):
        raise DomainError(f"mean must be positive, got {mean}")
    if not (scv > 0):
        raise DomainError(f"scv must be positive, got {scv}")
    inv = 1.0 / scv
    j = round(inv)
    if j >= 1 and abs(inv - j) <= 1e-9 * inv:
        return erlang(mean, j)
    if scv > 1:
        return hyperexp_balanced(mean, scv)
    # Erlang(k-1) w.p. p, Erlang(k) w.p. 1-p, common rate, k = j + 1
    k = math.floor(inv) + 1
    p = (k * scv - math.sqrt(k * (1.0 + scv) - k * k * scv)) / (1.0 + scv)
    rate = (k - p) / mean
    sigma = np.zeros(k)
    sigma[0] = 1.0 - p
    sigma[1] = p
    return _erlang_chain(sigma, rate)
