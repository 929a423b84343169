"""Weighted age cost and brute-force search over two-source preemption matrices."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .age_analysis import aoi_density, paoi_density
from .errors import ConfigError
from .mfq import build_mfq, build_reduced_global, reduction_applies
from .model import SystemSpec, preset_preemption, retag
from .solver import solve_steady_state

METRICS = ("mean_aoi", "mean_paoi")
SWEEP_POLICIES = ("non_preemptive", "self_", "global", "prioritized", "optimum")


@dataclass(frozen=True)
class CostSpec:
    """Weights ``w`` of the cost ``sum_n w_n E[age_n]``."""

    weights: tuple[float, ...]
    metric: str = "mean_aoi"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not w or any(x < 0 for x in w) or not any(x > 0 for x in w):
            raise ConfigError("weights", "weights must be non-negative and not all zero")
        if self.metric not in METRICS:
            raise ConfigError("metric", f"unknown metric {self.metric!r}; choose from {METRICS}")

    @classmethod
    def two_source(cls, alpha: float, metric: str = "mean_aoi") -> "CostSpec":
        """``E[age_1] + alpha E[age_2]`` with ``alpha`` in [0, 1]."""
        if not 0.0 <= alpha <= 1.0:
            raise ConfigError("alpha", f"alpha must lie in [0, 1], got {alpha}")
        return cls((1.0, float(alpha)), metric)

    @property
    def alpha(self) -> float | None:
        return self.weights[1] if len(self.weights) == 2 and self.weights[0] == 1.0 else None


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("AOIF_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(func, items):
    items = list(items)
    workers = _workers()
    if workers == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def mean_age(system: SystemSpec, n: int, metric: str = "mean_aoi") -> float:
    """Mean AoI or mean peak AoI of source ``n`` through the fluid-queue pipeline."""
    tagged = retag(system, n)
    spec = build_reduced_global(tagged) if tagged.N > 2 and reduction_applies(tagged) else build_mfq(tagged)
    sol = solve_steady_state(spec)
    dens = aoi_density(sol, spec) if metric == "mean_aoi" else paoi_density(sol, spec, tagged)
    return dens.moment(1)


def source_means(system: SystemSpec, metric: str = "mean_aoi") -> np.ndarray:
    return np.array([mean_age(system, n, metric) for n in range(1, system.N + 1)])


def evaluate_cost(system: SystemSpec, cost: CostSpec) -> float:
    if len(cost.weights) != system.N:
        raise ConfigError("weights", f"{len(cost.weights)} weights for {system.N} sources")
    w = np.asarray(cost.weights)
    total = 0.0
    for n in range(1, system.N + 1):
        if w[n - 1] > 0:
            total += w[n - 1] * mean_age(system, n, cost.metric)
    return float(total)


def two_source_matrix(p_d: float, p12: float, p21: float) -> np.ndarray:
    return np.array([[p_d, p12], [p21, p_d]])


def lattice(resolution: float) -> np.ndarray:
    if not 0 < resolution <= 1:
        raise ConfigError("resolution", f"resolution must lie in (0, 1], got {resolution}")
    steps = 1.0 / resolution
    k = round(steps)
    if abs(steps - k) > 1e-9:
        raise ConfigError("resolution", f"resolution must divide 1, got {resolution}")
    return np.round(np.arange(k + 1) / k, 12)


@dataclass(frozen=True, eq=False)
class LatticeTable:
    """Per-source mean ages at every lattice point, ordered by ``(P_d, P21, P12)``."""

    params: np.ndarray      # columns P_d, P12, P21
    means: np.ndarray       # columns source 1, source 2
    metric: str
    resolution: float


def lattice_means(base_system: SystemSpec, resolution: float, metric: str = "mean_aoi") -> LatticeTable:
    if base_system.N != 2:
        raise ConfigError("sources", f"grid search needs exactly two sources, got {base_system.N}")
    grid = lattice(resolution)
    params = np.array([(pd, p12, p21) for pd in grid for p21 in grid for p12 in grid])

    def point(row):
        system = base_system.with_preemption(two_source_matrix(*row))
        return source_means(system, metric)

    means = np.array(_pmap(point, params))
    return LatticeTable(params, means, metric, resolution)


@dataclass(frozen=True, eq=False)
class GridResult:
    p_d: float
    p12: float
    p21: float
    cost: float
    table: np.ndarray       # columns P_d, P12, P21, cost

    @property
    def best(self) -> tuple[float, float, float]:
        return (self.p_d, self.p12, self.p21)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["P_d", "P12", "P21", "cost"])
        for row in self.table:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_record(self) -> dict:
        return {"P_d": self.p_d, "P12": self.p12, "P21": self.p21, "cost": self.cost}


def best_on_lattice(table: LatticeTable, cost: CostSpec) -> GridResult:
    """Minimizer over a precomputed lattice; ties go to the smallest ``(P_d, P21, P12)``."""
    if cost.metric != table.metric:
        raise ConfigError("metric", "cost metric differs from the lattice metric")
    costs = table.means @ np.asarray(cost.weights)
    best = 0
    for k in range(1, costs.size):
        if costs[k] < costs[best] - 1e-12 * abs(costs[best]):
            best = k
    p_d, p12, p21 = (float(x) for x in table.params[best])
    return GridResult(p_d, p12, p21, float(costs[best]), np.column_stack([table.params, costs]))


def grid_search(base_system: SystemSpec, cost: CostSpec, resolution: float = 0.05) -> GridResult:
    """Exhaustive search of ``P = [[P_d, P12], [P21, P_d]]`` over the lattice ``{0, res, ..., 1}^3``."""
    if len(cost.weights) != 2:
        raise ConfigError("weights", "grid search needs a two-source cost")
    return best_on_lattice(lattice_means(base_system, resolution, cost.metric), cost)


def scale_to_load(system: SystemSpec, rho: float) -> SystemSpec:
    """Scale every arrival rate by one factor so that the total load equals ``rho``."""
    if not rho > 0:
        raise ConfigError("load", f"load must be positive, got {rho}")
    f = rho / system.load
    return replace(system, sources=tuple(replace(s, lam=s.lam * f) for s in system.sources))


def policy_sweep(base_system: SystemSpec, costs: CostSpec | Sequence[CostSpec], loads: Iterable[float],
                 policies: Sequence[str] = ("non_preemptive", "self_", "global", "optimum"),
                 resolution: float = 0.05) -> list[dict]:
    """Cost of each policy at each load; ``optimum`` runs a grid search per load.

    Returns rows ``{"rho", "alpha", "weights", "policy", "cost"}``.
    """
    costs = [costs] if isinstance(costs, CostSpec) else list(costs)
    for p in policies:
        if p not in SWEEP_POLICIES:
            raise ConfigError("policies", f"unknown policy {p!r}; choose from {SWEEP_POLICIES}")
    metrics = {c.metric for c in costs}
    rows = []
    for rho in loads:
        system = scale_to_load(base_system, rho)
        fixed = {}
        for p in policies:
            if p != "optimum":
                fixed[p] = {m: source_means(system.with_preemption(preset_preemption(p, system.N)), m)
                            for m in metrics}
        tables = {}
        if "optimum" in policies:
            tables = {m: lattice_means(system, resolution, m) for m in metrics}
        for c in costs:
            for p in policies:
                if p == "optimum":
                    value = best_on_lattice(tables[c.metric], c).cost
                else:
                    value = float(fixed[p][c.metric] @ np.asarray(c.weights))
                rows.append({"rho": float(rho), "alpha": c.alpha, "weights": c.weights,
                             "policy": p, "cost": value})
    return rows
