"""Discrete-event simulation of the bufferless preemptive server with packet errors.

Used to cross-check the fluid-queue analysis.  Arrivals of each source come
from their own random stream; service times, error, retransmission and
preemption draws share one more stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import stats

from . import _kernels
from ._kernels import draw_ph
from .errors import DomainError, StarvationError
from .model import SystemSpec

_BLOCK = 1 << 16
_NO_SOURCE = -1

# kernel exit codes
_DONE = 0
_REFILL = 1
_FULL = 2
_EVENT_CAP = 3


@njit(cache=True)
def _run(rng, gaps, cursor, next_arr, lams, P, q, r, init_cum, rates, trans_cum,
         state, fstate, counts, target, rec_src, rec_gen, rec_t, max_events):
    """Advance the event loop until a buffer runs dry or every source has ``target`` deliveries.

    ``state = [busy_source, n_records]``; ``fstate = [gen_time, completion_time]``.
    """
    N = lams.shape[0]
    busy = state[0]
    nrec = state[1]
    gen_time = fstate[0]
    completion = fstate[1]
    events = 0
    code = _DONE
    while True:
        done = True
        for n in range(N):
            if counts[n] < target:
                done = False
                break
        if done:
            code = _DONE
            break
        if events >= max_events:
            code = _EVENT_CAP
            break
        if nrec >= rec_t.shape[0]:
            code = _FULL
            break
        m = 0
        t_arr = next_arr[0]
        for n in range(1, N):
            if next_arr[n] < t_arr:
                t_arr = next_arr[n]
                m = n
        if busy >= 0 and completion <= t_arr:
            t = completion
            events += 1
            i = busy
            if rng.random() < q[i]:
                rec_src[nrec] = i
                rec_gen[nrec] = gen_time
                rec_t[nrec] = t
                nrec += 1
                counts[i] += 1
                busy = -1
            elif rng.random() < r[i]:
                completion = t + draw_ph(rng, init_cum[i], rates[i], trans_cum[i])
            else:
                busy = -1
            continue
        if cursor[m] >= gaps.shape[1]:
            code = _REFILL
            break
        events += 1
        t = t_arr
        next_arr[m] = t + gaps[m, cursor[m]] / lams[m]
        cursor[m] += 1
        if busy < 0 or rng.random() < P[busy, m]:
            busy = m
            gen_time = t
            completion = t + draw_ph(rng, init_cum[m], rates[m], trans_cum[m])
    state[0] = busy
    state[1] = nrec
    fstate[0] = gen_time
    fstate[1] = completion
    return code, events


class EmpiricalAoICdf:
    """Exact time-average cdf of a sawtooth path made of cycles rising from ``start`` to ``peak``."""

    def __init__(self, start, peak):
        self.start = np.sort(np.asarray(start, dtype=float))
        self.peak = np.sort(np.asarray(peak, dtype=float))
        self._cs_start = np.concatenate(([0.0], np.cumsum(self.start)))
        self._cs_peak = np.concatenate(([0.0], np.cumsum(self.peak)))
        self.total = float(self._cs_peak[-1] - self._cs_start[-1])

    def _ramp_sum(self, sorted_vals, cs, x):
        k = np.searchsorted(sorted_vals, x, side="right")
        return k * x - cs[k]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        # sum_j clip(x - start_j, 0, peak_j - start_j) / total time
        inside = self._ramp_sum(self.start, self._cs_start, x) - self._ramp_sum(self.peak, self._cs_peak, x)
        return inside / self.total


class EmpiricalCdf:
    """Right-continuous step cdf of a sample."""

    def __init__(self, samples):
        self.samples = np.sort(np.asarray(samples, dtype=float))

    def __call__(self, x):
        return np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right") / self.samples.size


@dataclass(frozen=True)
class MeanCI:
    mean: float
    half_width: float

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width

    def covers(self, value: float) -> bool:
        return self.low <= value <= self.high


@dataclass(eq=False)
class SourceSim:
    source: int
    deliveries: int
    reception_times: np.ndarray
    system_times: np.ndarray
    peaks: np.ndarray
    cycle_start: np.ndarray
    cycle_peak: np.ndarray
    mean_aoi: MeanCI
    mean_paoi: MeanCI

    @property
    def aoi_cdf(self) -> EmpiricalAoICdf:
        return EmpiricalAoICdf(self.cycle_start, self.cycle_peak)

    @property
    def paoi_cdf(self) -> EmpiricalCdf:
        return EmpiricalCdf(self.peaks)

    def aoi_mean_from_areas(self) -> float:
        area = 0.5 * (self.cycle_peak ** 2 - self.cycle_start ** 2).sum()
        return float(area / (self.cycle_peak - self.cycle_start).sum())


@dataclass(eq=False)
class SimResult:
    sources: list[SourceSim]
    horizon: float
    events: int
    seed: int
    warmup: list[int] = field(default_factory=list)

    def __getitem__(self, n: int) -> SourceSim:
        return self.sources[n - 1]


def _batch_ci(num, den, batches=20, level=0.95) -> MeanCI:
    """Ratio estimate ``sum(num)/sum(den)`` with a batch-means confidence interval."""
    k = num.size // batches
    est = float(num.sum() / den.sum())
    if k < 2:
        return MeanCI(est, math.inf)
    nb = num[:k * batches].reshape(batches, k).sum(axis=1)
    db = den[:k * batches].reshape(batches, k).sum(axis=1)
    ratios = nb / db
    half = stats.t.ppf(0.5 + level / 2, batches - 1) * ratios.std(ddof=1) / math.sqrt(batches)
    return MeanCI(est, float(half))


def _source_stats(n, gen, rec, warm) -> SourceSim:
    # Delta(0) = 0 at t = 0 acts as a virtual delivery of a packet generated at 0.
    prev_gen = np.concatenate(([0.0], gen[:-1]))
    peaks = rec - prev_gen
    sys_t = rec - gen
    peaks, sys_t, gen_w, rec_w = peaks[warm:], sys_t[warm:], gen[warm:], rec[warm:]
    start = sys_t[:-1]
    peak = rec_w[1:] - gen_w[:-1]
    length = peak - start
    area = 0.5 * (peak ** 2 - start ** 2)
    return SourceSim(
        source=n,
        deliveries=int(peaks.size),
        reception_times=rec_w,
        system_times=sys_t,
        peaks=peaks,
        cycle_start=start,
        cycle_peak=peak,
        mean_aoi=_batch_ci(area, length),
        mean_paoi=_batch_ci(peaks, np.ones_like(peaks)),
    )


def simulate(system: SystemSpec, min_cycles_per_source: int, seed: int = 0,
             max_events: int | None = None) -> SimResult:
    """Simulate until every source has ``min_cycles_per_source`` successful deliveries after warm-up.

    The first 1% of each source's cycles (at least 10) is discarded.
    Raises :class:`StarvationError` if a source cannot deliver.
    """
    if int(min_cycles_per_source) != min_cycles_per_source or min_cycles_per_source < 1:
        raise DomainError("min_cycles_per_source must be a positive integer")
    N = system.N
    for i, src in enumerate(system.sources):
        if src.error_prob >= 1.0:
            raise StarvationError(i + 1, "every transmission is errored, no packet can succeed")
    warm = max(10, int(math.ceil(0.01 * min_cycles_per_source)))
    target = int(min_cycles_per_source) + warm + 1
    if max_events is None:
        max_events = 2000 * target * N + 10_000_000

    width = max(s.service.order for s in system.sources) + 1
    tables = [_kernels.jump_tables(s.service.sigma, s.service.S, width) for s in system.sources]
    init_cum = np.array([t[0] for t in tables])
    rates = np.array([t[1] for t in tables])
    trans_cum = np.array([t[2] for t in tables])
    lams = system.lams.astype(float)
    P = np.ascontiguousarray(system.preemption, dtype=float)
    q = np.array([s.q for s in system.sources])
    r = np.array([s.retx_prob for s in system.sources])

    seq = np.random.SeedSequence(seed)
    children = seq.spawn(N + 1)
    arr_rngs = [np.random.default_rng(c) for c in children[:N]]
    svc_rng = np.random.default_rng(children[N])

    gaps = np.stack([g.standard_exponential(_BLOCK) for g in arr_rngs])
    cursor = np.zeros(N, dtype=np.int64)
    next_arr = np.empty(N)
    for n in range(N):
        next_arr[n] = gaps[n, 0] / lams[n]
        cursor[n] = 1

    state = np.array([_NO_SOURCE, 0], dtype=np.int64)
    fstate = np.zeros(2)
    counts = np.zeros(N, dtype=np.int64)
    cap = max(4 * target * N, _BLOCK)
    rec_src = np.empty(cap, dtype=np.int64)
    rec_gen = np.empty(cap)
    rec_t = np.empty(cap)
    chunks = []
    events = 0
    while True:
        code, ev = _run(svc_rng, gaps, cursor, next_arr, lams, P, q, r, init_cum, rates, trans_cum,
                        state, fstate, counts, target, rec_src, rec_gen, rec_t, max_events - events)
        events += ev
        if code == _REFILL:
            for n in range(N):
                if cursor[n] >= gaps.shape[1]:
                    gaps[n] = arr_rngs[n].standard_exponential(_BLOCK)
                    cursor[n] = 0
            continue
        if code == _FULL or code == _DONE or code == _EVENT_CAP:
            k = int(state[1])
            chunks.append((rec_src[:k].copy(), rec_gen[:k].copy(), rec_t[:k].copy()))
            state[1] = 0
        if code == _DONE:
            break
        if code == _EVENT_CAP:
            starved = int(np.argmin(counts)) + 1
            raise StarvationError(
                starved, f"only {int(counts.min())} successful deliveries after {events} events"
            )
    src_all = np.concatenate([c[0] for c in chunks])
    gen_all = np.concatenate([c[1] for c in chunks])
    t_all = np.concatenate([c[2] for c in chunks])
    out = []
    for n in range(N):
        mask = src_all == n
        out.append(_source_stats(n + 1, gen_all[mask], t_all[mask], warm))
    horizon = float(t_all[-1]) if t_all.size else 0.0
    return SimResult(out, horizon, events, seed, [warm] * N)


def ks_distance(empirical, analytic, grid) -> float:
    """Largest absolute difference between two cdfs over ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("evaluation grid is empty")
    return float(np.max(np.abs(np.asarray(empirical(grid)) - np.asarray(analytic(grid)))))
