"""Markov fluid queue whose level traces the AoI cycles of the tagged source.

States are ordered stage by stage:

* stage 1 -- phases of the tagged (source-1) packet whose system time is being built up;
* stage 2 -- the single idle state ``0``;
* stage 3 -- ``(i, j)``: a source-i packet in service, phase j;
* stage 4 -- the single drain state ``-1``.

The fluid rises at unit rate everywhere except in stage 4, where it drains at
unit rate until it hits zero and the next cycle starts in stage 1.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedReductionError
from .model import SourceSpec, SystemSpec, retag


@dataclass(frozen=True)
class StateIndex:
    stage: int
    source: int | None = None
    phase: int | None = None

    def label(self) -> str:
        if self.stage == 2:
            return "0"
        if self.stage == 4:
            return "-1"
        if self.stage == 1:
            return f"1:{self.phase}"
        return f"({self.source},{self.phase})"


@dataclass(frozen=True, eq=False)
class MFQSpec:
    """Characterizing matrices ``(Q, Qtilde, R)`` of a fluid queue.

    Positive-drift states come first.  ``index`` is ``None`` for queues that
    were not produced by :func:`build_mfq`.
    """

    Q: np.ndarray
    Qtilde: np.ndarray
    R: np.ndarray
    index: tuple[StateIndex, ...] | None = None
    ell1: int = 0
    ell_total: int = 0

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def drifts(self) -> np.ndarray:
        return np.diag(self.R)

    @property
    def b(self) -> int:
        return int(np.sum(self.drifts > 0))

    @property
    def a(self) -> int:
        return self.n - self.b

    @property
    def idle_state(self) -> int:
        return self.ell1

    @property
    def drain_state(self) -> int:
        return self.n - 1

    def stage3_slice(self, pos: int = 1) -> slice:
        """Columns of the stage-3 states of the source at (1-based) position ``pos``."""
        start = self.ell1 + 1
        for st in self.index[start:]:
            if st.stage == 3 and st.source == pos:
                break
            start += 1
        stop = start
        while stop < self.n and self.index[stop].stage == 3 and self.index[stop].source == pos:
            stop += 1
        return slice(start, stop)

    @classmethod
    def general(cls, Q, Qtilde, R) -> "MFQSpec":
        """Wrap arbitrary matrices; drifts must be non-zero with positive ones first."""
        Q = np.asarray(Q, dtype=float)
        Qtilde = np.asarray(Qtilde, dtype=float)
        R = np.asarray(R, dtype=float)
        r = np.diag(R)
        if np.any(r == 0):
            raise ValueError("all drifts must be non-zero")
        b = int(np.sum(r > 0))
        if np.any(r[:b] <= 0):
            raise ValueError("positive-drift states must precede negative-drift states")
        return cls(Q, Qtilde, R)


def _state_index(system: SystemSpec) -> tuple[StateIndex, ...]:
    ell1 = system.sources[0].service.order
    idx = [StateIndex(1, 1, j + 1) for j in range(ell1)]
    idx.append(StateIndex(2))
    for i, src in enumerate(system.sources):
        idx.extend(StateIndex(3, i + 1, j + 1) for j in range(src.service.order))
    idx.append(StateIndex(4))
    return tuple(idx)


def build_mfq(system: SystemSpec) -> MFQSpec:
    """Assemble ``(Q, Qtilde, R)`` for the tagged source of ``system``.

    A system tagged on a source other than the first is retagged first.
    """
    if system.tagged != 1:
        system = retag(system, system.tagged)
    srcs = system.sources
    lams = system.lams
    lam_bar = system.preempting_rates
    P = system.preemption
    orders = [s.service.order for s in srcs]
    ell1, ell_t = orders[0], sum(orders)
    n = ell_t + ell1 + 2
    s1 = srcs[0]
    sig1, S1, nu1 = s1.service.sigma, s1.service.S, s1.service.nu
    e1, q1, r1, d1 = s1.error_prob, s1.q, s1.retx_prob, s1.d

    Q = np.zeros((n, n))
    st1 = slice(0, ell1)
    idle = ell1
    drain = n - 1
    offsets = np.concatenate(([ell1 + 1], ell1 + 1 + np.cumsum(orders)))
    blk = [slice(offsets[i], offsets[i + 1]) for i in range(len(srcs))]

    # stage 1
    Q[st1, st1] = S1 - lam_bar[0] * np.eye(ell1) + e1 * r1 * np.outer(nu1, sig1)
    Q[st1, idle] = q1 * nu1
    Q[st1, drain] = lam_bar[0] + e1 * d1 * nu1

    # stage 2
    Q[idle, idle] = -lams.sum()
    for i, src in enumerate(srcs):
        Q[idle, blk[i]] = src.lam * src.service.sigma

    # stage 3
    for i, src in enumerate(srcs):
        sig, S, nu = src.service.sigma, src.service.S, src.service.nu
        li = src.service.order
        for m, other in enumerate(srcs):
            F = np.outer(np.ones(li), other.service.sigma)
            Q[blk[i], blk[m]] += lams[m] * P[i, m] * F
        Q[blk[i], blk[i]] += S - lam_bar[i] * np.eye(li) + src.error_prob * src.retx_prob * np.outer(nu, sig)
        if i == 0:
            Q[blk[i], idle] = src.error_prob * src.d * nu
            Q[blk[i], drain] = src.q * nu
        else:
            Q[blk[i], idle] = (src.q + src.error_prob * src.d) * nu

    Qtilde = Q.copy()
    Qtilde[drain, st1] = sig1
    Qtilde[drain, drain] = -1.0
    R = np.eye(n)
    R[drain, drain] = -1.0
    for M in (Q, Qtilde, R):
        M.setflags(write=False)
    return MFQSpec(Q, Qtilde, R, _state_index(system), ell1, ell_t)


def reduction_applies(system: SystemSpec) -> bool:
    """True when every source shares the service law and error/retransmission pair under global preemption."""
    s0 = system.sources[0]
    return (bool(np.all(system.preemption == 1.0))
            and all(s.service == s0.service and s.error_prob == s0.error_prob
                    and s.retx_prob == s0.retx_prob for s in system.sources))


def build_reduced_global(system: SystemSpec) -> MFQSpec:
    """Fluid queue of the auxiliary two-source system for homogeneous global preemption.

    Sources other than the tagged one are merged into a single Poisson source
    of rate ``lambda - lambda_1``; the size is ``3 l + 2`` regardless of N.
    """
    if not reduction_applies(system):
        raise UnsupportedReductionError(
            "reduction needs global preemption and identical service, error and retransmission parameters"
        )
    if system.tagged != 1:
        system = retag(system, system.tagged)
    if system.N <= 2:
        return build_mfq(system)
    s1 = system.sources[0]
    merged = SourceSpec(float(system.lams[1:].sum()), s1.service, s1.error_prob, s1.retx_prob)
    return build_mfq(SystemSpec((s1, merged), np.ones((2, 2))))


def dump_generator_csv(spec: MFQSpec) -> str:
    """CSV legend of ``Q``, ``Qtilde`` and ``R``: one row per (matrix, state)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = spec.n
    w.writerow(["matrix", "stage", "source", "phase"] + [f"c{j}" for j in range(n)])
    index = spec.index or tuple(StateIndex(0) for _ in range(n))
    for name, M in (("Q", spec.Q), ("Qtilde", spec.Qtilde), ("R", spec.R)):
        for st, row in zip(index, M):
            w.writerow([name, st.stage, "" if st.source is None else st.source,
                        "" if st.phase is None else st.phase] + [repr(float(x)) for x in row])
    return buf.getvalue()
