"""Steady-state solution of a Markov fluid queue via the ordered Schur form.

The joint density of (level, state) is ``f(x) = g exp(A x) H`` for ``x > 0``
plus a boundary mass vector ``c`` at ``x = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonErgodicError, NumericalError, SingularMatrixError
from .linalg import ORDER_TOL, expm, householder_similarity, real_schur_ordered, solve_linear
from .mfq import MFQSpec


@dataclass(frozen=True, eq=False)
class SteadyStateSolution:
    g: np.ndarray
    d: np.ndarray
    c: np.ndarray
    A: np.ndarray
    H: np.ndarray
    a: int
    b: int
    residual: float

    @property
    def n(self) -> int:
        return self.a + self.b

    def density(self, x: float) -> np.ndarray:
        """Joint density vector ``g exp(A x) H`` at ``x > 0``."""
        return self.g @ expm(self.A * x) @ self.H

    def total_mass(self) -> float:
        interior = -self.g @ solve_linear(self.A, self.H @ np.ones(self.n))
        return float(interior + self.c.sum())


def _stable_basis(spec: MFQSpec, deflate: bool):
    """Orthogonal ``U`` and stable block ``A`` of ``U^T Q R^{-1} U`` (anti-stable part leading)."""
    n = spec.n
    drifts = spec.drifts
    M = spec.Q / drifts[np.newaxis, :]
    if not deflate:
        sch = real_schur_ordered(M, ORDER_TOL)
        return sch.U, sch.stable_block, sch.a

    # Q R^{-1} (R 1) = Q 1 = 0: reflect R 1 onto e_1 and split off the zero eigenvalue.
    v = drifts.copy()
    W = householder_similarity(v, np.eye(n, 1).ravel())
    M1 = W.T @ M @ W
    if n == 1:
        return W, np.zeros((0, 0)), 1
    lead = np.abs(M1[:, 0]).max()
    if lead > 1e-10 * max(np.linalg.norm(M, np.inf), 1.0):
        raise NumericalError("deflation failed: R 1 is not a null vector of Q R^-1", lead)
    sch = real_schur_ordered(M1[1:, 1:], ORDER_TOL)
    U = W.copy()
    U[:, 1:] = W[:, 1:] @ sch.U
    return U, sch.stable_block, sch.a + 1


def solve_steady_state(spec: MFQSpec, deflate: bool | None = None) -> SteadyStateSolution:
    """Three-step solution: ordered Schur split, boundary linear system, matrix-exponential form.

    ``deflate`` defaults to True for queues built by :mod:`aoif.mfq`; the
    Householder reflection then makes the anti-stable block the scalar 0.
    """
    if deflate is None:
        deflate = spec.index is not None
    n, b_expected = spec.n, spec.b
    U, A, a = _stable_basis(spec, deflate)
    b = n - a
    if a != spec.a:
        raise NonErgodicError(
            f"{a} anti-stable eigenvalues but {spec.a} negative-drift states; no proper steady state"
        )
    H = U[:, a:].T

    # [g d] [[H R, -A^-1 H 1], [-Qtilde*, 1]] = [0, 1]; one balance column is redundant.
    ones = np.ones(n)
    top = np.hstack([H @ spec.R, -solve_linear(A, H @ ones)[:, None]]) if b else np.zeros((0, n + 1))
    bottom = np.hstack([-spec.Qtilde[b_expected:], np.ones((a, 1))])
    M = np.vstack([top, bottom])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    keep = np.r_[0:n - 1, n]
    try:
        x = solve_linear(M[:, keep].T, rhs[keep])
    except SingularMatrixError as exc:
        raise NonErgodicError(f"boundary system is singular: {exc}") from exc
    residual = float(np.abs(x @ M - rhs).max())
    if residual > 1e-8 * max(np.abs(M).max(), 1.0):
        raise NumericalError("boundary system residual too large", residual)
    g, d = x[:b], x[b:]
    c = np.concatenate([np.zeros(b), d])
    return SteadyStateSolution(g=g, d=d, c=c, A=A, H=H, a=a, b=b, residual=residual)


def boundary_mass(solution: SteadyStateSolution, spec: MFQSpec) -> np.ndarray:
    """Probability masses at level zero; non-zero only in negative-drift states."""
    c = np.zeros(spec.n)
    c[spec.drifts < 0] = solution.d
    return c
