"""Dense real linear-algebra kernels used by the fluid-queue solver.

The heavy lifting is delegated to LAPACK through :mod:`scipy.linalg`; this
module adds the input checks, the stability classification and the error
reporting the solver relies on.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ClassificationError, DomainError, NumericalError, SingularMatrixError

#: Eigenvalues with real part >= -ORDER_TOL are classified anti-stable.
ORDER_TOL = 1e-9


def _square(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DomainError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True)
class OrderedSchur:
    """Real Schur form ``U.T @ M @ U = T`` with the anti-stable block leading.

    ``T[:a, :a]`` holds eigenvalues with real part >= -split and
    ``T[a:, a:]`` the stable ones.
    """

    U: np.ndarray
    T: np.ndarray
    a: int
    b: int

    @property
    def stable_block(self) -> np.ndarray:
        return self.T[self.a:, self.a:]

    @property
    def antistable_block(self) -> np.ndarray:
        return self.T[:self.a, :self.a]


def schur_blocks(T, tol=0.0):
    """Return ``(start, size)`` for each 1x1 or 2x2 diagonal block of a quasi-triangular ``T``.

    LAPACK writes exact zeros below 1x1 blocks, hence the default ``tol``.
    """
    n = T.shape[0]
    blocks = []
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > tol:
            blocks.append((i, 2))
            i += 2
        else:
            blocks.append((i, 1))
            i += 1
    return blocks


def _block_real_parts(T, start, size):
    if size == 1:
        return np.array([T[start, start]])
    return np.linalg.eigvals(T[start:start + 2, start:start + 2]).real


def real_schur_ordered(M, split: float = ORDER_TOL) -> OrderedSchur:
    """Ordered real Schur decomposition of ``M``.

    Eigenvalues with ``Re >= -split`` are moved to the leading block.

    Raises
    ------
    NumericalError
        If the QR iteration or the block reordering fails.
    ClassificationError
        If a 2x2 block has eigenvalues on both sides of the split.
    """
    M = _square(M)
    n = M.shape[0]
    try:
        T, U, sdim = sla.schur(M, output="real", sort=lambda re, im: re >= -split)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"ordered real Schur decomposition failed: {exc}") from exc
    if not (np.all(np.isfinite(T)) and np.all(np.isfinite(U))):
        raise NumericalError("ordered real Schur decomposition produced non-finite values")

    for start, size in schur_blocks(T):
        re = _block_real_parts(T, start, size)
        anti = re >= -split
        if anti.any() and not anti.all():
            raise ClassificationError(
                f"2x2 block at {start} straddles the stability split: real parts {re}"
            )
        if bool(anti[0]) != (start < sdim):
            raise ClassificationError(
                f"block at {start} with real part {re[0]:.3e} is on the wrong side of the split"
            )
    resid = np.linalg.norm(U.T @ M @ U - T, np.inf)
    if resid > 1e-10 * n * np.linalg.norm(M, np.inf) + np.finfo(float).tiny:
        raise NumericalError("Schur similarity residual too large", resid)
    return OrderedSchur(U=U, T=T, a=int(sdim), b=n - int(sdim))


def householder_similarity(v, w) -> np.ndarray:
    """Householder reflector ``U`` that maps ``||v|| * w`` onto ``v``.

    ``U = I - 2 u u^T / (u^T u)`` with ``u = v - ||v|| w``.  The reflector
    is symmetric and orthogonal.  If ``v`` is already a positive multiple of
    ``w`` the identity is returned.
    """
    v = np.asarray(v, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    if v.shape != w.shape:
        raise DomainError("v and w must have the same length")
    norm_v = np.linalg.norm(v)
    if norm_v == 0.0:
        raise DomainError("cannot build a reflector from the zero vector")
    u = v - norm_v * w
    uu = u @ u
    if uu <= (1e-14 * norm_v) ** 2:
        return np.eye(v.size)
    return np.eye(v.size) - (2.0 / uu) * np.outer(u, u)


def _is_triangular(M) -> bool:
    return not np.any(np.tril(M, -1)) or not np.any(np.triu(M, 1))


def expm(M) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a degree-13 Pade approximant.

    scipy treats triangular input specially and recomputes the first
    off-diagonal as ``(e^b - e^a) / (b - a)``, which cancels badly when two
    diagonal entries are close but not equal.  Schur blocks hit this case,
    so triangular input is rotated by a fixed reflector first.
    """
    M = _square(M)
    n = M.shape[0]
    W = None
    if not np.any(M - np.diag(np.diag(M))):
        with np.errstate(over="raise"):
            try:
                return np.diag(np.exp(np.diag(M)))
            except FloatingPointError as exc:
                raise NumericalError(f"overflow in matrix exponential: {exc}") from exc
    if n > 1 and _is_triangular(M):
        W = np.eye(n) - (2.0 / n) * np.ones((n, n))
        M = W @ M @ W
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = sla.expm(M)
            if W is not None:
                E = W @ E @ W
        except FloatingPointError as exc:
            raise NumericalError(f"overflow in matrix exponential: {exc}") from exc
    if not np.all(np.isfinite(E)):
        raise NumericalError("overflow in matrix exponential")
    return E


def solve_linear(M, B) -> np.ndarray:
    """Solve ``M X = B`` by LU with partial pivoting.

    Raises :class:`SingularMatrixError` when a pivot is negligible relative
    to ``||M||``.
    """
    M = _square(M)
    B = np.asarray(B, dtype=float)
    n = M.shape[0]
    with warnings.catch_warnings():
        # singularity is reported below with the offending pivot
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diag(lu))
    norm_m = np.abs(M).sum(axis=1).max()
    if norm_m == 0.0 or pivots.min() <= n * np.finfo(float).eps * norm_m:
        raise SingularMatrixError("matrix is singular to working precision", float(pivots.min()))
    X = sla.lu_solve((lu, piv), B, check_finite=False)
    return X
