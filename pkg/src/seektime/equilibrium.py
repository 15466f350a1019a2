"""Equilibrium distribution and the rank-one time-average limit of the chain.

The stationary vector is computed with Grassmann-Taksar-Heyman state
elimination, which never subtracts like-signed quantities and therefore
stays accurate on stiff and on periodic chains. A plain dense solve of the
normalized eigensystem is kept around as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve

from .chain import StochasticMatrix, classify_structure
from .errors import ConditioningError, StructureError

# below this, a stationary component is indistinguishable from an unreachable state
MIN_COMPONENT = 1e-300


def stationary_distribution(P: StochasticMatrix) -> np.ndarray:
    """Equilibrium row vector ``w`` with ``w P = w`` and ``sum(w) = 1``.

    Uses GTH elimination: O(n^3), division-free of cancellations, valid for
    periodic chains because it never forms powers of ``P``.

    Raises
    ------
    StructureError
        If the chain is reducible (the stationary vector is not unique).
    ConditioningError
        If elimination stalls or a component underflows to effectively zero.
    """
    structure = classify_structure(P)
    if not structure.irreducible:
        k = len(structure.communicating_classes)
        raise StructureError(
            f"chain is reducible ({k} communicating classes); "
            "the equilibrium distribution is not unique"
        )
    w = _gth(P.entries)
    if w.min() < MIN_COMPONENT:
        j = int(np.argmin(w))
        raise ConditioningError(
            f"stationary component of state {j} underflowed ({float(w[j])!r}); "
            "the chain is numerically indistinguishable from a reducible one"
        )
    return w


def _gth(P: np.ndarray) -> np.ndarray:
    """GTH elimination on a copy of a row-stochastic matrix."""
    A = P.astype(float, copy=True)
    n = A.shape[0]
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        if s <= 0.0:
            raise ConditioningError(
                f"GTH elimination stalled at state {k}: no transitions back "
                "into the remaining states (chain effectively reducible)"
            )
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    w = np.zeros(n)
    w[0] = 1.0
    for k in range(1, n):
        w[k] = w[:k] @ A[:k, k]
    return w / w.sum()


def stationary_distribution_direct(P: StochasticMatrix) -> np.ndarray:
    """Dense-solve route to ``w``: (I - P^T) with a normalization row.

    Independent of the GTH path; used by the verification suite to
    cross-check the primary algorithm.
    """
    n = P.n
    B = np.eye(n) - P.entries.T
    B[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        w = solve(B, rhs)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"normalized stationary solve failed: {exc}") from exc
    return w


@dataclass(frozen=True)
class CesaroLimit:
    """The rank-one limit of the running averages of the powers of ``P``.

    Every row equals the stationary vector, so the matrix is stored
    implicitly as that single row; :meth:`dense` materializes it on demand
    only (diagnostics, pretty-printing).
    """

    row: np.ndarray

    def __post_init__(self):
        row = np.asarray(self.row, dtype=float).copy()
        row.setflags(write=False)
        object.__setattr__(self, "row", row)

    @property
    def n(self) -> int:
        return self.row.shape[0]

    def dense(self) -> np.ndarray:
        return np.tile(self.row, (self.n, 1))


def cesaro_limit(P: StochasticMatrix, w: np.ndarray) -> CesaroLimit:
    """The limit matrix, given the stationary vector of ``P``."""
    if w.shape != (P.n,):
        raise ValueError(f"stationary vector has shape {w.shape}, expected ({P.n},)")
    return CesaroLimit(row=w)


def averaging_residuals(
    P: StochasticMatrix, limit: CesaroLimit, checkpoints: list[int]
) -> list[float]:
    """Max-norm distance of the running power averages from the limit.

    For each ``m`` in ``checkpoints`` (increasing), returns
    ``max_abs((1/m) * sum_{k<m} P^k - limit)``. Plain powers need not
    converge (periodic chains); the averages always do, so the residuals
    must trend to zero. Diagnostic only: O(max(m) * n^3).
    """
    if checkpoints != sorted(checkpoints) or not checkpoints or checkpoints[0] < 1:
        raise ValueError("checkpoints must be increasing positive integers")
    dense_limit = limit.dense()
    acc = np.zeros_like(dense_limit)
    power = np.eye(P.n)
    residuals = []
    k = 0
    for m in checkpoints:
        while k < m:
            acc += power
            power = power @ P.entries
            k += 1
        residuals.append(float(np.abs(acc / m - dense_limit).max()))
    return residuals
