"""Fundamental matrix, mean hitting times and the Kemeny constant.

The central object is the matrix of expected excess visits: entry (i, j) is
how many more visits to j a walk started at i accumulates, compared with a
walk started in equilibrium. Its rows sum to zero, its columns sum to zero
under the stationary weights, and everything else here (hitting times, times
to and from equilibrium, the Kemeny constant) is finite arithmetic on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .chain import StochasticMatrix
from .errors import ConditioningError, ConsistencyError

# spread of the mean-times-to-equilibrium vector, relative to max(1, K):
# constancy is a theorem, so exceeding this means a bug, not an input problem
CONSTANCY_RTOL = 1e-8
STRUCTURE_ATOL = 1e-9  # zero row sums / zero weighted column sums


def fundamental_matrix(
    P: StochasticMatrix, w: np.ndarray, check: bool = False
) -> np.ndarray:
    """Expected-excess-visits matrix of an irreducible chain.

    Solves ``(I - P + 1 w) X = I`` with one LU factorization and n solves
    (cheaper and more accurate than forming an explicit inverse), then
    removes the rank-one part: the result is ``inv(I - P + 1w) - 1w``.

    With ``check=True`` the zero-row-sum and zero-weighted-column-sum
    structure is asserted to ``1e-9``; a violation raises
    :class:`ConsistencyError`.
    """
    n = P.n
    A = np.eye(n) - P.entries + w[None, :]
    try:
        lu, piv = lu_factor(A)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(
            "factorization of the resolvent system failed; the chain is "
            f"numerically reducible ({exc})"
        ) from exc
    Z = lu_solve((lu, piv), np.eye(n)) - w[None, :]
    if not np.all(np.isfinite(Z)):
        raise ConditioningError(
            "resolvent solve produced non-finite entries; the chain is "
            "numerically reducible"
        )
    if check:
        residuals = structure_residuals(Z, w)
        worst = max(residuals.values())
        if worst > STRUCTURE_ATOL:
            raise ConsistencyError(
                f"fundamental-matrix structure violated: {residuals} "
                f"(limit {STRUCTURE_ATOL})"
            )
    return Z


def structure_residuals(Z: np.ndarray, w: np.ndarray) -> dict[str, float]:
    """Max absolute row-sum and stationary-weighted column-sum of ``Z``."""
    return {
        "row_sums": float(np.abs(Z.sum(axis=1)).max()),
        "weighted_column_sums": float(np.abs(w @ Z).max()),
    }


def mean_hitting_times(Z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Matrix of expected step counts to first reach column state from row state.

    ``M[i, j] = (Z[j, j] - Z[i, j]) / w[j]``, with the diagonal forced to
    exactly zero (the convention for the hitting time of the start state)
    rather than trusting the subtraction to cancel.
    """
    diag = np.diag(Z)
    M = (diag[None, :] - Z) / w[None, :]
    np.fill_diagonal(M, 0.0)
    return M


def hitting_recurrence_residual(P: StochasticMatrix, M: np.ndarray) -> float:
    """Worst violation of the one-step equation ``M = 1 + P M`` off the diagonal.

    The diagonal is excluded: there the same algebra yields the mean return
    time instead (see :func:`return_time_residual`).
    """
    E = 1.0 + P.entries @ M - M
    off = E[~np.eye(P.n, dtype=bool)]
    return float(np.abs(off).max()) if off.size else 0.0


def return_time_residual(P: StochasticMatrix, M: np.ndarray, w: np.ndarray) -> float:
    """Worst violation of ``1 + (P M)[j, j] = 1 / w[j]``.

    One step plus the mean hitting time back to the start is the mean return
    time, whose value is the reciprocal stationary probability.
    """
    back = 1.0 + np.einsum("ij,ji->i", P.entries, M)
    return float(np.abs(back - 1.0 / w).max())


def kemeny_trace(Z: np.ndarray) -> float:
    """Kemeny constant as the trace of the expected-excess-visits matrix."""
    return float(np.trace(Z))


@dataclass(frozen=True)
class SeekTimeReport:
    """Mean times to and from equilibrium, and their common summary value.

    ``to_equilibrium[i]`` is the expected number of steps from state i to a
    target drawn from the stationary distribution. It is the same for every
    i (a theorem), so ``kemeny`` is its mean and ``constancy_spread`` the
    max-min gap, which must sit at numerical noise level.
    ``from_equilibrium[j]`` is the expected number of steps from a
    stationary start to state j; its stationary-weighted mean equals
    ``kemeny`` again.
    """

    kemeny: float
    to_equilibrium: np.ndarray
    from_equilibrium: np.ndarray
    constancy_spread: float


def mean_time_to_equilibrium(M: np.ndarray, w: np.ndarray) -> SeekTimeReport:
    """Aggregate hitting times into the seek-time report.

    Raises :class:`ConsistencyError` if the to-equilibrium vector is not
    constant within ``1e-8 * max(1, K)`` (relative tolerance: the constant
    grows with chain size and stiffness, so an absolute gate would
    false-alarm on big chains).
    """
    to_eq = M @ w
    from_eq = w @ M
    spread = float(to_eq.max() - to_eq.min())
    kemeny = float(to_eq.mean())
    if spread > CONSTANCY_RTOL * max(1.0, abs(kemeny)):
        raise ConsistencyError(
            f"mean time to equilibrium is not constant: spread {spread!r} for "
            f"value {kemeny!r}; this is a theorem, so upstream numerics are broken"
        )
    return SeekTimeReport(
        kemeny=kemeny,
        to_equilibrium=to_eq,
        from_equilibrium=from_eq,
        constancy_spread=spread,
    )


def mean_time_from_equilibrium(Z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Expected steps from a stationary start to each state: ``Z[j, j] / w[j]``.

    The stationary-weighted mean of this vector is the Kemeny constant;
    :func:`equilibrium_target_residual` exposes that identity as a check.
    """
    return np.diag(Z) / w


def equilibrium_target_residual(Z: np.ndarray, w: np.ndarray) -> float:
    """|sum_j from_equilibrium[j] * w[j] - trace| -- zero in exact arithmetic."""
    from_eq = mean_time_from_equilibrium(Z, w)
    return abs(float(from_eq @ w) - kemeny_trace(Z))


def harmonic_residual(P: StochasticMatrix, M: np.ndarray, w: np.ndarray) -> float:
    """Max-norm of ``P v - v`` for the mean-time-to-equilibrium vector ``v``.

    Averaging over one step must reproduce the vector exactly: a step toward
    a stationary target is wasted only when the target is the current state,
    and the +1 for the step cancels the expected length of that wasted
    round trip.
    """
    v = M @ w
    return float(np.abs(P.entries @ v - v).max())


def constant_vector_residual(P: StochasticMatrix) -> float:
    """How far the pinned solution of ``(I - P) f = 0`` is from all-ones.

    The only functions fixed by averaging over the chain are the constants
    (maximum principle). Pinning ``f[0] = 1`` makes the system nonsingular;
    the solution must come back constant.
    """
    n = P.n
    A = np.eye(n) - P.entries
    A[0, :] = 0.0
    A[0, 0] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    try:
        f = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"pinned harmonic solve failed: {exc}") from exc
    return float(np.abs(f - 1.0).max())
