"""Eigenvalue route to the Kemeny constant, and the spectral lower bound.

The transition matrix has one eigenvalue at 1; the remaining ones live in
the unit disk, which the map ``z -> 1/(1-z)`` sends into the half plane
``Re >= 1/2``. Summing the mapped values gives the Kemeny constant again,
and the half-plane picture gives the floor ``(n-1)/2`` for free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import StochasticMatrix
from .errors import ConsistencyError, MultiplicityError, StructureError

UNIT_EIGENVALUE_TOL = 1e-8  # |alpha_0 - 1| beyond this means not irreducible
# a second eigenvalue closer to 1 than this makes 1/(1-alpha) meaningless
MULTIPLICITY_TOL = 1e-12
IMAG_RTOL = 1e-8  # imaginary residual allowed per state
LOWER_BOUND_SLACK_TOL = 1e-9


def eigenvalues(P: StochasticMatrix) -> np.ndarray:
    """All eigenvalues of the transition matrix, unit eigenvalue first.

    Dense nonsymmetric solve (Hessenberg reduction + shifted QR, via
    LAPACK); no eigenvectors are computed because none are needed. The
    remaining values are sorted by descending real part, then descending
    imaginary part, purely to make output deterministic.

    Raises :class:`StructureError` when no eigenvalue sits within ``1e-8``
    of 1, which means the chain is not irreducible or the solver failed.
    """
    try:
        alphas = np.linalg.eigvals(P.entries)
    except np.linalg.LinAlgError as exc:
        raise ConsistencyError(f"eigenvalue iteration did not converge: {exc}") from exc
    i0 = int(np.argmin(np.abs(alphas - 1.0)))
    if abs(alphas[i0] - 1.0) > UNIT_EIGENVALUE_TOL:
        raise StructureError(
            f"closest eigenvalue to 1 is {alphas[i0]!r}; the chain is not "
            "irreducible or the eigensolver failed"
        )
    rest = np.delete(alphas, i0)
    order = np.lexsort((-rest.imag, -rest.real))
    return np.concatenate(([alphas[i0]], rest[order]))


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues of the chain and the Kemeny constant computed from them.

    ``alphas`` holds the transition-matrix eigenvalues with the unit one in
    front; ``lambdas`` the complementary values ``1 - alpha``.
    ``imag_residual`` is the magnitude of the imaginary part discarded from
    the eigenvalue sum, which must be noise: non-real eigenvalues of a real
    matrix come in conjugate pairs, so the sum is real.
    """

    alphas: np.ndarray
    lambdas: np.ndarray
    kemeny: float
    imag_residual: float


def kemeny_spectral(alphas: np.ndarray) -> SpectralSummary:
    """Kemeny constant as ``sum(1 / (1 - alpha))`` over non-unit eigenvalues.

    ``alphas`` must have the designated unit eigenvalue first (see
    :func:`eigenvalues`).

    Raises
    ------
    MultiplicityError
        If another eigenvalue lies within ``1e-12`` of 1: the chain is
        effectively reducible and the sum would be a huge meaningless number.
    ConsistencyError
        If the discarded imaginary part exceeds ``1e-8 * n``.
    """
    alphas = np.asarray(alphas, dtype=complex)
    n = alphas.shape[0]
    rest = alphas[1:]
    gaps = np.abs(1.0 - rest)
    if gaps.size and gaps.min() < MULTIPLICITY_TOL:
        k = int(np.argmin(gaps))
        raise MultiplicityError(
            f"eigenvalue {rest[k]!r} is within {MULTIPLICITY_TOL} of 1; the "
            "chain is effectively reducible"
        )
    total = np.sum(1.0 / (1.0 - rest)) if rest.size else 0.0 + 0.0j
    imag_residual = abs(float(np.imag(total)))
    if imag_residual > IMAG_RTOL * n:
        raise ConsistencyError(
            f"eigenvalue sum has imaginary residual {imag_residual!r} "
            f"(limit {IMAG_RTOL * n}); conjugate pairing is broken"
        )
    return SpectralSummary(
        alphas=alphas,
        lambdas=1.0 - alphas,
        kemeny=float(np.real(total)),
        imag_residual=imag_residual,
    )


def half_plane_margin(alphas: np.ndarray) -> float:
    """min ``Re(1/(1-alpha)) - 1/2`` over non-unit eigenvalues (>= 0 in theory).

    The unit disk maps onto ``Re >= 1/2`` under ``z -> 1/(1-z)``, so a
    negative margin beyond noise is an eigensolver bug.
    """
    rest = np.asarray(alphas, dtype=complex)[1:]
    if rest.size == 0:
        return 0.0
    return float(np.min(np.real(1.0 / (1.0 - rest))) - 0.5)


def conjugate_closure_residual(alphas: np.ndarray) -> float:
    """How far the eigenvalue multiset is from being conjugation-closed.

    For every eigenvalue, distance to the nearest eigenvalue of the
    conjugate; the max over the set is noise-level for a real input matrix.
    """
    a = np.asarray(alphas, dtype=complex)
    dist = np.abs(a[:, None] - np.conj(a)[None, :])
    return float(dist.min(axis=1).max())


@dataclass(frozen=True)
class BoundReport:
    """The Kemeny constant against its floor ``(n - 1) / 2``."""

    kemeny: float
    floor: float
    slack: float
    attained: bool


def check_lower_bound(kemeny: float, n: int) -> BoundReport:
    """Compare a Kemeny constant against ``(n - 1) / 2``.

    The bound holds for every irreducible n-state chain and is attained
    exactly by deterministic cycles. ``slack`` below ``-1e-9`` raises
    :class:`ConsistencyError`: the inequality is a theorem, so crossing it
    signals a bug.
    """
    floor = (n - 1) / 2.0
    slack = kemeny - floor
    if slack < -LOWER_BOUND_SLACK_TOL:
        raise ConsistencyError(
            f"Kemeny constant {kemeny!r} fell below its floor {floor} "
            f"by {-slack!r}; this inequality is a theorem"
        )
    return BoundReport(
        kemeny=kemeny,
        floor=floor,
        slack=slack,
        attained=slack <= LOWER_BOUND_SLACK_TOL,
    )
