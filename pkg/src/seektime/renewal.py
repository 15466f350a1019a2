"""Renewal statistics of state visits: the bus paradox made executable.

Watching a chain visit one fixed state gives a discrete renewal process.
Its interarrival mean, interarrival variance, the mean wait from a
stationary instant to the next visit, and the long-run variance rate of the
visit count are all equivalent pieces of information; this module holds the
conversions between them and the finite-support sums that prove them.

All formulas are discrete-time and keep their ``-1/2`` correction; no
continuous-time variant is offered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError

NOISE_FLOOR = -1e-12  # rounding this small clamps to zero
BUG_FLOOR = -1e-9  # more negative than this is a bug, not noise
BUS_IDENTITY_RTOL = 1e-12
PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class RenewalStats:
    """Per-state renewal record for a Markov chain.

    mean_return
        Expected steps between successive visits (reciprocal stationary
        probability).
    equilibrium_wait
        Expected steps from a stationary instant to the next visit.
    return_variance
        Variance of the time between successive visits.
    clt_rate
        Per-step variance of the visit count: over a long horizon T the
        count is approximately Gaussian with mean ``T * w_j`` and variance
        ``T * clt_rate``.
    excess_visits
        Expected excess visits to the state when starting in it, relative
        to a stationary start (the diagonal of the fundamental matrix).
    """

    state: int
    mean_return: float
    equilibrium_wait: float
    return_variance: float
    clt_rate: float
    excess_visits: float


def _clamp(value: float, name: str, state: int) -> float:
    if value >= 0.0:
        return value
    if value >= NOISE_FLOOR:
        return 0.0
    if value >= BUG_FLOOR:
        # between the noise floor and the bug floor: suspicious but tolerated
        return 0.0
    raise ConsistencyError(
        f"{name} for state {state} came out {value!r}; a nonnegative "
        "quantity this far below zero means broken numerics upstream"
    )


def renewal_stats(Z: np.ndarray, w: np.ndarray, j: int) -> RenewalStats:
    """Renewal record of state ``j`` from the fundamental matrix and ``w``."""
    n = w.shape[0]
    if not 0 <= j < n:
        raise IndexError(f"state index {j} out of range 0..{n - 1}")
    z_jj = float(Z[j, j])
    w_j = float(w[j])
    mu = 1.0 / w_j
    tau = z_jj / w_j
    sigma2 = 2.0 * mu * tau + mu - mu * mu
    rate = 2.0 * z_jj * w_j + w_j * w_j - w_j
    return RenewalStats(
        state=j,
        mean_return=mu,
        equilibrium_wait=tau,
        return_variance=_clamp(sigma2, "return-time variance", j),
        clt_rate=_clamp(rate, "visit-count variance rate", j),
        excess_visits=z_jj,
    )


def renewal_table(Z: np.ndarray, w: np.ndarray) -> list[RenewalStats]:
    """Renewal records for every state."""
    return [renewal_stats(Z, w, j) for j in range(w.shape[0])]


def equilibrium_wait(mean: float, variance: float) -> float:
    """Mean wait from a stationary instant to the next renewal.

    ``(mean^2 + variance) / (2 mean) - 1/2``; the ``-1/2`` is the discrete
    clock. Longer interarrival gaps are more likely to contain the chosen
    instant, so the wait is at least ``mean/2 - 1/2``, with equality exactly
    for constant interarrival times.
    """
    if mean < 1.0:
        raise ValueError(f"interarrival mean must be >= 1 step, got {mean!r}")
    if variance < 0.0:
        raise ValueError(f"variance must be nonnegative, got {variance!r}")
    return (mean * mean + variance) / (2.0 * mean) - 0.5


def excess_visits_from_moments(mean: float, variance: float) -> float:
    """Recover the self-excess-visit count from return-time moments.

    ``(variance - mean + mean^2) / (2 mean^2)``: the inverse of reading the
    moments off the fundamental matrix, so composing the two directions is
    the identity.
    """
    if mean < 1.0:
        raise ValueError(f"interarrival mean must be >= 1 step, got {mean!r}")
    if variance < 0.0:
        raise ValueError(f"variance must be nonnegative, got {variance!r}")
    return (variance - mean + mean * mean) / (2.0 * mean * mean)


@dataclass(frozen=True)
class InterarrivalDistribution:
    """A finite-support law of a positive integer interarrival time.

    Unbounded laws enter via explicit truncation and renormalization by the
    caller; keeping the support finite keeps every computation here an exact
    finite sum.
    """

    times: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times)
        probs = np.asarray(self.probs, dtype=float)
        if times.size == 0:
            raise ValueError("interarrival distribution needs at least one support point")
        if times.shape != probs.shape or times.ndim != 1:
            raise ValueError("times and probs must be 1-d arrays of equal length")
        if not np.issubdtype(times.dtype, np.integer):
            as_int = times.astype(np.int64)
            if np.any(as_int != times):
                raise ValueError("interarrival times must be integers")
            times = as_int
        if times.min() < 1:
            raise ValueError("interarrival times must be positive (discrete steps)")
        if np.unique(times).size != times.size:
            raise ValueError("interarrival times must be distinct")
        if probs.min() < 0.0:
            raise ValueError(f"probabilities must be nonnegative, got min {probs.min()!r}")
        total = probs.sum()
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1 within {PROB_SUM_TOL}")
        order = np.argsort(times)
        times = times[order].copy()
        probs = probs[order].copy()
        times.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "probs", probs)


def interarrival_stats(dist: InterarrivalDistribution) -> tuple[float, float, float]:
    """(mean, variance, equilibrium wait) of a finite-support interarrival law.

    The wait is computed two independent ways: the direct size-biased sum
    ``sum((n-1)/2 * n * p) / sum(n * p)`` and the moment formula of
    :func:`equilibrium_wait`. They are equal as an algebraic identity, so
    disagreement beyond ``1e-12`` relative raises :class:`ConsistencyError`.
    """
    t = dist.times.astype(float)
    p = dist.probs
    mean = float(t @ p)
    second = float((t * t) @ p)
    variance = max(second - mean * mean, 0.0)
    direct = float(((t - 1.0) / 2.0 * t) @ p) / mean
    from_moments = equilibrium_wait(mean, variance)
    scale = max(1.0, abs(direct))
    if abs(direct - from_moments) > BUS_IDENTITY_RTOL * scale:
        raise ConsistencyError(
            f"size-biased wait {direct!r} and moment-formula wait "
            f"{from_moments!r} disagree; the identity between them is exact"
        )
    return mean, variance, direct


@dataclass(frozen=True)
class RenewalCountApprox:
    """First-order approximations for the renewal count over a horizon.

    Always asymptotic: the dropped terms are o(1) for the mean and o(T) for
    the variance, so at small horizons these are estimates, never exact
    values. ``asymptotic`` travels with the record so downstream output can
    say so.
    """

    mean: float
    variance: float
    asymptotic: bool = True


def expected_renewal_count(mean: float, variance: float, horizon: int) -> RenewalCountApprox:
    """Approximate mean and variance of the number of renewals in ``horizon`` steps.

    ``mean ~ (T+1)/mu + (sigma^2 - mu - mu^2) / (2 mu^2)`` and
    ``variance ~ (sigma^2 / mu^3) T``, dropped terms o(1) and o(T).
    """
    if mean < 1.0:
        raise ValueError(f"interarrival mean must be >= 1 step, got {mean!r}")
    if variance < 0.0:
        raise ValueError(f"variance must be nonnegative, got {variance!r}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1 step, got {horizon!r}")
    mean_approx = (horizon + 1) / mean + (variance - mean - mean * mean) / (2.0 * mean * mean)
    var_approx = variance / mean**3 * horizon
    return RenewalCountApprox(mean=mean_approx, variance=var_approx)


def clt_gaussian_params(mean: float, variance: float, horizon: int) -> tuple[float, float]:
    """Gaussian (mean, variance) of the renewal count over a long horizon.

    ``(T / mu, T sigma^2 / mu^3)``. For visits to a chain state this equals
    ``(T w_j, T * clt_rate)`` with the rate from :func:`renewal_stats`.
    """
    if mean < 1.0:
        raise ValueError(f"interarrival mean must be >= 1 step, got {mean!r}")
    if variance < 0.0:
        raise ValueError(f"variance must be nonnegative, got {variance!r}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1 step, got {horizon!r}")
    return horizon / mean, horizon * variance / mean**3
