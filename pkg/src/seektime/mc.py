"""Seeded Monte Carlo simulation of the chain: the empirical oracle.

Every analytic quantity in this package (stationary probabilities, hitting
times, the Kemeny constant, return-time moments, visit-count variance) has
an estimator here that knows nothing about the formulas and just walks the
chain, so agreement between the two sides is meaningful evidence.

Reproducibility contract: every estimator is a deterministic function of
its inputs and the seed. Each replica draws from its own substream, derived
by hashing (seed, estimator tag, replica index), and replicas are
aggregated in index order, so results are bitwise identical no matter how
replicas are batched or parallelized. Within a replica the stream is spent
as: one uniform per initial-state or target draw, then exactly one uniform
per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import StochasticMatrix
from .equilibrium import stationary_distribution
from .errors import SimulationTimeout

STEP_CAP = 10**9  # per replica; a walk this long means the chain is near-reducible

# estimator tags keep substreams of different estimators decorrelated
_TAG_VISITS = 0
_TAG_HITTING = 1
_TAG_KEMENY = 2
_TAG_RETURNS = 3
_TAG_OCCUPANCY = 4

# replica-batch and step-chunk sizes bound the uniform buffer at ~64 MB
_BATCH_REPLICAS = 8192
_CHUNK_STEPS = 1024


@dataclass(frozen=True)
class SimulationConfig:
    """Horizon, replica count, seed and optional burn-in for visit counting."""

    seed: int
    steps: int
    replicas: int
    burn_in: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps!r}")
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas!r}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in!r}")


@dataclass(frozen=True)
class EmpiricalEstimate:
    """A measured value with its standard error and the sample size behind it."""

    value: float
    std_error: float
    replicas_used: int


def _replica_rng(seed: int, tag: int, replica: int) -> np.random.Generator:
    # hash-derived substream per (seed, estimator, replica): order-independent
    return np.random.default_rng([seed, tag, replica])


def _row_cdf(entries: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(entries, axis=1)
    cdf[:, -1] = 1.0  # absorb cumsum rounding so every uniform lands inside
    return cdf


def _vector_cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return cdf


def _step(cdf_row: np.ndarray, u: float) -> int:
    return min(int(np.searchsorted(cdf_row, u, side="right")), cdf_row.shape[0] - 1)


def simulate_visits(
    P: StochasticMatrix,
    j: int,
    cfg: SimulationConfig,
    stationary: np.ndarray | None = None,
) -> tuple[EmpiricalEstimate, EmpiricalEstimate]:
    """Count visits to state ``j`` over the horizon, replicated.

    Each replica starts in a state drawn from the stationary distribution
    (computed analytically, so there is no transient bias to burn away;
    ``burn_in`` exists for stress tests on top of that), then takes
    ``burn_in + steps`` steps and counts how many of the last ``steps``
    states equal ``j``.

    Returns (mean estimate, variance estimate) of the count across
    replicas. The variance standard error uses the normal approximation
    ``s^2 * sqrt(2 / (replicas - 1))``. With a single replica both spread
    statistics are reported as 0.
    """
    n = P.n
    if not 0 <= j < n:
        raise IndexError(f"state index {j} out of range 0..{n - 1}")
    if n == 1:
        # single state: every step is a visit, no randomness to consume
        counts = np.full(cfg.replicas, cfg.steps, dtype=np.int64)
        return _mean_estimate(counts), _variance_estimate(counts)
    if stationary is None:
        stationary = stationary_distribution(P)
    row_cdf = _row_cdf(P.entries)
    start_cdf = _vector_cdf(stationary)
    total_steps = cfg.burn_in + cfg.steps
    counts = np.empty(cfg.replicas, dtype=np.int64)
    # the step kernel counts, per replica, how many of the first n-1
    # cumulative row sums the uniform exceeds; the last column is 1.0 and
    # never fires, so it is skipped. contiguous columns gather fastest.
    cols = [np.ascontiguousarray(row_cdf[:, k]) for k in range(n - 1)]
    two_state = n == 2

    chunk = min(total_steps, _CHUNK_STEPS)
    for lo in range(0, cfg.replicas, _BATCH_REPLICAS):
        hi = min(lo + _BATCH_REPLICAS, cfg.replicas)
        gens = [_replica_rng(cfg.seed, _TAG_VISITS, r) for r in range(lo, hi)]
        b = hi - lo
        u0 = np.array([g.random() for g in gens])
        states = np.minimum(np.searchsorted(start_cdf, u0, side="right"), n - 1)
        batch_counts = np.zeros(b, dtype=np.int64)
        buf = np.empty((b, chunk))
        done = 0
        if two_state:
            states = states.astype(np.uint8)
            col0 = cols[0]
            while done < total_steps:
                m = min(chunk, total_steps - done)
                for k, g in enumerate(gens):
                    g.random(out=buf[k, :m])
                steps_u = buf[:, :m].T.copy()  # contiguous per-step rows
                for t in range(m):
                    states = (col0[states] <= steps_u[t]).view(np.uint8)
                    if done + t >= cfg.burn_in:
                        batch_counts += states
                done += m
            # accumulated visits to state 1; complement for state 0
            counts[lo:hi] = batch_counts if j == 1 else cfg.steps - batch_counts
        else:
            states = states.astype(np.intp)
            while done < total_steps:
                m = min(chunk, total_steps - done)
                for k, g in enumerate(gens):
                    g.random(out=buf[k, :m])
                steps_u = buf[:, :m].T.copy()
                for t in range(m):
                    u = steps_u[t]
                    acc = np.asarray(cols[0][states] <= u, dtype=np.intp)
                    for col in cols[1:]:
                        acc += col[states] <= u
                    states = acc
                    if done + t >= cfg.burn_in:
                        batch_counts += states == j
                done += m
            counts[lo:hi] = batch_counts

    return _mean_estimate(counts), _variance_estimate(counts)


def _mean_estimate(samples: np.ndarray) -> EmpiricalEstimate:
    r = samples.shape[0]
    se = float(samples.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    return EmpiricalEstimate(value=float(samples.mean()), std_error=se, replicas_used=r)


def _variance_estimate(samples: np.ndarray) -> EmpiricalEstimate:
    r = samples.shape[0]
    if r < 2:
        return EmpiricalEstimate(value=0.0, std_error=0.0, replicas_used=r)
    var = float(samples.var(ddof=1))
    return EmpiricalEstimate(
        value=var, std_error=var * math.sqrt(2.0 / (r - 1)), replicas_used=r
    )


def _walk_to(
    row_cdf: np.ndarray, rng: np.random.Generator, start: int, target: int, replica: int
) -> int:
    state = start
    steps = 0
    while state != target:
        state = _step(row_cdf[state], rng.random())
        steps += 1
        if steps > STEP_CAP:
            raise SimulationTimeout(
                f"replica {replica}: no passage {start}->{target} within "
                f"{STEP_CAP} steps; the chain is effectively reducible",
                replica=replica,
            )
    return steps


def estimate_hitting_time(
    P: StochasticMatrix, i: int, j: int, replicas: int, seed: int
) -> EmpiricalEstimate:
    """Mean first-passage time from ``i`` to ``j`` across replicas.

    ``i == j`` returns exactly 0 without simulating: the hitting time of
    the start state is 0 by convention.
    """
    n = P.n
    if not 0 <= i < n:
        raise IndexError(f"state index {i} out of range 0..{n - 1}")
    if not 0 <= j < n:
        raise IndexError(f"state index {j} out of range 0..{n - 1}")
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas!r}")
    if i == j:
        return EmpiricalEstimate(value=0.0, std_error=0.0, replicas_used=replicas)
    row_cdf = _row_cdf(P.entries)
    times = np.empty(replicas)
    for r in range(replicas):
        rng = _replica_rng(seed, _TAG_HITTING, r)
        times[r] = _walk_to(row_cdf, rng, i, j, r)
    return _mean_estimate(times)


def estimate_kemeny(
    P: StochasticMatrix, w: np.ndarray, replicas: int, seed: int
) -> EmpiricalEstimate:
    """Unbiased estimate of the Kemeny constant.

    Each replica starts from a fixed state (cycled round-robin, so the
    estimate also exercises the start-independence empirically), draws a
    target from the stationary distribution, and measures the first
    passage; targets equal to the start contribute 0.
    """
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas!r}")
    n = P.n
    row_cdf = _row_cdf(P.entries)
    target_cdf = _vector_cdf(w)
    times = np.empty(replicas)
    for r in range(replicas):
        rng = _replica_rng(seed, _TAG_KEMENY, r)
        start = r % n
        target = _step(target_cdf, rng.random())
        times[r] = 0 if target == start else _walk_to(row_cdf, rng, start, target, r)
    return _mean_estimate(times)


def estimate_return_moments(
    P: StochasticMatrix, j: int, replicas: int, seed: int
) -> tuple[EmpiricalEstimate, EmpiricalEstimate]:
    """Sample mean and unbiased sample variance of the return time to ``j``.

    One return per replica: start in ``j``, walk until the first revisit.
    """
    n = P.n
    if not 0 <= j < n:
        raise IndexError(f"state index {j} out of range 0..{n - 1}")
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas!r}")
    row_cdf = _row_cdf(P.entries)
    times = np.empty(replicas)
    for r in range(replicas):
        rng = _replica_rng(seed, _TAG_RETURNS, r)
        state = _step(row_cdf[j], rng.random())
        steps = 1
        while state != j:
            state = _step(row_cdf[state], rng.random())
            steps += 1
            if steps > STEP_CAP:
                raise SimulationTimeout(
                    f"replica {r}: no return to {j} within {STEP_CAP} steps; "
                    "the chain is effectively reducible",
                    replica=r,
                )
        times[r] = steps
    return _mean_estimate(times), _variance_estimate(times)


def occupancy_zscores(
    P: StochasticMatrix,
    w: np.ndarray,
    clt_rates: np.ndarray,
    steps: int,
    seed: int,
) -> np.ndarray:
    """Per-state z-scores of one long run's visit counts against theory.

    The count of visits to j over T steps has mean ``T w_j`` and variance
    ``T * clt_rate_j``; the z-scores use exactly that variance, so they are
    calibrated even though visits within one run are correlated. States
    with (near-)zero rate are scored 0 when the count deviates by at most
    one step (deterministic cycles: edge effects only) and infinity
    otherwise. Sanity diagnostic, not a sharp test.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps!r}")
    n = P.n
    row_cdf = _row_cdf(P.entries)
    rng = _replica_rng(seed, _TAG_OCCUPANCY, 0)
    state = _step(_vector_cdf(w), rng.random())
    counts = np.zeros(n, dtype=np.int64)
    done = 0
    while done < steps:
        m = min(steps - done, 1 << 16)
        u = rng.random(m)
        for t in range(m):
            state = _step(row_cdf[state], u[t])
            counts[state] += 1
        done += m
    deviation = counts - steps * w
    z = np.empty(n)
    for s in range(n):
        variance = steps * clt_rates[s]
        if variance > 1e-9:
            z[s] = deviation[s] / math.sqrt(variance)
        else:
            z[s] = 0.0 if abs(deviation[s]) <= 1.0 else math.inf
    return z
