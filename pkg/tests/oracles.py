"""Independent oracles: brute-force routes that never touch the library's
algorithms, used to compute expected values before freezing them into tests."""

import numpy as np
from scipy.linalg import solve


def mfpt_solve(entries: np.ndarray, target: int) -> np.ndarray:
    """Mean first-passage times to one target by solving the one-step equations.

    Rows i != target: m[i] = 1 + sum_k P[i, k] m[k] with m[target] = 0.
    """
    n = entries.shape[0]
    A = np.eye(n) - entries
    A[target, :] = 0.0
    A[target, target] = 1.0
    b = np.ones(n)
    b[target] = 0.0
    return solve(A, b)


def hitting_matrix(entries: np.ndarray) -> np.ndarray:
    """Full hitting-time matrix from per-target solves."""
    return np.column_stack([mfpt_solve(entries, j) for j in range(entries.shape[0])])


def stationary_cesaro(entries: np.ndarray, sweeps: int = 20000) -> np.ndarray:
    """Stationary vector as a long running average of distribution updates."""
    n = entries.shape[0]
    d = np.full(n, 1.0 / n)
    acc = np.zeros(n)
    for _ in range(sweeps):
        d = d @ entries
        acc += d
    return acc / sweeps


def fundamental_series(entries: np.ndarray, w: np.ndarray, terms: int) -> np.ndarray:
    """Fundamental matrix by summing the defining series sum_k (P^k - P_inf)."""
    n = entries.shape[0]
    limit = np.tile(w, (n, 1))
    acc = np.zeros((n, n))
    power = np.eye(n)
    for _ in range(terms):
        acc += power - limit
        power = power @ entries
    return acc


def return_time_distribution(entries: np.ndarray, j: int, horizon: int) -> np.ndarray:
    """p[k] = probability the first return to j takes exactly k+1 steps.

    Dynamic program over the distribution of not-yet-returned walks.
    """
    probs = np.empty(horizon)
    alive = entries[j].copy()
    for k in range(horizon):
        probs[k] = alive[j]
        alive[j] = 0.0
        alive = alive @ entries
    return probs


def moments_from_distribution(times: np.ndarray, probs: np.ndarray) -> tuple[float, float]:
    total = probs.sum()
    mean = float(times @ probs) / total
    second = float((times**2) @ probs) / total
    return mean, second - mean * mean


def truncated_geometric(p: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Support and renormalized probabilities of Geometric(p) cut at n_max."""
    times = np.arange(1, n_max + 1)
    probs = p * (1 - p) ** (times - 1)
    return times, probs / probs.sum()
