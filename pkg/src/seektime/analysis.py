"""Full-chain analysis pipeline, verification suite and report assembly.

This is the engine behind the CLI: one pass computes every quantity the
package knows about, the verification suite re-derives each one along an
independent route and scores the residuals, and the report builders turn
both into JSON-ready dictionaries with a frozen field order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import renewal as rn
from . import resolvent as rv
from . import spectral as sp
from .chain import ChainStructure, StochasticMatrix, classify_structure
from .equilibrium import (
    CesaroLimit,
    averaging_residuals,
    cesaro_limit,
    stationary_distribution,
    stationary_distribution_direct,
)
from .errors import StructureError
from .mc import (
    EmpiricalEstimate,
    SimulationConfig,
    estimate_hitting_time,
    estimate_kemeny,
    estimate_return_moments,
    occupancy_zscores,
    simulate_visits,
)

DEFAULT_KEMENY_TOL = 1e-8  # relative agreement required of the three routes
MATRIX_EMIT_THRESHOLD = 100  # larger chains omit dense matrices unless asked


@dataclass(frozen=True)
class ChainAnalysis:
    """Everything the analytic side computes for one chain."""

    P: StochasticMatrix
    structure: ChainStructure
    stationary: np.ndarray
    fundamental: np.ndarray
    hitting: np.ndarray
    seek: rv.SeekTimeReport
    from_equilibrium: np.ndarray
    alphas: np.ndarray
    spectral: sp.SpectralSummary
    renewal: list[rn.RenewalStats]
    bound: sp.BoundReport
    kemeny_trace: float
    kemeny_spectral: float
    kemeny_direct: float

    @property
    def kemeny_discrepancy(self) -> float:
        """Max pairwise gap of the three routes, relative to max(1, K)."""
        ks = (self.kemeny_trace, self.kemeny_spectral, self.kemeny_direct)
        gap = max(ks) - min(ks)
        return gap / max(1.0, abs(self.kemeny_trace))


def analyze(P: StochasticMatrix, check: bool = False) -> ChainAnalysis:
    """Run the whole analytic pipeline on a validated chain.

    Raises :class:`StructureError` (naming the communicating classes) for
    reducible input; every quantity downstream needs irreducibility.
    """
    structure = classify_structure(P)
    if not structure.irreducible:
        named = [
            "{" + ", ".join(P.labels[s] for s in cls) + "}"
            for cls in structure.communicating_classes
        ]
        raise StructureError(
            f"chain is reducible: {len(named)} communicating classes "
            f"({'; '.join(named)}); analysis requires an irreducible chain"
        )
    w = stationary_distribution(P)
    Z = rv.fundamental_matrix(P, w, check=check)
    M = rv.mean_hitting_times(Z, w)
    seek = rv.mean_time_to_equilibrium(M, w)
    from_eq = rv.mean_time_from_equilibrium(Z, w)
    alphas = sp.eigenvalues(P)
    summary = sp.kemeny_spectral(alphas)
    stats = rn.renewal_table(Z, w)
    k_trace = rv.kemeny_trace(Z)
    bound = sp.check_lower_bound(k_trace, P.n)
    return ChainAnalysis(
        P=P,
        structure=structure,
        stationary=w,
        fundamental=Z,
        hitting=M,
        seek=seek,
        from_equilibrium=from_eq,
        alphas=alphas,
        spectral=summary,
        renewal=stats,
        bound=bound,
        kemeny_trace=k_trace,
        kemeny_spectral=summary.kemeny,
        kemeny_direct=seek.kemeny,
    )


# ---------------------------------------------------------------------------
# verification checks


@dataclass(frozen=True)
class Check:
    """One verification item; passes when ``measured <= limit``."""

    name: str
    measured: float
    limit: float

    @property
    def passed(self) -> bool:
        return self.measured <= self.limit


def _rel(delta: float, scale: float) -> float:
    return abs(delta) / max(abs(scale), 1e-15)


def analytic_checks(a: ChainAnalysis, tol: float = DEFAULT_KEMENY_TOL) -> list[Check]:
    """Re-derive every quantity along an independent route and score it.

    ``tol`` only governs the agreement of the three Kemeny routes; all
    other limits are fixed properties of the algorithms.
    """
    P, w, Z, M = a.P, a.stationary, a.fundamental, a.hitting
    n = P.n
    k_scale = max(1.0, abs(a.kemeny_trace))
    structure = rv.structure_residuals(Z, w)
    offdiag = M[~np.eye(n, dtype=bool)]
    checks = [
        Check("stationary_fixed_point", float(np.abs(w @ P.entries - w).max()), 1e-12 * n),
        Check(
            "stationary_cross_solve",
            float(np.abs(w - stationary_distribution_direct(P)).max()),
            1e-10,
        ),
        Check("resolvent_row_sums", structure["row_sums"], 1e-9),
        Check("resolvent_weighted_column_sums", structure["weighted_column_sums"], 1e-9),
        Check(
            "resolvent_diagonal_dominance",
            float((Z - np.diag(Z)[None, :]).max()),
            1e-12,
        ),
        Check(
            "resolvent_diagonal_floor",
            float(((1.0 - w) / 2.0 - np.diag(Z)).max()),
            1e-9,
        ),
        Check("hitting_diagonal_zero", float(np.abs(np.diag(M)).max()), 0.0),
        Check(
            "hitting_offdiagonal_at_least_one",
            float((1.0 - offdiag).max()) if offdiag.size else 0.0,
            1e-12,
        ),
        Check("hitting_one_step_recurrence", rv.hitting_recurrence_residual(P, M), 1e-8),
        Check(
            "return_time_reciprocal",
            rv.return_time_residual(P, M, w),
            1e-8 * max(1.0, float(1.0 / w.min())),
        ),
        Check("seek_time_constancy", a.seek.constancy_spread, 1e-8 * k_scale),
        Check("seek_time_harmonic", rv.harmonic_residual(P, M, w), 1e-8 * k_scale),
        Check("maximum_principle_constant_solution", rv.constant_vector_residual(P), 1e-8),
        Check(
            "kemeny_direct_vs_trace",
            _rel(a.kemeny_direct - a.kemeny_trace, k_scale),
            1e-8,
        ),
        Check("kemeny_three_route_agreement", a.kemeny_discrepancy, tol),
        Check(
            "equilibrium_target_identity",
            rv.equilibrium_target_residual(Z, w) / k_scale,
            1e-10,
        ),
        Check(
            "from_equilibrium_route_agreement",
            float(np.abs(a.from_equilibrium - a.seek.from_equilibrium).max()) / k_scale,
            1e-8,
        ),
        Check("spectral_unit_eigenvalue", abs(complex(a.alphas[0]) - 1.0), 1e-8),
        Check("spectral_half_plane", -sp.half_plane_margin(a.alphas), 1e-9),
        Check("spectral_conjugate_closure", sp.conjugate_closure_residual(a.alphas), 1e-9),
        Check("spectral_imag_residual", a.spectral.imag_residual, 1e-8 * n),
        Check("kemeny_lower_bound", -a.bound.slack, 1e-9),
    ]
    checks.extend(_renewal_checks(a))
    if n <= 64:
        limit = cesaro_limit(P, w)
        first, last = averaging_residuals(P, limit, [8, 512])
        checks.append(Check("cesaro_averaging_decreases", last - first, 1e-12))
    return checks


def _renewal_checks(a: ChainAnalysis) -> list[Check]:
    round_trip = 0.0
    bus = 0.0
    rate_identity = 0.0
    negativity = 0.0
    for s in a.renewal:
        mu, tau = s.mean_return, s.equilibrium_wait
        sigma2, rate = s.return_variance, s.clt_rate
        round_trip = max(
            round_trip,
            _rel(rn.excess_visits_from_moments(mu, sigma2) - s.excess_visits, s.excess_visits),
        )
        bus = max(bus, _rel(rn.equilibrium_wait(mu, sigma2) - tau, tau))
        rate_identity = max(
            rate_identity,
            abs(sigma2 / mu**3 - rate) / max(abs(rate), 1e-12),
        )
        negativity = max(negativity, -sigma2, -rate)
    return [
        Check("renewal_round_trip_excess_visits", round_trip, 1e-12),
        Check("renewal_bus_consistency", bus, 1e-12),
        Check("renewal_rate_identity", rate_identity, 1e-10),
        Check("renewal_nonnegativity", negativity, 0.0),
    ]


# ---------------------------------------------------------------------------
# Monte Carlo comparison section


def _within(estimate: EmpiricalEstimate, analytic: float, k: float = 3.0) -> bool:
    slack = k * estimate.std_error + 1e-9 * max(1.0, abs(analytic))
    return abs(estimate.value - analytic) <= slack


def _variance_within(estimate: EmpiricalEstimate, expected: float, replicas: int) -> bool:
    # rel 10% once replicas dominate; wide-but-calibrated earlier; >=1 step^2
    # of absolute slack so deterministic chains pass on edge effects alone
    theory_se = expected * math.sqrt(2.0 / max(replicas - 1, 1))
    slack = max(0.10 * expected, 5.0 * theory_se, 1.0)
    return abs(estimate.value - expected) <= slack


def _estimate_dict(e: EmpiricalEstimate) -> dict:
    return {
        "value": float(e.value),
        "std_error": float(e.std_error),
        "replicas_used": int(e.replicas_used),
    }


def monte_carlo_section(
    a: ChainAnalysis, cfg: SimulationConfig
) -> tuple[dict, list[Check]]:
    """Simulate the chain and compare against every analytic quantity.

    Returns the JSON-ready section and pass/fail checks: means must land
    within 3 standard errors, variances within 10% (or 5 theoretical
    standard errors while replicas are scarce). The occupancy scores use
    the analytic per-step variance rate, so they are calibrated despite
    within-run correlation.
    """
    P, w = a.P, a.stationary
    n = P.n
    target = 0
    stats = a.renewal[target]
    visit_mean, visit_var = simulate_visits(P, target, cfg, stationary=w)
    expected_mean = cfg.steps * w[target]
    expected_var = cfg.steps * stats.clt_rate
    kemeny_est = estimate_kemeny(P, w, cfg.replicas, cfg.seed)
    ret_mean, ret_var = estimate_return_moments(P, target, cfg.replicas, cfg.seed)
    zscores = occupancy_zscores(
        P, w, np.array([s.clt_rate for s in a.renewal]), cfg.steps, cfg.seed
    )
    max_z = float(np.abs(zscores).max())

    section: dict = {
        "seed": cfg.seed,
        "replicas": cfg.replicas,
        "steps": cfg.steps,
        "burn_in": cfg.burn_in,
        "kemeny": {
            "estimate": _estimate_dict(kemeny_est),
            "analytic": float(a.kemeny_trace),
            "agrees": _within(kemeny_est, a.kemeny_trace),
        },
        "visits": {
            "state": target,
            "label": P.labels[target],
            "mean": _estimate_dict(visit_mean),
            "variance": _estimate_dict(visit_var),
            "expected_mean": float(expected_mean),
            "expected_variance": float(expected_var),
            "mean_agrees": _within(visit_mean, expected_mean),
            "variance_agrees": _variance_within(visit_var, expected_var, cfg.replicas),
        },
        "return_time": {
            "state": target,
            "label": P.labels[target],
            "mean": _estimate_dict(ret_mean),
            "variance": _estimate_dict(ret_var),
            "expected_mean": float(stats.mean_return),
            "expected_variance": float(stats.return_variance),
            "mean_agrees": _within(ret_mean, stats.mean_return),
            "variance_agrees": _variance_within(
                ret_var, stats.return_variance, cfg.replicas
            ),
        },
        "occupancy_max_abs_z": max_z,
    }
    checks = [
        Check("mc_kemeny", 0.0 if section["kemeny"]["agrees"] else 1.0, 0.0),
        Check("mc_visit_mean", 0.0 if section["visits"]["mean_agrees"] else 1.0, 0.0),
        Check(
            "mc_visit_variance", 0.0 if section["visits"]["variance_agrees"] else 1.0, 0.0
        ),
        Check(
            "mc_return_mean", 0.0 if section["return_time"]["mean_agrees"] else 1.0, 0.0
        ),
        Check(
            "mc_return_variance",
            0.0 if section["return_time"]["variance_agrees"] else 1.0,
            0.0,
        ),
        Check("mc_occupancy_sanity", max_z, 6.0),
    ]
    if n >= 2:
        hit_est = estimate_hitting_time(P, 0, n - 1, cfg.replicas, cfg.seed)
        analytic = float(a.hitting[0, n - 1])
        section["hitting"] = {
            "from": 0,
            "to": n - 1,
            "estimate": _estimate_dict(hit_est),
            "analytic": analytic,
            "agrees": _within(hit_est, analytic),
        }
        checks.insert(
            1, Check("mc_hitting_time", 0.0 if section["hitting"]["agrees"] else 1.0, 0.0)
        )
    return section, checks


# ---------------------------------------------------------------------------
# report assembly


def _chain_dict(a: ChainAnalysis) -> dict:
    return {
        "n": a.P.n,
        "labels": list(a.P.labels),
        "irreducible": a.structure.irreducible,
        "period": a.structure.period,
        "communicating_classes": [
            [a.P.labels[s] for s in cls] for cls in a.structure.communicating_classes
        ],
    }


def _eigenvalue_pairs(alphas: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in alphas]


def build_analyze_report(
    a: ChainAnalysis,
    tol: float = DEFAULT_KEMENY_TOL,
    full_matrices: bool = False,
    mc: dict | None = None,
) -> dict:
    """The analyze report, fields in frozen order (the JSON schema)."""
    emit = full_matrices or a.P.n <= MATRIX_EMIT_THRESHOLD
    report = {
        "chain": _chain_dict(a),
        "stationary": a.stationary.tolist(),
        "kemeny": {
            "trace": float(a.kemeny_trace),
            "spectral": float(a.kemeny_spectral),
            "direct": float(a.kemeny_direct),
            "max_relative_discrepancy": float(a.kemeny_discrepancy),
            "tolerance": float(tol),
            "agreement": bool(a.kemeny_discrepancy <= tol),
        },
        "seek_time": {
            "to_equilibrium": a.seek.to_equilibrium.tolist(),
            "constancy_spread": float(a.seek.constancy_spread),
            "from_equilibrium": a.from_equilibrium.tolist(),
            "stationary_weighted_wait": float(a.from_equilibrium @ a.stationary),
        },
        "spectral": {
            "eigenvalues": _eigenvalue_pairs(a.alphas),
            "imag_residual": float(a.spectral.imag_residual),
        },
        "lower_bound": {
            "kemeny": float(a.bound.kemeny),
            "floor": float(a.bound.floor),
            "slack": float(a.bound.slack),
            "attained": bool(a.bound.attained),
        },
        "renewal": [
            {
                "state": s.state,
                "label": a.P.labels[s.state],
                "mean_return": float(s.mean_return),
                "return_variance": float(s.return_variance),
                "equilibrium_wait": float(s.equilibrium_wait),
                "clt_rate": float(s.clt_rate),
                "excess_visits": float(s.excess_visits),
            }
            for s in a.renewal
        ],
        "fundamental_matrix": a.fundamental.tolist() if emit else None,
        "hitting_times": a.hitting.tolist() if emit else None,
    }
    if mc is not None:
        report["monte_carlo"] = mc
    return report


def build_verify_report(
    a: ChainAnalysis,
    checks: list[Check],
    tol: float,
    mc: dict | None = None,
) -> dict:
    report = {
        "chain": _chain_dict(a),
        "kemeny_tolerance": float(tol),
        "checks": [
            {
                "name": c.name,
                "measured": float(c.measured),
                "limit": float(c.limit),
                "passed": c.passed,
            }
            for c in checks
        ],
        "passed": all(c.passed for c in checks),
    }
    if mc is not None:
        report["monte_carlo"] = mc
    return report


def build_spectrum_report(P: StochasticMatrix) -> dict:
    alphas = sp.eigenvalues(P)
    summary = sp.kemeny_spectral(alphas)
    return {
        "chain": {"n": P.n, "labels": list(P.labels)},
        "eigenvalues": _eigenvalue_pairs(alphas),
        "kemeny_spectral": float(summary.kemeny),
        "imag_residual": float(summary.imag_residual),
    }
