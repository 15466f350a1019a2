"""Command-line front end.

Four commands: ``analyze`` (full analytic report), ``verify`` (every
internal cross-check, optionally against the Monte Carlo oracle),
``simulate`` (empirical estimates only) and ``spectrum`` (eigenvalues and
the spectral Kemeny constant).

Reports go to stdout as JSON by default (``--pretty`` for humans),
diagnostics to stderr. Exit codes are a contract: 0 success, 1 input
error, 2 structure error (reducible chain), 3 internal-consistency
failure, 4 simulation timeout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import (
    DEFAULT_KEMENY_TOL,
    analytic_checks,
    analyze,
    build_analyze_report,
    build_spectrum_report,
    build_verify_report,
    monte_carlo_section,
)
from .chain import StochasticMatrix, load_matrix
from .equilibrium import stationary_distribution
from .errors import InputError, SeektimeError
from .mc import SimulationConfig, estimate_kemeny, estimate_return_moments, simulate_visits
from .renewal import renewal_stats
from .resolvent import fundamental_matrix, kemeny_trace

TOL_ENV_VAR = "SEEKTIME_TOL"
DEFAULT_STEPS = 10_000
DEFAULT_REPLICAS = 1_000
DEFAULT_SEED = 0


def to_json(report: dict) -> str:
    """Deterministic JSON: insertion-ordered keys, round-tripping floats."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seektime",
        description=(
            "Kemeny constant, hitting times and renewal statistics of an "
            "ergodic Markov chain, cross-verified three ways and against a "
            "seeded Monte Carlo oracle."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="path to the transition matrix (CSV or JSON)")
        p.add_argument(
            "--format",
            choices=("csv", "json"),
            default=None,
            help="input format; default: by file extension (.json -> json, else csv)",
        )
        p.add_argument(
            "--tol",
            type=float,
            default=None,
            help=(
                "relative tolerance for agreement of the three Kemeny routes "
                f"(default {DEFAULT_KEMENY_TOL}; env {TOL_ENV_VAR} overrides the "
                "default, this flag overrides both). Stiff chains may need a "
                "looser value."
            ),
        )
        p.add_argument("--pretty", action="store_true", help="aligned text instead of JSON")

    def add_mc(p: argparse.ArgumentParser) -> None:
        p.add_argument("--steps", type=int, default=DEFAULT_STEPS, help="simulation horizon")
        p.add_argument("--replicas", type=int, default=DEFAULT_REPLICAS, help="replica count")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit RNG seed")

    p_analyze = sub.add_parser("analyze", help="full analytic report")
    add_common(p_analyze)
    p_analyze.add_argument(
        "--full",
        action="store_true",
        help="emit dense matrices regardless of chain size (default: only n <= 100)",
    )
    p_analyze.add_argument(
        "--mc", action="store_true", help="append a Monte Carlo comparison section"
    )
    add_mc(p_analyze)

    p_verify = sub.add_parser("verify", help="run every internal cross-check")
    add_common(p_verify)
    p_verify.add_argument(
        "--mc", action="store_true", help="also compare against the Monte Carlo oracle"
    )
    add_mc(p_verify)

    p_sim = sub.add_parser("simulate", help="Monte Carlo estimates only")
    add_common(p_sim)
    what = p_sim.add_mutually_exclusive_group(required=True)
    what.add_argument(
        "--target", help="state (label or index) whose visits and returns to simulate"
    )
    what.add_argument(
        "--kemeny", action="store_true", help="estimate the Kemeny constant"
    )
    add_mc(p_sim)

    p_spec = sub.add_parser("spectrum", help="eigenvalues and spectral Kemeny constant")
    add_common(p_spec)

    return parser


def resolve_tolerance(flag_value: float | None) -> float:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(TOL_ENV_VAR)
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"{TOL_ENV_VAR}={env!r} is not a number") from None
    return DEFAULT_KEMENY_TOL


def read_chain(path: str, format_flag: str | None) -> StochasticMatrix:
    fmt = format_flag or ("json" if Path(path).suffix.lower() == ".json" else "csv")
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return load_matrix(raw, fmt)


def cmd_analyze(args: argparse.Namespace) -> tuple[dict, int]:
    tol = resolve_tolerance(args.tol)
    P = read_chain(args.input, args.format)
    result = analyze(P)
    mc = None
    if args.mc:
        cfg = SimulationConfig(seed=args.seed, steps=args.steps, replicas=args.replicas)
        mc, _ = monte_carlo_section(result, cfg)
    report = build_analyze_report(result, tol=tol, full_matrices=args.full, mc=mc)
    return report, 0


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    tol = resolve_tolerance(args.tol)
    P = read_chain(args.input, args.format)
    result = analyze(P, check=True)
    checks = analytic_checks(result, tol=tol)
    mc = None
    if args.mc:
        cfg = SimulationConfig(seed=args.seed, steps=args.steps, replicas=args.replicas)
        mc, mc_checks = monte_carlo_section(result, cfg)
        checks = checks + mc_checks
    report = build_verify_report(result, checks, tol=tol, mc=mc)
    return report, 0 if report["passed"] else 3


def cmd_simulate(args: argparse.Namespace) -> tuple[dict, int]:
    P = read_chain(args.input, args.format)
    w = stationary_distribution(P)
    report: dict = {
        "chain": {"n": P.n, "labels": list(P.labels)},
        "seed": args.seed,
        "replicas": args.replicas,
    }
    if args.kemeny:
        k = estimate_kemeny(P, w, args.replicas, args.seed)
        Z = fundamental_matrix(P, w)
        report["mode"] = "kemeny"
        report["kemeny"] = {
            "estimate": {
                "value": float(k.value),
                "std_error": float(k.std_error),
                "replicas_used": int(k.replicas_used),
            },
            "analytic": float(kemeny_trace(Z)),
        }
        return report, 0
    j = P.state_index(args.target)
    Z = fundamental_matrix(P, w)
    stats = renewal_stats(Z, w, j)
    cfg = SimulationConfig(seed=args.seed, steps=args.steps, replicas=args.replicas)
    visit_mean, visit_var = simulate_visits(P, j, cfg, stationary=w)
    ret_mean, ret_var = estimate_return_moments(P, j, args.replicas, args.seed)
    report["mode"] = "visits"
    report["steps"] = args.steps
    report["target"] = {"state": j, "label": P.labels[j]}
    report["visits"] = {
        "mean": {
            "value": float(visit_mean.value),
            "std_error": float(visit_mean.std_error),
            "replicas_used": int(visit_mean.replicas_used),
        },
        "variance": {
            "value": float(visit_var.value),
            "std_error": float(visit_var.std_error),
            "replicas_used": int(visit_var.replicas_used),
        },
        "expected_mean": float(args.steps * w[j]),
        "expected_variance": float(args.steps * stats.clt_rate),
    }
    report["return_time"] = {
        "mean": {
            "value": float(ret_mean.value),
            "std_error": float(ret_mean.std_error),
            "replicas_used": int(ret_mean.replicas_used),
        },
        "variance": {
            "value": float(ret_var.value),
            "std_error": float(ret_var.std_error),
            "replicas_used": int(ret_var.replicas_used),
        },
        "expected_mean": float(stats.mean_return),
        "expected_variance": float(stats.return_variance),
    }
    return report, 0


def cmd_spectrum(args: argparse.Namespace) -> tuple[dict, int]:
    P = read_chain(args.input, args.format)
    return build_spectrum_report(P), 0


# ---------------------------------------------------------------------------
# pretty rendering


def _fmt(x, width: int = 0) -> str:
    if isinstance(x, bool):
        s = "yes" if x else "no"
    elif isinstance(x, float):
        s = f"{x:.12g}"
    else:
        s = str(x)
    return s.rjust(width) if width else s


def _vector_lines(labels, values, indent: str = "  ") -> list[str]:
    width = max(len(s) for s in labels)
    return [f"{indent}{s.ljust(width)}  {_fmt(v)}" for s, v in zip(labels, values)]


def render_pretty(report: dict, command: str) -> str:
    lines: list[str] = []
    chain = report.get("chain", {})
    if chain:
        head = f"chain: n={chain['n']}"
        if "irreducible" in chain:
            head += f", irreducible={_fmt(chain['irreducible'])}, period={chain['period']}"
        lines.append(head)
    if command == "spectrum":
        lines.append(f"kemeny (spectral): {_fmt(report['kemeny_spectral'])}")
        lines.append(f"imaginary residual: {_fmt(report['imag_residual'])}")
        lines.append("eigenvalues (re, im):")
        for re_, im in report["eigenvalues"]:
            lines.append(f"  {re_: .12g}  {im:+.12g}i")
        return "\n".join(lines) + "\n"
    if command == "verify":
        lines.append(f"kemeny tolerance: {_fmt(report['kemeny_tolerance'])}")
        name_w = max(len(c["name"]) for c in report["checks"])
        for c in report["checks"]:
            status = "pass" if c["passed"] else "FAIL"
            lines.append(
                f"  {c['name'].ljust(name_w)}  {status}  "
                f"measured={c['measured']:.3e}  limit={c['limit']:.3e}"
            )
        lines.append(f"overall: {'pass' if report['passed'] else 'FAIL'}")
        return "\n".join(lines) + "\n"
    if command == "simulate":
        lines.append(f"seed={report['seed']} replicas={report['replicas']}")
        if report["mode"] == "kemeny":
            est = report["kemeny"]["estimate"]
            lines.append(
                f"kemeny estimate: {_fmt(est['value'])} +- {_fmt(est['std_error'])} "
                f"(analytic {_fmt(report['kemeny']['analytic'])})"
            )
        else:
            t = report["target"]
            lines.append(f"target state: {t['label']} (index {t['state']}), steps={report['steps']}")
            for key in ("visits", "return_time"):
                sec = report[key]
                lines.append(
                    f"{key}: mean {_fmt(sec['mean']['value'])} +- {_fmt(sec['mean']['std_error'])}"
                    f" (expected {_fmt(sec['expected_mean'])}); variance "
                    f"{_fmt(sec['variance']['value'])} +- {_fmt(sec['variance']['std_error'])}"
                    f" (expected {_fmt(sec['expected_variance'])})"
                )
        return "\n".join(lines) + "\n"

    # analyze
    k = report["kemeny"]
    lines.extend(_vector_lines(chain["labels"], report["stationary"]))
    lines[1:1] = ["stationary distribution:"]
    lines.append(
        "kemeny constant: trace={} spectral={} direct={} (max rel disc {:.3e}, {})".format(
            _fmt(k["trace"]),
            _fmt(k["spectral"]),
            _fmt(k["direct"]),
            k["max_relative_discrepancy"],
            "agree" if k["agreement"] else "DISAGREE",
        )
    )
    seek = report["seek_time"]
    lines.append(
        f"seek time: constancy spread {seek['constancy_spread']:.3e}; "
        f"stationary-weighted wait {_fmt(seek['stationary_weighted_wait'])}"
    )
    b = report["lower_bound"]
    lines.append(
        f"lower bound: floor={_fmt(b['floor'])} slack={_fmt(b['slack'])}"
        + (" (attained)" if b["attained"] else "")
    )
    lines.append("renewal statistics per state:")
    header = ["state", "mean_return", "return_var", "eq_wait", "clt_rate", "excess_visits"]
    rows = [
        [
            s["label"],
            _fmt(s["mean_return"]),
            _fmt(s["return_variance"]),
            _fmt(s["equilibrium_wait"]),
            _fmt(s["clt_rate"]),
            _fmt(s["excess_visits"]),
        ]
        for s in report["renewal"]
    ]
    widths = [max(len(header[c]), *(len(r[c]) for r in rows)) for c in range(len(header))]
    lines.append("  " + "  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(r, widths)))
    if report.get("monte_carlo") is not None:
        mc = report["monte_carlo"]
        lines.append(
            f"monte carlo (seed {mc['seed']}, {mc['replicas']} replicas): "
            f"kemeny {_fmt(mc['kemeny']['estimate']['value'])} "
            f"+- {_fmt(mc['kemeny']['estimate']['std_error'])} "
            f"[{'ok' if mc['kemeny']['agrees'] else 'OFF'}]"
        )
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = _COMMANDS[args.command](args)
    except SeektimeError as exc:
        print(f"seektime: error: {exc}", file=sys.stderr)
        return getattr(exc, "exit_code", 3)
    if args.pretty:
        sys.stdout.write(render_pretty(report, args.command))
    else:
        sys.stdout.write(to_json(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
