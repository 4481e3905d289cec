"""Command-line interface.

Five subcommands::

    logpool verify <suite> [--seed N] [--samples N] [--tolerance X] [--out F]
    logpool experiment <config.json> [--seed N] [--out PREFIX]
    logpool pool   <input.json> [--kind log|linear]
    logpool gap    <input.json>
    logpool factor <input.json> [--seed N]

Exit codes: 0 on success with all checks passing, 1 when a check fails or a
domain error is raised, 2 on usage, parse, or unknown-suite errors.

Machine-readable output is deterministic: identical command, configuration,
and seed produce byte-identical files.  Wall-clock timings go to stderr only,
precisely so they cannot leak into the artifacts.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

from . import __version__, constructions, factorize, persona, stability
from .core import OutcomeSpace, Weights, entropy, kl, make_dist, norm_p, rng_from
from .errors import (
    ConfigParse,
    IoError,
    LogPoolError,
    ParseError,
    UnknownSuite,
)
from .jsonio import (
    config_hash,
    decomposition_to_json,
    dist_from_json,
    dist_to_json,
    dumps,
    loads,
    weights_from_json,
)
from .pooling import linear_pool, log_pool, log_pool_with_log_z, make_decomposition
from .suites import SUITE_NAMES, run_suite
from .welfare import UNANIMITY_TOL, unanimity_report, weighted_gap_sum, welfare_gap

__all__ = ["main", "build_report"]

_ARTIFACT = {"name": "logpool", "version": __version__}


def build_report(
    suite: str,
    seed: int,
    samples: int | None,
    tolerance: float | None,
    checks: list,
) -> dict:
    """Assemble the deterministic verify report.

    Checks are sorted by name; the configuration hash covers every input
    that influenced the run.  Nothing time- or host-dependent goes in.
    """
    config = {
        "command": "verify",
        "suite": suite,
        "seed": seed,
        "samples": samples,
        "tolerance": tolerance,
    }
    rows = sorted((asdict(c) for c in checks), key=lambda c: c["name"])
    return {
        "schema": 1,
        "artifact": _ARTIFACT,
        "command": "verify",
        "suite": suite,
        "seed": seed,
        "config_hash": config_hash(config),
        "checks": rows,
        "passed": bool(all(c["passed"] for c in rows)),
    }


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _cmd_verify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    checks = run_suite(args.suite, args.seed, args.samples, args.tolerance)
    elapsed = time.perf_counter() - started
    report = build_report(args.suite, args.seed, args.samples, args.tolerance, checks)
    _write_text(args.out, dumps(report) + "\n")
    if args.out not in (None, "-"):
        print(f"report written to {args.out}", file=sys.stderr)
    for row in report["checks"]:
        status = "pass" if row["passed"] else "FAIL"
        print(f"{status}  {row['name']}", file=sys.stderr)
    print(f"suite {args.suite}: {elapsed:.3f}s", file=sys.stderr)
    return 0 if report["passed"] else 1


def _as_list(value: Any) -> list:
    return value if isinstance(value, list) else [value]


def _family_grid(config: dict) -> tuple[str, list[int], list[float], dict]:
    family = config.get("family")
    if not isinstance(family, dict) or "kind" not in family:
        raise ConfigParse('config needs a "family" object with a "kind"')
    kind = family["kind"]
    ns = [int(n) for n in _as_list(family.get("n", [2, 3]))]
    eps = [float(e) for e in _as_list(family.get("epsilon", [0.1, 0.03, 0.01]))]
    return kind, ns, eps, family


def _seeded_strict_weights(rng, n: int) -> Weights:
    raw = 0.15 + rng.random(n)
    return Weights(raw / raw.sum())


def _seeded_decomposition(rng, m: int, n: int):
    space = OutcomeSpace(m)
    agents = [make_dist(space, rng.gamma(1.5, 1.0, m) + 0.02) for _ in range(n)]
    return make_decomposition(agents, _seeded_strict_weights(rng, n), "log")


def _analysis_gaps(config: dict, seed: int) -> tuple[list[str], list[list], dict]:
    """Welfare-gap summary over the family's (n, epsilon) grid."""
    kind, ns, eps_grid, family = _family_grid(config)
    beta_samples = int(family.get("beta_samples", 5))
    rows = []
    for n in ns:
        for eps in eps_grid:
            if kind == "analytic_unanimity":
                decomps = [("uniform", constructions.analytic_unanimity_instance(n, eps))]
            elif kind == "cyclic_welfare":
                inst = constructions.cyclic_welfare_instance(
                    n, eps, float(family.get("C", 1.0))
                )
                decomps = [
                    ("uniform", make_decomposition(list(inst.agents), inst.weights, "log"))
                ]
            elif kind == "peaked_incompatible":
                agents = constructions.peaked_incompatible_family(n, eps)
                decomps = []
                for s in range(beta_samples):
                    w = _seeded_strict_weights(rng_from(seed, 10, n, s), n)
                    decomps.append((f"sample{s}", make_decomposition(agents, w, "log")))
            else:
                raise ConfigParse(f"unknown family kind {kind!r}")
            for label, decomp in decomps:
                rep = unanimity_report(decomp)
                rows.append(
                    [
                        kind,
                        n,
                        eps,
                        label,
                        rep.min_gap,
                        weighted_gap_sum(decomp),
                        rep.strictly_unanimous,
                    ]
                )
    columns = [
        "family",
        "n",
        "epsilon",
        "weights",
        "min_gap",
        "weighted_gap_sum",
        "strictly_unanimous",
    ]
    return columns, rows, {"strict_gap": UNANIMITY_TOL}


def _analysis_openness(config: dict, seed: int) -> tuple[list[str], list[list], dict]:
    """Certified unanimity radius at each n's discovered threshold epsilon."""
    kind, ns, _, _ = _family_grid(config)
    if kind != "analytic_unanimity":
        raise ConfigParse("the openness analysis needs the analytic_unanimity family")
    samples = int(config.get("openness", {}).get("samples", 32))
    rows = []
    epsilon_by_n = {}
    for n in ns:
        eps = constructions.find_epsilon_for_unanimity(n)
        epsilon_by_n[str(n)] = eps
        decomp = constructions.analytic_unanimity_instance(n, eps)
        cert = stability.certify_openness(decomp, samples=samples, seed=seed)
        rows.append([n, eps, cert.radius, cert.min_gap_at_boundary, samples])
    columns = ["n", "epsilon", "radius", "min_gap_at_boundary", "samples"]
    return columns, rows, {"strict_gap": UNANIMITY_TOL, "epsilon_by_n": epsilon_by_n}


def _analysis_suppression(config: dict, seed: int) -> tuple[list[str], list[list], dict]:
    """Optimal event suppression across a budget grid (linear in the budget)."""
    params = config.get("suppression", {})
    m = int(params.get("outcomes", 5))
    n = int(params.get("agents", 3))
    instances = int(params.get("instances", 4))
    budgets = [float(b) for b in _as_list(params.get("budgets", [0.01, 0.02, 0.04, 0.08]))]
    rows = []
    for i in range(instances):
        rng = rng_from(seed, 20, i)
        decomp = _seeded_decomposition(rng, m, n)
        profiles = persona.centered_profiles(decomp)
        k = int(rng.integers(1, m - 1))
        event = tuple(int(x) for x in rng.choice(m, size=k, replace=False))
        for eps in budgets:
            plan = persona.optimal_suppression(profiles, event, eps)
            rows.append(
                [i, eps, plan.achieved, plan.projection_norm, plan.achieved / eps]
            )
    columns = ["instance", "epsilon", "achieved", "projection_norm", "achieved_over_budget"]
    return columns, rows, {"pivot_rel_tol": persona.PIVOT_REL_TOL}


def _analysis_compensation(config: dict, seed: int) -> tuple[list[str], list[list], dict]:
    """Compensation-inequality slack over seeded random weight changes."""
    params = config.get("compensation", {})
    m = int(params.get("outcomes", 5))
    n = int(params.get("agents", 4))
    instances = int(params.get("instances", 25))
    scale = float(params.get("scale", 1e-3))
    rows = []
    for i in range(instances):
        for attempt in range(50):
            rng = rng_from(seed, 21, i, attempt)
            decomp = _seeded_decomposition(rng, m, n)
            d = rng.standard_normal(n)
            d -= d.mean()
            d *= scale / max(1e-12, float(abs(d).max()))
            h_index = int(d.argmax())
            if d[h_index] > 0 and bool((decomp.weights.beta + d > 0).all()):
                break
        shifted = log_pool(list(decomp.children), Weights(decomp.weights.beta + d))
        realized = norm_p(decomp.parent, shifted.log_p - decomp.parent.log_p)
        rep = persona.compensation_bound(
            decomp, h_index, float(d[h_index]), realized * 1.25 + 1e-9, d
        )
        rows.append(
            [i, rep.lhs, rep.rhs, rep.slack, rep.residual_norm, rep.delta_l_norm]
        )
    columns = ["instance", "lhs", "rhs", "slack", "residual_norm", "delta_l_norm"]
    return columns, rows, {"alignment_dead_zone": persona.ALIGNMENT_DEAD_ZONE}


_ANALYSES = {
    "gaps": _analysis_gaps,
    "openness": _analysis_openness,
    "suppression": _analysis_suppression,
    "compensation": _analysis_compensation,
}


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path: Path, columns: list[str], rows: list[list]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _cmd_experiment(args: argparse.Namespace) -> int:
    config = loads(_read_text(args.config))
    if not isinstance(config, dict):
        raise ConfigParse("experiment config must be a JSON object")
    analyses = config.get("analyses")
    if not isinstance(analyses, list) or not analyses:
        raise ConfigParse('config needs a non-empty "analyses" array')
    for name in analyses:
        if name not in _ANALYSES:
            known = ", ".join(sorted(_ANALYSES))
            raise ConfigParse(f"unknown analysis {name!r}; expected one of: {known}")
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))

    prefix = args.out or "experiment"
    started = time.perf_counter()
    tables = []
    thresholds = {}
    for name in analyses:
        columns, rows, used = _ANALYSES[name](config, seed)
        csv_path = Path(f"{prefix}.{name}.csv")
        _write_csv(csv_path, columns, rows)
        tables.append(
            {"analysis": name, "csv": csv_path.name, "columns": columns, "rows": len(rows)}
        )
        thresholds[name] = used
    elapsed = time.perf_counter() - started

    resolved = dict(config)
    resolved["seed"] = seed
    manifest = {
        "schema": 1,
        "artifact": _ARTIFACT,
        "command": "experiment",
        "seed": seed,
        "config_hash": config_hash(resolved),
        "thresholds": thresholds,
        "tables": tables,
    }
    manifest_path = Path(f"{prefix}.manifest.json")
    _write_text(str(manifest_path), dumps(manifest) + "\n")
    print(f"experiment ({', '.join(analyses)}): {elapsed:.3f}s", file=sys.stderr)
    print(f"wrote {len(tables)} table(s) and {manifest_path}", file=sys.stderr)
    return 0


def _parse_family(obj: Any) -> tuple[list, Weights]:
    if not isinstance(obj, dict) or "agents" not in obj or "weights" not in obj:
        raise ParseError('input must be {"agents": [...], "weights": [...]}')
    agents_raw = obj["agents"]
    if not isinstance(agents_raw, list) or not agents_raw:
        raise ParseError('"agents" must be a non-empty array')
    first = dist_from_json(agents_raw[0])
    agents = [first] + [dist_from_json(a, space=first.space) for a in agents_raw[1:]]
    return agents, weights_from_json(obj["weights"])


def _cmd_pool(args: argparse.Namespace) -> int:
    agents, weights = _parse_family(loads(_read_text(args.input)))
    if args.kind == "log":
        pooled, log_z = log_pool_with_log_z(agents, weights)
        out = {"kind": "log", "pool": dist_to_json(pooled), "log_z": log_z}
    else:
        pooled = linear_pool(agents, weights)
        out = {"kind": "linear", "pool": dist_to_json(pooled)}
    _write_text(args.out, dumps(out) + "\n")
    return 0


def _cmd_gap(args: argparse.Namespace) -> int:
    obj = loads(_read_text(args.input))
    if not isinstance(obj, dict) or "agent" not in obj or "pool" not in obj:
        raise ParseError('input must be {"agent": {...}, "pool": {...}}')
    agent = dist_from_json(obj["agent"])
    pooled = dist_from_json(obj["pool"], space=agent.space)
    gap = welfare_gap(agent, pooled)
    out = {
        "gap": gap,
        "entropy_agent": entropy(agent),
        "entropy_pool": entropy(pooled),
        "kl_pool_agent": kl(pooled, agent),
        "strictly_positive": bool(gap > 0.0),
    }
    _write_text(args.out, dumps(out) + "\n")
    return 0


def _cmd_factor(args: argparse.Namespace) -> int:
    obj = loads(_read_text(args.input))
    if not isinstance(obj, dict) or "parent" not in obj or "weights" not in obj:
        raise ParseError('input must be {"parent": {...}, "weights": [...]}')
    parent = dist_from_json(obj["parent"])
    weights = weights_from_json(obj["weights"])
    decomp = factorize.factor_pairwise_distinct(parent, weights, seed=args.seed)
    out = {
        "decomposition": decomposition_to_json(decomp),
        "provenance": {
            "method": "pairwise_distinct",
            "seed": args.seed,
            "distinctness_tv": factorize.DISTINCTNESS_TV,
            "retry_budget": factorize.RETRY_BUDGET,
        },
    }
    _write_text(args.out, dumps(out) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logpool",
        description="opinion pooling, epistemic welfare, and weight-change analysis",
    )
    parser.add_argument("--version", action="version", version=f"logpool {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("suite", help=f"one of: {', '.join(SUITE_NAMES)}, all")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument(
        "--samples", type=int, default=None, help="override per-check instance counts"
    )
    p_verify.add_argument(
        "--tolerance", type=float, default=None, help="override per-check thresholds"
    )
    p_verify.add_argument("--out", default=None, help="write the JSON report here")
    p_verify.set_defaults(fn=_cmd_verify)

    p_exp = sub.add_parser("experiment", help="run a config-driven parameter sweep")
    p_exp.add_argument("config", help="JSON config file ('-' for stdin)")
    p_exp.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_exp.add_argument(
        "--out", default=None, help="output prefix (default 'experiment')"
    )
    p_exp.set_defaults(fn=_cmd_experiment)

    p_pool = sub.add_parser("pool", help="pool a JSON family of distributions")
    p_pool.add_argument("input", help="JSON input file ('-' for stdin)")
    p_pool.add_argument("--kind", choices=("log", "linear"), default="log")
    p_pool.add_argument("--out", default=None)
    p_pool.set_defaults(fn=_cmd_pool)

    p_gap = sub.add_parser("gap", help="welfare gap of an agent against a pool")
    p_gap.add_argument("input", help="JSON input file ('-' for stdin)")
    p_gap.add_argument("--out", default=None)
    p_gap.set_defaults(fn=_cmd_gap)

    p_factor = sub.add_parser("factor", help="factor a distribution into distinct agents")
    p_factor.add_argument("input", help="JSON input file ('-' for stdin)")
    p_factor.add_argument("--seed", type=int, default=0)
    p_factor.add_argument("--out", default=None)
    p_factor.set_defaults(fn=_cmd_factor)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UnknownSuite, ParseError, IoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LogPoolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
