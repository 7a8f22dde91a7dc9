"""Command-line front end for enumeration, experiments, probes, and classification.

Examples
--------
  illposed enumerate --q 2 --support 2 --entry 1
  illposed verify-theorem --depth 200 --alpha 0.3
  illposed collapse --y random3 --alpha 0.1 --depths 50,200,800,3200
  illposed probe --operator B --eta zeta:1 --n 2000
  illposed classify --catalog
  illposed convergence --operator diag --n 50 --x-true e:1
  illposed growth --operator diag --sizes 8,64,512

Every command writes a CSV report (JSON mirror via --format json) that is
byte-identical across reruns with the same configuration.  Exit codes:
0 success, 2 invalid input, 3 flagged numerical rows.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .classify import catalog, check_consistency, classify
from .directions import (
    EnumerationParams,
    directions_to_json,
    enumerate_directions,
)
from .operators import (
    OperatorAttributes,
    diagonal,
    embedding,
    identity,
    injective_counterexample,
    mazur,
)
from .probes import composition_probe, pseudoinverse_growth, weak_star_probe
from .reports import csv_report, fmt, json_report
from .tikhonov import (
    TikhonovProblem,
    closed_form_minimizer,
    collapse_experiment,
    convergence_experiment,
    minimizer_family_distance,
    objective,
    optimality_residual,
    solve,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FLAGGED = 3

DEFAULT_SEED = 42


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _enumeration(args) -> list:
    params = EnumerationParams(
        q=getattr(args, "q", 2.0),
        max_support=args.support,
        max_entry=args.entry,
    )
    return enumerate_directions(params)


def _parse_vector(spec: str, dim: int, directions, seed: int) -> np.ndarray:
    """Vector specs: 'random3', 'zeta:K', 'e:K', 'ones', or comma floats."""
    if spec.startswith("random"):
        size = int(spec[len("random"):])
        vec = np.random.default_rng(seed).standard_normal(size)
        vec /= np.linalg.norm(vec)
        out = np.zeros(max(dim, size))
        out[:size] = vec
        return out[:dim] if dim else out
    if spec.startswith("zeta:"):
        k = int(spec.split(":")[1])
        if not 1 <= k <= len(directions):
            raise ValueError(f"direction index {k} out of range")
        return directions[k - 1].realized_padded(dim)
    if spec.startswith("e:"):
        k = int(spec.split(":")[1])
        if not 1 <= k <= dim:
            raise ValueError(f"basis index {k} out of range for dim {dim}")
        out = np.zeros(dim)
        out[k - 1] = 1.0
        return out
    if spec == "ones":
        return np.ones(dim)
    values = np.array(_float_list(spec))
    if dim and len(values) > dim:
        raise ValueError(f"vector longer than dimension {dim}")
    out = np.zeros(dim if dim else len(values))
    out[: len(values)] = values
    return out


def cmd_enumerate(args) -> int:
    directions = _enumeration(args)
    if args.format == "json":
        _write(directions_to_json(directions) + "\n", args.out)
    else:
        header = ["index", "canon", "q"]
        rows = [
            [d.index, ";".join(str(c) for c in d.canon), d.q] for d in directions
        ]
        _write(csv_report(header, rows), args.out)
    return EXIT_OK


def _theorem_case(directions, op, k, lam, alpha, tol, gammas):
    n_rows = op.n_rows
    y = lam * directions[k - 1].realized_padded(n_rows)
    problem = TikhonovProblem(op, y, alpha)
    cert = solve(problem, tol=tol, max_iter=50000)
    deviation = minimizer_family_distance(
        cert.x, directions[: op.n_cols], k, lam, alpha
    )
    gamma_spread = 0.0
    gamma_max_residual = 0.0
    if abs(lam) > alpha:
        lo, hi = sorted((0.0, -(abs(lam) - alpha) * (1 if lam > 0 else -1)))
        width = hi - lo
        values = []
        for i in range(1, gammas + 1):
            gamma = lo + width * i / (gammas + 1)
            try:
                cand = closed_form_minimizer(
                    directions[: op.n_cols], k, lam, alpha, gamma
                )
            except ValueError:
                break
            values.append(objective(problem, cand))
            gamma_max_residual = max(
                gamma_max_residual, optimality_residual(problem, cand)
            )
        if values:
            gamma_spread = max(values) - min(values)
    return [
        k,
        lam,
        alpha,
        deviation,
        cert.residual,
        gamma_spread,
        gamma_max_residual,
        len(cert.support),
        cert.converged,
    ]


def cmd_verify_theorem(args) -> int:
    directions = _enumeration(args)
    if args.depth > len(directions):
        raise ValueError(f"depth {args.depth} exceeds enumeration length")
    n_rows = max(d.support for d in directions[: args.depth])
    op = mazur(directions, args.depth, n_rows)
    indices = _int_list(args.indices)
    if any(not 1 <= k <= args.depth for k in indices):
        raise ValueError(f"grid indices must lie in 1..{args.depth}")
    multipliers = _float_list(args.multipliers)
    cases = [(k, m * args.alpha) for k in indices for m in multipliers]

    def run(case):
        k, lam = case
        return _theorem_case(
            directions, op, k, lam, args.alpha, args.tol_residual, args.gammas
        )

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run, cases))
    else:
        rows = [run(case) for case in cases]

    header = [
        "k",
        "lambda",
        "alpha",
        "deviation_l1",
        "residual",
        "gamma_spread",
        "gamma_max_residual",
        "support_size",
        "converged",
    ]
    meta = {"depth": args.depth, "max_deviation": max(r[3] for r in rows)}
    if args.format == "json":
        _write(json_report(header, rows, meta), args.out)
    else:
        _write(
            csv_report(header, rows, [f"max_deviation={fmt(meta['max_deviation'])}"]),
            args.out,
        )
    if any(not r[8] for r in rows):
        return EXIT_FLAGGED
    if any(r[3] > args.tol_match for r in rows):
        return EXIT_FLAGGED
    return EXIT_OK


def cmd_collapse(args) -> int:
    directions = _enumeration(args)
    depths = _int_list(args.depths)
    y = _parse_vector(args.y, 0, directions, args.seed)
    probes = tuple(_int_list(args.probes))
    rows = collapse_experiment(
        directions, y, args.alpha, depths, probe_indices=probes, tol=args.tol
    )
    header = list(rows[0].CSV_FIELDS) + [f"coord_{j}" for j in probes] + ["converged"]
    table = [
        [
            r.depth,
            r.support_index,
            r.support_size,
            r.best_correlation,
            r.beta,
            r.l1_norm,
            *r.coord_values,
            r.converged,
        ]
        for r in rows
    ]
    meta = {"seed": args.seed, "alpha": args.alpha, "y": args.y}
    if args.format == "json":
        _write(json_report(header, table, meta), args.out)
    else:
        _write(csv_report(header, table, [f"seed={args.seed}", f"y={args.y}"]), args.out)
    return EXIT_FLAGGED if any(not r.converged for r in rows) else EXIT_OK


def _probe_operator(args, directions):
    label = args.operator
    if label == "B":
        rows = max(d.support for d in directions[: args.n])
        return mazur(directions, args.n, rows)
    if label == "diag":
        return diagonal(lambda k: 1.0 / k, args.n)
    if label == "inj":
        return injective_counterexample(args.n)
    raise ValueError(f"unknown probe operator {label!r}")


def cmd_probe(args) -> int:
    directions = _enumeration(args)
    if args.compose:
        rows_needed = max(d.support for d in directions[: args.n])
        base = mazur(directions, args.n, rows_needed)
        if args.compose == "identity":
            outer = identity(rows_needed)
        elif args.compose == "diag":
            outer = diagonal(lambda k: 1.0 / k, rows_needed)
        elif args.compose == "embed":
            outer = embedding(2.0, 4.0, rows_needed)
        else:
            raise ValueError(f"unknown composition factor {args.compose!r}")
        report = composition_probe(outer, base, args.n, threshold=args.threshold)
    else:
        op = _probe_operator(args, directions)
        eta = _parse_vector(args.eta, op.n_rows, directions, args.seed)
        report = weak_star_probe(op, eta, args.n, threshold=args.threshold)
    if args.format == "json":
        _write(report.summary_json() + "\n", args.out)
    else:
        _write(report.to_csv(), args.out)
    return EXIT_OK


def _parse_flags(spec: str) -> OperatorAttributes:
    mapping = {"true": True, "false": False, "unknown": None}
    known = set(OperatorAttributes.__dataclass_fields__)
    values = {}
    for part in spec.split(","):
        if not part:
            continue
        key, _, raw = part.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"unknown attribute flag {key!r}")
        if raw not in mapping:
            raise ValueError(f"flag value {raw!r} must be true, false, or unknown")
        values[key] = mapping[raw]
    return OperatorAttributes(**values)


def cmd_classify(args) -> int:
    if args.flags:
        attrs = _parse_flags(args.flags)
        result = classify(attrs)
        violations = check_consistency(attrs)
        payload = {
            "verdict": result.verdict.value,
            "hybrid": result.hybrid,
            "rationale": list(result.rationale),
            "violations": [
                {"rule": v.rule, "statement": v.statement} for v in violations
            ],
        }
        _write(json.dumps(payload, indent=2) + "\n", args.out)
        return EXIT_OK
    header = ["label", "verdict", "hybrid", "expected_verdict", "match", "violations"]
    rows = []
    clean = True
    for entry in catalog():
        result = classify(entry.attributes)
        violations = check_consistency(entry.attributes)
        match = (
            result.verdict is entry.expected_verdict
            and result.hybrid == entry.expected_hybrid
        )
        clean = clean and match and not violations
        rows.append(
            [
                entry.label,
                result.verdict.value,
                result.hybrid,
                entry.expected_verdict.value,
                match,
                ";".join(v.rule for v in violations),
            ]
        )
    if args.format == "json":
        _write(json_report(header, rows), args.out)
    else:
        _write(csv_report(header, rows), args.out)
    return EXIT_OK if clean else EXIT_FLAGGED


def cmd_convergence(args) -> int:
    deltas = _float_list(args.deltas)
    if args.operator == "diag":
        op = diagonal(lambda k: 1.0 / k, args.n, domain_exponent=1.0)
        directions = []
    elif args.operator == "B":
        directions = _enumeration(args)
        rows_needed = max(d.support for d in directions[: args.n])
        op = mazur(directions, args.n, rows_needed)
    else:
        raise ValueError(f"unknown operator {args.operator!r}")
    x_true = _parse_vector(args.x_true, op.n_cols, directions, args.seed)
    report = convergence_experiment(
        op,
        x_true,
        deltas,
        alpha_rule=lambda d: args.alpha_factor * d,
        seed=args.seed,
        tol=args.tol,
    )
    header = list(report.rows[0].CSV_FIELDS) + ["converged"]
    table = [
        [r.delta, r.alpha, r.error_l1, r.support_index, r.support_size, r.converged]
        for r in report.rows
    ]
    meta = {"guaranteed": report.guaranteed, "seed": args.seed}
    if args.format == "json":
        _write(json_report(header, table, meta), args.out)
    else:
        _write(
            csv_report(
                header,
                table,
                [f"guaranteed={fmt(report.guaranteed)}", f"seed={args.seed}"],
            ),
            args.out,
        )
    return EXIT_FLAGGED if any(not r.converged for r in report.rows) else EXIT_OK


def cmd_growth(args) -> int:
    sizes = _int_list(args.sizes)
    family = []
    for n in sizes:
        if args.operator == "diag":
            family.append(diagonal(lambda k: 1.0 / k, n))
        elif args.operator == "identity":
            family.append(identity(n))
        elif args.operator == "inj":
            family.append(injective_counterexample(n))
        else:
            raise ValueError(f"unknown operator {args.operator!r}")
    rows = [list(entry) for entry in pseudoinverse_growth(family)]
    header = ["n", "min_singular_value", "growth"]
    if args.format == "json":
        _write(json_report(header, rows), args.out)
    else:
        _write(csv_report(header, rows), args.out)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--config", default=None, help="JSON config file; flags win")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_enum_bounds(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--support", type=int, default=3, help="max support bound")
    parser.add_argument("--entry", type=int, default=8, help="max entry bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="illposed", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list unit-sphere directions")
    p.add_argument("--q", type=float, default=2.0)
    _add_enum_bounds(p)
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify-theorem", help="solver vs closed form over a grid")
    p.add_argument("--depth", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--indices", default="1,5,17,60,150")
    p.add_argument("--multipliers", default="-10,-2,-0.5,0.5,2,10")
    p.add_argument("--gammas", type=int, default=5)
    p.add_argument("--tol-match", dest="tol_match", type=float, default=1e-8)
    p.add_argument("--tol-residual", dest="tol_residual", type=float, default=1e-12)
    p.add_argument("--jobs", type=int, default=1)
    _add_enum_bounds(p)
    _add_common(p)
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("collapse", help="minimizer drift across enumeration depths")
    p.add_argument("--y", default="random3")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--depths", default="50,200,800,3200")
    p.add_argument("--probes", default="1,2,3")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_enum_bounds(p)
    _add_common(p)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("probe", help="weak*-null basis pairings")
    p.add_argument("--operator", default="B", help="B, diag, or inj")
    p.add_argument("--eta", default="zeta:1")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument(
        "--compose",
        default=None,
        help="probe a composition with this outer factor: identity, diag, embed",
    )
    _add_enum_bounds(p)
    _add_common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("classify", help="posedness verdicts")
    p.add_argument("--catalog", action="store_true")
    p.add_argument("--flags", default=None, help="comma list name=true|false|unknown")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("convergence", help="noise-to-zero error table")
    p.add_argument("--operator", default="diag", help="diag or B")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--x-true", dest="x_true", default="e:1")
    p.add_argument("--deltas", default="1e-1,1e-2,1e-3,1e-4,1e-5")
    p.add_argument("--alpha-factor", dest="alpha_factor", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_enum_bounds(p)
    _add_common(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("growth", help="inverse growth across truncation sizes")
    p.add_argument("--operator", default="diag", help="diag, identity, or inj")
    p.add_argument("--sizes", default="8,64,512")
    _add_common(p)
    p.set_defaults(func=cmd_growth)

    return parser


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="utf-8") as handle:
        config = json.load(handle)
    for key, value in config.items():
        option = "--" + key.replace("_", "-")
        if option in argv or key == "config":
            continue
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        setattr(args, key, value)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
