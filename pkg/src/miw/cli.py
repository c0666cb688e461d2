"""Command-line interface, solve cache, and report writers.

The only module that touches files or the environment.  Everything here
is deterministic: floats are persisted through repr (shortest exact
round-trip), report rows are sorted by N, and re-emitting any file with
the same inputs is byte-identical.

Exit codes are a stable contract: 0 success, 1 a check or the solver
failed, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import coupling as coupling_mod
from . import metrics as metrics_mod
from . import stein as stein_mod
from .gaussians import mills_ratio_gap_bound, mills_ratio_product_bound
from .ground_state import Configuration, Residuals, SolverError, _assemble, solve

FORMAT_VERSION = 1
CSV_HEADER = "N,x1,d_K,d_W,N_dK,N_dW_scaled,checks_passed,checks_total"
IDENTITY_TOL = 1e-9
GH_ORACLE_TOL = 1e-9

# derivative first in each pair is what the density side integrates
IDENTITY_FUNCTIONS = {
    "w": (lambda w: w, lambda w: 1.0),
    "w2": (lambda w: w * w, lambda w: 2.0 * w),
    "w3": (lambda w: w * w * w, lambda w: 3.0 * w * w),
    "sin": (math.sin, math.cos),
    "tanh": (math.tanh, lambda w: 1.0 - math.tanh(w) ** 2),
}


# ============================================================
# cache
# ============================================================


def resolve_cache_dir(flag_value: str | None) -> Path | None:
    """MIW_CACHE_DIR overrides the flag when set; None disables caching."""
    env = os.environ.get("MIW_CACHE_DIR")
    if env:
        return Path(env)
    return Path(flag_value) if flag_value else None


def cache_path(cache_dir: Path, n_worlds: int, tol: float, precision: str) -> Path:
    name = f"n{n_worlds}_tol{tol!r}_{precision}_v{FORMAT_VERSION}.json"
    return Path(cache_dir) / name


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def cache_entry_text(cfg: Configuration) -> str:
    entry = {
        "format_version": FORMAT_VERSION,
        "n_worlds": cfg.n_worlds,
        "tol": cfg.tol,
        "precision": cfg.precision,
        "shoot_value": cfg.shoot_value,
        "half_locations": [float(v) for v in cfg.half_locations],
        "residuals": {
            "zero_mean": cfg.residuals.zero_mean,
            "variance": cfg.residuals.variance,
            "recursion": cfg.residuals.recursion,
            "median": cfg.residuals.median,
        },
    }
    return json.dumps(entry, indent=2, sort_keys=True) + "\n"


def save_configuration(cfg: Configuration, cache_dir: Path) -> Path:
    path = cache_path(cache_dir, cfg.n_worlds, cfg.tol, cfg.precision)
    _atomic_write_text(path, cache_entry_text(cfg))
    return path


def load_configuration(
    n_worlds: int, tol: float, precision: str, cache_dir: Path
) -> Configuration | None:
    """Reload a cached solve; any mismatch or damage is a silent miss."""
    path = cache_path(cache_dir, n_worlds, tol, precision)
    try:
        entry = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    try:
        if (
            entry["format_version"] != FORMAT_VERSION
            or entry["n_worlds"] != n_worlds
            or entry["tol"] != tol
            or entry["precision"] != precision
        ):
            return None
        residuals = Residuals(**entry["residuals"])
        half = np.asarray(entry["half_locations"], dtype=np.float64)
        return _assemble(
            n_worlds,
            half,
            entry["shoot_value"],
            tol,
            precision,
            residuals.median,
            residuals=residuals,
        )
    except (KeyError, TypeError, SolverError):
        return None


def solve_cached(
    n_worlds: int,
    tol: float = 1e-13,
    precision: str = "double",
    cache_dir: Path | None = None,
) -> tuple[Configuration, str]:
    """Solve through the cache; returns (configuration, 'hit'|'miss'|'off')."""
    if cache_dir is None:
        return solve(n_worlds, tol=tol, precision=precision), "off"
    cfg = load_configuration(n_worlds, tol, precision, cache_dir)
    if cfg is not None:
        return cfg, "hit"
    cfg = solve(n_worlds, tol=tol, precision=precision)
    save_configuration(cfg, cache_dir)
    return cfg, "miss"


# ============================================================
# shared helpers
# ============================================================


def _geometric_grid(n_min: int, n_max: int, steps: int) -> list[int]:
    values = np.rint(np.geomspace(n_min, n_max, steps)).astype(np.int64)
    return sorted(set(int(v) for v in values))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _emit(text: str, out: str | None) -> None:
    if out:
        _atomic_write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _report_rows(sweep: bounds_mod.SweepResult) -> list[str]:
    rows = []
    for n in sorted(sweep.reports):
        rep = sweep.reports[n]
        per_n = sweep.checks.get(n, [])
        passed = sum(1 for c in per_n if c.passed)
        rows.append(
            f"{n},{rep.x1!r},{rep.d_k!r},{rep.d_w!r},"
            f"{rep.scaled_dk!r},{rep.scaled_dw!r},{passed},{len(per_n)}"
        )
    return rows


def _sweep_json(sweep: bounds_mod.SweepResult) -> str:
    payload = {
        "format_version": FORMAT_VERSION,
        "rows": [
            {
                "N": n,
                "x1": sweep.reports[n].x1,
                "d_K": sweep.reports[n].d_k,
                "d_W": sweep.reports[n].d_w,
                "N_dK": sweep.reports[n].scaled_dk,
                "N_dW_scaled": sweep.reports[n].scaled_dw,
                "checks_passed": sum(1 for c in sweep.checks.get(n, []) if c.passed),
                "checks_total": len(sweep.checks.get(n, [])),
            }
            for n in sorted(sweep.reports)
        ],
        "checks": {
            str(n): [
                {
                    "name": c.name,
                    "n_index": c.n_index,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "margin": c.margin,
                    "passed": c.passed,
                }
                for c in per_n
            ]
            for n, per_n in sorted(sweep.checks.items())
        },
        "worst_margins": dict(sorted(sweep.worst_margins.items())),
        "wasserstein_constant": sweep.wasserstein_constant,
        "skipped": {str(n): reason for n, reason in sorted(sweep.skipped.items())},
        "failures": {str(n): msg for n, msg in sorted(sweep.failures.items())},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ============================================================
# subcommands
# ============================================================


def cmd_solve(args) -> int:
    if args.n < 2:
        return _fail("--n must be at least 2")
    if not args.tol > 0.0:
        return _fail("--tol must be positive")
    cache_dir = resolve_cache_dir(args.cache_dir)
    try:
        cfg, cache_state = solve_cached(
            args.n, tol=args.tol, precision=args.precision, cache_dir=cache_dir
        )
    except (SolverError, ValueError) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return 1
    if args.out:
        _atomic_write_text(Path(args.out), cache_entry_text(cfg))

    r = cfg.residuals
    parity = "odd" if cfg.n_worlds % 2 else "even"
    print(f"N = {cfg.n_worlds}  (median index {cfg.median_index}, {parity})")
    print(f"x1 = {cfg.x1!r}")
    print(f"zero-mean residual  {r.zero_mean:.6e}")
    print(f"variance residual   {r.variance:.6e}")
    print(f"recursion residual  {r.recursion:.6e}")
    print(f"median closure      {r.median:.6e}")
    print(f"tol {cfg.tol!r}  precision {cfg.precision}  cache {cache_state}")
    ok, problems = cfg.residual_bounds_ok()
    if not ok:
        for p in problems:
            print(f"RESIDUAL BREACH: {p}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    if args.n_min < 2:
        return _fail("--n-min must be at least 2")
    if args.n_min > args.n_max:
        return _fail("--n-min must not exceed --n-max")
    if args.steps < 1:
        return _fail("--steps must be at least 1")
    grid = _geometric_grid(args.n_min, args.n_max, args.steps)
    sweep = bounds_mod.run_sweep(grid, tol=args.tol)

    if args.format == "csv":
        text = CSV_HEADER + "\n" + "".join(row + "\n" for row in _report_rows(sweep))
    else:
        text = _sweep_json(sweep)
    _emit(text, args.out)

    print(f"wasserstein lower-bound constant: {sweep.wasserstein_constant!r}", file=sys.stderr)
    for fam in sorted(sweep.worst_margins):
        print(f"worst margin {fam:24s} {sweep.worst_margins[fam]:+.6e}", file=sys.stderr)
    for n, reason in sorted(sweep.skipped.items()):
        print(f"skipped N={n}: {reason}", file=sys.stderr)
    for n, msg in sorted(sweep.failures.items()):
        print(f"FAILED N={n}: {msg}", file=sys.stderr)
    if not sweep.all_passed:
        bad = [
            (n, c.name, c.margin)
            for n, per_n in sorted(sweep.checks.items())
            for c in per_n
            if not c.passed
        ]
        for n, name, margin in bad:
            print(f"FAILED check {name} at N={n}, margin {margin:+.6e}", file=sys.stderr)
        return 1
    return 0


def cmd_coupling(args) -> int:
    if args.n < 2:
        return _fail("--n must be at least 2")
    unknown = [name for name in args.identity_functions if name not in IDENTITY_FUNCTIONS]
    if unknown:
        return _fail(f"unknown identity functions: {', '.join(unknown)}")
    try:
        cfg = solve(args.n, tol=args.tol)
    except (SolverError, ValueError) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return 1
    c = coupling_mod.build(cfg)

    print(f"zero-bias coupling, N = {args.n}")
    print(f"  variance sigma^2        = {c.variance!r}")
    worst = 0.0
    for name in args.identity_functions:
        f, f_prime = IDENTITY_FUNCTIONS[name]
        residual = coupling_mod.zero_bias_identity_check(c, f_prime, f)
        worst = max(worst, residual)
        print(f"  identity residual {name:5s} = {residual:.6e}")
    eh_w, eh_wstar = coupling_mod.sawtooth_expectation(c)
    gap = coupling_mod.expected_coupling_gap(c)
    print(f"  E h(W)                  = {eh_w!r}")
    print(f"  E h(W*)                 = {eh_wstar!r}   (x1/(2(N-1)) = {cfg.x1 / (2 * (args.n - 1))!r})")
    print(f"  E|W - W*|               = {gap!r}")
    if worst > IDENTITY_TOL:
        print(f"IDENTITY BREACH: worst residual {worst:.6e} > {IDENTITY_TOL}", file=sys.stderr)
        return 1
    return 0


def cmd_plotdata(args) -> int:
    if args.n_min < 2:
        return _fail("--n-min must be at least 2")
    if args.n_min > args.n_max:
        return _fail("--n-min must not exceed --n-max")
    if args.steps < 1:
        return _fail("--steps must be at least 1")
    cache_dir = resolve_cache_dir(args.cache_dir)
    grid = _geometric_grid(args.n_min, args.n_max, args.steps)
    reports = []
    for n in grid:
        try:
            cfg, _ = solve_cached(n, tol=args.tol, cache_dir=cache_dir)
        except (SolverError, ValueError) as exc:
            print(f"solver failed at N={n}: {exc}", file=sys.stderr)
            return 1
        reports.append(metrics_mod.report(cfg))

    series = [
        ("kolmogorov_distance", lambda r: r.d_k),
        ("wasserstein_distance", lambda r: r.d_w),
        ("scaled_kolmogorov", lambda r: r.scaled_dk),
        ("scaled_wasserstein", lambda r: r.scaled_dw),
    ]
    blocks = []
    for name, pick in series:
        lines = [f"# series: {name}", "# columns: N value"]
        lines += [f"{r.n_worlds} {pick(r)!r}" for r in reports]
        blocks.append("\n".join(lines))
    _emit("\n\n\n".join(blocks) + "\n", args.out)
    return 0


def cmd_stein_check(args) -> int:
    if args.n < 3:
        return _fail("--n must be at least 3")
    failures = 0

    z_values = np.geomspace(1e-3, 10.0, args.z_count)
    worst_envelope = 0.0
    total_violations = 0
    for z in z_values:
        rep = stein_mod.verify_indicator_envelope(float(z))
        total_violations += len(rep.violations)
        worst_envelope = max(worst_envelope, rep.max_violation)
    print(f"envelope scan: {args.z_count} z values, {total_violations} violations")
    if total_violations:
        print(f"ENVELOPE BREACH: worst excess {worst_envelope:.6e}", file=sys.stderr)
        failures += 1

    w_grid = np.linspace(1e-4, 40.0, 10_000)
    product_bad = sum(1 for w in w_grid if not mills_ratio_product_bound(float(w)).passed)
    gap_bad = sum(1 for w in w_grid if not mills_ratio_gap_bound(float(w)).passed)
    print(f"scaled-tail product bound: {product_bad} violations over {w_grid.size} points")
    print(f"scaled-tail gap bound:     {gap_bad} violations over {w_grid.size} points")
    if product_bad or gap_bad:
        failures += 1

    cfg = solve(args.n, tol=args.tol)
    grad = stein_mod.SawtoothGradient(cfg)
    span_lo = cfg.locations[-1] - 1.0
    span_hi = cfg.locations[0] + 1.0
    worst_gh = 0.0
    for w in np.linspace(span_lo, span_hi, args.w_count):
        closed = grad.value(float(w))
        quad = stein_mod.sawtooth_gradient_by_quadrature(cfg, float(w))
        worst_gh = max(worst_gh, abs(closed - quad))
    print(f"sawtooth gradient vs quadrature at N={args.n}: worst |diff| = {worst_gh:.6e}")
    if worst_gh > GH_ORACLE_TOL:
        print(f"ORACLE MISMATCH: {worst_gh:.6e} > {GH_ORACLE_TOL}", file=sys.stderr)
        failures += 1

    if cfg.n_worlds > 100:
        constant = stein_mod.estimate_sawtooth_constant(cfg)
        print(
            f"tail-decay constant at N={args.n}: {constant.best_constant!r} "
            f"({len(constant.rows)} deep-tail rows)"
        )
        if not math.isfinite(constant.best_constant):
            print("CONSTANT NOT FINITE", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


# ============================================================
# parser
# ============================================================


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miw",
        description="Ground-state configuration solver and normal-approximation verifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one N and print residuals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--out", default=None)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--precision", choices=("double", "dd"), default="double")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", help="sweep N and run the full bound battery")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--tol", type=float, default=1e-13)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("coupling", help="build the zero-bias coupling and check identities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument(
        "--identity-functions",
        nargs="+",
        default=list(IDENTITY_FUNCTIONS),
        metavar="NAME",
    )
    p.set_defaults(handler=cmd_coupling)

    p = sub.add_parser("plotdata", help="emit distance series as plain-text columns")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--cache-dir", default=None)
    p.set_defaults(handler=cmd_plotdata)

    p = sub.add_parser("stein-check", help="envelope scan, tail bounds, gradient oracle")
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--z-count", type=int, default=100)
    p.add_argument("--w-count", type=int, default=100)
    p.set_defaults(handler=cmd_stein_check)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        return int(exc.code) if exc.code else 0
    return args.handler(args)
