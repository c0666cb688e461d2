"""Inequality battery for solved configurations and their distances.

Two layers.  check_configuration_bounds evaluates the six proved
location/partial-sum inequality families on one configuration (they are
stated only for N > 100, and the harness refuses smaller N rather than
extrapolating).  check_distance_bounds evaluates the two-sided windows
on d_K and d_W.  run_sweep ties both to the solver over a list of N and
aggregates worst margins per family, recording per-N failures instead
of aborting.

Every check is a BoundCheck with margin = rhs - lhs, so "passed" always
means lhs <= rhs up to the shared relative slack.  The harness only
evaluates; it never adjusts a bound to make a run green.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .checks import BoundCheck, make_check
from .ground_state import Configuration, solve
from .metrics import DistanceReport, report

# families evaluated on a configuration; values are the check names
# each family emits (windows contribute one check per side)
BOUND_FAMILIES = {
    "median_window": ("median_nonneg", "median_cap"),
    "location_upper": ("location_upper",),
    "partial_sum_window": ("partial_sum_lower", "partial_sum_upper"),
    "deep_tail_lower": ("deep_tail_location", "deep_tail_sum"),
    "square_gap": ("square_gap",),
    "first_location_lower": ("first_location_lower",),
}

DISTANCE_CHECKS = (
    "kolmogorov_lower",
    "kolmogorov_upper",
    "wasserstein_upper",
    "wasserstein_lower",
)

_FAMILY_OF = {name: fam for fam, names in BOUND_FAMILIES.items() for name in names}
_FAMILY_OF.update({name: name for name in DISTANCE_CHECKS})

# pair checks enumerate every (l, j) when the half-size is at most this
FULL_PAIR_LIMIT = 2000
_PAIR_SAMPLE_POINTS = 450


def deep_tail_cutoff(median_index: int) -> int:
    """Largest index of the deep-tail regime, floor(m / e^3)."""
    return int(median_index / math.exp(3.0))


def _emit(checks, name, lhs, rhs, indices, detail):
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if detail == "all":
        for i in range(lhs.size):
            idx = None if indices is None else int(indices[i])
            checks.append(make_check(name, float(lhs[i]), float(rhs[i]), n_index=idx))
        return
    k = int(np.argmin(rhs - lhs))
    idx = None if indices is None else int(indices[k])
    checks.append(make_check(name, float(lhs[k]), float(rhs[k]), n_index=idx))


def check_configuration_bounds(
    cfg: Configuration, detail: str = "worst"
) -> list[BoundCheck]:
    """Evaluate the six location/partial-sum families on one configuration.

    detail="worst" emits one check per family side, carrying the index
    with the smallest margin; "all" emits every index (large at big N).
    The families only hold for N > 100, so smaller N raises.
    """
    if detail not in ("worst", "all"):
        raise ValueError("detail must be 'worst' or 'all'")
    if cfg.n_worlds <= 100:
        raise ValueError("configuration bounds require N > 100")
    x = cfg.locations
    s = cfg.partial_sums
    m = cfg.median_index
    checks: list[BoundCheck] = []

    xm = float(x[m - 1])
    checks.append(make_check("median_nonneg", 0.0, xm, n_index=m))
    checks.append(make_check("median_cap", xm, 1.0 / m, n_index=m))

    idx = np.arange(1, m)
    envelope = np.sqrt(2.0 * (1.0 + np.log(m / idx)))
    _emit(checks, "location_upper", x[: m - 1], envelope, idx, detail)
    _emit(checks, "partial_sum_lower", np.sqrt(idx * (idx + 1) / 2.0), s[: m - 1], idx, detail)
    _emit(checks, "partial_sum_upper", s[: m - 1], 1.5 * idx * envelope, idx, detail)

    deep = deep_tail_cutoff(m)
    if deep >= 1:
        env_d = envelope[:deep]
        _emit(checks, "deep_tail_location", env_d / 3.0, x[:deep], idx[:deep], detail)
        _emit(checks, "deep_tail_sum", idx[:deep] * env_d / 3.0, s[:deep], idx[:deep], detail)

    if deep >= 2:
        if m <= FULL_PAIR_LIMIT:
            sub = np.arange(1, deep + 1)
        else:
            # deterministic log-stratified subsample, no RNG involved
            sub = np.unique(
                np.rint(np.geomspace(1.0, deep, num=_PAIR_SAMPLE_POINTS)).astype(np.int64)
            )
        li, ji = np.triu_indices(sub.size, k=1)
        l_vals = sub[li]
        j_vals = sub[ji]
        sq = x[sub - 1] ** 2
        _emit(
            checks,
            "square_gap",
            4.0 * np.log(j_vals / l_vals) / 9.0,
            sq[li] - sq[ji],
            None,
            detail,
        )

    checks.append(make_check("first_location_lower", math.sqrt(math.log(m)), float(x[0])))
    return checks


def check_distance_bounds(
    report_: DistanceReport, lower_constant: float = 0.0
) -> list[BoundCheck]:
    """Two-sided windows on d_K and d_W for one solved N.

    The d_W lower bound carries an additive -lower_constant/N term whose
    constant the theory leaves unnamed; callers pass the empirical value
    from estimate_wasserstein_constant (0 disables the allowance).
    """
    n = report_.n_worlds
    log_n = math.log(n)
    return [
        make_check("kolmogorov_lower", 1.0 / (2.0 * n), report_.d_k),
        make_check("kolmogorov_upper", report_.d_k, 55.0 / n),
        make_check("wasserstein_upper", report_.d_w, 16.0 * math.sqrt(log_n) / n),
        make_check(
            "wasserstein_lower",
            math.sqrt(math.log(n / 2.0)) / (2.0 * n) - lower_constant / n,
            report_.d_w,
        ),
    ]


def _wasserstein_deficit(report_: DistanceReport) -> float:
    n = report_.n_worlds
    return math.sqrt(math.log(n / 2.0)) / 2.0 - n * report_.d_w


@dataclass(frozen=True)
class SweepResult:
    """Everything one sweep produced, keyed by N throughout."""

    n_values: list
    reports: dict
    checks: dict
    worst_margins: dict
    wasserstein_constant: float
    failures: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return not self.failures and all(
            c.passed for per_n in self.checks.values() for c in per_n
        )


def estimate_wasserstein_constant(sweep: SweepResult) -> float:
    """Smallest C >= 0 making the d_W lower bound hold across the sweep."""
    deficits = [_wasserstein_deficit(r) for r in sweep.reports.values()]
    return max(0.0, max(deficits, default=0.0))


def run_sweep(n_values, tol: float = 1e-13, max_workers: int = 1) -> SweepResult:
    """Solve each N, compute distances and the full applicable battery.

    Per-N solver errors are captured in failures instead of aborting the
    rest.  The d_W lower-bound constant is estimated from the completed
    reports first, then applied uniformly, so adding a badly-behaved N
    loosens that one bound for the whole sweep; the constant is reported
    so the caller can see this.
    """
    n_values = list(n_values)
    if any(n < 2 for n in n_values):
        raise ValueError("all N must be >= 2")

    reports: dict = {}
    failures: dict = {}
    config_checks: dict = {}
    skipped: dict = {}

    def solve_one(n):
        # the configuration is dropped after this returns; only the
        # report and the constant-free checks are carried forward
        cfg = solve(n, tol=tol)
        per_n = check_configuration_bounds(cfg) if n > 100 else None
        return report(cfg), per_n

    if max_workers > 1 and len(n_values) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {n: pool.submit(solve_one, n) for n in n_values}
        outcomes = {}
        for n, fut in futures.items():
            try:
                outcomes[n] = fut.result()
            except Exception as exc:  # noqa: BLE001 - recorded per N
                outcomes[n] = exc
    else:
        outcomes = {}
        for n in n_values:
            try:
                outcomes[n] = solve_one(n)
            except Exception as exc:  # noqa: BLE001 - recorded per N
                outcomes[n] = exc

    for n, out in outcomes.items():
        if isinstance(out, Exception):
            failures[n] = f"{type(out).__name__}: {out}"
            continue
        reports[n], per_n = out
        if per_n is None:
            skipped[n] = "N <= 100: configuration bound families need N > 100"
        else:
            config_checks[n] = per_n

    constant = max(0.0, max((_wasserstein_deficit(r) for r in reports.values()), default=0.0))

    checks: dict = {}
    for n, rep in reports.items():
        checks[n] = check_distance_bounds(rep, lower_constant=constant) + config_checks.get(
            n, []
        )

    worst: dict = {}
    for per_n in checks.values():
        for c in per_n:
            fam = _FAMILY_OF.get(c.name, c.name)
            if fam not in worst or c.margin < worst[fam]:
                worst[fam] = c.margin

    return SweepResult(
        n_values=n_values,
        reports=reports,
        checks=checks,
        worst_margins=worst,
        wasserstein_constant=constant,
        failures=failures,
        skipped=skipped,
    )
