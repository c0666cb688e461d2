"""Convergence of the empirical law toward the normal limit.

Solves a geometric ladder of N, prints the distance table with the
scaled columns, and reports the worst margin of every bound family
that applied.  A cache directory makes repeated sweeps cheap.

    python scripts/convergence_sweep.py --n-min 100 --n-max 1000000 \
        --steps 9 --cache-dir ~/.cache/miw
"""

import argparse
import sys

from miw.bounds import run_sweep
from miw.cli import _geometric_grid, resolve_cache_dir, save_configuration, solve_cached


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-min", type=int, default=100)
    parser.add_argument("--n-max", type=int, default=1_000_000)
    parser.add_argument("--steps", type=int, default=9)
    parser.add_argument("--tol", type=float, default=1e-13)
    parser.add_argument("--cache-dir", default=None)
    args = parser.parse_args()

    grid = _geometric_grid(args.n_min, args.n_max, args.steps)
    cache_dir = resolve_cache_dir(args.cache_dir)
    if cache_dir is not None:
        # warm the cache so run_sweep's own solves are the only cost
        for n in grid:
            cfg, state = solve_cached(n, tol=args.tol, cache_dir=cache_dir)
            if state == "miss":
                save_configuration(cfg, cache_dir)

    sweep = run_sweep(grid, tol=args.tol)

    print(f"{'N':>9} {'x1':>12} {'d_K':>13} {'d_W':>13} {'N dK':>9} {'N dW/rt(logN)':>14}")
    for n in sorted(sweep.reports):
        r = sweep.reports[n]
        print(
            f"{n:>9} {r.x1:>12.8f} {r.d_k:>13.6e} {r.d_w:>13.6e} "
            f"{r.scaled_dk:>9.5f} {r.scaled_dw:>14.5f}"
        )

    print()
    print(f"wasserstein lower-bound constant: {sweep.wasserstein_constant!r}")
    for family in sorted(sweep.worst_margins):
        print(f"worst margin {family:24s} {sweep.worst_margins[family]:+.5e}")
    for n, reason in sorted(sweep.skipped.items()):
        print(f"skipped N={n}: {reason}")
    for n, msg in sorted(sweep.failures.items()):
        print(f"FAILED N={n}: {msg}", file=sys.stderr)
    return 1 if (sweep.failures or not sweep.all_passed) else 0


if __name__ == "__main__":
    raise SystemExit(main())
