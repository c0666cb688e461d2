"""Audit every location inequality at full resolution.

check_configuration_bounds normally reports only the worst margin per
check name.  This script runs with detail="all" and prints, for each
name, how many instances were checked, the tightest margin, and the
location index where it occurs.  Useful for seeing which inequalities
are close to sharp and where.

    python scripts/audit_inequalities.py --n 101 1001 100001
"""

import argparse
from collections import defaultdict

from miw.bounds import check_configuration_bounds
from miw.ground_state import solve


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[101, 1001, 10001])
    parser.add_argument("--tol", type=float, default=1e-13)
    args = parser.parse_args()

    failed = False
    for n in args.n:
        cfg = solve(n, tol=args.tol)
        checks = check_configuration_bounds(cfg, detail="all")
        by_name: dict[str, list] = defaultdict(list)
        for c in checks:
            by_name[c.name].append(c)

        print(f"N = {n}  ({len(checks)} checks)")
        for name in sorted(by_name):
            group = by_name[name]
            worst = min(group, key=lambda c: c.margin)
            where = "-" if worst.n_index is None else str(worst.n_index)
            status = "ok" if all(c.passed for c in group) else "VIOLATED"
            print(
                f"  {name:24s} count={len(group):6d} "
                f"tightest={worst.margin:+.6e} at n={where:>6s}  {status}"
            )
            failed = failed or status != "ok"
        print()
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
