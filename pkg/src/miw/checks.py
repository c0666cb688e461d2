"""Shared record type for inequality checks.

Every verification routine in the package reports inequalities the same
way: an explicit lhs <= rhs pair with its margin, never a bare boolean.
A check passes when the margin is no worse than a small relative slack,
so honest floating-point noise at an inequality that is tight in exact
arithmetic does not produce spurious failures.
"""

from __future__ import annotations

from dataclasses import dataclass

# Relative slack applied to every recorded inequality.  A margin of
# -1e-12 * max(1, |rhs|) or better counts as a pass.
REL_SLACK = 1e-12


@dataclass(frozen=True)
class BoundCheck:
    """One verified inequality lhs <= rhs.

    margin is rhs - lhs, so positive margins mean slack and negative
    margins mean violation.  n_index identifies the location index the
    check applies to, when there is one.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    n_index: int | None = None


def make_check(
    name: str,
    lhs: float,
    rhs: float,
    n_index: int | None = None,
    require_positive_lhs: bool = False,
) -> BoundCheck:
    """Record the inequality lhs <= rhs with the package-wide slack rule."""
    lhs = float(lhs)
    rhs = float(rhs)
    margin = rhs - lhs
    passed = margin >= -REL_SLACK * max(1.0, abs(rhs))
    if require_positive_lhs:
        passed = passed and lhs > 0.0
    return BoundCheck(name, lhs, rhs, margin, passed, n_index)
