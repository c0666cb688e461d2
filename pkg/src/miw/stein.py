"""Stein-equation solution functionals and their verified envelopes.

For the half-line test function 1(w <= z) the derivative of w f_z(w),
with f_z the Stein solution, has two branches that both route through
the scaled tail T to stay finite over the working range [-40, 40]:

    g_z(w) = ((1 + w^2) T(w)  - w) * Phi(z)        for w > z,
    g_z(w) = ((1 + w^2) T(-w) + w) * (1 - Phi(z))  for w <= z,

using sqrt(2*pi) e^{w^2/2} Phi(w) = T(-w) on the lower branch.  The
function is nonnegative, rises below zero, falls above z, obeys cubic
tail envelopes, and jumps at w = z; the jump is recorded, never
asserted away.

For the sawtooth witness h the same functional evaluates as

    g_h(w) = (w - (1+w^2) T(w)) * P(w) - (w + (1+w^2) T(-w)) * Q(w),

with P(w) the integral of h' Phi up to w and Q(w) the integral of
h' (1 - Phi) beyond w.  h' is +-1 between atoms and midpoints, so both
integrals telescope into sums of the CDF integral J at precomputed
breakpoints; no quadrature is needed, though a quadrature evaluator is
kept alongside as an independent route for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .checks import REL_SLACK
from .gaussians import (
    SQRT_2PI,
    mills_ratio,
    norm_cdf,
    norm_cdf_integral,
    norm_sf,
)
from .ground_state import Configuration

_ABS_CAP_OFFSET = SQRT_2PI / 4.0


def stein_g_indicator(z: float, w):
    """(w f_z(w))' for the indicator test function 1(. <= z), z > 0."""
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    arr = np.asarray(w, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    phi_z = norm_cdf(z)
    sf_z = norm_sf(z)
    out = np.empty_like(arr)
    upper = arr > z
    wu = arr[upper]
    out[upper] = ((1.0 + wu * wu) * mills_ratio(wu) - wu) * phi_z
    wl = arr[~upper]
    out[~upper] = ((1.0 + wl * wl) * mills_ratio(-wl) + wl) * sf_z
    if scalar:
        return float(out[0])
    return out


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid for the envelope scan."""

    w_min: float = -40.0
    w_max: float = 40.0
    n_points: int = 10_000


@dataclass(frozen=True)
class SteinEnvelopeReport:
    """Outcome of one envelope scan at level z.

    violations holds (w, property_name, value, bound) tuples for every
    grid point where an asserted value <= bound failed beyond slack;
    branch_left/branch_right are the two one-sided values at w = z,
    recording the jump without asserting anything about it.
    """

    z: float
    grid: np.ndarray
    max_violation: float
    branch_left: float
    branch_right: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _collect(violations, w, name, value, bound):
    slack = REL_SLACK * np.maximum(1.0, np.abs(bound))
    bad = value > bound + slack
    for i in np.nonzero(bad)[0]:
        violations.append((float(w[i]), name, float(value[i]), float(bound[i])))


def verify_indicator_envelope(
    z: float,
    grid: GridSpec = GridSpec(),
    g_fn=None,
) -> SteinEnvelopeReport:
    """Scan every claimed property of g_z on the grid.

    Checked pointwise: nonnegativity, |g| <= |w| + sqrt(2*pi)/4, the
    cubic envelopes 3/(2 (1-w)^3) below zero and 3/(1+w)^3 above z, and
    g <= 2 (1 - Phi(z)) for w <= 0.  Checked on neighbor pairs:
    nondecreasing below zero and nonincreasing above z, with slack
    1e-12 * (1 + |g|).  g_fn substitutes the function under test, which
    lets the suite prove the harness can fail.
    """
    z = float(z)
    if not z > 0.0:
        raise ValueError("verify_indicator_envelope requires z > 0")
    if grid.n_points < 2 or not grid.w_min < grid.w_max:
        raise ValueError("degenerate grid")
    w = np.linspace(grid.w_min, grid.w_max, grid.n_points)
    g = (g_fn or stein_g_indicator)(z, w)
    g = np.asarray(g, dtype=np.float64)
    sf_z = norm_sf(z)
    violations: list = []

    _collect(violations, w, "nonnegative", -g, np.zeros_like(g))
    _collect(violations, w, "absolute_cap", np.abs(g), np.abs(w) + _ABS_CAP_OFFSET)

    neg = w < 0.0
    _collect(violations, w[neg], "left_cubic_cap", g[neg], 1.5 / (1.0 - w[neg]) ** 3)
    nonpos = w <= 0.0
    _collect(
        violations,
        w[nonpos],
        "left_tail_cap",
        g[nonpos],
        np.full(int(np.count_nonzero(nonpos)), 2.0 * sf_z),
    )
    above = w > z
    _collect(violations, w[above], "right_cubic_cap", g[above], 3.0 / (1.0 + w[above]) ** 3)

    # monotonicity on neighbor pairs lying fully inside each regime
    mono_slack = 1e-12 * (1.0 + np.abs(g))
    both_neg = neg[:-1] & neg[1:]
    for i in np.nonzero(both_neg & ((g[:-1] - g[1:]) > mono_slack[:-1]))[0]:
        violations.append((float(w[i]), "nondecreasing_below_zero", float(g[i]), float(g[i + 1])))
    both_above = above[:-1] & above[1:]
    for i in np.nonzero(both_above & ((g[1:] - g[:-1]) > mono_slack[:-1]))[0]:
        violations.append((float(w[i + 1]), "nonincreasing_above_z", float(g[i + 1]), float(g[i])))

    max_violation = max((v[2] - v[3] for v in violations), default=0.0)
    branch_left = float(((1.0 + z * z) * mills_ratio(-z) + z) * sf_z)
    branch_right = float(((1.0 + z * z) * mills_ratio(z) - z) * norm_cdf(z))
    return SteinEnvelopeReport(
        z=z,
        grid=w,
        max_violation=max_violation,
        branch_left=branch_left,
        branch_right=branch_right,
        violations=violations,
    )


# ============================================================
# sawtooth witness functional
# ============================================================


class SawtoothGradient:
    """Closed-form evaluator of g_h for one configuration.

    Precomputes the breakpoint ladder x_N < m_{N-1} < x_{N-1} < ... <
    m_1 < x_1 (atoms interleaved with midpoints), the alternating signs
    of h', and prefix/suffix sums of the telescoped CDF integrals, so a
    single evaluation costs one binary search plus O(1) arithmetic.
    """

    def __init__(self, cfg: Configuration):
        self.cfg = cfg
        x = cfg.locations
        asc = x[::-1]
        mids = 0.5 * (asc[:-1] + asc[1:])
        breaks = np.empty(2 * asc.size - 1)
        breaks[0::2] = asc
        breaks[1::2] = mids
        self.breaks = breaks
        # ascending from x_N: h' = +1 on [x_N, m), -1 on [m, x), repeating
        nseg = breaks.size - 1
        signs = np.where(np.arange(nseg) % 2 == 0, 1.0, -1.0)
        self.signs = signs
        j = norm_cdf_integral(breaks)
        k = norm_cdf_integral(-breaks)
        seg_p = signs * (j[1:] - j[:-1])
        seg_q = signs * (k[:-1] - k[1:])
        self._j = j
        self._k = k
        # prefix_p[i] = integral of h' Phi below breaks[i]
        self.prefix_p = np.concatenate([[0.0], np.cumsum(seg_p)])
        # suffix_q[i] = integral of h' (1 - Phi) above breaks[i]
        self.suffix_q = np.concatenate([np.cumsum(seg_q[::-1])[::-1], [0.0]])

    def _pq(self, w: float) -> tuple[float, float]:
        b = self.breaks
        if w <= b[0]:
            return 0.0, float(self.suffix_q[0])
        if w >= b[-1]:
            return float(self.prefix_p[-1]), 0.0
        i = int(np.searchsorted(b, w, side="right")) - 1
        s = float(self.signs[i])
        jw = norm_cdf_integral(w)
        kw = norm_cdf_integral(-w)
        p = float(self.prefix_p[i]) + s * (jw - float(self._j[i]))
        q = s * (kw - float(self._k[i + 1])) + float(self.suffix_q[i + 1])
        return p, q

    def value(self, w: float) -> float:
        w = float(w)
        p, q = self._pq(w)
        total = 0.0
        if p != 0.0:
            total += (w - (1.0 + w * w) * mills_ratio(w)) * p
        if q != 0.0:
            total -= (w + (1.0 + w * w) * mills_ratio(-w)) * q
        return total

    __call__ = value


def stein_g_sawtooth(cfg: Configuration, w: float) -> float:
    """g_h at a single point; build a SawtoothGradient for many points."""
    return SawtoothGradient(cfg).value(w)


def sawtooth_gradient_by_quadrature(cfg: Configuration, w: float) -> float:
    """Second route to g_h: adaptive quadrature of the two integrals.

    Shares only the pointwise prefactors with the closed form; the
    integrals themselves are evaluated blind, so agreement validates the
    telescoping bookkeeping.
    """
    w = float(w)
    x = cfg.locations
    asc = x[::-1]
    mids = 0.5 * (asc[:-1] + asc[1:])
    breaks = np.empty(2 * asc.size - 1)
    breaks[0::2] = asc
    breaks[1::2] = mids

    def h_prime(t: float) -> float:
        if t <= breaks[0] or t >= breaks[-1]:
            return 0.0
        i = int(np.searchsorted(breaks, t, side="right")) - 1
        return 1.0 if i % 2 == 0 else -1.0

    lo, hi_ = float(breaks[0]), float(breaks[-1])

    def integrate_between(a: float, b: float, weight) -> float:
        if b <= a:
            return 0.0
        interior = [float(t) for t in breaks if a < t < b]
        val, _ = integrate.quad(
            lambda t: h_prime(t) * weight(t),
            a,
            b,
            points=interior or None,
            limit=10 * len(breaks) + 50,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        return val

    p = integrate_between(lo, min(w, hi_), norm_cdf)
    q = integrate_between(max(w, lo), hi_, norm_sf)
    total = 0.0
    if p != 0.0:
        total += (w - (1.0 + w * w) * mills_ratio(w)) * p
    if q != 0.0:
        total -= (w + (1.0 + w * w) * mills_ratio(-w)) * q
    return total


@dataclass(frozen=True)
class SawtoothConstantReport:
    """Empirical constant for the tail decay of g_h.

    rows holds (n, direct_ratio, mirrored_ratio) for each location index
    in the deep-tail regime; best_constant is the overall max of
    |g_h(w)| / (1/log(m/n) + n^{-2/9}).
    """

    n_worlds: int
    deep_tail_count: int
    best_constant: float
    rows: list


def estimate_sawtooth_constant(
    cfg: Configuration,
    samples_per_interval: int = 5,
    nudge: float = 1e-9,
) -> SawtoothConstantReport:
    """Scan |g_h| over the deep-tail intervals and report the worst ratio.

    For each n with n + 1 in the deep-tail range (indices up to
    floor(m / e^3)) the interval (x_{n+1}, x_n] is sampled at the interior
    equispaced points plus both endpoints nudged inward, the mirrored
    interval is scanned with the same denominators, and every ratio
    |g_h(w)| / (1/log(m/n) + n^{-2/9}) is recorded.  The constant is an
    observation; callers must not turn it into an assertion.
    """
    n_worlds = cfg.n_worlds
    if n_worlds <= 100:
        raise ValueError("the deep-tail scan needs N > 100")
    m = cfg.median_index
    deep = int(m / math.exp(3.0))
    grad = SawtoothGradient(cfg)
    x = cfg.locations
    rows = []
    best = 0.0
    for n in range(1, deep):
        hi_ = float(x[n - 1])
        lo = float(x[n])
        span = hi_ - lo
        interior = np.linspace(lo, hi_, samples_per_interval + 2)[1:-1]
        points = np.concatenate([[lo + nudge * span], interior, [hi_ - nudge * span]])
        denom = 1.0 / math.log(m / n) + n ** (-2.0 / 9.0)
        direct = max(abs(grad.value(w)) / denom for w in points)
        mirrored = max(abs(grad.value(-w)) / denom for w in points)
        rows.append((n, direct, mirrored))
        best = max(best, direct, mirrored)
    return SawtoothConstantReport(
        n_worlds=n_worlds,
        deep_tail_count=deep,
        best_constant=best,
        rows=rows,
    )
