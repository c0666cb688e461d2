"""Ground-state configuration solver for the interacting-worlds oscillator.

The stationary configuration of N world locations x_1 > x_2 > ... > x_N
satisfies the nonlinear recursion

    x_{n+1} = x_n - 1 / (x_1 + ... + x_n),

together with zero mean, empirical variance (N - 1) / N, and the exact
antisymmetry x_n = -x_{N+1-n}.  Everything is determined by x_1, so the
solver is a shooting method: bisect on x_1 until the median condition
holds (x_m = 0 for odd N, x_m = 1 / (2 S_m) for even N with m = N / 2).
Only the first half of the configuration is ever integrated; the second
half is produced by mirroring, which enforces the symmetry exactly and
keeps the forward recursion away from its unstable tail.

Running sums are the sensitive quantity here.  They are accumulated with
Neumaier-compensated summation in the default double path, and a
double-double path (pairs of doubles carrying ~32 significant digits) is
available for very large N where even compensated doubles start to shed
digits.  The recursion kernels are numba-compiled; a cold process pays a
one-time JIT cost on the first solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit


class SolverError(RuntimeError):
    """Shooting or validation failure in the ground-state solver."""


class BracketError(SolverError):
    """The shooting objective could not be bracketed."""


# ============================================================
# compensated and double-double primitives
# ============================================================

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def _quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


@njit(cache=True)
def _two_prod(a, b):
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


@njit(cache=True)
def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e = e + al + bl
    return _quick_two_sum(s, e)


@njit(cache=True)
def _dd_mul_d(ah, al, b):
    p, e = _two_prod(ah, b)
    e = e + al * b
    return _quick_two_sum(p, e)


@njit(cache=True)
def _dd_recip(bh, bl):
    # one double-double Newton step from the double reciprocal
    y = 1.0 / bh
    ph, pl = _dd_mul_d(bh, bl, y)
    eh, el = _two_sum(2.0, -ph)
    el = el - pl
    eh, el = _quick_two_sum(eh, el)
    rh, rl = _dd_mul_d(eh, el, y)
    return rh, rl


# ============================================================
# forward recursion kernels
# ============================================================

# status codes returned by the shooting kernels
_OK = 0
_DIVERGED_LOW = 1
_NOT_FINITE = 2


@njit(cache=True)
def _shoot_double(x1, m, even):
    """Integrate x_1..x_m and S_1..S_m; return (status, objective, xs, ss).

    The running sum is Neumaier-compensated.  If some S_n drops to <= 0
    before the median is reached the shot undershot; the objective is
    reported as -inf so bisection treats it as firmly negative.
    """
    xs = np.empty(m)
    ss = np.empty(m)
    s = x1
    c = 0.0
    x = x1
    xs[0] = x1
    ss[0] = x1
    for n in range(1, m):
        seff = s + c
        if not (seff > 0.0):
            return _DIVERGED_LOW, -np.inf, xs, ss
        x = x - 1.0 / seff
        xs[n] = x
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        ss[n] = s + c
    sm = s + c
    if even:
        if not (sm > 0.0):
            return _DIVERGED_LOW, -np.inf, xs, ss
        objective = x - 0.5 / sm
    else:
        objective = x
    if not np.isfinite(objective):
        return _NOT_FINITE, objective, xs, ss
    return _OK, objective, xs, ss


@njit(cache=True)
def _shoot_dd(x1, m, even):
    """Double-double variant of _shoot_double; same contract."""
    xs = np.empty(m)
    ss = np.empty(m)
    xh, xl = x1, 0.0
    sh, sl = x1, 0.0
    xs[0] = x1
    ss[0] = x1
    for n in range(1, m):
        if not (sh + sl > 0.0):
            return _DIVERGED_LOW, -np.inf, xs, ss
        rh, rl = _dd_recip(sh, sl)
        xh, xl = _dd_add(xh, xl, -rh, -rl)
        xs[n] = xh + xl
        sh, sl = _dd_add(sh, sl, xh, xl)
        ss[n] = sh + sl
    sm = sh + sl
    if even:
        if not (sm > 0.0):
            return _DIVERGED_LOW, -np.inf, xs, ss
        rh, rl = _dd_recip(sh, sl)
        objective = (xh - 0.5 * rh) + (xl - 0.5 * rl)
    else:
        objective = xh + xl
    if not np.isfinite(objective):
        return _NOT_FINITE, objective, xs, ss
    return _OK, objective, xs, ss


@njit(cache=True)
def _prefix_sums(x):
    """Neumaier-compensated prefix sums of x."""
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for i in range(x.size):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


@njit(cache=True)
def _sum_of_squares(x):
    s = 0.0
    c = 0.0
    for i in range(x.size):
        v = x[i] * x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


@njit(cache=True)
def _max_recursion_gap(x, s):
    """max_n |x_{n+1} - x_n + 1/S_n| over the steps 1 <= n <= N-1."""
    best = 0.0
    for i in range(x.size - 1):
        r = abs(x[i + 1] - x[i] + 1.0 / s[i])
        if r > best:
            best = r
    return best


# ============================================================
# configuration record
# ============================================================


@dataclass(frozen=True)
class Residuals:
    """A-posteriori diagnostics of a solved configuration.

    zero_mean is |S_N|, variance is |sum x_n^2 - (N - 1)|, recursion is
    the worst absolute step defect of the recursion over the full
    mirrored array, and median is the boundary-condition miss at the
    center (|x_m| before it is snapped to zero for odd N, and
    |2 x_m - 1/S_m| for even N).
    """

    zero_mean: float
    variance: float
    recursion: float
    median: float


@dataclass(frozen=True)
class Configuration:
    """Solved ground-state configuration.

    locations holds x_1 > ... > x_N in decreasing order with the exact
    mirror symmetry x_n = -x_{N+1-n} built in; partial_sums holds
    S_1..S_N computed by compensated summation over that array.  Both
    arrays are read-only.
    """

    n_worlds: int
    median_index: int
    locations: np.ndarray
    partial_sums: np.ndarray
    shoot_value: float
    residuals: Residuals
    tol: float
    precision: str

    @property
    def x1(self) -> float:
        return float(self.locations[0])

    @property
    def half_locations(self) -> np.ndarray:
        return self.locations[: self.median_index]

    def residual_bounds_ok(self) -> tuple[bool, list[str]]:
        """Check the residuals against the documented per-N budgets."""
        n = self.n_worlds
        r = self.residuals
        scale = max(1.0, self.x1)
        problems = []
        if r.zero_mean > 1e-9 * math.sqrt(n):
            problems.append(f"zero-mean residual {r.zero_mean:.3e} exceeds 1e-9*sqrt(N)")
        if r.variance > 1e-8 * n:
            problems.append(f"variance residual {r.variance:.3e} exceeds 1e-8*N")
        if r.recursion > 1e-10 * scale:
            problems.append(f"recursion residual {r.recursion:.3e} exceeds 1e-10 at scale {scale:.3g}")
        return (not problems, problems)


def _median_index(n_worlds: int) -> int:
    return (n_worlds + 1) // 2 if n_worlds % 2 else n_worlds // 2


def _mirror(half: np.ndarray, n_worlds: int) -> np.ndarray:
    if n_worlds % 2:
        return np.concatenate([half, -half[:-1][::-1]])
    return np.concatenate([half, -half[::-1]])


def _assemble(
    n_worlds: int,
    half: np.ndarray,
    shoot_value: float,
    tol: float,
    precision: str,
    median_residual: float,
    residuals: Residuals | None = None,
) -> Configuration:
    """Mirror the half, run the structural checks, and wrap the record.

    When residuals is provided (cache reload) it is trusted verbatim;
    otherwise the diagnostics are recomputed from the assembled arrays.
    """
    m = _median_index(n_worlds)
    if half.shape != (m,):
        raise SolverError(f"half configuration has {half.size} entries, expected {m}")
    full = _mirror(half.astype(np.float64, copy=True), n_worlds)
    if not np.all(np.diff(full) < 0.0):
        raise SolverError("solved locations are not strictly decreasing")
    sums = _prefix_sums(full)
    if n_worlds > 1 and not np.all(sums[:-1] > 0.0):
        raise SolverError("a partial sum S_n is not positive for n < N")
    if residuals is None:
        residuals = Residuals(
            zero_mean=abs(float(sums[-1])),
            variance=abs(_sum_of_squares(full) - (n_worlds - 1)),
            recursion=float(_max_recursion_gap(full, sums)),
            median=float(median_residual),
        )
    full.setflags(write=False)
    sums.setflags(write=False)
    return Configuration(
        n_worlds=n_worlds,
        median_index=m,
        locations=full,
        partial_sums=sums,
        shoot_value=float(shoot_value),
        residuals=residuals,
        tol=float(tol),
        precision=precision,
    )


# ============================================================
# shooting
# ============================================================


def _validate_n(n_worlds) -> int:
    if not isinstance(n_worlds, (int, np.integer)) or isinstance(n_worlds, bool):
        raise ValueError("n_worlds must be an integer")
    n = int(n_worlds)
    if n < 2:
        raise ValueError("n_worlds must be at least 2")
    return n


def _kernel_for(precision: str):
    if precision == "double":
        return _shoot_double
    if precision == "dd":
        return _shoot_dd
    raise ValueError(f"unknown precision {precision!r}; use 'double' or 'dd'")


def forward_shoot(x1: float, n_worlds: int, precision: str = "double"):
    """Integrate the recursion from a trial x_1 up to the median index.

    Returns (objective, half_locations).  The objective is x_m for odd N
    and x_m - 1/(2 S_m) for even N; a shot whose running sum collapses
    to <= 0 before the median returns -inf with the locations computed
    so far.
    """
    n = _validate_n(n_worlds)
    x1 = float(x1)
    if not (math.isfinite(x1) and x1 > 0.0):
        raise ValueError("x1 must be a finite positive number")
    kernel = _kernel_for(precision)
    m = _median_index(n)
    status, objective, xs, _ = kernel(x1, m, n % 2 == 0)
    if status == _NOT_FINITE:
        raise SolverError(f"recursion produced a non-finite value from x1={x1!r}")
    return float(objective), xs


def solve(n_worlds: int, tol: float = 1e-13, precision: str = "double") -> Configuration:
    """Solve for the ground-state configuration of n_worlds locations.

    Bisection on x_1: the objective is negative when the shot collapses
    before the median and positive when it overshoots, and the bracket
    sign condition is re-checked on every step so a violation of that
    monotone picture fails loudly instead of silently returning junk.
    Terminates when the bracket width falls below tol * max(1, x_1).
    """
    n = _validate_n(n_worlds)
    if not (isinstance(tol, float) and math.isfinite(tol) and tol > 0.0):
        raise ValueError("tol must be a positive finite float")
    kernel = _kernel_for(precision)
    m = _median_index(n)
    even = n % 2 == 0

    def objective(x1: float) -> float:
        status, obj, _, _ = kernel(x1, m, even)
        if status == _NOT_FINITE:
            raise SolverError(f"recursion produced a non-finite value from x1={x1!r}")
        return obj

    log_m = math.log(m) if m > 1 else 0.0
    lo = max(0.1, math.sqrt(log_m))
    hi = math.sqrt(2.0 * (1.0 + log_m)) + 1.0
    g_lo = objective(lo)
    g_hi = objective(hi)

    # geometric bracket expansion, width doubles each attempt
    width = hi - lo
    tries = 0
    while g_lo >= 0.0 and tries < 60:
        lo = lo - width if lo - width > 0.0 else 0.5 * lo
        width *= 2.0
        g_lo = objective(lo)
        tries += 1
    width = hi - lo
    tries = 0
    while g_hi <= 0.0 and tries < 60:
        hi = hi + width
        width *= 2.0
        g_hi = objective(hi)
        tries += 1

    if g_lo == 0.0:
        lo_final = hi_final = lo
    elif g_hi == 0.0:
        lo_final = hi_final = hi
    else:
        if not (g_lo < 0.0 < g_hi):
            raise BracketError(
                f"could not bracket the shooting objective for N={n}: "
                f"g({lo!r})={g_lo!r}, g({hi!r})={g_hi!r}"
            )
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if not (lo < mid < hi):
                break  # bracket has collapsed to adjacent doubles
            g_mid = objective(mid)
            if g_mid > 0.0:
                hi, g_hi = mid, g_mid
            elif g_mid < 0.0:
                lo, g_lo = mid, g_mid
            else:
                lo = hi = mid
                break
            if not (g_lo <= 0.0 <= g_hi):
                raise SolverError(
                    f"bracket sign condition violated during bisection for N={n}"
                )
        lo_final, hi_final = lo, hi

    x1 = 0.5 * (lo_final + hi_final)
    status, obj, xs, ss = kernel(x1, m, even)
    if status != _OK:
        # the midpoint can sit a hair on the collapsing side; the upper
        # bracket endpoint is always a valid full shot
        x1 = hi_final
        status, obj, xs, ss = kernel(x1, m, even)
        if status != _OK:
            raise SolverError(f"final shot failed for N={n} at x1={x1!r}")

    if even:
        median_residual = abs(2.0 * xs[-1] - 1.0 / ss[-1])
    else:
        median_residual = abs(xs[-1])
        xs = xs.copy()
        xs[-1] = 0.0  # the center location is exactly zero by symmetry

    return _assemble(n, xs, x1, tol, precision, median_residual)


def variance_check(cfg: Configuration) -> float:
    """|sum x_n^2 - (N - 1)|, recomputed with compensated summation."""
    return abs(_sum_of_squares(cfg.locations) - (cfg.n_worlds - 1))
