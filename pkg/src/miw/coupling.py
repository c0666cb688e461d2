"""Zero-bias coupling for the empirical law of a configuration.

Let W be uniform on the N locations.  W has mean zero and variance
sigma^2 = (N - 1)/N, and its zero-bias companion W* has the piecewise
constant density

    p_n = S_n / (N - 1) = 1 / ((N - 1)(x_n - x_{n+1}))

on [x_{n+1}, x_n), the two expressions agreeing through the recursion
identity x_n - x_{n+1} = 1/S_n.  The implementation uses the spacing
form, which makes the density integrate to one exactly by construction.

The coupling lives on the single probability space Omega = [x_N, x_1)
carrying the density p: each interval splits at

    y_n = x_n - (N - n)(x_n - x_{n+1}) / N

so that [y_n, x_n) has mass L_n = (N - n)/(N (N - 1)) and
[x_{n+1}, y_n) has mass R_{n+1} = n/(N (N - 1)); mapping omega to the
atom on whose side of the split it falls realizes W, while the identity
map realizes W*.  No randomness anywhere, every check is a deterministic
integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .ground_state import Configuration


@dataclass(frozen=True)
class ZeroBiasCoupling:
    """Precomputed coupling data for one configuration.

    densities[n] is the density of W* on [x_{n+2}, x_{n+1}) in 0-based
    terms, splits[n] the matching y, left_masses/right_masses the exact
    interval masses L_n and R_{n+1}.  Arrays are read-only and all of
    length N - 1.
    """

    cfg: Configuration
    densities: np.ndarray
    splits: np.ndarray
    left_masses: np.ndarray
    right_masses: np.ndarray

    @property
    def variance(self) -> float:
        n = self.cfg.n_worlds
        return (n - 1) / n


def build(cfg: Configuration) -> ZeroBiasCoupling:
    """Assemble densities, split points, and interval masses."""
    n = cfg.n_worlds
    x = cfg.locations
    spacing = x[:-1] - x[1:]
    densities = 1.0 / ((n - 1) * spacing)
    idx = np.arange(1, n, dtype=np.float64)
    splits = x[:-1] - (n - idx) * spacing / n
    left_masses = (n - idx) / (n * (n - 1.0))
    right_masses = idx / (n * (n - 1.0))
    for arr in (densities, splits, left_masses, right_masses):
        arr.setflags(write=False)
    return ZeroBiasCoupling(cfg, densities, splits, left_masses, right_masses)


def _interval_index(c: ZeroBiasCoupling, value: float) -> int:
    """0-based n with x_{n+2} <= value < x_{n+1}, on the descending array."""
    x = c.cfg.locations
    # searchsorted needs ascending order; flip the coordinate instead
    asc = x[::-1]
    j = int(np.searchsorted(asc, value, side="right"))
    return x.size - 1 - j


def density_at(c: ZeroBiasCoupling, value: float) -> float:
    """Density of W* at value; zero outside [x_N, x_1)."""
    value = float(value)
    x = c.cfg.locations
    if not (float(x[-1]) <= value < float(x[0])):
        return 0.0
    return float(c.densities[_interval_index(c, value)])


def w_of_omega(c: ZeroBiasCoupling, omega: float) -> float:
    """The W realization: the atom on whose side of the split omega falls.

    Raises ValueError outside Omega = [x_N, x_1).
    """
    omega = float(omega)
    x = c.cfg.locations
    if not (float(x[-1]) <= omega < float(x[0])):
        raise ValueError(f"omega {omega!r} outside the coupling domain")
    i = _interval_index(c, omega)
    return float(x[i]) if omega >= c.splits[i] else float(x[i + 1])


def zero_bias_identity_check(
    c: ZeroBiasCoupling,
    f_prime: Callable[[float], float],
    f: Callable[[float], float],
) -> float:
    """|E[W f(W)] - sigma^2 E[f'(W*)]|, the defining identity of W*.

    The atom side is an exact finite sum; the density side integrates
    f' against each piecewise-constant stretch with adaptive quadrature,
    so the check exercises the construction rather than re-deriving the
    identity symbolically.  f and f_prime are called with scalars.
    """
    cfg = c.cfg
    n = cfg.n_worlds
    x = cfg.locations
    lhs = math.fsum(float(xi) * float(f(float(xi))) for xi in x) / n

    per_interval_abs = max(1e-13, 1e-11 / (n - 1))
    parts = []
    for i in range(n - 1):
        val, _ = integrate.quad(
            f_prime,
            float(x[i + 1]),
            float(x[i]),
            epsabs=per_interval_abs,
            epsrel=1e-12,
            limit=200,
        )
        parts.append(float(c.densities[i]) * val)
    rhs = c.variance * math.fsum(parts)
    return abs(lhs - rhs)


def expected_coupling_gap(c: ZeroBiasCoupling) -> float:
    """E|W - W*| in closed form.

    On [y_n, x_n) the gap is x_n - omega and on [x_{n+1}, y_n) it is
    omega - x_{n+1}; both integrate to half the squared side length
    times the density.  Always at most 2 x_1 / (N - 1).
    """
    x = c.cfg.locations
    left = x[:-1] - c.splits       # x_n - y_n
    right = c.splits - x[1:]       # y_n - x_{n+1}
    terms = 0.5 * c.densities * (left * left + right * right)
    return float(math.fsum(terms))


def sawtooth_value(cfg: Configuration, w: float) -> float:
    """Distance from w to the nearest location, zero outside [x_N, x_1].

    The triangular witness function h: it vanishes at every atom and
    peaks midway between neighbors.
    """
    w = float(w)
    x = cfg.locations
    if not (float(x[-1]) < w < float(x[0])):
        return 0.0
    asc = x[::-1]
    j = int(np.searchsorted(asc, w, side="right"))
    lo = float(asc[j - 1])
    hi = float(asc[j])
    return min(w - lo, hi - w)


def sawtooth_expectation(c: ZeroBiasCoupling) -> tuple[float, float]:
    """(E h(W), E h(W*)) for the sawtooth witness h.

    E h(W) is an honest evaluation over the atoms, each term of which is
    zero because h vanishes there.  E h(W*) integrates the triangle on
    each interval, p_n (x_n - x_{n+1})^2 / 4, and collapses analytically
    to x_1 / (2(N - 1)).
    """
    cfg = c.cfg
    x = cfg.locations
    eh_w = math.fsum(sawtooth_value(cfg, float(v)) for v in x) / cfg.n_worlds
    spacing = x[:-1] - x[1:]
    eh_wstar = math.fsum(0.25 * c.densities * spacing * spacing)
    return eh_w, float(eh_wstar)
