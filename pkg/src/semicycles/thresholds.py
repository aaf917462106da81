"""Descent/ascent thresholds for normalized delay oscillations.

The quantities computed here calibrate how fast an oscillatory solution of
x″(t) + p(t)·x(t−τ(t)) = 0 with esssup|p| ≤ 1 can traverse a semicycle:

* ``eval_r`` / ``theta`` — the extremal descent profile r_Δ (unit maximum,
  history ≡ 1, delay Δ) and its first zero ϑ_Δ ∈ [√2, π/2]. No solution can
  fall from a dominating extremum to a zero faster than r_Δ does.
* ``beta_iterate`` / ``psi`` — the minimal ascent time Ψ(ρ, Δ) from a zero to
  the semicycle extremum, when the pre-zero history is bounded by ρ relative
  to the extremum. Computed as the limit of a monotone profile iteration.
* ``psi_oracle_bvp`` — an independent check of Ψ by shooting on the limit
  boundary-value problem y″ + max{y, forcing} = 0.
* ``gamma_constant`` — the unique fixed point Ψ(1, γ) = γ.
* ``semicycle_threshold`` — Ψ(1, τ_m) + ϑ_{τ_m}, the ceiling on semicycle
  length compatible with non-growing oscillations.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IterationLimitError, ShootingError
from .signals import GridFunction

__all__ = [
    "ThresholdResult",
    "eval_r",
    "theta",
    "forcing_term",
    "beta_iterate",
    "psi",
    "psi_oracle_bvp",
    "gamma_constant",
    "semicycle_threshold",
]

_SQRT2 = math.sqrt(2.0)
_HALF_PI = math.pi / 2.0

# series terms with peak magnitude below this are dropped; far below every
# tolerance used downstream, far above float64 noise accumulation
_SERIES_FLOOR = 1e-22
_SERIES_MAX_TERMS = 84  # (2k)! overflows float64 past k ≈ 85 anyway


def _r_array(delta: float, ts: np.ndarray) -> np.ndarray:
    """Vectorized descent profile r_Δ(t) for t ≥ 0 (1 returned for t ≤ 0).

    r solves r″(t) + r(t−Δ) = 0 with r ≡ 1 for t ≤ 0 and r′(0) = 0; on each
    step interval the method-of-steps solution is the partial sum
    Σ_k (−1)^k·(t−(k−1)Δ)^{2k}/(2k)!, each term active where its base is
    positive, so one masked series covers every interval at once.
    """
    ts = np.asarray(ts, dtype=float)
    if delta == 0.0:
        return np.where(ts <= 0.0, 1.0, np.cos(ts))
    out = np.zeros_like(ts)
    pos = ts > 0.0
    if not np.any(pos):
        return np.ones_like(ts)
    t_pos = ts[pos]
    t_max = float(t_pos.max())
    acc = np.zeros_like(t_pos)
    sign = 1.0
    for k in range(_SERIES_MAX_TERMS):
        base = t_pos - (k - 1) * delta
        live = base > 0.0
        if not live.any():
            break
        max_base = t_max + delta if k == 0 else t_max - (k - 1) * delta
        if k > 2 and max_base ** (2 * k) / math.factorial(2 * k) < _SERIES_FLOOR:
            break
        term = np.zeros_like(t_pos)
        b = base[live]
        term[live] = b ** (2 * k) / math.factorial(2 * k)
        acc += sign * term
        sign = -sign
    out[pos] = acc
    out[~pos] = 1.0
    return out


def eval_r(delta: float, t: float) -> float:
    """Descent profile r_Δ at a single time (1 for t ≤ 0; cos(t) when Δ=0)."""
    if delta < 0.0:
        raise DomainError(f"delay must be nonnegative, got {delta}")
    return float(_r_array(float(delta), np.asarray([t]))[0])


@functools.lru_cache(maxsize=None)
def theta(delta: float) -> float:
    """First positive zero ϑ_Δ of the descent profile, in [√2, π/2].

    Bracketed on [1, π/2] (the profile starts at 1 and is negative at π/2 for
    every Δ > 0) and bisected on the series to ~1e−13.
    """
    delta = float(delta)
    if delta < 0.0:
        raise DomainError(f"delay must be nonnegative, got {delta}")
    if delta < 1e-12:
        # ϑ_Δ → π/2 at rate O(Δ); below this the series value at π/2 is
        # indistinguishable from rounding noise, so take the limit directly
        return _HALF_PI
    lo, hi = 1.0, _HALF_PI
    f_lo = eval_r(delta, lo)
    f_hi = eval_r(delta, hi)
    if not (f_lo > 0.0 > f_hi - 1e-14):
        raise DomainError(
            f"descent profile bracket failed for delta={delta}: "
            f"r({lo})={f_lo}, r({hi})={f_hi}")
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if eval_r(delta, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def forcing_term(rho: float, delta: float, w: float) -> float:
    """History forcing ρ·r_Δ(ϑ_Δ − w − Δ) on [−Δ, 0], zero elsewhere.

    This is the upper envelope the pre-zero history contributes to the ascent
    profile equation; it vanishes at w = −Δ (the profile's zero) and plateaus
    at ρ once the shifted argument leaves the profile's support.
    """
    if rho <= 0.0:
        raise DomainError(f"history bound must be positive, got {rho}")
    if delta < 0.0:
        raise DomainError(f"delay must be nonnegative, got {delta}")
    if w < -delta or w > 0.0 or delta == 0.0:
        return 0.0
    return rho * eval_r(delta, theta(delta) - w - delta)


# ----------------------------------------------------------------------
# the monotone profile iteration
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the ascent iteration.

    psi : limit ascent time Ψ(ρ, Δ)
    iterations : number of profile sweeps taken
    omega_sequence : the nondecreasing ϖ_n values, one per sweep
    limit_profile : the limiting ascent profile on [−Ψ, 0] (1 at −Ψ, 0 at 0)
    """

    psi: float
    iterations: int
    omega_sequence: tuple
    limit_profile: GridFunction


def _cumulative_moments(w: np.ndarray, g: np.ndarray):
    """Node values of I0(v)=∫_{w0}^{v} g and I1(v)=∫_{w0}^{v} w·g(w) dw for
    the piecewise-linear carrier g — exact per cell (trapezoid is exact for
    the 0th moment of a linear function, Simpson for the 1st)."""
    h = w[1] - w[0]
    g0, g1 = g[:-1], g[1:]
    i0 = np.concatenate(([0.0], np.cumsum(0.5 * h * (g0 + g1))))
    wm = 0.5 * (w[:-1] + w[1:])
    gm = 0.5 * (g0 + g1)
    i1 = np.concatenate(([0.0], np.cumsum(
        (h / 6.0) * (w[:-1] * g0 + 4.0 * wm * gm + w[1:] * g1))))
    return i0, i1


def _moment_partials(v, w: np.ndarray, g: np.ndarray,
                     i0: np.ndarray, i1: np.ndarray):
    """I0(v), I1(v) at off-node points, exact for the linear carrier.

    Accepts a scalar or an array of probe points.
    """
    h = w[1] - w[0]
    scalar = np.isscalar(v)
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    j = np.clip(np.floor((vv - w[0]) / h).astype(int), 0, w.size - 2)
    t0 = w[j]
    dv = vv - t0
    gv = g[j] + (g[j + 1] - g[j]) * (dv / h)
    p0 = 0.5 * dv * (g[j] + gv)
    vm = t0 + 0.5 * dv
    gm = 0.5 * (g[j] + gv)
    p1 = (dv / 6.0) * (t0 * g[j] + 4.0 * vm * gm + vv * gv)
    if scalar:
        return float(i0[j][0] + p0[0]), float(i1[j][0] + p1[0])
    return i0[j] + p0, i1[j] + p1


def _beta_step(w: np.ndarray, beta: np.ndarray, forcing: np.ndarray,
               return_sweep: bool = False):
    """One sweep: integrand g = max{β, forcing}; find ϖ with
    ∫_{−ϖ}^0 (−u)·g(u) du = 1; rebuild β(t) = 1 − ∫_{−ϖ}^t (t−u)·g(u) du.

    Returns (ϖ, next β), plus the sweep internals (g, moments, root) when
    asked — the converged iteration re-evaluates the same integral formula
    off-grid to sample its limit profile smoothly. Both the root equation and
    the rebuild use the two cumulative moments of g, so a sweep is O(grid)
    plus an O(1)-per-probe bisection.
    """
    g = np.maximum(beta, forcing)
    i0, i1 = _cumulative_moments(w, g)
    i1_total = i1[-1]

    def h_of(v: float) -> float:
        # ∫_v^0 (−u)·g(u) du, via the first moment
        return _moment_partials(v, w, g, i0, i1)[1] - i1_total

    if h_of(w[0]) < 1.0:
        v_root = w[0]  # saturated: the whole domain cannot absorb a unit
    else:
        lo, hi = w[0], 0.0
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if h_of(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
        v_root = 0.5 * (lo + hi)

    i0_v, i1_v = _moment_partials(v_root, w, g, i0, i1)
    beta_next = np.ones_like(beta)
    mask = w > v_root
    beta_next[mask] = 1.0 - (w[mask] * (i0[mask] - i0_v) - (i1[mask] - i1_v))
    if return_sweep:
        return -v_root, beta_next, (g, i0, i1, v_root, i0_v, i1_v)
    return -v_root, beta_next


def _forcing_grid(rho: float, delta: float, w: np.ndarray) -> np.ndarray:
    if delta == 0.0:
        return np.zeros_like(w)
    th = theta(delta)
    vals = rho * _r_array(delta, th - w - delta)
    vals[w < -delta] = 0.0
    return vals


def beta_iterate(rho: float, delta: float, grid_size: int = 4096,
                 tol: float = 1e-10, max_iter: int = 500) -> ThresholdResult:
    """Monotone ascent-profile iteration for Ψ(ρ, Δ) on a [−π/2, 0] grid.

    Starting from β₀ ≡ 1, each sweep finds the unique ϖ_n where the unit-mass
    condition holds and rebuilds the profile; ϖ_n increases monotonically to
    Ψ ≤ π/2. Stops when consecutive ϖ differ by less than ``tol``.

    Raises IterationLimitError (carrying the last two ϖ) past ``max_iter``.
    """
    if rho <= 0.0:
        raise DomainError(f"history bound must be positive, got {rho}")
    if delta < 0.0:
        raise DomainError(f"delay must be nonnegative, got {delta}")
    if grid_size < 64:
        raise DomainError(f"grid_size must be ≥ 64, got {grid_size}")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_iter < 2:
        raise DomainError(f"max_iter must be ≥ 2, got {max_iter}")

    w = np.linspace(-_HALF_PI, 0.0, int(grid_size))
    forcing = _forcing_grid(float(rho), float(delta), w)
    beta = np.ones_like(w)
    omegas: list[float] = []
    for _ in range(int(max_iter)):
        omega, beta, sweep = _beta_step(w, beta, forcing, return_sweep=True)
        omegas.append(omega)
        if len(omegas) >= 2 and abs(omegas[-1] - omegas[-2]) < tol:
            psi_val = omegas[-1]
            # sample the converged profile from its integral representation
            # (C² between carrier nodes), not by re-interpolating node values
            g, i0, i1, v_root, i0_v, i1_v = sweep
            ts = np.linspace(-psi_val, 0.0, int(grid_size))
            i0_t, i1_t = _moment_partials(ts, w, g, i0, i1)
            profile = 1.0 - (ts * (i0_t - i0_v) - (i1_t - i1_v))
            profile[ts <= v_root] = 1.0
            return ThresholdResult(
                psi=psi_val,
                iterations=len(omegas),
                omega_sequence=tuple(omegas),
                limit_profile=GridFunction(-psi_val, 0.0, profile),
            )
    raise IterationLimitError(
        f"ascent iteration did not converge within {max_iter} sweeps "
        f"(last ϖ: {omegas[-2]:.12f} → {omegas[-1]:.12f})",
        omega_prev=omegas[-2], omega_last=omegas[-1])


@functools.lru_cache(maxsize=8192)
def _psi_cached(rho: float, delta: float, grid_size: int, tol: float,
                max_iter: int) -> float:
    return beta_iterate(rho, delta, grid_size, tol, max_iter).psi


def psi(rho: float, delta: float, grid_size: int = 4096, tol: float = 1e-10,
        max_iter: int = 500) -> float:
    """Minimal ascent time Ψ(ρ, Δ) — wrapper over beta_iterate.

    Always ≤ π/2 (+ grid tolerance); ≥ √2 whenever ρ ≤ 1. For ρ > 1 the
    plateau forcing exceeds the profile's own ceiling and Ψ drops below √2
    (down to √(2/ρ) for large Δ), so no lower clamp is applied.
    """
    return _psi_cached(float(rho), float(delta), int(grid_size), float(tol),
                       int(max_iter))


# ----------------------------------------------------------------------
# independent shooting oracle on the limit boundary-value problem
# ----------------------------------------------------------------------

_SHOOT_SPAN = 2.0  # the unit-peak profile peaks no later than π/2 < 2


def psi_oracle_bvp(rho: float, delta: float, mesh: int = 4096) -> float:
    """Ψ(ρ, Δ) by shooting on y″ + max{y, forcing} = 0.

    Written against the backward-time profile u ∈ [0, Ψ] (u = distance back
    from the zero): integrate y(0) = 0, y′(0) = m with a fixed-step 4th-order
    scheme, locate the first stationary point, and bisect on m until the peak
    value is 1; Ψ is the stationary location. Completely independent of the
    profile iteration (different formulation, discretization and unknown).
    """
    if rho <= 0.0:
        raise DomainError(f"history bound must be positive, got {rho}")
    if delta < 0.0:
        raise DomainError(f"delay must be nonnegative, got {delta}")
    if mesh < 256:
        raise DomainError(f"mesh must be ≥ 256, got {mesh}")

    n = int(mesh)
    h = _SHOOT_SPAN / n
    us = np.linspace(0.0, _SHOOT_SPAN, n + 1)
    if delta > 0.0:
        th = theta(delta)
        f_nodes = rho * _r_array(delta, th + us - delta)
        f_nodes[us > delta] = 0.0
        mid_us = us[:-1] + 0.5 * h
        f_mid = rho * _r_array(delta, th + mid_us - delta)
        f_mid[mid_us > delta] = 0.0
    else:
        f_nodes = np.zeros(n + 1)
        f_mid = np.zeros(n)

    def shoot(m: float):
        """Integrate until y′ crosses zero; return (peak value, location)."""
        y, v = 0.0, m
        for i in range(n):
            fn0, fm, fn1 = f_nodes[i], f_mid[i], f_nodes[i + 1]
            k1y = v
            k1v = -max(y, fn0)
            k2y = v + 0.5 * h * k1v
            k2v = -max(y + 0.5 * h * k1y, fm)
            k3y = v + 0.5 * h * k2v
            k3v = -max(y + 0.5 * h * k2y, fm)
            k4y = v + h * k3v
            k4v = -max(y + h * k3y, fn1)
            y1 = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            v1 = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            if v1 <= 0.0 < v:
                # stationary point inside this step: bisect the Hermite slope
                lo_x, hi_x = 0.0, h
                for _ in range(60):
                    xm = 0.5 * (lo_x + hi_x)
                    s = xm / h
                    # derivative of the cubic Hermite interpolant of y
                    dy = (y * (6 * s * s - 6 * s) / h
                          + v * (3 * s * s - 4 * s + 1)
                          + y1 * (6 * s - 6 * s * s) / h
                          + v1 * (3 * s * s - 2 * s))
                    if dy > 0.0:
                        lo_x = xm
                    else:
                        hi_x = xm
                xs = 0.5 * (lo_x + hi_x)
                s = xs / h
                h00 = 2 * s ** 3 - 3 * s ** 2 + 1
                h10 = s ** 3 - 2 * s ** 2 + s
                h01 = -2 * s ** 3 + 3 * s ** 2
                h11 = s ** 3 - s ** 2
                peak = h00 * y + h10 * h * v + h01 * y1 + h11 * h * v1
                return peak, us[i] + xs
            y, v = y1, v1
        raise ShootingError(
            f"no stationary point before u = {_SHOOT_SPAN} (slope {m})")

    lo_m, hi_m = 0.25, 4.0
    while shoot(hi_m)[0] < 1.0:
        lo_m = hi_m
        hi_m *= 2.0
        if hi_m > 64.0:
            raise ShootingError("peak bracket failed: upper slope exhausted")
    while shoot(lo_m)[0] >= 1.0:
        hi_m = lo_m
        lo_m *= 0.5
        if lo_m < 1e-6:
            raise ShootingError("peak bracket failed: lower slope exhausted")
    for _ in range(60):
        mid = 0.5 * (lo_m + hi_m)
        if shoot(mid)[0] < 1.0:
            lo_m = mid
        else:
            hi_m = mid
    return shoot(0.5 * (lo_m + hi_m))[1]


# ----------------------------------------------------------------------
# derived constants
# ----------------------------------------------------------------------

def gamma_constant(tol: float = 1e-6) -> float:
    """The unique fixed point Ψ(1, γ) = γ, bisected on [√2, π/2].

    g ↦ Ψ(1, g) is nonincreasing, so g ↦ Ψ(1, g) − g is strictly decreasing
    and the bracket endpoints have opposite signs (Ψ(1,√2) > √2 because √2
    is below the fixed point; Ψ(1,π/2) ≤ π/2 with equality only at Δ = 0).
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    lo, hi = _SQRT2, _HALF_PI
    if not (psi(1.0, lo) - lo > 0.0 >= psi(1.0, hi) - hi):
        raise ShootingError("fixed-point bracket failed on [√2, π/2]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if psi(1.0, mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def semicycle_threshold(tau_m: float) -> float:
    """Ψ(1, τ_m) + ϑ_{τ_m}: the semicycle-length ceiling for a normalized
    problem with delays bounded by τ_m."""
    if tau_m < 0.0:
        raise DomainError(f"delay bound must be nonnegative, got {tau_m}")
    return psi(1.0, tau_m) + theta(tau_m)
