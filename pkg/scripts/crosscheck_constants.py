"""Independent cross-checks for the constants frozen into the test suite.

Everything here is computed with off-the-shelf tools (mpmath arithmetic,
scipy's adaptive integrator and its Lambert W) rather than with the package
code, so the numbers below can be frozen into tests as expected values that
the package must reproduce by its own, separately written routines.

Run from the repository root:

    python scripts/crosscheck_constants.py
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import lambertw


# ----------------------------------------------------------------------
# the comparison profile r_Δ and its first zero ϑ(Δ)
# ----------------------------------------------------------------------

def r_profile_mp(delta: mp.mpf, t: mp.mpf) -> mp.mpf:
    """Series evaluation of r: r'' + r(t−Δ) = 0, r ≡ 1 for t ≤ 0, r'(0) = 0.

    On [(n−1)Δ, nΔ] the solution is Σ_{k=0}^n (−1)^k (t−(k−1)Δ)^{2k} / (2k)!,
    each term active only where its base t−(k−1)Δ is positive.
    """
    if t <= 0:
        return mp.mpf(1)
    total = mp.mpf(0)
    k = 0
    while True:
        base = t - (k - 1) * delta
        if base <= 0:
            break
        term = (-1) ** k * base ** (2 * k) / mp.factorial(2 * k)
        total += term
        if k > 2 and abs(term) < mp.mpf(10) ** (-mp.mp.dps - 5) and delta > 0:
            break
        if delta == 0 and k > 60:
            break
        k += 1
    return total


def theta_mp(delta: float, dps: int = 40) -> mp.mpf:
    mp.mp.dps = dps
    d = mp.mpf(delta)
    lo, hi = mp.mpf(1), mp.pi / 2
    assert r_profile_mp(d, lo) > 0 and r_profile_mp(d, hi) < 0
    for _ in range(200):
        mid = (lo + hi) / 2
        if r_profile_mp(d, mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# ----------------------------------------------------------------------
# the ascent-time limit Ψ(ρ, Δ) via boundary-value shooting (scipy)
# ----------------------------------------------------------------------

def r_profile(delta: float, t: float) -> float:
    if t <= 0.0:
        return 1.0
    total, k = 0.0, 0
    while True:
        base = t - (k - 1) * delta
        if base <= 0.0:
            break
        total += (-1.0) ** k * base ** (2 * k) / math.factorial(2 * k)
        if k > 2 and base ** (2 * k) / math.factorial(2 * k) < 1e-22:
            break
        k += 1
    return total


def psi_shoot(rho: float, delta: float) -> float:
    """Shoot y'' = −max(y, F) from y(0)=0, y'(0)=m; bisect m until peak = 1.

    In forward coordinates u = −w the forcing is F(u) = ρ·r(ϑ+u−Δ) on [0, Δ]
    and 0 beyond; Ψ is the u-location of the first stationary point of the
    unit-peak solution.
    """
    th = float(theta_mp(delta, dps=30)) if delta > 0 else math.pi / 2

    def forcing(u: float) -> float:
        if delta == 0.0 or u > delta:
            return 0.0
        return rho * r_profile(delta, th + u - delta)

    def rhs(u, s):
        return [s[1], -max(s[0], forcing(u))]

    def stationary(u, s):
        return s[1]
    stationary.terminal = True
    stationary.direction = -1

    def peak_and_loc(m: float) -> tuple[float, float]:
        sol = solve_ivp(rhs, (0.0, 2.4), [0.0, m], events=stationary,
                        rtol=1e-11, atol=1e-13, max_step=0.02)
        if not sol.t_events[0].size:
            raise RuntimeError("no stationary point before u = 2.4")
        return sol.y_events[0][0][0], sol.t_events[0][0]

    lo, hi = 1e-3, 4.0
    while peak_and_loc(hi)[0] < 1.0:
        hi *= 2.0
        assert hi < 64.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if peak_and_loc(mid)[0] < 1.0:
            lo = mid
        else:
            hi = mid
    return peak_and_loc(0.5 * (lo + hi))[1]


def gamma_shoot() -> float:
    lo, hi = math.sqrt(2.0), math.pi / 2
    flo = psi_shoot(1.0, lo) - lo
    fhi = psi_shoot(1.0, hi) - hi
    assert flo > 0 > fhi
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if psi_shoot(1.0, mid) - mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# characteristic roots λ² ± e^{−cλ} = 0 via scipy's Lambert W
# ----------------------------------------------------------------------

def char_roots_scipy(c: float, sign: int, branches: range):
    """Roots λ = (2/c)·W_n(z), z = ±ic/2 (sign +) or ±c/2 (sign −)."""
    roots = []
    for n in branches:
        for inner in (+1, -1):
            z = inner * (1j * c / 2 if sign > 0 else c / 2 + 0j)
            lam = 2.0 * lambertw(z, n) / c
            for _ in range(8):  # Newton polish on the characteristic function
                f = lam * lam + sign * np.exp(-c * lam)
                fp = 2 * lam - sign * c * np.exp(-c * lam)
                lam = lam - f / fp
            roots.append((n, inner, complex(lam),
                          abs(lam * lam + sign * np.exp(-c * lam))))
    return roots


# ----------------------------------------------------------------------
# fundamental-pair Wronskian scan for p ≡ −c, τ ≡ 1 (method of steps)
# ----------------------------------------------------------------------

def wronskian_min(c: float, tau: float = 1.0, horizon: float = 50.0) -> float:
    """min over [0, horizon] of W = z·y' − z'·y for x'' − c·x(t−τ) = 0.

    z, y start from (1,0) and (0,1) at t = 0 with zero history; on [0,τ]
    both are polynomials (z ≡ 1, y = t), afterwards each delay-length
    interval is an ODE driven by the previous intervals' dense output.

    Conditioning note: the fundamental pair grows like e^{λt} with
    λ² = c·e^{−λτ}, so the product z·y' carries absolute float64 noise of
    order (e^{λ·horizon})²·1e−16 while the true W decays towards 0⁺. The
    scan is only meaningful where that noise floor sits well below the
    Wronskian; for τ = 1 this caps c at roughly 0.1–0.15 over horizon 50.
    """
    sols = []  # dense solutions per unit interval
    state0 = np.array([1.0, 0.0, 0.0, 1.0])

    def delayed(t):
        if t < 0.0:
            return np.zeros(4)
        if not sols:  # endpoint stage of the very first interval
            return state0
        k = min(int(t / tau), len(sols) - 1)
        return sols[k].sol(t)

    def rhs(t, s):
        d = delayed(t - tau)
        return [s[1], c * d[0], s[3], c * d[2]]

    state = state0.copy()
    wmin = 1.0
    t0 = 0.0
    while t0 < horizon:
        t1 = min(t0 + tau, horizon)
        sol = solve_ivp(rhs, (t0, t1), state, dense_output=True,
                        rtol=1e-11, atol=1e-13, max_step=0.05)
        sols.append(sol)
        ts = np.linspace(t0, t1, 201)
        vals = sol.sol(ts)
        w = vals[0] * vals[3] - vals[1] * vals[2]
        wmin = min(wmin, float(w.min()))
        state = sol.y[:, -1]
        t0 = t1
    return wmin


def main() -> None:
    print("== first zero of the comparison profile ==")
    for d in (0.5, 1.0, 1.2, 1.5, 2.0, 5.0):
        print(f"theta({d}) = {mp.nstr(theta_mp(d), 17)}")

    print("\n== ascent-time limit (shooting) ==")
    for rho, d in ((1.0, 1.0), (0.7, 0.9), (2.0, 1.0), (0.5, 0.0),
                   (1.0, 2.0), (1.0, 2 * math.sqrt(2.0)), (1.0, 3.0),
                   (2.0, 3.0), (1.0, 0.5), (1.5, 1.5), (0.5, 2.5)):
        print(f"psi({rho}, {d}) = {psi_shoot(rho, d):.12f}")

    print("\n== fixed point gamma of psi(1, ·) ==")
    g = gamma_shoot()
    print(f"gamma = {g:.7f}   psi(1, gamma) = {psi_shoot(1.0, g):.7f}")

    print("\n== characteristic roots, c = 4, sign + , branches 0..2 ==")
    for n, inner, lam, res in char_roots_scipy(4.0, +1, range(0, 3)):
        semi = math.pi / abs(lam.imag) if abs(lam.imag) > 1e-12 else float("nan")
        print(f"branch {n} inner {inner:+d}: lam = {lam.real:+.12f}"
              f"{lam.imag:+.12f}i  residual {res:.2e}  semicycle {semi:.6f}")

    print("\n== characteristic roots, c = pi, sign − (sin-anchor) ==")
    for n, inner, lam, res in char_roots_scipy(math.pi, -1, range(0, 2)):
        print(f"branch {n} inner {inner:+d}: lam = {lam.real:+.12f}"
              f"{lam.imag:+.12f}i  residual {res:.2e}")

    print("\n== Wronskian minimum over [0, 50] for p ≡ −c, delay τ ==")
    for c, tau in ((0.01, 1.0), (0.04, 1.0), (0.09, 1.0), (0.1, 1.0),
                   (0.16, 1.0), (0.04, 2.0), (0.1, 2.0), (0.1, 2.3),
                   (0.02, 2.5)):
        print(f"c = {c}, tau = {tau}: min W = {wronskian_min(c, tau):+.6e}"
              f"   (tau*sqrt(c) = {tau * math.sqrt(c):.4f},"
              f" 2/e = {2 / math.e:.4f})")


if __name__ == "__main__":
    main()
