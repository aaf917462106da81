"""Acceptance gate: one test per shipped guarantee, stated tolerances.

Each test prints a single ``[criterion NN] PASS/FAIL`` line with the
measured quantities, then asserts.  Criteria with runtime budgets check
them with ``time.perf_counter`` around the computation.  Randomized
criteria (08–11) run the full published suite sizes at seed 0.
"""

import math
import time

import numpy as np

from semicycles.analysis import classify, find_zeros, semicycles
from semicycles.harness import run_suite
from semicycles.integrator import integrate
from semicycles.repro import (
    ExampleSpec,
    build_example_problem,
    closed_form,
    example_horizon,
)
from semicycles.spectral import char_roots
from semicycles.thresholds import (
    beta_iterate,
    gamma_constant,
    psi,
    psi_oracle_bvp,
    theta,
)

SQRT2 = math.sqrt(2.0)
TWO_SQRT2 = 2.0 * SQRT2


def _criterion(num: int, ok: bool, detail: str) -> None:
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num:02d} failed: {detail}"


def _example_run(which: str, epsilon: float, periods: int):
    spec = ExampleSpec(which, epsilon, periods)
    problem = build_example_problem(spec)
    traj = integrate(problem, example_horizon(spec), step=0.005)
    err = max(abs(float(x) - closed_form(spec, float(t)))
              for t, x in zip(traj.ts, traj.xs))
    arcs = semicycles(traj, find_zeros(traj))
    return problem, traj, err, arcs


def test_criterion_01_descent_time_special_values():
    t0 = time.perf_counter()
    err0 = abs(theta(0.0) - math.pi / 2)
    errs = max(abs(theta(d) - SQRT2) for d in (1.5, 2.0, 5.0))
    elapsed = time.perf_counter() - t0
    ok = err0 < 1e-6 and errs < 1e-9 and elapsed < 1.0
    _criterion(1, ok, f"theta(0) err {err0:.2e} (tol 1e-6), saturated err "
                      f"{errs:.2e} (tol 1e-9), {elapsed:.2f}s < 1s")


def test_criterion_02_ascent_time_special_values():
    t0 = time.perf_counter()
    err_zero = max(abs(psi(rho, 0.0, grid_size=4096) - math.pi / 2)
                   for rho in (0.5, 1.0, 2.0))
    err_sat = max(abs(psi(1.0, d, grid_size=4096) - SQRT2)
                  for d in (TWO_SQRT2, 3.0, 4.0))
    elapsed = time.perf_counter() - t0
    ok = err_zero < 2e-3 and err_sat < 2e-3 and elapsed < 30.0
    _criterion(2, ok, f"psi(rho,0) err {err_zero:.2e}, psi(1,sat) err "
                      f"{err_sat:.2e} (tol 2e-3), {elapsed:.1f}s < 30s")


def test_criterion_03_independent_oracle_agreement():
    t0 = time.perf_counter()
    worst = 0.0
    for rho in np.linspace(0.5, 2.0, 5):
        for delta in np.linspace(0.0, 3.0, 5):
            a = beta_iterate(float(rho), float(delta)).psi
            b = psi_oracle_bvp(float(rho), float(delta))
            worst = max(worst, abs(a - b))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 120.0
    _criterion(3, ok, f"5x5 iteration-vs-BVP gap {worst:.2e} (tol 1e-4), "
                      f"{elapsed:.1f}s < 120s")


def test_criterion_04_fixed_point_bracket_and_residual():
    g = gamma_constant()
    residual = abs(psi(1.0, g) - g)
    ok = SQRT2 <= g <= math.pi / 2 and residual < 1e-5
    _criterion(4, ok, f"gamma {g:.10f} in [sqrt2, pi/2], fixed-point "
                      f"residual {residual:.2e} (tol 1e-5)")


def test_criterion_05_spectrum_table_and_dichotomy():
    t0 = time.perf_counter()
    roots = char_roots(4.0, 1, (0, 1, 2))
    got_values = {(round(r.value.real, 2), round(r.value.imag, 2))
                  for r in roots}
    want_values = {(0.34, 0.37), (-0.21, 1.5), (-0.57, 3.05),
                   (-0.77, 4.63), (-0.92, 6.21)}
    got_semis = {round(r.semicycle, 2) for r in roots}
    want_semis = {8.45, 1.03, 2.09, 0.51, 0.68}
    max_resid = max(r.residual for r in roots)
    dichotomy = all((r.value.real > 0) == (r.semicycle > TWO_SQRT2)
                    for r in roots)
    elapsed = time.perf_counter() - t0
    ok = (len(roots) == 5 and got_values == want_values
          and got_semis == want_semis and max_resid < 1e-10
          and dichotomy and elapsed < 1.0)
    _criterion(5, ok, f"5 roots to 2dp {got_values == want_values}, "
                      f"semicycles {got_semis == want_semis}, residual "
                      f"{max_resid:.1e} (tol 1e-10), dichotomy {dichotomy}, "
                      f"{elapsed:.2f}s < 1s")


def test_criterion_06_alternating_coefficient_benchmark():
    worst_err = worst_len = worst_ratio = 0.0
    for eps in (0.0, 0.1):
        _, _, err, arcs = _example_run("example2", eps, 5)
        period = math.pi + eps - math.atan(math.tanh(eps))
        growth = math.sqrt(math.sinh(eps) ** 2 + math.cosh(eps) ** 2)
        peaks = [sc.peak for sc in arcs]
        worst_err = max(worst_err, err)
        worst_len = max(worst_len,
                        max(abs(sc.length - period) for sc in arcs))
        worst_ratio = max(worst_ratio,
                          max(abs(b / a - growth)
                              for a, b in zip(peaks, peaks[1:])))
    ok = worst_err < 1e-6 and worst_len < 1e-6 and worst_ratio < 1e-6
    _criterion(6, ok, f"closed-form err {worst_err:.2e}, length err "
                      f"{worst_len:.2e}, envelope-ratio err "
                      f"{worst_ratio:.2e} (all tol 1e-6)")


def test_criterion_07_sawtooth_delay_benchmark():
    worst_err = worst_len = 0.0
    for eps in (0.0, 0.1):
        _, _, err, arcs = _example_run("example3", eps, 5)
        period = TWO_SQRT2 + 2.0 * eps
        worst_err = max(worst_err, err)
        worst_len = max(worst_len,
                        max(abs(sc.length - period) for sc in arcs))
        if eps == 0.0:
            peaks = [sc.peak for sc in arcs]
            flat = max(abs(b / a - 1.0) for a, b in zip(peaks, peaks[1:]))
    problem, traj, _, _ = _example_run("example3", 0.1, 50)
    verdict = classify(problem, traj).verdict
    ok = (worst_err < 1e-6 and worst_len < 1e-6 and flat < 1e-6
          and verdict == "unbounded_observed")
    _criterion(7, ok, f"closed-form err {worst_err:.2e}, length err "
                      f"{worst_len:.2e}, flat envelope {flat:.2e} "
                      f"(tol 1e-6), eps=0.1 verdict {verdict}")


def test_criterion_08_short_semicycles_force_decay():
    t0 = time.perf_counter()
    report = run_suite("decay", seed=0, count=50)
    elapsed = time.perf_counter() - t0
    ok = report.failures == 0 and report.worst < 1.0 and elapsed < 300.0
    _criterion(8, ok, f"{report.instances} eigenmode instances, "
                      f"{report.failures} failures, worst envelope ratio "
                      f"{report.worst:.3f} < 1, {elapsed:.0f}s < 300s")


def test_criterion_09_anatomy_margins_nonnegative():
    report = run_suite("margins", seed=0, count=200)
    ok = report.failures == 0 and report.worst >= -1e-3
    _criterion(9, ok, f"{report.checked} applicable checks over "
                      f"{report.instances} instances, {report.failures} "
                      f"failures, worst margin {report.worst:+.4f} "
                      f"(tol -1e-3)")


def test_criterion_10_comparison_conclusion_holds():
    report = run_suite("comparison", seed=0, count=200)
    ok = report.failures == 0 and report.worst <= 1e-6
    _criterion(10, ok, f"{report.instances} minorant/majorant pairs, "
                       f"{report.failures} failures, worst violation "
                       f"{report.worst:.2e} (tol 1e-6)")


def test_criterion_11_small_negative_coefficient_wronskian():
    report = run_suite("wronskian", seed=0, count=100)
    ok = report.failures == 0 and report.worst > 0.0
    _criterion(11, ok, f"{report.instances} instances under the 2/e bound, "
                       f"{report.failures} failures, min Wronskian "
                       f"{report.worst:.3f} > 0 on [0, 50]")


def test_criterion_12_sine_boundary_case():
    problem, traj, err, _ = _example_run("sin_pi", 0.0, 3)
    verdict = classify(problem, traj).verdict
    ok = err < 1e-6 and verdict == "inconclusive"
    _criterion(12, ok, f"sine reproduction err {err:.2e} (tol 1e-6) over "
                       f"3 periods, verdict {verdict}")
