"""Descent profile, ascent iteration, shooting oracle, and their constants.

Expected values marked "independent oracle" were frozen from
scripts/crosscheck_constants.py (mpmath series bisection + scipy shooting)
before this module's implementation existed.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semicycles import (
    DomainError,
    beta_iterate,
    eval_r,
    forcing_term,
    gamma_constant,
    psi,
    psi_oracle_bvp,
    semicycle_threshold,
    theta,
)
from semicycles.thresholds import _beta_step, _forcing_grid

SQRT2 = math.sqrt(2.0)
HALF_PI = math.pi / 2.0

# independent oracle values (40-digit series bisection)
THETA_ANCHORS = {
    0.5: 1.4367105452556626,
    1.0: 1.4150879419269059,
    1.2: 1.4142756715370552,
}

# independent oracle values (scipy adaptive shooting, rtol 1e−11)
PSI_ANCHORS = {
    (1.0, 1.0): 1.526823759190,
    (0.7, 0.9): 1.554455882145,
    (2.0, 1.0): 1.417797795393,
    (1.0, 2.0): 1.432028657598,
    (1.0, 0.5): 1.563677193639,
    (1.5, 1.5): 1.344134361687,
    (0.5, 2.5): 1.551214721353,
    (2.0, 3.0): 1.000000000000,
}

GAMMA_ORACLE = 1.4760044


# ----------------------------------------------------------------------
# descent profile
# ----------------------------------------------------------------------

def test_r_first_segment_value():
    assert eval_r(1.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_r_zero_at_sqrt2_for_large_delay():
    assert eval_r(2.0, SQRT2) == pytest.approx(0.0, abs=1e-12)


def test_r_cosine_limit():
    assert eval_r(0.0, HALF_PI) == pytest.approx(0.0, abs=1e-12)
    assert eval_r(0.0, 1.0) == pytest.approx(math.cos(1.0), abs=1e-15)


def test_r_is_one_for_nonpositive_times():
    for d in (0.0, 0.5, 3.0):
        assert eval_r(d, 0.0) == 1.0
        assert eval_r(d, -2.7) == 1.0


def test_r_negative_delay_rejected():
    with pytest.raises(DomainError):
        eval_r(-0.1, 1.0)
    with pytest.raises(DomainError):
        theta(-1.0)


def test_r_second_segment_series():
    # on [Δ, 2Δ] the profile is 1 − t²/2 + (t−Δ)⁴/24
    d, t = 1.0, 1.3
    expected = 1 - t**2 / 2 + (t - d)**4 / 24
    assert eval_r(d, t) == pytest.approx(expected, rel=1e-14)


def test_r_strictly_decreasing_to_first_zero():
    for d in (0.2, 1.0, 2.0):
        ts = np.linspace(0.0, theta(d), 400)
        vals = np.array([eval_r(d, float(t)) for t in ts])
        assert np.all(np.diff(vals) < 0.0)


def test_r_uniform_cos_limit_small_delay():
    ts = np.linspace(0.0, HALF_PI, 200)
    dev = max(abs(eval_r(1e-3, float(t)) - math.cos(float(t))) for t in ts)
    assert dev < 1e-2


def test_theta_special_values():
    assert theta(0.0) == pytest.approx(HALF_PI, abs=1e-12)
    for d in (1.5, 2.0, 5.0):
        assert theta(d) == pytest.approx(SQRT2, abs=1e-12)


def test_theta_derived_anchors():
    for d, want in THETA_ANCHORS.items():
        assert theta(d) == pytest.approx(want, abs=1e-12)


def test_theta_monotone_grid():
    """Nonincreasing overall; strictly decreasing on [0, √2]; √2 beyond."""
    deltas = np.linspace(0.0, 3.0, 100)
    vals = np.array([theta(float(d)) for d in deltas])
    assert np.all(np.diff(vals) <= 1e-13)
    inside = deltas < SQRT2 - 0.02
    assert np.all(np.diff(vals[inside]) < 0.0)
    assert np.all(np.abs(vals[deltas >= SQRT2] - SQRT2) < 1e-10)
    assert np.all(vals >= SQRT2 - 1e-12) and np.all(vals <= HALF_PI + 1e-12)


# ----------------------------------------------------------------------
# forcing term
# ----------------------------------------------------------------------

def test_forcing_zero_delay_empty_support():
    for w in (-1.5, -0.3, -1e-9):
        assert forcing_term(1.0, 0.0, w) == 0.0


def test_forcing_plateau_at_origin():
    # Δ = ϑ_Δ = √2 makes the shifted argument 0, where the profile is 1
    assert forcing_term(1.0, SQRT2, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_forcing_vanishes_at_left_edge():
    assert forcing_term(2.0, 1.0, -1.0) == pytest.approx(0.0, abs=1e-12)


def test_forcing_outside_support():
    assert forcing_term(1.0, 1.0, -1.2) == 0.0
    with pytest.raises(DomainError):
        forcing_term(-1.0, 1.0, -0.5)


# ----------------------------------------------------------------------
# the ascent iteration
# ----------------------------------------------------------------------

def test_iteration_zero_delay_course():
    """With no forcing the first sweep lands exactly on √2, the second on
    √(7/3), and the limit is π/2 with the cosine profile."""
    res = beta_iterate(1.0, 0.0)
    assert res.omega_sequence[0] == pytest.approx(SQRT2, abs=1e-11)
    assert res.omega_sequence[1] == pytest.approx(math.sqrt(7.0 / 3.0),
                                                  abs=1e-6)
    assert res.psi == pytest.approx(HALF_PI, abs=2e-3)
    prof = res.limit_profile
    dev = np.abs(prof.values - np.cos(prof.grid() + HALF_PI)).max()
    assert dev < 2e-3


def test_iteration_saturated_delay_closed_form():
    res = beta_iterate(1.0, 3.0)
    assert res.psi == pytest.approx(SQRT2, abs=2e-3)
    prof = res.limit_profile
    dev = np.abs(prof.values - (1 - (prof.grid() + SQRT2) ** 2 / 2)).max()
    assert dev < 2e-3
    assert res.iterations <= 5  # forcing plateau fixes the profile at once


def test_omega_sequence_monotone_and_capped():
    for rho, d in ((1.0, 0.0), (1.0, 1.0), (0.5, 0.4), (2.0, 1.2)):
        res = beta_iterate(rho, d)
        seq = res.omega_sequence
        assert all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))
        assert res.psi <= HALF_PI + 1e-9


def test_beta_profiles_pointwise_nonincreasing_in_n():
    w = np.linspace(-HALF_PI, 0.0, 1024)
    forcing = _forcing_grid(1.0, 1.0, w)
    beta = np.ones_like(w)
    prev = beta
    for _ in range(8):
        _, beta = _beta_step(w, prev, forcing)
        # slack = the ϖ-bisection width (β(0) carries exactly that noise)
        assert np.all(beta <= prev + 1e-11)
        prev = beta


def test_limit_profile_shape():
    res = beta_iterate(1.3, 0.8)
    vals = res.limit_profile.values
    assert vals[0] == pytest.approx(1.0, abs=1e-9)
    assert vals[-1] == pytest.approx(0.0, abs=1e-7)
    assert np.all(np.diff(vals) <= 1e-9)  # strictly decreasing up to interp


def test_limit_profile_residual():
    """The converged profile satisfies y″ + max{y, forcing} ≈ 0."""
    for rho, d in ((1.0, 0.0), (1.0, 1.0), (2.0, 1.5), (0.5, 0.7)):
        res = beta_iterate(rho, d)
        prof = res.limit_profile
        y, h = prof.values, prof.spacing
        F = _forcing_grid(rho, d, prof.grid())
        resid = (y[:-2] - 2 * y[1:-1] + y[2:]) / h**2 \
            + np.maximum(y[1:-1], F[1:-1])
        assert np.abs(resid).max() < 1e-3


def test_iteration_limit_error_carries_last_omegas():
    from semicycles import IterationLimitError
    with pytest.raises(IterationLimitError) as info:
        beta_iterate(1.0, 0.0, max_iter=3)
    assert info.value.omega_last >= info.value.omega_prev
    assert info.value.omega_last < HALF_PI


def test_argument_validation():
    with pytest.raises(DomainError):
        beta_iterate(0.0, 1.0)
    with pytest.raises(DomainError):
        beta_iterate(1.0, -0.5)
    with pytest.raises(DomainError):
        beta_iterate(1.0, 1.0, grid_size=32)
    with pytest.raises(DomainError):
        psi_oracle_bvp(1.0, 1.0, mesh=100)


# ----------------------------------------------------------------------
# psi and the oracle
# ----------------------------------------------------------------------

def test_psi_special_values():
    for rho in (0.5, 1.0, 2.0, 5.0):
        assert psi(rho, 0.0) == pytest.approx(HALF_PI, abs=2e-3)
    for d in (2 * SQRT2, 3.0, 4.0):
        assert psi(1.0, d) == pytest.approx(SQRT2, abs=2e-3)


def test_psi_matches_independent_oracle():
    for (rho, d), want in PSI_ANCHORS.items():
        assert psi(rho, d) == pytest.approx(want, abs=1e-6), (rho, d)


def test_bvp_oracle_matches_independent_oracle():
    for (rho, d), want in PSI_ANCHORS.items():
        assert psi_oracle_bvp(rho, d) == pytest.approx(want, abs=1e-6), \
            (rho, d)


def test_psi_below_sqrt2_only_above_unit_history():
    """ρ ≤ 1 keeps Ψ ≥ √2; ρ > 1 with room to spare drops to √(2/ρ)."""
    assert psi(1.0, 2.0) >= SQRT2 - 1e-6
    assert psi(0.6, 1.7) >= SQRT2 - 1e-6
    assert psi(2.0, 3.0) == pytest.approx(math.sqrt(2.0 / 2.0), abs=1e-6)
    assert psi(4.0, 4.0) == pytest.approx(math.sqrt(2.0 / 4.0), abs=1e-4)


def test_psi_monotone_grid():
    rhos = (0.5, 1.0, 1.5, 2.0)
    deltas = (0.0, 0.75, 1.5, 2.25, 3.0)
    table = {(r, d): psi(r, d) for r in rhos for d in deltas}
    for r in rhos:  # nonincreasing in Δ
        for d0, d1 in zip(deltas, deltas[1:]):
            assert table[(r, d1)] <= table[(r, d0)] + 1e-9
    for d in deltas:  # nonincreasing in ρ
        for r0, r1 in zip(rhos, rhos[1:]):
            assert table[(r1, d)] <= table[(r0, d)] + 1e-9


@settings(max_examples=25, deadline=None)
@given(rho=st.floats(min_value=0.3, max_value=2.5),
       delta=st.floats(min_value=0.0, max_value=3.5))
def test_psi_bounds_property(rho, delta):
    val = psi(rho, delta)
    assert val <= HALF_PI + 1e-9
    assert val > 0.0
    if rho <= 1.0:
        assert val >= SQRT2 - 1e-9


# ----------------------------------------------------------------------
# derived constants
# ----------------------------------------------------------------------

def test_gamma_constant():
    g = gamma_constant(1e-6)
    assert SQRT2 <= g <= HALF_PI
    assert g == pytest.approx(GAMMA_ORACLE, abs=2e-5)
    assert abs(psi(1.0, g) - g) < 1e-5
    assert psi(1.0, g - 0.1) > g - 0.1  # below the fixed point Ψ exceeds Δ


def test_semicycle_threshold_values():
    assert semicycle_threshold(0.0) == pytest.approx(math.pi, abs=1e-9)
    assert semicycle_threshold(4.0) == pytest.approx(2 * SQRT2, abs=1e-6)
    expected = theta(1.0) + psi(1.0, 1.0)
    assert semicycle_threshold(1.0) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(DomainError):
        semicycle_threshold(-1.0)
