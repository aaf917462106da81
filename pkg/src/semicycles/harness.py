"""Randomized verification suites: generated instances, measured margins.

Four suites, each deterministic for a given seed (instances draw from
spawned children of one ``numpy.random.SeedSequence``):

* decay — constant-delay problems started on a decaying eigenmode; the
  fitted envelope ratio must come out below 1.
* margins — random normalized problems; every semicycle where the
  descent/ascent hypotheses verify must satisfy its bound up to −1e−3.
* comparison — minorant/majorant pairs built to satisfy the ratio
  comparison hypotheses; the observed violation must stay ≤ 1e−6.
* wronskian — nonpositive small coefficients under the 2/e bound; the
  fundamental-system Wronskian must stay positive on [0, 50].

Suites return a HarnessReport with per-instance rows for CSV export.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotApplicableError, ResolutionError
from .analysis import (
    envelope_decay_ratio,
    find_zeros,
    check_ascent,
    check_descent,
    semicycles,
    verify_comparison,
    wronskian_min,
)
from .integrator import DelayProblem, integrate
from .signals import PiecewiseSignal, signal_range
from .spectral import CharRoot, char_roots
from .thresholds import semicycle_threshold

__all__ = [
    "HarnessReport",
    "eigenmode_problem",
    "mode_mixture_problem",
    "run_decay_suite",
    "run_margin_suite",
    "run_comparison_suite",
    "run_wronskian_suite",
    "run_suite",
    "SUITE_NAMES",
]

SUITE_NAMES = ("decay", "margins", "comparison", "wronskian")


@dataclass(frozen=True)
class HarnessReport:
    """Outcome of one randomized suite run."""

    suite: str
    seed: int
    instances: int
    checked: int
    failures: int
    worst: float
    columns: tuple
    rows: tuple

    @property
    def passed(self) -> bool:
        return self.failures == 0


# ----------------------------------------------------------------------
# eigenmode initial data
# ----------------------------------------------------------------------

def mode_mixture_problem(c: float, sign: int, terms,
                         degree: int = 20) -> DelayProblem:
    """Constant-delay problem started on Σ_k A_k·Re(e^{iφ_k} e^{λ_k t}).

    ``terms`` is a sequence of (root, amplitude, phase) triples whose roots
    must all belong to the characteristic function for this (c, sign). The
    history on [−c, 0] is a piecewise Taylor expansion, segment width
    min(0.3, 2.5/max|λ|) so degree-20 tails sit below 1e−10.
    """
    if not c > 0.0:
        raise DomainError(f"delay must be positive, got {c}")
    terms = tuple(terms)
    if not terms:
        raise DomainError("need at least one mode")
    if any(r.sign != sign for r, _, _ in terms):
        raise DomainError("mixed characteristic signs in one mixture")
    lam_max = max(abs(r.value) for r, _, _ in terms)
    width = min(0.3, 2.5 / max(lam_max, 1e-9))
    n_seg = max(1, math.ceil(c / width))
    bps = np.linspace(-c, 0.0, n_seg + 1)
    segments = []
    for t0 in bps[:-1]:
        coeffs = np.zeros(degree + 1)
        for root, amp, phase in terms:
            lam = root.value
            term = amp * np.exp(1j * phase) * np.exp(lam * t0)
            for k in range(degree + 1):
                coeffs[k] += term.real
                term = term * lam / (k + 1)
        segments.append(tuple(float(v) for v in coeffs))
    left = sum(amp * (np.exp(1j * phase - r.value * c)).real
               for r, amp, phase in terms)
    history = PiecewiseSignal(tuple(float(b) for b in bps), tuple(segments),
                              float(left), 0.0)
    value = sum(amp * (np.exp(1j * phase)).real for _, amp, phase in terms)
    slope = sum(amp * (r.value * np.exp(1j * phase)).real
                for r, amp, phase in terms)
    return DelayProblem(
        p=PiecewiseSignal.constant(float(sign)),
        tau=PiecewiseSignal.constant(c),
        start=0.0,
        history=history,
        initial_value=float(value),
        initial_slope=float(slope),
    )


def eigenmode_problem(c: float, root: CharRoot, phase: float = 0.0,
                      degree: int = 20) -> DelayProblem:
    """Single-mode start Re(e^{iφ} e^{λt}); see mode_mixture_problem."""
    return mode_mixture_problem(c, root.sign, ((root, 1.0, phase),),
                                degree=degree)


def _decay_instance(idx: int, rng) -> tuple:
    """One instance → (rows, checked, failures, metrics); see _execute."""
    for _ in range(40):
        c = float(rng.uniform(2.8, 5.2))
        cap = semicycle_threshold(c) - 0.051
        pool = [r for r in char_roots(c, 1, 3)
                if -0.6 <= r.value.real <= -0.05
                and abs(r.value.imag) > 1e-9
                and r.semicycle <= cap]
        if pool:
            break
    else:
        raise DomainError("no admissible eigenmode after 40 draws")
    root = pool[int(rng.integers(len(pool)))]
    phase = float(rng.uniform(0.0, 2.0 * math.pi))
    problem = eigenmode_problem(c, root, phase)
    stride = 2.0 * root.semicycle
    horizon = c + 4.6 * stride
    traj = integrate(problem, horizon, step=0.01)
    rho, _peaks = envelope_decay_ratio(traj, stride, t0=c)
    row = (idx, c, root.branch, root.value.real, root.value.imag, stride, rho)
    return [row], 1, 0 if rho < 1.0 else 1, [rho]


# ----------------------------------------------------------------------
# random normalized problems, semicycle margins
# ----------------------------------------------------------------------

def _piecewise_linear(rng, lo: float, hi: float, t0: float, t1: float,
                      pieces: int) -> PiecewiseSignal:
    bps = np.linspace(t0, t1, pieces + 1)
    vals = rng.uniform(lo, hi, pieces + 1)
    segs = tuple(
        (float(vals[i]), float((vals[i + 1] - vals[i]) / (bps[i + 1] - bps[i])))
        for i in range(pieces))
    return PiecewiseSignal(tuple(float(b) for b in bps), segs,
                           float(vals[0]), float(vals[-1]))


def _hermite_history(rng, depth: float) -> tuple:
    """C¹ cubic on [−depth, 0] with O(1) values: endpoint data drawn
    directly, converted to monomial coefficients in u = t + depth."""
    v0, v1 = rng.uniform(-1.0, 1.0, 2)
    s0, s1 = rng.uniform(-0.4, 0.4, 2)
    h = depth
    c2 = (-3.0 * v0 - 2.0 * s0 * h + 3.0 * v1 - s1 * h) / h ** 2
    c3 = (2.0 * v0 + s0 * h - 2.0 * v1 + s1 * h) / h ** 3
    sig = PiecewiseSignal((-depth, 0.0),
                          ((float(v0), float(s0), float(c2), float(c3)),),
                          float(v0), float(v1))
    return sig, float(v1), float(s1)


def _random_margin_problem(rng) -> DelayProblem:
    horizon_hint = 16.0
    pieces = int(rng.integers(2, 5))
    # mostly-positive coefficients keep the domination hypothesis alive
    p = _piecewise_linear(rng, -0.3 if rng.uniform() < 0.3 else 0.15,
                          1.0, 0.0, horizon_hint, pieces)
    tau = _piecewise_linear(rng, 0.0, 2.0, 0.0, horizon_hint,
                            int(rng.integers(2, 5)))
    # deep enough for [start − τ_m − ϑ, start] windows of early semicycles
    history, value, slope = _hermite_history(rng, depth=5.5)
    return DelayProblem(p=p, tau=tau, start=0.0, history=history,
                        initial_value=value, initial_slope=slope)


def _margin_instance(idx: int, rng) -> tuple:
    problem = _random_margin_problem(rng)
    traj = integrate(problem, 16.0, step=0.01)
    try:
        arcs = semicycles(traj, find_zeros(traj))
    except (DomainError, ResolutionError):
        return [], 0, 0, []
    tau_m = signal_range(problem.tau, 0.0, math.inf)[1]
    rows, checked, failures, margins = [], 0, 0, []
    for sc in arcs:
        for kind, check in (("descent",
                             lambda: check_descent(traj, sc, tau_m)),
                            ("ascent",
                             lambda: check_ascent(traj, sc, tau_m))):
            try:
                ok, margin = check()
            except NotApplicableError:
                continue
            checked += 1
            failures += 0 if ok else 1
            margins.append(margin)
            rows.append((idx, kind, sc.a, sc.b, margin))
    return rows, checked, failures, margins


# ----------------------------------------------------------------------
# minorant/majorant pairs
# ----------------------------------------------------------------------

def _shift_poly(coeffs, offset: float):
    """Re-anchor Σ c_j·t^j to v = t − offset (coefficients in v)."""
    out = [0.0] * len(coeffs)
    for j, c in enumerate(coeffs):
        for k in range(j + 1):
            out[k] += c * math.comb(j, k) * offset ** (j - k)
    return out


def _comparison_pair(rng) -> tuple:
    horizon_hint = 10.0
    pieces = int(rng.integers(2, 5))
    bps = np.linspace(0.0, horizon_hint, pieces + 1)
    base = rng.uniform(0.05, 1.0, pieces)
    signs = rng.choice([-1.0, 1.0], pieces)
    p_segs = tuple((float(b * s),) for b, s in zip(base, signs))
    p_minor = PiecewiseSignal(tuple(map(float, bps)), p_segs,
                              p_segs[0][0], p_segs[-1][0])
    lift = float(rng.uniform(0.0, 0.4))
    pm_segs = tuple((float(b + lift),) for b in base)
    p_major = PiecewiseSignal(tuple(map(float, bps)), pm_segs,
                              pm_segs[0][0], pm_segs[-1][0])

    tau_minor = _piecewise_linear(rng, 0.0, 1.5, 0.0, horizon_hint,
                                  int(rng.integers(2, 4)))
    shift = float(rng.uniform(0.0, 0.6))
    tau_major = PiecewiseSignal(
        tau_minor.breakpoints,
        tuple((seg[0] + shift,) + seg[1:] for seg in tau_minor.segments),
        tau_minor.left_extension + shift,
        tau_minor.right_extension + shift)

    big_tau = signal_range(tau_major, 0.0, math.inf)[1] + 0.5
    y0 = float(rng.uniform(0.5, 2.0))
    q = float(rng.uniform(0.0, 0.5))
    # y(t) = y0·(1 − q·t) on [−big_tau, 0]: positive, nonincreasing
    y_hist = PiecewiseSignal((-big_tau, 0.0),
                             ((y0 * (1.0 + q * big_tau), -y0 * q),),
                             y0 * (1.0 + q * big_tau), y0)
    majorant = DelayProblem(p=p_major, tau=tau_major, start=0.0,
                            history=y_hist, initial_value=y0,
                            initial_slope=-y0 * q)

    # z(t) = z0·(1 − q·t)·T₄(ωt) with T₄ the degree-4 cosine Taylor
    # polynomial: |T₄(x)| ≤ 1 on |x| ≤ 2 with T₄(0) = 1, T₄′(0) = 0, so
    # |z/z(0)| ≤ y/y(0) holds exactly and the contact at the start is C¹;
    # below the z-data window the history is zero, also within the bound
    z0 = float(rng.uniform(0.2, 1.5))
    z_depth = min(big_tau, 1.0)
    omega = float(rng.uniform(0.0, 2.0 / z_depth))
    cos4 = [1.0, 0.0, -omega ** 2 / 2.0, 0.0, omega ** 4 / 24.0]
    poly_t = [0.0] * 6
    for j, a in enumerate((1.0, -q)):
        for k, b in enumerate(cos4):
            poly_t[j + k] += z0 * a * b
    z_hist = PiecewiseSignal((-z_depth, 0.0),
                             (tuple(_shift_poly(poly_t, -z_depth)),),
                             0.0, z0)
    minorant = DelayProblem(p=p_minor, tau=tau_minor, start=0.0,
                            history=z_hist, initial_value=z0,
                            initial_slope=-z0 * q)
    return minorant, majorant


def _comparison_instance(idx: int, rng) -> tuple:
    minorant, majorant = _comparison_pair(rng)
    ok, violation = verify_comparison(minorant, majorant, 10.0)
    return [(idx, violation)], 1, 0 if ok else 1, [violation]


# ----------------------------------------------------------------------
# Wronskian positivity under the 2/e bound
# ----------------------------------------------------------------------

def _wronskian_instance(idx: int, rng) -> tuple:
    p_sup = float(rng.uniform(0.01, 0.08))
    tau_m = float(rng.uniform(0.05, 1.0)) * min(0.40 / math.sqrt(p_sup), 2.5)
    pieces = int(rng.integers(2, 4))
    p = _piecewise_linear(rng, -p_sup, -0.2 * p_sup, 0.0, 50.0, pieces)
    tau = _piecewise_linear(rng, 0.0, tau_m, 0.0, 50.0,
                            int(rng.integers(2, 4)))
    problem = DelayProblem(p=p, tau=tau, start=0.0,
                           history=PiecewiseSignal.constant(0.0),
                           initial_value=0.0, initial_slope=0.0)
    min_w = wronskian_min(problem, 50.0, step=0.02)
    return [(idx, p_sup, tau_m, min_w)], 1, 0 if min_w > 0.0 else 1, [min_w]


# ----------------------------------------------------------------------
# dispatch: serial or worker-pool execution, ordered assembly
# ----------------------------------------------------------------------

_INSTANCE_FNS = {"decay": _decay_instance, "margins": _margin_instance,
                 "comparison": _comparison_instance,
                 "wronskian": _wronskian_instance}
_DEFAULT_COUNTS = {"decay": 50, "margins": 200, "comparison": 200,
                   "wronskian": 100}
_COLUMNS = {
    "decay": ("index", "delay", "branch", "re", "im", "stride", "rho"),
    "margins": ("index", "kind", "left_zero", "right_zero", "margin"),
    "comparison": ("index", "violation"),
    "wronskian": ("index", "p_sup", "tau_bound", "min_wronskian"),
}
# margins and wronskian fail from below; decay and comparison from above
_WORST_IS_MIN = {"decay": False, "margins": True, "comparison": False,
                 "wronskian": True}


def _run_one(task: tuple) -> tuple:
    """Picklable work unit: rebuild the idx-th child stream and run it."""
    suite, seed, total, idx = task
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(total)[idx])
    return _INSTANCE_FNS[suite](idx, rng)


def _execute(suite: str, seed: int, count: int, jobs: int) -> HarnessReport:
    """Run `count` instances, serially or on a process pool, and fold the
    per-instance results in index order (identical either way)."""
    jobs = max(1, int(jobs))
    tasks = [(suite, seed, count, i) for i in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, count)) as pool:
            outs = list(pool.map(_run_one, tasks))
    else:
        outs = [_run_one(t) for t in tasks]
    rows: list = []
    checked = failures = 0
    metrics: list = []
    for r, ch, fails, ms in outs:
        rows.extend(r)
        checked += ch
        failures += fails
        metrics.extend(ms)
    if metrics:
        worst = min(metrics) if _WORST_IS_MIN[suite] else max(metrics)
    else:
        worst = math.nan
    return HarnessReport(suite, seed, count, checked, failures, worst,
                         _COLUMNS[suite], tuple(rows))


def run_decay_suite(seed: int = 0, count: int = 50,
                    jobs: int = 1) -> HarnessReport:
    """Eigenmode starts with Re λ ∈ [−0.6, −0.05] and short semicycles;
    the fitted envelope ratio per stride must be < 1."""
    return _execute("decay", seed, count, jobs)


def run_margin_suite(seed: int = 0, count: int = 200,
                     jobs: int = 1) -> HarnessReport:
    """Random normalized problems; every applicable descent/ascent check
    must clear its bound with margin ≥ −1e−3."""
    return _execute("margins", seed, count, jobs)


def run_comparison_suite(seed: int = 0, count: int = 200,
                         jobs: int = 1) -> HarnessReport:
    """Hypothesis-satisfying pairs; the conclusion must hold to 1e−6."""
    return _execute("comparison", seed, count, jobs)


def run_wronskian_suite(seed: int = 0, count: int = 100,
                        jobs: int = 1) -> HarnessReport:
    """Nonpositive coefficients with τ_m·√(esssup|p|) ≤ 0.4; the
    fundamental-system Wronskian must stay positive out to t = 50."""
    return _execute("wronskian", seed, count, jobs)


def run_suite(suite: str, seed: int = 0, count: int | None = None,
              jobs: int = 1) -> HarnessReport:
    """Dispatch by suite name with each suite's default instance count."""
    if suite not in _DEFAULT_COUNTS:
        raise DomainError(f"unknown suite {suite!r}; pick from "
                          f"{', '.join(SUITE_NAMES)}")
    n = _DEFAULT_COUNTS[suite] if count is None else count
    return _execute(suite, seed, n, jobs)
