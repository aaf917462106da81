"""Method-of-steps integration of x″(t) + p(t)·x(t−τ(t)) = 0.

Fixed-step classical RK4 on the first-order system (x, x′), with step
endpoints aligned to every breakpoint of the coefficient and delay signals
and to the first-generation discontinuity points {t : t−τ(t) = breakpoint
or = start}. The delayed value is read from the initial history (t−τ ≤ s),
from earlier dense output (cubic Hermite per accepted step), or — when the
delay is smaller than the step — from a provisional interpolant that is
sub-iterated twice.

Two conventions matter and are deliberate:

* Within a step, p and τ are evaluated from the segment owning the step's
  interior. A step that ends exactly on a breakpoint therefore reads its
  right-endpoint stage from the left segment (one-sided limit); plain
  right-continuous evaluation would poison the last stage of every boundary
  step with the next segment's value and destroy the scheme's order.
* The history is read with the left-limit convention at s, honoring initial
  data with a jump (the fundamental-system construction). When the delayed
  argument of a step sitting just right of a crossing lands exactly on s,
  the step's interior side (u > s) wins instead.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HistoryDomainError
from .signals import (
    PiecewiseSignal,
    _trim_for_roots,
    signal_from_dict,
    signal_range,
    signal_to_dict,
)

__all__ = [
    "DelayProblem",
    "Trajectory",
    "Event",
    "rescale",
    "integrate",
    "fundamental_system",
    "wronskian",
    "problem_from_dict",
    "problem_to_dict",
]


@dataclass(frozen=True)
class DelayProblem:
    """One initial-value problem for x″ + p·x(t−τ) = 0.

    history supplies x on [s−τ_m, s); initial_value/initial_slope give the
    right limits x(s⁺), x′(s⁺) — a jump against the history is allowed.
    """

    p: PiecewiseSignal
    tau: PiecewiseSignal
    start: float
    history: PiecewiseSignal
    initial_value: float
    initial_slope: float

    def tau_sup(self, horizon: float) -> float:
        """Essential supremum of the delay over [start, horizon]."""
        lo, hi = signal_range(self.tau, self.start, horizon)
        if lo < -1e-12:
            raise DomainError(f"delay signal reaches {lo} < 0 on the horizon")
        return max(0.0, hi)


def problem_to_dict(problem: DelayProblem) -> dict:
    return {
        "p": signal_to_dict(problem.p),
        "tau": signal_to_dict(problem.tau),
        "start": problem.start,
        "history": signal_to_dict(problem.history),
        "initial_value": problem.initial_value,
        "initial_slope": problem.initial_slope,
    }


def problem_from_dict(data: dict) -> DelayProblem:
    try:
        return DelayProblem(
            p=signal_from_dict(data["p"]),
            tau=signal_from_dict(data["tau"]),
            start=float(data["start"]),
            history=signal_from_dict(data["history"]),
            initial_value=float(data["initial_value"]),
            initial_slope=float(data["initial_slope"]),
        )
    except KeyError as exc:
        raise DomainError(f"problem object missing key {exc}") from exc


@dataclass(frozen=True)
class Event:
    kind: str  # "zero" | "extremum"
    t: float
    degenerate: bool = False


@dataclass(frozen=True)
class Trajectory:
    """Dense numerical solution: nodes plus per-step cubic Hermite output."""

    ts: np.ndarray
    xs: np.ndarray
    vs: np.ndarray
    events: tuple = ()
    problem: DelayProblem | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("ts", "xs", "vs"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def start(self) -> float:
        return float(self.ts[0])

    @property
    def end(self) -> float:
        return float(self.ts[-1])

    def _check_domain(self, t):
        tol = 1e-9 * max(1.0, abs(self.start), abs(self.end))
        if np.any(t < self.start - tol) or np.any(t > self.end + tol):
            raise DomainError(
                f"time outside trajectory domain [{self.start}, {self.end}]")

    def sample(self, t) -> np.ndarray:
        """Vectorized dense-output values."""
        return self._eval(t, derivative=False)

    def sample_slope(self, t) -> np.ndarray:
        return self._eval(t, derivative=True)

    def _eval(self, t, derivative: bool):
        self._check_domain(t)
        q = np.atleast_1d(np.asarray(t, dtype=float))
        j = np.clip(np.searchsorted(self.ts, q, side="right") - 1,
                    0, self.ts.size - 2)
        h = self.ts[j + 1] - self.ts[j]
        s = np.clip((q - self.ts[j]) / h, 0.0, 1.0)
        x0, x1 = self.xs[j], self.xs[j + 1]
        v0, v1 = self.vs[j], self.vs[j + 1]
        if derivative:
            out = (x0 * (6 * s * s - 6 * s) / h
                   + v0 * (3 * s * s - 4 * s + 1)
                   + x1 * (6 * s - 6 * s * s) / h
                   + v1 * (3 * s * s - 2 * s))
        else:
            out = (x0 * (2 * s ** 3 - 3 * s ** 2 + 1)
                   + v0 * h * (s ** 3 - 2 * s ** 2 + s)
                   + x1 * (-2 * s ** 3 + 3 * s ** 2)
                   + v1 * h * (s ** 3 - s ** 2))
        return out if np.ndim(t) else float(out[0])

    def value(self, t: float) -> float:
        return self._eval(float(t), derivative=False)

    def slope(self, t: float) -> float:
        return self._eval(float(t), derivative=True)


# ----------------------------------------------------------------------
# scaling normalization
# ----------------------------------------------------------------------

def _scale_signal(sig: PiecewiseSignal, k: float, value_scale: float
                  ) -> PiecewiseSignal:
    """Signal t ↦ value_scale·f(kt): breakpoints divide by k, local
    coefficient j picks up k^j (then the overall value factor)."""
    bps = tuple(b / k for b in sig.breakpoints)
    segs = tuple(
        tuple(value_scale * c * k ** j for j, c in enumerate(seg))
        for seg in sig.segments)
    return PiecewiseSignal(bps, segs, value_scale * sig.left_extension,
                           value_scale * sig.right_extension)


def rescale(problem: DelayProblem, k: float) -> DelayProblem:
    """Time-compressed problem whose solutions satisfy x̃(t) = x(kt).

    The coefficient becomes k²·p(kt) and the delay τ(kt)/k; with
    k = 1/√(esssup|p|) the coefficient normalizes to essential bound 1.
    """
    if not k > 0.0:
        raise DomainError(f"scale factor must be positive, got {k}")
    return DelayProblem(
        p=_scale_signal(problem.p, k, k * k),
        tau=_scale_signal(problem.tau, k, 1.0 / k),
        start=problem.start / k,
        history=_scale_signal(problem.history, k, 1.0),
        initial_value=problem.initial_value,
        initial_slope=k * problem.initial_slope,
    )


# ----------------------------------------------------------------------
# forced nodes (breakpoints + first-generation delayed crossings)
# ----------------------------------------------------------------------

def _lag_crossings(tau: PiecewiseSignal, c: float, lo: float, hi: float
                   ) -> list[float]:
    """Solutions of t − τ(t) = c in (lo, hi), handled per τ-segment.

    A segment on which t − τ(t) ≡ c identically (a constant delayed
    argument, e.g. an affine delay of unit slope) contributes no interior
    crossing and is skipped.
    """
    out: list[float] = []
    bps = tau.breakpoints
    scale = max(1.0, abs(c), abs(lo), abs(hi))

    def consider(t: float):
        if lo < t < hi:
            out.append(t)

    # constant tails
    t_left = c + tau.left_extension
    if t_left < bps[0]:
        consider(t_left)
    t_right = c + tau.right_extension
    if t_right >= bps[-1]:
        consider(t_right)

    for i, seg in enumerate(tau.segments):
        length = bps[i + 1] - bps[i]
        # q(u) = u + b_i − c − τ_seg(u) in local coordinates
        q = list(-np.asarray(seg, dtype=float))
        q[0] += bps[i] - c
        if len(q) < 2:
            q.append(1.0)
        else:
            q[1] += 1.0
        if all(abs(ci) <= 1e-13 * scale for ci in q):
            continue  # the whole segment maps onto c
        trimmed = _trim_for_roots(q)
        if len(trimmed) == 1:
            continue
        if len(trimmed) == 2:
            roots = [-trimmed[0] / trimmed[1]]
        else:
            roots = [r.real for r in np.roots(trimmed[::-1])
                     if abs(r.imag) < 1e-9 * scale]
        for u in roots:
            if -1e-12 * scale <= u <= length + 1e-12 * scale:
                consider(bps[i] + u)
    return out


def _forced_nodes(problem: DelayProblem, horizon: float) -> np.ndarray:
    s = problem.start
    nodes = {s, horizon}
    for sig in (problem.p, problem.tau):
        nodes.update(b for b in sig.breakpoints if s < b < horizon)
    targets = set(problem.p.breakpoints) | set(problem.tau.breakpoints) \
        | set(problem.history.breakpoints) | {s}
    for c in targets:
        nodes.update(_lag_crossings(problem.tau, c, s, horizon))
    arr = np.array(sorted(nodes))
    # merge nodes that coincide up to rounding
    tol = 1e-12 * max(1.0, abs(s), abs(horizon))
    keep = [arr[0]]
    for t in arr[1:]:
        if t - keep[-1] > tol:
            keep.append(t)
    keep[-1] = horizon
    return np.asarray(keep)


# ----------------------------------------------------------------------
# the integrator
# ----------------------------------------------------------------------

def integrate(problem: DelayProblem, horizon: float, step: float = 0.01
              ) -> Trajectory:
    """Advance the problem to ``horizon`` with fixed step ≤ ``step``.

    Every forced node (signal breakpoints, first-generation delayed
    crossings) is hit exactly; each gap is subdivided uniformly. Dense
    output is cubic Hermite per step. Raises HistoryDomainError if a delayed
    argument falls below start − τ_m (an ill-posed delay signal), and
    DomainError for nonpositive steps or an empty horizon.
    """
    if not step > 0.0:
        raise DomainError(f"step must be positive, got {step}")
    s = problem.start
    if not horizon > s:
        raise DomainError(f"horizon {horizon} must exceed start {s}")
    tau_m = problem.tau_sup(horizon)
    time_scale = max(1.0, abs(s), abs(horizon))
    hist_floor = s - tau_m - 1e-9 * max(1.0, tau_m, time_scale)

    history = problem.history
    hist_at_start = history.eval_left(s)

    ts: list[float] = [s]
    xs: list[float] = [problem.initial_value]
    vs: list[float] = [problem.initial_slope]

    def dense_past(u: float) -> float:
        """Cubic Hermite over accepted steps (u ∈ [s, current node])."""
        j = bisect.bisect_right(ts, u) - 1
        if j >= len(ts) - 1:
            j = len(ts) - 2
        h = ts[j + 1] - ts[j]
        sig = (u - ts[j]) / h
        if sig < 0.0:
            sig = 0.0
        elif sig > 1.0:
            sig = 1.0
        s2, s3 = sig * sig, sig * sig * sig
        return (xs[j] * (2 * s3 - 3 * s2 + 1)
                + vs[j] * h * (s3 - 2 * s2 + sig)
                + xs[j + 1] * (-2 * s3 + 3 * s2)
                + vs[j + 1] * h * (s3 - s2))

    nodes = _forced_nodes(problem, horizon)
    for a, b in zip(nodes[:-1], nodes[1:]):
        span = b - a
        n_sub = max(1, math.ceil(span / step - 1e-9))
        h = span / n_sub
        # pin p and τ to the segment owning this interval's interior
        mid_global = a + 0.5 * span
        i_p = problem.p.segment_index(mid_global)
        i_tau = problem.tau.segment_index(mid_global)

        def p_at(sigma: float) -> float:
            return problem.p.eval_in_segment(i_p, sigma)

        def tau_at(sigma: float) -> float:
            return problem.tau.eval_in_segment(i_tau, sigma)

        for i_sub in range(n_sub):
            t0 = ts[-1]
            t1 = b if i_sub == n_sub - 1 else a + (i_sub + 1) * h
            hh = t1 - t0
            x0, v0 = xs[-1], vs[-1]
            # does the delayed argument sit right of the start jump here?
            mid_u = (t0 + 0.5 * hh) - tau_at(t0 + 0.5 * hh)
            right_of_start = mid_u > s

            prov: tuple | None = None
            overlap = False

            def delayed(sigma: float, x_stage: float) -> float:
                nonlocal overlap
                tv = tau_at(sigma)
                if tv < 0.0:
                    if tv < -1e-12:
                        raise DomainError(
                            f"delay {tv} negative at t = {sigma}")
                    tv = 0.0
                if tv <= 1e-13 * max(1.0, abs(sigma)):
                    return x_stage  # ODE regime: the stage's own value
                u = sigma - tv
                if u > t0:
                    overlap = True  # delay shorter than the step
                    if prov is None:
                        return x0 + v0 * (u - t0)
                    px0, pv0, px1, pv1 = prov
                    sg = (u - t0) / hh
                    s2, s3 = sg * sg, sg ** 3
                    return (px0 * (2 * s3 - 3 * s2 + 1)
                            + pv0 * hh * (s3 - 2 * s2 + sg)
                            + px1 * (-2 * s3 + 3 * s2)
                            + pv1 * hh * (s3 - s2))
                if u > s:
                    return dense_past(u)
                if u == s:
                    return dense_past(u) if right_of_start else hist_at_start
                if u < hist_floor:
                    raise HistoryDomainError(
                        f"delayed argument {u} reaches below "
                        f"start − τ_m = {s - tau_m}")
                return history(u)

            def rk4_once() -> tuple:
                k1x = v0
                k1v = -p_at(t0) * delayed(t0, x0)
                tm = t0 + 0.5 * hh
                k2x = v0 + 0.5 * hh * k1v
                k2v = -p_at(tm) * delayed(tm, x0 + 0.5 * hh * k1x)
                k3x = v0 + 0.5 * hh * k2v
                k3v = -p_at(tm) * delayed(tm, x0 + 0.5 * hh * k2x)
                k4x = v0 + hh * k3v
                k4v = -p_at(t1) * delayed(t1, x0 + hh * k3x)
                x1 = x0 + (hh / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
                v1 = v0 + (hh / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
                return x1, v1

            x1, v1 = rk4_once()
            if overlap:
                # two sub-iterations against the provisional interpolant
                for _ in range(2):
                    prov = (x0, v0, x1, v1)
                    x1, v1 = rk4_once()

            ts.append(t1)
            xs.append(x1)
            vs.append(v1)

    ts_arr = np.asarray(ts)
    xs_arr = np.asarray(xs)
    vs_arr = np.asarray(vs)
    traj = Trajectory(ts_arr, xs_arr, vs_arr, events=(), problem=problem)
    events = tuple(_scan_events(traj))
    return Trajectory(ts_arr, xs_arr, vs_arr, events=events, problem=problem)


# ----------------------------------------------------------------------
# event scanning (shared with the analysis layer)
# ----------------------------------------------------------------------

def _refine_sign_change(f, lo: float, hi: float, tol: float) -> float:
    f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (f_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_sign_changes(ts: np.ndarray, ys: np.ndarray, f, tol: float
                       ) -> list[tuple]:
    """(t, exact_node) for each sign change of the sampled function ys,
    refined by bisection on the dense evaluation f. Node values that are
    exactly zero are taken as-is; a run of exact zeros yields one event."""
    out: list[tuple] = []
    prev_idx = None  # last node with a definite sign
    prev_sign = 0
    zero_since_prev = False
    for j in range(ts.size):
        y = ys[j]
        if y == 0.0:
            if not (out and abs(out[-1][0] - ts[j]) <= tol):
                out.append((float(ts[j]), True))
            zero_since_prev = True
            continue
        sign = 1 if y > 0.0 else -1
        if prev_idx is not None and sign != prev_sign and not zero_since_prev:
            t_star = _refine_sign_change(f, float(ts[prev_idx]),
                                         float(ts[j]), tol)
            out.append((t_star, False))
        prev_idx, prev_sign = j, sign
        zero_since_prev = False
    return out


def zero_crossings(traj: Trajectory, tol: float = 1e-10) -> list[tuple]:
    """Zeros of x as (time, degenerate) pairs, in increasing time.

    Sign-change zeros are refined to ``tol``; tangential touches (a local
    extremum whose value is zero at resolution scale) are flagged degenerate.
    """
    amp = float(np.abs(traj.xs).max(initial=0.0))
    if amp == 0.0:
        return [(traj.start, True)]  # identically zero trajectory
    hits = _scan_sign_changes(traj.ts, traj.xs, traj.value, tol)
    slope_floor = 1e-9 * max(1.0, float(np.abs(traj.vs).max(initial=0.0)))
    zeros = []
    for t, exact in hits:
        degen = exact and abs(traj.slope(t)) < slope_floor
        zeros.append((t, degen))
    # tangential touches: extrema sitting on zero at resolution scale
    for t, _ in _scan_sign_changes(traj.ts, traj.vs, traj.slope, tol):
        if abs(traj.value(t)) < 1e-11 * amp:
            if not any(abs(t - z) <= 10 * tol for z, _ in zeros):
                zeros.append((t, True))
    zeros.sort()
    return zeros


def extremum_events(traj: Trajectory, tol: float = 1e-10) -> list[float]:
    """Interior stationary points located by slope sign change."""
    return [t for t, _ in _scan_sign_changes(traj.ts, traj.vs,
                                             traj.slope, tol)]


def _scan_events(traj: Trajectory, tol: float = 1e-10) -> list[Event]:
    evs = [Event("zero", t, degenerate=d) for t, d in zero_crossings(traj, tol)]
    evs.extend(Event("extremum", t) for t in extremum_events(traj, tol))
    evs.sort(key=lambda e: e.t)
    return evs


# ----------------------------------------------------------------------
# fundamental system and Wronskian
# ----------------------------------------------------------------------

def fundamental_system(p: PiecewiseSignal, tau: PiecewiseSignal, s: float,
                       horizon: float, step: float = 0.01
                       ) -> tuple[Trajectory, Trajectory]:
    """The pair (z, y): identically-zero history with unit jumps at s —
    z(s) = 1, z′(s) = 0 and y(s) = 0, y′(s) = 1."""
    zero_hist = PiecewiseSignal.constant(0.0)
    z = integrate(DelayProblem(p, tau, s, zero_hist, 1.0, 0.0),
                  horizon, step)
    y = integrate(DelayProblem(p, tau, s, zero_hist, 0.0, 1.0),
                  horizon, step)
    return z, y


def wronskian(z: Trajectory, y: Trajectory, t: float) -> float:
    """z(t)·y′(t) − z′(t)·y(t) from dense output (domain-checked)."""
    return z.value(t) * y.slope(t) - z.slope(t) * y.value(t)
