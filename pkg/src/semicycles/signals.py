"""Piecewise-polynomial time signals and uniform-grid functions.

A PiecewiseSignal carries the coefficient p(t), the delay τ(t), or an initial
history segment as polynomial pieces between explicit breakpoints, with
constant extensions on both tails. Keeping breakpoints explicit is what lets
the integrator align steps to discontinuities exactly instead of smearing
them, and it makes essential-supremum queries exact (segment-wise polynomial
extrema) rather than sampled.

Conventions
-----------
* Segment i covers [breakpoints[i], breakpoints[i+1]) and stores coefficients
  (c0, c1, ...) in the local variable u = t − breakpoints[i], lowest degree
  first: value = c0 + c1·u + c2·u² + ...
* Evaluation is right-continuous at breakpoints. Below the first breakpoint
  the signal equals ``left_extension``; at and above the last breakpoint it
  equals ``right_extension``.
* The essential supremum of a piecewise polynomial ignores the single points
  where the right-continuity choice differs from a one-sided limit, so it is
  computed from segment maxima, never from breakpoint evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "PiecewiseSignal",
    "GridFunction",
    "eval_signal",
    "esssup_abs",
    "signal_range",
    "signal_from_dict",
    "signal_to_dict",
]


def _poly_eval(coeffs, u: float) -> float:
    """Horner evaluation of (c0, c1, ...) at local coordinate u."""
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


def _poly_derivative(coeffs):
    return tuple(j * coeffs[j] for j in range(1, len(coeffs)))


def _trim_for_roots(coeffs) -> list:
    """Drop leading coefficients that are zero — or so small relative to
    the rest that the companion-matrix ratios would overflow (a subnormal
    lead puts its root at ~1e300, outside any finite window anyway)."""
    out = list(coeffs)
    while len(out) > 1:
        lead = abs(out[-1])
        if lead == 0.0 or max(abs(c) for c in out[:-1]) > lead * 1e306:
            out.pop()
        else:
            break
    return out


def _poly_extrema_values(coeffs, u_lo: float, u_hi: float) -> list[float]:
    """Values of the polynomial at the endpoints and interior critical points
    of [u_lo, u_hi] (local coordinates)."""
    vals = [_poly_eval(coeffs, u_lo), _poly_eval(coeffs, u_hi)]
    deriv = _poly_derivative(coeffs)
    if len(deriv) >= 2:  # degree ≥ 2 ⇒ nontrivial critical points
        # numpy wants highest degree first and nonzero leading coefficient
        trimmed = _trim_for_roots(deriv)
        if len(trimmed) >= 2:
            roots = np.roots(trimmed[::-1])
            scale = max(1.0, abs(u_lo), abs(u_hi))
            for r in roots:
                if abs(r.imag) < 1e-9 * scale and u_lo < r.real < u_hi:
                    vals.append(_poly_eval(coeffs, float(r.real)))
    return vals


@dataclass(frozen=True)
class PiecewiseSignal:
    """A real function of time: polynomial segments + constant tails.

    Parameters
    ----------
    breakpoints : tuple of float, strictly increasing, at least one entry
    segments : tuple of coefficient tuples, one per interior interval
        (``len(segments) == len(breakpoints) - 1``)
    left_extension : value for t < breakpoints[0]
    right_extension : value for t ≥ breakpoints[-1]
    """

    breakpoints: tuple
    segments: tuple
    left_extension: float
    right_extension: float

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        segs = tuple(tuple(float(c) for c in seg) for seg in self.segments)
        if len(bps) < 1:
            raise DomainError("signal needs at least one breakpoint")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        if len(segs) != len(bps) - 1:
            raise DomainError(
                f"expected {len(bps) - 1} segments for {len(bps)} "
                f"breakpoints, got {len(segs)}")
        if any(len(seg) == 0 for seg in segs):
            raise DomainError("empty coefficient list in segment")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "left_extension", float(self.left_extension))
        object.__setattr__(self, "right_extension",
                           float(self.right_extension))

    # -- constructors ---------------------------------------------------

    @staticmethod
    def constant(value: float) -> "PiecewiseSignal":
        return PiecewiseSignal((0.0,), (), value, value)

    # -- evaluation -----------------------------------------------------

    def segment_index(self, t: float) -> int:
        """Index of the segment whose half-open interval contains t.

        Returns −1 below the first breakpoint and ``len(segments)`` at or
        above the last (the extension zones).
        """
        bps = self.breakpoints
        if t < bps[0]:
            return -1
        if t >= bps[-1]:
            return len(self.segments)
        # rightmost breakpoint ≤ t
        return int(np.searchsorted(bps, t, side="right")) - 1

    def eval_in_segment(self, index: int, t: float) -> float:
        """Evaluate using a specific segment's polynomial (or an extension),
        regardless of which interval t falls in.

        The integrator uses this to take one-sided limits: a step that ends
        exactly on a breakpoint must read its right endpoint from the segment
        the step lives in, not from the next one.
        """
        if index < 0:
            return self.left_extension
        if index >= len(self.segments):
            return self.right_extension
        return _poly_eval(self.segments[index], t - self.breakpoints[index])

    def __call__(self, t: float) -> float:
        return self.eval_in_segment(self.segment_index(t), t)

    def eval_left(self, t: float) -> float:
        """Left-limit evaluation (used for history values at the start time)."""
        bps = self.breakpoints
        if t <= bps[0]:
            return self.left_extension
        if t > bps[-1]:
            return self.right_extension
        idx = int(np.searchsorted(bps, t, side="left")) - 1
        return self.eval_in_segment(idx, t)

    # -- global shape queries --------------------------------------------

    def is_constant(self) -> bool:
        vals = {self.left_extension, self.right_extension}
        for seg in self.segments:
            if any(c != 0.0 for c in seg[1:]):
                return False
            vals.add(seg[0])
        return len(vals) == 1


def eval_signal(sig: PiecewiseSignal, t: float) -> float:
    """Value of the signal at time t (right-continuous at breakpoints)."""
    return sig(t)


def signal_range(sig: PiecewiseSignal, lo: float, hi: float) -> tuple:
    """(inf, sup) of the signal over [lo, hi], extensions included where the
    interval sticks out past the breakpoints; single points at breakpoints
    are ignored (essential range of a piecewise polynomial)."""
    if math.isnan(lo) or math.isnan(hi) or lo > hi:
        raise DomainError(f"empty or invalid interval [{lo}, {hi}]")
    bps = sig.breakpoints
    if lo == hi:
        v = sig(lo)
        return (v, v)
    cands: list[float] = []
    if lo < bps[0]:
        cands.append(sig.left_extension)
    if hi > bps[-1]:
        cands.append(sig.right_extension)
    for i, seg in enumerate(sig.segments):
        s_lo, s_hi = max(lo, bps[i]), min(hi, bps[i + 1])
        if s_lo < s_hi:
            cands.extend(_poly_extrema_values(seg, s_lo - bps[i],
                                              s_hi - bps[i]))
    if not cands:  # interval is a sliver between the same pair of breakpoints
        v = sig(0.5 * (lo + hi))
        cands.append(v)
    return (min(cands), max(cands))


def esssup_abs(sig: PiecewiseSignal, interval) -> float:
    """Essential supremum of |signal| over a closed interval.

    Exact for piecewise polynomials: per-segment endpoint and critical-point
    values plus the tail extensions. Empty intervals are a domain error.
    """
    lo, hi = float(interval[0]), float(interval[1])
    r_lo, r_hi = signal_range(sig, lo, hi)
    return max(abs(r_lo), abs(r_hi))


# ----------------------------------------------------------------------
# JSON encoding (the problem-file schema)
# ----------------------------------------------------------------------

def signal_to_dict(sig: PiecewiseSignal) -> dict:
    return {
        "breakpoints": list(sig.breakpoints),
        "segments": [list(seg) for seg in sig.segments],
        "left": sig.left_extension,
        "right": sig.right_extension,
    }


def signal_from_dict(data: dict) -> PiecewiseSignal:
    try:
        return PiecewiseSignal(
            tuple(data["breakpoints"]),
            tuple(tuple(seg) for seg in data["segments"]),
            float(data["left"]),
            float(data["right"]),
        )
    except KeyError as exc:
        raise DomainError(f"signal object missing key {exc}") from exc


# ----------------------------------------------------------------------
# uniform-grid carrier
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridFunction:
    """Samples on a uniform grid over [lo, hi]; linear interpolation between
    samples, constant extension outside."""

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise DomainError("grid function needs ≥ 2 samples")
        if not self.hi > self.lo:
            raise DomainError("grid domain must have positive length")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.values.size - 1)

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.values.size)

    def __call__(self, t):
        return np.interp(t, self.grid(), self.values)
