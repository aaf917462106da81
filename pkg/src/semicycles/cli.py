"""Command-line front end: subcommand dispatch and artifact emission.

Subcommands and their default output columns (CSV: ',' separator, '.'
decimal, one header row; floats printed with shortest round-trip repr):

* thresholds — ``--delta LO:HI:STEP`` alone gives ``delta,theta,psi,
  threshold`` at ρ = 1 (threshold = theta + psi); adding ``--rho`` gives
  the long-form grid ``delta,rho,theta,psi``.  Grids are cached on disk
  keyed by their parameters (see SEMICYCLE_CACHE_DIR below).
* simulate — integrates a JSON problem file; ``t,x,dx`` at the solver
  nodes, optional ``--svg`` polyline plot.
* classify — integrates and classifies; JSON with verdict, evidence
  triples, and the extracted semicycles.
* spectrum — characteristic roots for one constant delay;
  ``branch,re,im,residual,semicycle`` (semicycle blank for real roots).
* repro — closed-form benchmark vs. the integrator;
  ``t,closed_form,integrated,error``.
* harness — one randomized suite; the suite's row schema plus a summary
  line on stderr.  Exits 1 if any instance check failed.

Exit status: 0 on success, 1 on domain/numeric errors (stderr names the
originating operation), 2 on parse errors (malformed JSON reports line
and column; bad flags are rejected by argparse).  Outputs are written
atomically (temp file then rename) and are byte-identical across runs
for a fixed seed and configuration.  ``--jobs N`` fans sweep cells and
harness instances out to a process pool; assembly stays ordered.

The env var SEMICYCLE_CACHE_DIR overrides the threshold-table cache
location (default ``~/.cache/semicycles``).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import classify, find_zeros, semicycles
from .errors import DomainError, SemicycleError
from .harness import SUITE_NAMES, run_suite
from .integrator import integrate, problem_from_dict
from .repro import (
    EXAMPLE_NAMES,
    ExampleSpec,
    build_example_problem,
    closed_form,
    example_horizon,
)
from .spectral import char_roots
from .thresholds import psi, theta

__all__ = ["DEFAULT_SEED", "RunConfig", "emit_threshold_table", "main",
           "run"]

# Fixed default seed so unseeded invocations are reproducible; any other
# value must be passed explicitly via --seed.
DEFAULT_SEED = 1729

_SUBCOMMANDS = ("thresholds", "simulate", "classify", "spectrum", "repro",
                "harness")


@dataclass
class RunConfig:
    """One parsed invocation; only the fields the subcommand reads matter."""

    subcommand: str
    input_path: str | None = None
    output_path: str | None = None
    svg_path: str | None = None
    delta_range: tuple | None = None
    rho_range: tuple | None = None
    grid: int = 4096
    horizon: float = 30.0
    step: float = 0.01
    tol: float = 1e-10
    seed: int = DEFAULT_SEED
    delay: float = 1.0
    sign: int = 1
    branches: tuple = (0, 1, 2)
    example: str = "example2"
    epsilon: float = 0.0
    periods: int = 3
    growth_factor: float = 1.5
    suite: str = "margins"
    instances: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.subcommand not in _SUBCOMMANDS:
            raise DomainError(f"unknown subcommand {self.subcommand!r}")
        for name in ("grid", "horizon", "step", "tol", "delay",
                     "growth_factor", "jobs"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, "
                                  f"got {getattr(self, name)}")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be ≥ 0, got {self.epsilon}")
        if self.periods < 1:
            raise DomainError(f"periods must be ≥ 1, got {self.periods}")
        if self.instances is not None and self.instances < 1:
            raise DomainError(f"instances must be ≥ 1, got {self.instances}")
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")


# ----------------------------------------------------------------------
# small format helpers
# ----------------------------------------------------------------------

def _parse_range(text: str) -> tuple:
    """``LO:HI:STEP`` (or a bare value) → (lo, hi, step)."""
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return (v, v, 1.0)
    if len(parts) == 3:
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise DomainError(f"bad range {text!r}: need LO:HI:STEP with "
                              f"STEP > 0 and HI ≥ LO")
        return (lo, hi, step)
    raise DomainError(f"bad range {text!r}: expected LO:HI:STEP")


def _range_values(rng: tuple) -> tuple:
    lo, hi, step = rng
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # rounding keeps grid coordinates clean (0.1-steps print as 2.9,
    # not 2.9000000000000004) without disturbing determinism
    return tuple(round(lo + k * step, 12) for k in range(n))


def _parse_branches(text: str) -> tuple:
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise DomainError(f"bad branch range {text!r}")
        return tuple(range(lo, hi + 1))
    return (int(text),)


def _fmt(value) -> str:
    if isinstance(value, float):        # incl. numpy scalars
        return repr(float(value))
    return str(value)


def _csv(header: tuple, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(path: str | None, text: str) -> None:
    """Write to stdout, or atomically (temp + rename) to a file."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."),
                               prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_problem(path: str):
    with open(path) as fh:
        data = json.load(fh)
    return problem_from_dict(data)


def _originating_op(exc: BaseException) -> str | None:
    """Deepest public package function on the traceback, for diagnostics."""
    name = None
    tb = exc.__traceback__
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        fn = tb.tb_frame.f_code.co_name
        if (mod.startswith("semicycles.") and mod != __name__
                and not fn.startswith("_")):
            name = f"{mod.rsplit('.', 1)[1]}.{fn}"
        tb = tb.tb_next
    return name


# ----------------------------------------------------------------------
# threshold tables with a disk cache
# ----------------------------------------------------------------------

def _cache_dir() -> Path:
    override = os.environ.get("SEMICYCLE_CACHE_DIR")
    base = Path(override) if override else Path.home() / ".cache" / "semicycles"
    base.mkdir(parents=True, exist_ok=True)
    return base


def _psi_cell(task: tuple) -> float:
    rho, delta, grid_size = task
    return float(psi(rho, delta, grid_size=grid_size))


def _threshold_table(delta_values, rho_values, grid_size: int = 4096,
                     jobs: int = 1) -> dict:
    """ϑ(Δ) and Ψ(ρ, Δ) over a grid, cached on disk keyed by (deltas,
    rhos, grid).  A hit replays the stored values exactly: JSON
    round-trips doubles losslessly, so emission bytes match a fresh
    run."""
    deltas = tuple(float(d) for d in delta_values)
    rhos = tuple(float(r) for r in rho_values)
    if not deltas or not rhos:
        raise DomainError("threshold table needs nonempty delta and rho "
                          "ranges")
    key_src = json.dumps({"deltas": deltas, "rhos": rhos, "grid": grid_size})
    key = hashlib.sha256(key_src.encode()).hexdigest()[:16]
    cache_file = _cache_dir() / f"table-{key}.json"
    if cache_file.exists():
        return json.loads(cache_file.read_text())
    tasks = [(r, d, grid_size) for d in deltas for r in rhos]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            flat = list(pool.map(_psi_cell, tasks))
    else:
        flat = [_psi_cell(t) for t in tasks]
    table = {
        "deltas": list(deltas),
        "rhos": list(rhos),
        "grid": grid_size,
        "theta": [theta(d) for d in deltas],
        "psi": [flat[i * len(rhos):(i + 1) * len(rhos)]
                for i in range(len(deltas))],
    }
    _emit(str(cache_file), json.dumps(table))
    return table


def emit_threshold_table(delta_values, rho_values, out_path: str | None = None,
                         grid_size: int = 4096, jobs: int = 1) -> dict:
    """Materialize the grid as CSV columns delta,rho,theta,psi (stdout
    when out_path is None) and return the underlying table."""
    table = _threshold_table(delta_values, rho_values, grid_size, jobs)
    rows = [(d, r, table["theta"][i], table["psi"][i][j])
            for i, d in enumerate(table["deltas"])
            for j, r in enumerate(table["rhos"])]
    _emit(out_path, _csv(("delta", "rho", "theta", "psi"), rows))
    return table


# ----------------------------------------------------------------------
# subcommand bodies
# ----------------------------------------------------------------------

def _cmd_thresholds(cfg: RunConfig) -> int:
    deltas = _range_values(cfg.delta_range)
    if cfg.rho_range is not None:
        emit_threshold_table(deltas, _range_values(cfg.rho_range),
                             cfg.output_path, cfg.grid, cfg.jobs)
        return 0
    table = _threshold_table(deltas, (1.0,), cfg.grid, cfg.jobs)
    rows = [(d, table["theta"][i], table["psi"][i][0],
             table["theta"][i] + table["psi"][i][0])
            for i, d in enumerate(table["deltas"])]
    _emit(cfg.output_path, _csv(("delta", "theta", "psi", "threshold"), rows))
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    problem = _load_problem(cfg.input_path)
    traj = integrate(problem, cfg.horizon, step=cfg.step)
    rows = zip((float(t) for t in traj.ts), (float(x) for x in traj.xs),
               (float(v) for v in traj.vs))
    _emit(cfg.output_path, _csv(("t", "x", "dx"), rows))
    if cfg.svg_path is not None:
        _emit(cfg.svg_path, _svg_polyline(traj))
    return 0


def _cmd_classify(cfg: RunConfig) -> int:
    problem = _load_problem(cfg.input_path)
    traj = integrate(problem, cfg.horizon, step=cfg.step)
    outcome = classify(problem, traj, growth_factor=cfg.growth_factor,
                       tol=cfg.tol)
    try:
        arcs = semicycles(traj, find_zeros(traj, tol=cfg.tol), tol=cfg.tol)
    except SemicycleError:
        arcs = []
    doc = {
        "verdict": outcome.verdict,
        "evidence": [list(item) for item in outcome.evidence],
        "semicycles": [{"a": sc.a, "b": sc.b, "w": sc.w, "peak": sc.peak,
                        "sign": sc.sign} for sc in arcs],
    }
    _emit(cfg.output_path, json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_spectrum(cfg: RunConfig) -> int:
    roots = char_roots(cfg.delay, cfg.sign, cfg.branches)
    rows = []
    for root in roots:
        oscillates = abs(root.value.imag) > 1e-12 * (1.0 + abs(root.value))
        rows.append((root.branch, root.value.real, root.value.imag,
                     root.residual,
                     root.semicycle if oscillates else ""))
    _emit(cfg.output_path,
          _csv(("branch", "re", "im", "residual", "semicycle"), rows))
    return 0


def _cmd_repro(cfg: RunConfig) -> int:
    spec = ExampleSpec(cfg.example, cfg.epsilon, cfg.periods)
    problem = build_example_problem(spec)
    traj = integrate(problem, example_horizon(spec), step=cfg.step)
    rows = []
    for t, x in zip(traj.ts, traj.xs):
        ref = closed_form(spec, float(t))
        rows.append((float(t), ref, float(x), abs(float(x) - ref)))
    _emit(cfg.output_path, _csv(("t", "closed_form", "integrated", "error"),
                                rows))
    return 0


def _cmd_harness(cfg: RunConfig) -> int:
    report = run_suite(cfg.suite, seed=cfg.seed, count=cfg.instances,
                       jobs=cfg.jobs)
    _emit(cfg.output_path, _csv(report.columns, report.rows))
    print(f"suite={report.suite} seed={report.seed} "
          f"instances={report.instances} checked={report.checked} "
          f"failures={report.failures} worst={report.worst!r}",
          file=sys.stderr)
    if not report.passed:
        print(f"semicycles harness: {report.suite}: {report.failures} "
              f"failing instance checks", file=sys.stderr)
        return 1
    return 0


def _svg_polyline(traj, width: int = 800, height: int = 320,
                  margin: float = 40.0) -> str:
    """Direct path emission — one polyline, no plotting dependency."""
    ts = np.asarray(traj.ts, dtype=float)
    xs = np.asarray(traj.xs, dtype=float)
    lo, hi = float(xs.min()), float(xs.max())
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    lo, hi = lo - pad, hi + pad
    span_t = max(ts[-1] - ts[0], 1e-300)

    def sx(t):
        return margin + (t - ts[0]) / span_t * (width - 2 * margin)

    def sy(x):
        return height - margin - (x - lo) / (hi - lo) * (height - 2 * margin)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'viewBox="0 0 {width} {height}">']
    if lo < 0.0 < hi:
        parts.append(f'  <line x1="{margin:.3f}" y1="{sy(0.0):.3f}" '
                     f'x2="{width - margin:.3f}" y2="{sy(0.0):.3f}" '
                     f'stroke="#999" stroke-width="1"/>')
    d = "M" + " L".join(f"{sx(t):.3f} {sy(x):.3f}" for t, x in zip(ts, xs))
    parts.append(f'  <path d="{d}" fill="none" stroke="#1a6" '
                 f'stroke-width="1.5"/>')
    parts.append("</svg>\n")
    return "\n".join(parts)


# ----------------------------------------------------------------------
# dispatch
# ----------------------------------------------------------------------

_HANDLERS = {
    "thresholds": _cmd_thresholds,
    "simulate": _cmd_simulate,
    "classify": _cmd_classify,
    "spectrum": _cmd_spectrum,
    "repro": _cmd_repro,
    "harness": _cmd_harness,
}


def run(config: RunConfig) -> int:
    """Dispatch one configuration; returns the process exit status."""
    try:
        return _HANDLERS[config.subcommand](config)
    except json.JSONDecodeError as exc:
        print(f"semicycles {config.subcommand}: JSON parse error at line "
              f"{exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return 2
    except SemicycleError as exc:
        op = _originating_op(exc) or config.subcommand
        print(f"semicycles {config.subcommand}: {op}: {exc}",
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"semicycles {config.subcommand}: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semicycles",
        description="Oscillation thresholds, integration, classification, "
                    "spectra, benchmarks, and randomized verification for "
                    "second-order delay equations.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    t = sub.add_parser("thresholds", help="threshold table over a grid")
    t.add_argument("--delta", type=_parse_range, required=True,
                   metavar="LO:HI:STEP")
    t.add_argument("--rho", type=_parse_range, metavar="LO:HI:STEP")
    t.add_argument("--grid", type=int, default=4096)
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--out", dest="out")

    s = sub.add_parser("simulate", help="integrate a JSON problem file")
    s.add_argument("--problem", required=True, metavar="PATH")
    s.add_argument("--horizon", type=float, default=30.0)
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("--svg", metavar="PATH")
    s.add_argument("--out", dest="out")

    c = sub.add_parser("classify", help="verdict for a JSON problem file")
    c.add_argument("--problem", required=True, metavar="PATH")
    c.add_argument("--horizon", type=float, default=30.0)
    c.add_argument("--step", type=float, default=0.01)
    c.add_argument("--growth-factor", type=float, default=1.5)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--out", dest="out")

    p = sub.add_parser("spectrum", help="characteristic roots, one delay")
    p.add_argument("--delay", type=float, required=True)
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--branches", type=_parse_branches, default=(0, 1, 2),
                   metavar="N|A..B")
    p.add_argument("--out", dest="out")

    r = sub.add_parser("repro", help="closed-form benchmark vs. integrator")
    r.add_argument("example", choices=EXAMPLE_NAMES + ("sin",))
    r.add_argument("--epsilon", type=float, default=0.0)
    r.add_argument("--periods", type=int, default=3)
    r.add_argument("--step", type=float, default=0.005)
    r.add_argument("--out", dest="out")

    h = sub.add_parser("harness", help="one randomized verification suite")
    h.add_argument("suite", choices=SUITE_NAMES)
    h.add_argument("--seed", type=int, default=DEFAULT_SEED)
    h.add_argument("--instances", type=int)
    h.add_argument("--jobs", type=int, default=1)
    h.add_argument("--out", dest="out")

    return parser


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    kwargs = {"subcommand": ns.subcommand, "output_path": ns.out}
    if ns.subcommand == "thresholds":
        kwargs.update(delta_range=ns.delta, rho_range=ns.rho, grid=ns.grid,
                      jobs=ns.jobs)
    elif ns.subcommand == "simulate":
        kwargs.update(input_path=ns.problem, horizon=ns.horizon,
                      step=ns.step, svg_path=ns.svg)
    elif ns.subcommand == "classify":
        kwargs.update(input_path=ns.problem, horizon=ns.horizon,
                      step=ns.step, growth_factor=ns.growth_factor,
                      tol=ns.tol)
    elif ns.subcommand == "spectrum":
        kwargs.update(delay=ns.delay, sign=1 if ns.sign == "+" else -1,
                      branches=ns.branches)
    elif ns.subcommand == "repro":
        kwargs.update(example="sin_pi" if ns.example == "sin" else ns.example,
                      epsilon=ns.epsilon, periods=ns.periods, step=ns.step)
    elif ns.subcommand == "harness":
        kwargs.update(suite=ns.suite, seed=ns.seed, instances=ns.instances,
                      jobs=ns.jobs)
    try:
        config = RunConfig(**kwargs)
    except SemicycleError as exc:
        print(f"semicycles: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
