"""Monte Carlo phase-transition harness: STFT versus plain Fourier recovery.

Each trial draws S = floor(1/(2 delta)) atoms at t_l = 2 l delta + r_l with
r_l ~ U[0, delta], l = 0..S-1, and amplitudes whose real and imaginary parts
are U[0, 1000].  A trial succeeds when the recovered support has the right
cardinality and ||T_hat - T||_2 / ||T||_2 <= 1e-3 (wrapped residuals).

Per-trial seeds come from numpy's SeedSequence with
entropy = master_seed and spawn_key = (delta index, trial index, mode index),
so every record is reproducible on its own and independent of scheduling.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fileio import atomic_write_text
from .measures import DiscreteMeasure, ParameterError, WindowParams, min_separation, wrapped_distance
from .solver import SolverFailure, SolverOptions, recover, recover_fourier
from .stft import fourier_moments, stft_coefficients

log = logging.getLogger(__name__)

MODES = ("stft", "fourier")
SUCCESS_TOLERANCE = 1e-3
TRIAL_HEADER = ["delta", "mode", "seed", "success", "support_error", "atoms", "wall_time_s"]
AGGREGATE_HEADER = ["delta", "mode", "trials", "successes", "rate"]


@dataclass(frozen=True)
class SweepConfig:
    delta_grid: tuple
    trials_per_point: int = 100
    f_c: int = 50
    N: int | None = None  # None: smallest N with g_N/g_0 <= 1e-6
    sigma: float | None = None  # None: 1/(4 f_c)
    master_seed: int = 0
    modes: tuple = MODES
    record_time: bool = False
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        grid = tuple(float(d) for d in self.delta_grid)
        if not grid:
            raise ParameterError("delta grid is empty")
        if any(not (d > 0) for d in grid):
            raise ParameterError("delta values must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("delta grid must be strictly increasing")
        if self.trials_per_point < 1:
            raise ParameterError("trials_per_point must be >= 1")
        modes = tuple(self.modes)
        if not modes or any(m not in MODES for m in modes) or len(set(modes)) != len(modes):
            raise ParameterError(f"modes must be a non-empty subset of {MODES}")
        object.__setattr__(self, "delta_grid", grid)
        object.__setattr__(self, "modes", modes)
        self.window  # validates the window parameters

    @property
    def window(self) -> WindowParams:
        sigma = self.sigma if self.sigma is not None else 1.0 / (4 * self.f_c)
        if self.N is None:
            return WindowParams.strict_preset(self.f_c, sigma)
        return WindowParams(sigma, self.f_c, self.N)

    @classmethod
    def paper_figure(cls, trials_per_point: int = 100, master_seed: int = 0, **kw) -> "SweepConfig":
        """f_c = 50, N = 50, sigma = 1/200 on the grid delta f_c = 1.0, 1.2, ..., 2.4."""
        grid = tuple(round((1.0 + 0.2 * i) / 50, 12) for i in range(8))
        return cls(grid, trials_per_point, 50, 50, 1.0 / 200, master_seed, **kw)


@dataclass(frozen=True)
class TrialRecord:
    delta: float
    mode: str
    seed: int
    success: bool
    support_error: float
    atoms: int
    wall_time: float = 0.0
    tag: str = ""

    def row(self) -> list:
        return [repr(self.delta), self.mode, str(self.seed), "1" if self.success else "0",
                repr(float(self.support_error)), str(self.atoms), repr(float(self.wall_time))]


def sample_instance(delta: float, rng: np.random.Generator) -> DiscreteMeasure:
    if not delta > 0:
        raise ParameterError("delta must be positive")
    S = int(math.floor(1.0 / (2 * delta)))
    if S < 1:
        raise ParameterError(f"delta = {delta} leaves no room for an atom")
    ell = np.arange(S)
    t = 2 * ell * delta + rng.uniform(0.0, delta, S)
    a = rng.uniform(0.0, 1000.0, S) + 1j * rng.uniform(0.0, 1000.0, S)
    # a zero amplitude has probability zero but would break the measure invariants
    a[a == 0] = 1e-300
    mu = DiscreteMeasure(t, a)
    if S > 1 and min_separation(mu.support) < delta * (1 - 1e-12):
        raise AssertionError("sampled instance violates the separation constraint")
    return mu


def support_error(estimate: Sequence[float], truth: Sequence[float]) -> float:
    """||T_hat - T||_2 / ||T||_2 with wrapped residuals; inf on cardinality mismatch.

    Both supports are sorted; the estimate is aligned to the truth by the cyclic
    shift that minimizes the residual, so an atom near 1 can match one near 0.
    """
    est = np.sort(np.asarray(estimate, dtype=float))
    tru = np.sort(np.asarray(truth, dtype=float))
    if est.size != tru.size:
        return math.inf
    if tru.size == 0:
        return 0.0
    norm = float(np.linalg.norm(tru))
    best = math.inf
    for k in range(est.size):
        res = wrapped_distance(np.roll(est, k), tru)
        best = min(best, float(np.linalg.norm(res)))
    if norm == 0:
        return 0.0 if best == 0 else math.inf
    return best / norm


def trial_seed(master_seed: int, delta_index: int, trial_index: int, mode: str) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(delta_index, trial_index, MODES.index(mode)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_trial(delta: float, mode: str, config: SweepConfig, seed: int) -> TrialRecord:
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    mu = sample_instance(delta, rng)
    start = time.perf_counter()
    tag = ""
    try:
        if mode == "stft":
            result = recover(stft_coefficients(mu, config.window), config.solver)
        else:
            result = recover_fourier(fourier_moments(mu, config.f_c), config.solver)
        err = support_error(result.measure.support, mu.support)
        if not result.reliable:
            tag = "unreliable"
    except (SolverFailure, np.linalg.LinAlgError, ValueError) as exc:
        err = math.inf
        tag = f"{type(exc).__name__}: {exc}"
        log.info("trial delta=%g mode=%s seed=%d failed: %s", delta, mode, seed, tag)
    elapsed = time.perf_counter() - start if config.record_time else 0.0
    success = bool(math.isfinite(err) and err <= SUCCESS_TOLERANCE)
    return TrialRecord(float(delta), mode, int(seed), success, float(err), len(mu), elapsed, tag)


def _task(args):
    delta, mode, config, seed = args
    return run_trial(delta, mode, config, seed)


def _tasks(config: SweepConfig):
    for i, delta in enumerate(config.delta_grid):
        for mode in config.modes:
            for j in range(config.trials_per_point):
                yield delta, mode, config, trial_seed(config.master_seed, i, j, mode)


def aggregate(records: Iterable[TrialRecord]) -> list[dict]:
    table: dict = {}
    for r in records:
        entry = table.setdefault((r.delta, r.mode), [0, 0])
        entry[0] += 1
        entry[1] += int(r.success)
    rows = []
    for (delta, mode), (n, k) in sorted(table.items(), key=lambda kv: (kv[0][0], MODES.index(kv[0][1]))):
        rows.append({"delta": delta, "mode": mode, "trials": n, "successes": k, "rate": k / n})
    return rows


def trials_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRIAL_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def aggregate_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGGREGATE_HEADER)
    for r in rows:
        w.writerow([repr(r["delta"]), r["mode"], r["trials"], r["successes"], repr(r["rate"])])
    return buf.getvalue()


def run_sweep(config: SweepConfig, trials_path=None, aggregate_path=None, workers: int = 1):
    """Run every (delta, mode, trial) and return (records, aggregate rows).

    Records come back in task order whatever the worker count.  With
    ``trials_path`` set, finished records are appended to ``<path>.partial`` as
    they arrive; the final CSVs are written atomically at the end.
    """
    tasks = list(_tasks(config))
    partial = None
    if trials_path is not None:
        partial = Path(str(trials_path) + ".partial")
        partial.parent.mkdir(parents=True, exist_ok=True)
        partial.write_text(",".join(TRIAL_HEADER) + "\n")
    records: list[TrialRecord] = []

    def sink(rec):
        records.append(rec)
        if partial is not None:
            with partial.open("a") as fh:
                fh.write(",".join(rec.row()) + "\n")

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))):
                sink(rec)
    else:
        for task in tasks:
            sink(_task(task))
    rows = aggregate(records)
    if trials_path is not None:
        atomic_write_text(trials_path, trials_csv(records))
        os.unlink(partial)
    if aggregate_path is not None:
        atomic_write_text(aggregate_path, aggregate_csv(rows))
    return records, rows


# ---------------------------------------------------------------------------
# SVG plot

_COLORS = {"stft": "#1f77b4", "fourier": "#d62728"}


def emit_plot(rows: Sequence[dict], output_path, f_c: int, width: int = 640, height: int = 420) -> Path:
    """Success rate against delta * f_c, one polyline per mode, verticals at 1 and 2."""
    modes = [m for m in MODES if any(r["mode"] == m for r in rows)]
    if not modes:
        raise ParameterError("no aggregate rows to plot")
    xs = sorted({r["delta"] * f_c for r in rows})
    x0, x1 = xs[0], xs[-1]
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    left, right, top, bottom = 60, width - 20, 20, height - 50

    def X(v):
        return left + (v - x0) / (x1 - x0) * (right - left)

    def Y(v):
        return bottom - v * (bottom - top)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
           'fill="none" stroke="black"/>']
    for v in (0.0, 0.5, 1.0):
        out.append(f'<text x="{left - 8}" y="{Y(v) + 4:.2f}" font-size="12" '
                   f'text-anchor="end">{v:g}</text>')
    for v in xs:
        out.append(f'<text x="{X(v):.2f}" y="{bottom + 16}" font-size="11" '
                   f'text-anchor="middle">{v:.2f}</text>')
    for ref in (1.0, 2.0):
        if x0 <= ref <= x1:
            out.append(f'<line x1="{X(ref):.2f}" y1="{top}" x2="{X(ref):.2f}" y2="{bottom}" '
                       'stroke="gray" stroke-dasharray="4 3"/>')
    for k, mode in enumerate(modes):
        pts = sorted((r["delta"] * f_c, r["rate"]) for r in rows if r["mode"] == mode)
        coords = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{_COLORS[mode]}" '
                   'stroke-width="2"/>')
        ly = top + 16 + 18 * k
        out.append(f'<line x1="{right - 110}" y1="{ly}" x2="{right - 85}" y2="{ly}" '
                   f'stroke="{_COLORS[mode]}" stroke-width="2"/>')
        out.append(f'<text x="{right - 80}" y="{ly + 4}" font-size="12">{mode}</text>')
    out.append(f'<text x="{(left + right) / 2}" y="{height - 12}" font-size="13" '
               'text-anchor="middle">delta * f_c</text>')
    out.append(f'<text x="16" y="{(top + bottom) / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 16 {(top + bottom) / 2})">success rate</text>')
    out.append("</svg>")
    return atomic_write_text(output_path, "\n".join(out) + "\n")

