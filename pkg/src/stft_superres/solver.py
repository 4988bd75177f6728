"""Total-variation recovery of torus measures through the dual program.

The dual is

    maximize Re <x, u>   subject to   sup_t |p_x(t)| <= 1,

over trigonometric polynomials p_x(t) = sum_{|m|<=M} x[m] exp(2 pi i m t), where
u holds the Fourier moments of the unknown measure.  The sup-norm constraint is
imposed on a uniform grid, refined locally around the peaks of |p_x| and
finally enforced exactly by rescaling with the measured supremum.  The gridded
program is solved with a log-barrier interior-point method whose Newton
systems are assembled from FFT-computed Toeplitz and Hankel moment sequences.

Support points are the local maxima of |p|^2 that reach 1, refined by Newton's
method; amplitudes follow from least squares on the moments.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
import scipy.linalg
import scipy.optimize
from numpy.lib.stride_tricks import sliding_window_view

from .measures import TORUS, DiscreteMeasure, wrapped_distance
from .stft import MomentVector, StftMeasurements, TrigPoly, reduce_measurements

log = logging.getLogger(__name__)


class SolverFailure(RuntimeError):
    """The interior-point iteration did not converge."""

    def __init__(self, message, poly=None, residuals=None):
        super().__init__(message)
        self.poly = poly
        self.residuals = residuals or {}


class DegenerateSupportError(ValueError):
    """The amplitude least-squares system is rank deficient."""


@dataclass(frozen=True)
class SolverOptions:
    grid_oversampling: int = 128
    max_iterations: int = 400
    convergence_tolerance: float = 1e-8
    selection_threshold: float = 1e-3
    newton_max_steps: int = 50
    refine_rounds: int = 2
    refine_tolerance: float = 1e-10
    barrier_growth: float = 50.0
    discretization_factor: float = 10.0
    polish_support: bool = True
    flatness_fraction: float = 0.10
    prune_ratio: float = 1e-6
    gap_flag: float = 1e-3

    def __post_init__(self):
        if self.grid_oversampling < 4:
            raise ValueError("grid_oversampling must be >= 4")
        for name in ("convergence_tolerance", "selection_threshold", "refine_tolerance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1 or self.newton_max_steps < 1:
            raise ValueError("iteration limits must be positive")
        if self.barrier_growth <= 1:
            raise ValueError("barrier_growth must exceed 1")


@dataclass
class DualDiagnostics:
    iterations: int = 0
    refine_rounds: int = 0
    grid_size: int = 0
    extra_points: int = 0
    sup_before_rescale: float = 0.0
    barrier_gap: float = 0.0


@dataclass
class SupportEstimate:
    points: np.ndarray
    low_confidence: bool = False
    degenerate: bool = False


@dataclass
class RecoveryResult:
    measure: DiscreteMeasure
    dual_poly: TrigPoly
    dual_objective: float
    primal_tv: float
    duality_gap: float
    support_residuals: np.ndarray
    sign_residual: float
    fit_residual: float
    reliable: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        atoms = [{"t": float(t), "re": float(a.real), "im": float(a.imag)}
                 for t, a in zip(self.measure.support, self.measure.amplitudes)]
        return {
            "atoms": atoms,
            "dual_objective": self.dual_objective,
            "primal_tv": self.primal_tv,
            "duality_gap": self.duality_gap,
            "diagnostics": {
                **self.diagnostics,
                "sign_residual": self.sign_residual,
                "fit_residual": self.fit_residual,
                "support_residuals": [float(r) for r in self.support_residuals],
                "reliable": self.reliable,
            },
        }


# ---------------------------------------------------------------------------
# constraint set: uniform grid plus an arbitrary list of extra points


class _ConstraintSet:
    def __init__(self, degree: int, size: int, extra=()):
        self.M = degree
        self.L = size
        self.extra = np.asarray(extra, dtype=float)
        M = degree
        self._m = np.arange(-M, M + 1)
        self._d = np.arange(-2 * M, 2 * M + 1)
        if self.extra.size:
            self._Ex = np.exp(2j * np.pi * np.multiply.outer(self.extra, self._m))
            self._Vx = np.exp(2j * np.pi * np.multiply.outer(self.extra, self._d))

    @property
    def count(self) -> int:
        return self.L + self.extra.size

    def values(self, x: np.ndarray) -> np.ndarray:
        M, L = self.M, self.L
        buf = np.zeros(L, dtype=complex)
        buf[:M + 1] = x[M:]
        if M:
            buf[-M:] = x[:M]
        p = sfft.ifft(buf, norm="forward")
        if self.extra.size:
            p = np.concatenate([p, self._Ex @ x])
        return p

    def adjoint(self, v: np.ndarray) -> np.ndarray:
        """sum_j v_j exp(-2 pi i m t_j) for |m| <= M."""
        L = self.L
        out = sfft.fft(v[:L])[self._m % L]
        if self.extra.size:
            out = out + v[L:] @ self._Ex.conj()
        return out

    def _plus_real(self, c: np.ndarray) -> np.ndarray:
        """sum_j c_j exp(+2 pi i d t_j), |d| <= 2M, for real weights c."""
        L, d = self.L, self._d
        r = sfft.rfft(c[:L])
        pos = r[np.abs(d)]
        out = np.where(d >= 0, np.conj(pos), pos)
        if self.extra.size:
            out = out + c[L:] @ self._Vx
        return out

    def _minus(self, c: np.ndarray) -> np.ndarray:
        L = self.L
        out = sfft.fft(c[:L])[self._d % L]
        if self.extra.size:
            out = out + c[L:] @ self._Vx.conj()
        return out

    def hessian(self, p: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Real Hessian of -sum log(1 - |p_j|^2) in coordinates (Re x, Im x)."""
        n = 2 * self.M + 1
        w2 = 4 * w * w
        seq_t = 2 * self._plus_real(w) + 0.5 * self._plus_real(w2 * (p.real ** 2 + p.imag ** 2))
        seq_h = 0.5 * self._minus(w2 * p * p)
        # entry (i, k) of the Toeplitz part is seq_t[i - k + 2M], of the Hankel part seq_h[i + k]
        T = sliding_window_view(seq_t[::-1], n)[::-1]
        Hk = sliding_window_view(seq_h, n)
        H = np.empty((2 * n, 2 * n))
        H[:n, :n] = T.real + Hk.real
        H[n:, n:] = T.real - Hk.real
        H[:n, n:] = T.imag + Hk.imag
        H[n:, :n] = Hk.imag - T.imag
        return H


def _max_step(p: np.ndarray, dp: np.ndarray) -> float:
    """Largest a with |p + a dp| < 1 at every constraint point."""
    a2 = np.abs(dp) ** 2
    b = np.real(np.conj(p) * dp)
    c = 1 - np.abs(p) ** 2
    mask = a2 > 0
    if not mask.any():
        return math.inf
    roots = (-b[mask] + np.sqrt(b[mask] ** 2 + a2[mask] * c[mask])) / a2[mask]
    return float(roots.min())


def _factor(H: np.ndarray, refinements: int = 2, cholesky: bool = True):
    """Return (solver for H z = r with iterative refinement, whether Cholesky worked).

    H is symmetrically scaled to unit diagonal first; its diagonal spans many
    orders of magnitude late on the central path.
    """
    d = np.sqrt(np.abs(np.diag(H)))
    d[d == 0] = 1.0
    Hs = H / d[:, None] / d[None, :]
    try:
        if not cholesky:
            raise np.linalg.LinAlgError
        fac = scipy.linalg.cho_factor(Hs, check_finite=False)

        def base(r):
            return scipy.linalg.cho_solve(fac, r / d, check_finite=False) / d
    except np.linalg.LinAlgError:
        cholesky = False
        # near the end of the path rounding can make H numerically indefinite
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(Hs, check_finite=False)

        def base(r):
            return scipy.linalg.lu_solve(lu, r / d, check_finite=False) / d

    def solve(rhs):
        z = base(rhs)
        norm = np.linalg.norm(rhs)
        for _ in range(refinements):
            if not np.all(np.isfinite(z)):
                break
            r = rhs - H @ z
            if np.linalg.norm(r) <= 1e-12 * norm:
                break
            z = z + base(r)
        return z

    return solve, cholesky


def _barrier(cons: _ConstraintSet, u: np.ndarray, x: np.ndarray, t: float,
             options: SolverOptions, budget: int):
    """Follow the central path from (x, t) until the estimated duality gap is small.

    At a central point the grid measure nu_j = 2 w_j p_j / t reproduces u exactly
    and the gap equals sum_j 2 |p_j| / (t (1 + |p_j|)).  Each increase of t is
    preceded by a step along the path tangent dx/dt = H^-1 u.

    The path is also stopped once the gap is below the discretization error,
    i.e. the objective lost by rescaling with the true sup-norm.  Past that
    point the gridded optimum only exploits the overshoot between constraint
    points, and because the continuous dual optimum is usually not unique this
    drives p towards high-frequency maximizers with spurious unit-modulus peaks.
    Returns (x, t, iterations, gap, sup).
    """
    n = u.size
    u_real = np.concatenate([u.real, u.imag])
    iters = 0

    def value(xx, pp):
        s = 1 - np.abs(pp) ** 2
        if np.any(s <= 0):
            return math.inf
        return -t * np.real(np.vdot(u, xx)) - np.sum(np.log(s))

    p = cons.values(x)
    cholesky = True
    while True:
        solve = None
        for _ in range(options.newton_max_steps):
            if iters >= budget:
                raise SolverFailure("interior-point iteration budget exhausted",
                                    TrigPoly(cons.M, x), {"barrier_t": t, "iterations": iters})
            iters += 1
            w = 1 / (1 - np.abs(p) ** 2)
            grad_c = -t * u + 2 * cons.adjoint(w * p)
            grad = np.concatenate([grad_c.real, grad_c.imag])
            H = cons.hessian(p, w)
            # once H has lost definiteness to rounding it stays that way along the path
            solve, cholesky = _factor(H, cholesky=cholesky)
            dz = solve(-grad)
            decrement = float(-grad @ dz) if np.all(np.isfinite(dz)) else -1.0
            if decrement < 0:
                dz = -grad / np.max(np.diag(H))
                decrement = float(-grad @ dz)
            if decrement / 2 <= 1e-6:
                break
            dx = dz[:n] + 1j * dz[n:]
            dp = cons.values(dx)
            step = min(1.0, 0.99 * _max_step(p, dp))
            f0 = value(x, p)
            while step > 1e-14:
                if value(x + step * dx, p + step * dp) <= f0 - 0.25 * step * decrement:
                    break
                step *= 0.5
            else:
                break
            p_new = cons.values(x + step * dx)
            if not np.all(np.abs(p_new) < 1):
                # the step was accepted on the extrapolated values only
                break
            x = x + step * dx
            p = p_new
            if step < 1e-6 or (decrement < 1e-3 and step < 0.5):
                # rounding in the Newton system limits further centering
                break
        ap = np.abs(p)
        gap = float(np.sum(2 * ap / (1 + ap))) / t
        obj = max(float(np.real(np.vdot(u, x))), 1e-300)
        if gap <= options.convergence_tolerance * max(obj, 1.0):
            return x, t, iters, gap, sup_norm(TrigPoly(cons.M, x), 8 * cons.L)
        sup = sup_norm(TrigPoly(cons.M, x), 8 * cons.L)
        if gap <= options.discretization_factor * (sup - 1) * obj:
            return x, t, iters, gap, sup
        t_new = t * options.barrier_growth
        v = solve(u_real) * (t_new - t) if solve is not None else None
        if v is not None and np.all(np.isfinite(v)):
            dx = v[:n] + 1j * v[n:]
            dp = cons.values(dx)
            step = min(1.0, 0.9 * _max_step(p, dp))
            p_new = cons.values(x + step * dx)
            if np.all(np.abs(p_new) < 1):
                x = x + step * dx
                p = p_new
        t = t_new


def _local_maxima(q: np.ndarray) -> np.ndarray:
    left = np.roll(q, 1)
    right = np.roll(q, -1)
    return np.flatnonzero((q >= left) & (q > right))


def _newton_peaks(poly: TrigPoly, t0: np.ndarray, max_steps: int, radius: float):
    """Refine local maxima of |p|^2 started at t0 by Newton's method on q'.

    Points where q'' >= 0 or that leave the ``radius`` neighbourhood fall back
    to their starting value and are flagged. Returns (t, converged).
    """
    t0 = np.asarray(t0, dtype=float)
    t = t0.copy()
    ok = np.zeros(t.size, dtype=bool)
    failed = np.zeros(t.size, dtype=bool)
    w = 2j * np.pi * poly.frequencies
    x0, x1, x2 = poly.coeffs, poly.coeffs * w, poly.coeffs * w * w
    for _ in range(max_steps):
        act = np.flatnonzero(~ok & ~failed)
        if act.size == 0:
            break
        for chunk in np.array_split(act, max(1, act.size // 256)):
            E = np.exp(np.multiply.outer(t[chunk], w))
            p, d1, d2 = E @ x0, E @ x1, E @ x2
            q1 = 2 * np.real(np.conj(p) * d1)
            q2 = 2 * (np.abs(d1) ** 2 + np.real(np.conj(p) * d2))
            bad = q2 >= 0
            step = np.where(bad, 0.0, q1 / np.where(bad, 1.0, q2))
            t[chunk] -= step
            bad |= wrapped_distance(t[chunk], t0[chunk]) > radius
            failed[chunk] |= bad
            ok[chunk] |= ~bad & (np.abs(step) < 1e-15)
    t[failed] = t0[failed]
    if not ok.all():
        # out of steps: accept points whose last update was already tiny
        rest = ~ok & ~failed
        if rest.any():
            E = np.exp(np.multiply.outer(t[rest], w))
            p, d1, d2 = E @ x0, E @ x1, E @ x2
            q1 = 2 * np.real(np.conj(p) * d1)
            q2 = 2 * (np.abs(d1) ** 2 + np.real(np.conj(p) * d2))
            ok[rest] = np.abs(q1 / q2) < 1e-11
    return t % 1.0, ok


def _peaks(poly: TrigPoly, grid_size: int, threshold: float, max_steps: int):
    """Newton-refined local maxima of |p|^2 with grid value above ``threshold``."""
    q = np.abs(poly.on_uniform_grid(grid_size)) ** 2
    idx = _local_maxima(q)
    idx = idx[q[idx] >= threshold]
    pts, ok = _newton_peaks(poly, idx / grid_size, max_steps, 1.0 / grid_size)
    return pts, ok, q


def sup_norm(poly: TrigPoly, grid_size: int | None = None, max_steps: int = 50) -> float:
    """sup_t |p(t)| from a dense grid and Newton-refined local maxima.

    Only maxima within 10% of the grid maximum are refined; a grid point
    misses a nearby peak of |p| by far less than that.
    """
    if grid_size is None:
        grid_size = 1024 * (2 * poly.degree + 1)
    size = sfft.next_fast_len(max(grid_size, 2 * poly.degree + 1, 64))
    q = np.abs(poly.on_uniform_grid(size)) ** 2
    best = float(q.max()) if q.size else 0.0
    if best == 0.0:
        return 0.0
    idx = _local_maxima(q)
    idx = idx[q[idx] >= 0.81 * best]
    if idx.size:
        pts, _ = _newton_peaks(poly, idx / size, max_steps, 1.0 / size)
        best = max(best, float(np.max(np.abs(poly(pts)) ** 2)))
    return math.sqrt(best)


def solve_dual_detailed(u: MomentVector, options: SolverOptions = SolverOptions()):
    """Return (poly, objective, diagnostics) for the dual program."""
    M = u.cutoff
    diag = DualDiagnostics()
    scale = float(np.max(np.abs(u.moments))) if u.moments.size else 0.0
    if scale == 0.0:
        return TrigPoly(M, np.zeros(2 * M + 1, dtype=complex)), 0.0, diag
    un = u.moments / scale
    L = sfft.next_fast_len(options.grid_oversampling * (2 * M + 1))
    cons = _ConstraintSet(M, L)
    diag.grid_size = L
    x = np.zeros(2 * M + 1, dtype=complex)
    budget = options.max_iterations
    x, t, used, gap, sup = _barrier(cons, un, x, float(cons.count), options, budget)
    diag.iterations += used
    extra = np.empty(0)
    fine = 8 * L
    for _ in range(options.refine_rounds):
        if sup <= 1 + options.refine_tolerance:
            break
        poly = TrigPoly(M, x)
        pts, _, _ = _peaks(poly, fine, 0.9, options.newton_max_steps)
        if pts.size:
            pts = pts[np.abs(poly(pts)) > 1 + options.refine_tolerance]
        if pts.size == 0:
            break
        extra = np.concatenate([extra, pts % 1.0])
        cons = _ConstraintSet(M, L, extra)
        # restart strictly inside the enlarged constraint set, keeping t
        x = x / (float(np.max(np.abs(cons.values(x)))) * (1 + 1e-6))
        x, t, used, gap, sup = _barrier(cons, un, x, t, options, budget - diag.iterations)
        diag.iterations += used
        diag.refine_rounds += 1
    diag.extra_points = int(extra.size)
    diag.barrier_gap = gap
    poly = TrigPoly(M, x)
    sup = sup_norm(poly, 8 * L, options.newton_max_steps)
    diag.sup_before_rescale = sup
    if sup > 1:
        poly = poly.scaled(1 / sup)
    objective = scale * float(np.real(np.vdot(un, poly.coeffs)))
    return poly, objective, diag


def solve_dual(u: MomentVector, options: SolverOptions = SolverOptions()):
    """Maximize Re <x, u> over polynomials of degree u.cutoff with sup |p_x| <= 1.

    Returns ``(poly, objective)``; the objective is evaluated after the
    polynomial has been rescaled to be feasible for the continuous constraint.
    """
    poly, objective, _ = solve_dual_detailed(u, options)
    return poly, objective


def extract_support(poly: TrigPoly, options: SolverOptions = SolverOptions()) -> SupportEstimate:
    """Points where |p| reaches 1 (within the selection threshold), sorted on [0, 1)."""
    M = max(poly.degree, 1)
    size = max(32 * M, 2 * poly.degree + 1, 64)
    level = (1 - options.selection_threshold) ** 2
    q_grid = np.abs(poly.on_uniform_grid(size)) ** 2
    if np.mean(q_grid > level) > options.flatness_fraction:
        return SupportEstimate(np.empty(0), degenerate=True)
    idx = _local_maxima(q_grid)
    # peaks are sharp at high degree, so the grid only pre-screens candidates
    idx = idx[q_grid[idx] >= 0.25]
    pts, ok = _newton_peaks(poly, idx / size, options.newton_max_steps, 1.0 / size)
    vals = np.abs(poly(pts)) if pts.size else np.empty(0)
    keep = vals ** 2 >= level
    low = bool(np.any(~ok[keep]))
    found = list(zip(pts[keep], vals[keep]))
    found.sort(key=lambda item: -item[1])
    kept: list[float] = []
    for t, _ in found:
        if all(wrapped_distance(t, s) >= 1.0 / (8 * M) for s in kept):
            kept.append(t)
    return SupportEstimate(np.sort(np.array(kept, dtype=float)), low_confidence=low)


def fit_amplitudes(u: MomentVector, support) -> tuple[np.ndarray, float]:
    """Least-squares amplitudes for u[m] = sum_l a_l exp(-2 pi i m t_l); returns (a, relative residual)."""
    t = np.asarray(support, dtype=float)
    if t.size == 0:
        return np.empty(0, dtype=complex), 1.0 if np.any(u.moments) else 0.0
    if t.size > u.moments.size:
        raise DegenerateSupportError("more atoms than moments")
    m = np.arange(-u.cutoff, u.cutoff + 1)
    V = np.exp(-2j * np.pi * np.multiply.outer(m, t))
    a, _, rank, sv = np.linalg.lstsq(V, u.moments, rcond=None)
    if rank < t.size or sv[-1] < 1e-10 * sv[0]:
        raise DegenerateSupportError("support points are (nearly) coalesced")
    norm = np.linalg.norm(u.moments)
    res = float(np.linalg.norm(V @ a - u.moments) / norm) if norm else 0.0
    return a, res


def polish_support(u: MomentVector, support, amplitudes, max_shift: float,
                   prune_ratio: float = 0.0):
    """Least-squares refinement of atom positions on the moment equations.

    Starting from the TV estimate, fits u[m] = sum_l a_l exp(-2 pi i m t_l) in
    (t, a).  The refinement is only accepted when every atom moves by less than
    ``max_shift`` and the residual decreases; otherwise the input is returned.
    Atoms the fit drives below ``prune_ratio`` * max|a| are dropped: their
    position is not determined, so they are exempt from the shift test.
    Returns (support, amplitudes, relative residual, accepted).
    """
    t0 = np.asarray(support, dtype=float)
    a0 = np.asarray(amplitudes, dtype=complex)
    m = np.arange(-u.cutoff, u.cutoff + 1)
    norm = float(np.linalg.norm(u.moments))
    S = t0.size

    def resid(z):
        V = np.exp(-2j * np.pi * np.multiply.outer(m, z[:S]))
        r = V @ (z[S:2 * S] + 1j * z[2 * S:]) - u.moments
        return np.concatenate([r.real, r.imag])

    def jac(z):
        V = np.exp(-2j * np.pi * np.multiply.outer(m, z[:S]))
        a = z[S:2 * S] + 1j * z[2 * S:]
        Jt = -2j * np.pi * m[:, None] * V * a[None, :]
        J = np.hstack([Jt, V, 1j * V])
        return np.vstack([J.real, J.imag])

    z0 = np.concatenate([t0, a0.real, a0.imag])
    r0 = float(np.linalg.norm(resid(z0)))
    if S == 0 or norm == 0 or r0 == 0 or 3 * S > 2 * m.size:
        # nothing to do, or (t, a) is not determined by the moments
        return t0, a0, r0 / norm if norm else 0.0, False
    sol = scipy.optimize.least_squares(resid, z0, jac=jac, method="lm", xtol=1e-15,
                                       ftol=1e-15, gtol=1e-15, max_nfev=50 * (3 * S + 1))
    t1 = sol.x[:S]
    a1 = sol.x[S:2 * S] + 1j * sol.x[2 * S:]
    r1 = float(np.linalg.norm(sol.fun))
    keep = np.abs(a1) >= prune_ratio * np.max(np.abs(a1))
    if not (r1 < r0 and np.all(np.abs(t1 - t0)[keep] < max_shift)):
        return t0, a0, r0 / norm, False
    t1 = t1[keep] % 1.0
    a1 = a1[keep]
    rel = r1 / norm
    if not keep.all():
        a1, rel = fit_amplitudes(u, t1)
    order = np.argsort(t1)
    return t1[order], a1[order], rel, True


def _recover_from_moments(u: MomentVector, options: SolverOptions) -> RecoveryResult:
    poly, dual_obj, dd = solve_dual_detailed(u, options)
    est = extract_support(poly, options)
    t = est.points
    a, res = fit_amplitudes(u, t) if t.size else (np.empty(0, dtype=complex), 0.0)
    if a.size:
        keep = np.abs(a) >= options.prune_ratio * np.max(np.abs(a))
        if not keep.all():
            t = t[keep]
            a, res = fit_amplitudes(u, t)
    polished = False
    if options.polish_support and t.size:
        # one cell of the constraint grid: the resolution of the TV estimate itself
        shift = 1.0 / (options.grid_oversampling * (2 * u.cutoff + 1))
        t, a, res, polished = polish_support(u, t, a, shift, options.prune_ratio)
    if not np.any(u.moments):
        res = 0.0
    measure = DiscreteMeasure(t, a, TORUS) if t.size else DiscreteMeasure.zero()
    primal = measure.tv_norm
    gap = primal - dual_obj
    pv = poly(t) if t.size else np.empty(0, dtype=complex)
    support_res = np.abs(pv) - 1
    sign_res = float(np.max(np.abs(pv - a / np.abs(a)))) if t.size else 0.0
    reliable = (not est.degenerate) and abs(gap) <= options.gap_flag * max(primal, 1e-300) \
        and res <= 1e-6
    if primal == 0 and dual_obj == 0:
        reliable = True
    diagnostics = {
        "iterations": dd.iterations,
        "refine_rounds": dd.refine_rounds,
        "constraint_points": dd.grid_size + dd.extra_points,
        "sup_before_rescale": dd.sup_before_rescale,
        "constraint_violation": max(dd.sup_before_rescale - 1.0, 0.0),
        "low_confidence": bool(est.low_confidence),
        "degenerate": bool(est.degenerate),
        "polished": bool(polished),
    }
    return RecoveryResult(measure, poly, dual_obj, primal, gap, support_res, sign_res, res,
                          bool(reliable), diagnostics)


def recover(Y: StftMeasurements, options: SolverOptions = SolverOptions()) -> RecoveryResult:
    """Recover a torus measure from STFT measurements by TV minimization."""
    u = reduce_measurements(Y)
    return _recover_from_moments(u, options)


def recover_fourier(u: MomentVector, options: SolverOptions = SolverOptions()) -> RecoveryResult:
    """Same pipeline applied directly to unwindowed Fourier moments."""
    return _recover_from_moments(u, options)
