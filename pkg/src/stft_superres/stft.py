"""STFT measurements of torus measures and their reduction to Fourier moments.

Exact measurements satisfy y[k, n] = g_n * u[n + k] where
u[m] = sum_l a_l exp(-2 pi i m t_l) are the Fourier moments of the measure, so
STFT data with cutoff f_c and truncation N carry every moment with
|m| <= f_c + N.  The adjoint of the measurement map, applied to a coefficient
matrix C, is the trigonometric polynomial with x[m] = sum_n g_n C[m - n, n].
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .measures import (
    TORUS,
    DiscreteMeasure,
    ParameterError,
    WindowParams,
    periodized_autocorrelation,
    periodized_window,
    window_fourier_coefficient,
)


class DomainError(ValueError):
    """A real-line measure was passed where a torus measure is required."""


class CorruptedMeasurementError(ValueError):
    """STFT data are inconsistent along anti-diagonals k + n = const."""


def _require_torus(measure: DiscreteMeasure) -> None:
    if measure.domain != TORUS:
        raise DomainError("operation requires a torus-mode measure")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StftMeasurements:
    """y[k, n] for k in [-f_c, f_c] (rows) and n in [-N, N] (columns)."""

    params: WindowParams
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        shape = (2 * self.params.f_c + 1, 2 * self.params.N + 1)
        if m.shape != shape:
            raise ParameterError(f"measurement matrix has shape {m.shape}, expected {shape}")
        if not np.all(np.isfinite(m)):
            raise ParameterError("non-finite measurement entry")
        object.__setattr__(self, "matrix", m)

    def entry(self, k: int, n: int) -> complex:
        return complex(self.matrix[k + self.params.f_c, n + self.params.N])

    def inner(self, other: np.ndarray) -> float:
        """Real inner product <C, Y> = Re tr(Y^H C)."""
        return float(np.real(np.vdot(self.matrix, other)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "n", "re", "im"])
        f_c, N = self.params.f_c, self.params.N
        for k in range(-f_c, f_c + 1):
            for n in range(-N, N + 1):
                v = self.matrix[k + f_c, n + N]
                w.writerow([k, n, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, params: WindowParams) -> "StftMeasurements":
        f_c, N = params.f_c, params.N
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["k", "n", "re", "im"]:
            raise ParameterError("measurement CSV must start with header k,n,re,im")
        mat = np.zeros((2 * f_c + 1, 2 * N + 1), dtype=complex)
        seen = np.zeros(mat.shape, dtype=bool)
        for row in rows[1:]:
            if not row:
                continue
            try:
                k, n, re, im = int(row[0]), int(row[1]), float(row[2]), float(row[3])
            except (ValueError, IndexError) as exc:
                raise ParameterError(f"bad measurement row {row!r}") from exc
            if abs(k) > f_c or abs(n) > N:
                raise ParameterError(f"index ({k}, {n}) outside |k|<={f_c}, |n|<={N}")
            if seen[k + f_c, n + N]:
                raise ParameterError(f"duplicate entry ({k}, {n})")
            seen[k + f_c, n + N] = True
            mat[k + f_c, n + N] = complex(re, im)
        if not seen.all():
            raise ParameterError(f"{int((~seen).sum())} measurement entries missing")
        return cls(params, mat)


@dataclass(frozen=True)
class MomentVector:
    """u[m] for m in [-M, M]; ``moments[M + m]`` holds u[m]."""

    cutoff: int
    moments: np.ndarray
    inconsistency: float = 0.0

    def __post_init__(self):
        u = _frozen(self.moments)
        if u.shape != (2 * self.cutoff + 1,):
            raise ParameterError(f"moment vector length {u.shape} does not match cutoff {self.cutoff}")
        if not np.all(np.isfinite(u)):
            raise ParameterError("non-finite moment")
        object.__setattr__(self, "moments", u)

    def __getitem__(self, m: int) -> complex:
        return complex(self.moments[m + self.cutoff])

    def restrict(self, cutoff: int) -> "MomentVector":
        if cutoff > self.cutoff:
            raise ParameterError("cannot extend a moment vector")
        c = self.cutoff
        return MomentVector(cutoff, self.moments[c - cutoff:c + cutoff + 1])

    def scaled(self, c: complex) -> "MomentVector":
        return MomentVector(self.cutoff, c * self.moments)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "re", "im"])
        for m, v in zip(range(-self.cutoff, self.cutoff + 1), self.moments):
            w.writerow([m, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MomentVector":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows or [c.strip() for c in rows[0]] != ["m", "re", "im"]:
            raise ParameterError("moment CSV must start with header m,re,im")
        data = {}
        for row in rows[1:]:
            try:
                m, re, im = int(row[0]), float(row[1]), float(row[2])
            except (ValueError, IndexError) as exc:
                raise ParameterError(f"bad moment row {row!r}") from exc
            if m in data:
                raise ParameterError(f"duplicate moment index {m}")
            data[m] = complex(re, im)
        M = max((abs(m) for m in data), default=0)
        if set(data) != set(range(-M, M + 1)):
            raise ParameterError("moment indices must cover -M..M without gaps")
        return cls(M, np.array([data[m] for m in range(-M, M + 1)]))


@dataclass(frozen=True)
class TrigPoly:
    """t -> sum_m x[m] exp(2 pi i m t), |m| <= degree; ``coeffs[degree + m]`` is x[m]."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        x = _frozen(self.coeffs)
        if x.shape != (2 * self.degree + 1,):
            raise ParameterError("coefficient vector length does not match degree")
        object.__setattr__(self, "coeffs", x)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def __call__(self, t, derivative: int = 0):
        t = np.asarray(t, dtype=float)
        m = self.frequencies
        x = self.coeffs * (2j * np.pi * m) ** derivative
        return np.exp(2j * np.pi * np.multiply.outer(t, m)) @ x

    def on_uniform_grid(self, size: int) -> np.ndarray:
        """Values at t_j = j / size, j = 0..size-1, by a zero-padded inverse FFT."""
        M = self.degree
        if size < 2 * M + 1:
            raise ParameterError("grid too coarse for the polynomial degree")
        buf = np.zeros(size, dtype=complex)
        buf[:M + 1] = self.coeffs[M:]
        if M:
            buf[-M:] = self.coeffs[:M]
        return np.fft.ifft(buf) * size

    def scaled(self, c: complex) -> "TrigPoly":
        return TrigPoly(self.degree, c * self.coeffs)


def stft_coefficients(measure: DiscreteMeasure, params: WindowParams) -> StftMeasurements:
    """y[k, n] = sum_l a_l g_n exp(-2 pi i (n + k) t_l)."""
    _require_torus(measure)
    u = fourier_moments(measure, params.degree).moments
    return StftMeasurements(params, _spread(u, params))


def _spread(u: np.ndarray, params: WindowParams) -> np.ndarray:
    f_c, N = params.f_c, params.N
    k = np.arange(-f_c, f_c + 1)[:, None]
    n = np.arange(-N, N + 1)[None, :]
    g = window_fourier_coefficient(n, params.sigma)
    M = params.degree
    return g * u[k + n + M]


def stft_time_function(measure: DiscreteMeasure, params: WindowParams, k: int, tau) -> complex:
    """y_k(tau) = sum_l a_l g_per(t_l - tau) exp(-2 pi i k t_l) with the periodized window."""
    _require_torus(measure)
    if abs(k) > params.f_c:
        raise ParameterError(f"frequency {k} outside the band |k| <= {params.f_c}")
    tau = np.asarray(tau, dtype=float)
    t, a = measure.support, measure.amplitudes
    if t.size == 0:
        return np.zeros(tau.shape, dtype=complex)[()]
    w = periodized_window(np.subtract.outer(tau, t), params.sigma)
    return (w @ (a * np.exp(-2j * np.pi * k * t)))[()]


def stft_series_value(Y: StftMeasurements, k: int, tau) -> complex:
    """Truncated Fourier series sum_{|n|<=N} y[k, n] exp(2 pi i n tau)."""
    N = Y.params.N
    n = np.arange(-N, N + 1)
    row = Y.matrix[k + Y.params.f_c]
    return (np.exp(2j * np.pi * np.multiply.outer(np.asarray(tau, dtype=float), n)) @ row)[()]


def adjoint_polynomial(C: np.ndarray, params: WindowParams) -> TrigPoly:
    """x[m] = sum_{n=n_min}^{n_max} g_n C[m - n, n], degree f_c + N."""
    C = np.asarray(C, dtype=complex)
    f_c, N = params.f_c, params.N
    if C.shape != (2 * f_c + 1, 2 * N + 1):
        raise ParameterError(f"coefficient matrix has shape {C.shape}, expected {(2 * f_c + 1, 2 * N + 1)}")
    g = window_fourier_coefficient(np.arange(-N, N + 1), params.sigma)
    weighted = C * g[None, :]
    M = f_c + N
    x = np.zeros(2 * M + 1, dtype=complex)
    # row k, column n lands on m = k + n
    for j in range(2 * N + 1):
        x[j:j + 2 * f_c + 1] += weighted[:, j]
    return TrigPoly(M, x)


def reduce_measurements(Y: StftMeasurements, rtol: float = 1e-6) -> MomentVector:
    """Recover u[m], |m| <= f_c + N, from y[k, n] / g_n along each anti-diagonal.

    Estimates are averaged with weights g_n^2.  The largest deviation of any
    single estimate from its anti-diagonal mean is stored as ``inconsistency``.
    """
    params = Y.params
    f_c, N, M = params.f_c, params.N, params.degree
    n = np.arange(-N, N + 1)
    g = window_fourier_coefficient(n, params.sigma)
    if np.any(g <= 0):
        raise ParameterError("window coefficients underflow; reduce N or sigma")
    w = np.broadcast_to(g * g, Y.matrix.shape)
    ratio = Y.matrix / g[None, :]
    num = np.zeros(2 * M + 1, dtype=complex)
    den = np.zeros(2 * M + 1)
    for j in range(2 * N + 1):
        num[j:j + 2 * f_c + 1] += w[:, j] * ratio[:, j]
        den[j:j + 2 * f_c + 1] += w[:, j]
    u = num / den
    dev = 0.0
    for j in range(2 * N + 1):
        dev = max(dev, float(np.max(np.abs(ratio[:, j] - u[j:j + 2 * f_c + 1]) * g[j])))
    # deviations are measured on y itself, so compare against the size of the data
    scale = float(np.max(np.abs(u))) if u.size else 0.0
    if dev > rtol * max(scale * g.max(), np.finfo(float).tiny):
        raise CorruptedMeasurementError(
            f"anti-diagonal inconsistency {dev:.3g} exceeds {rtol:g} x max|u| x g_0")
    return MomentVector(M, u, inconsistency=dev)


def fourier_moments(measure: DiscreteMeasure, cutoff: int) -> MomentVector:
    """u[m] = sum_l a_l exp(-2 pi i m t_l) for |m| <= cutoff."""
    _require_torus(measure)
    m = np.arange(-cutoff, cutoff + 1)
    if len(measure) == 0:
        return MomentVector(cutoff, np.zeros(m.size, dtype=complex))
    E = np.exp(-2j * np.pi * np.multiply.outer(m, measure.support))
    return MomentVector(cutoff, E @ measure.amplitudes)


def dirichlet_mean(d, F: int):
    """(1 / (2F + 1)) sum_{|k|<=F} exp(2 pi i k d), real-valued."""
    d = np.asarray(d, dtype=float)
    s = np.sin(np.pi * d)
    small = np.abs(s) < 1e-12
    val = np.sin((2 * F + 1) * np.pi * d) / ((2 * F + 1) * np.where(small, 1.0, s))
    return np.where(small, 1.0, val)


def complete_inversion_approx(measure: DiscreteMeasure, params: WindowParams, t, F: int):
    """Finite-frequency version of the complete-measurement inversion on the torus.

    Returns (1/(2F+1)) sum_{|k|<=F} sum_l a_l G_per(t - t_l) exp(2 pi i k (t - t_l)) / G_per(0),
    which tends to a_l at t = t_l and to 0 elsewhere as F grows.
    """
    _require_torus(measure)
    if int(F) != F or F < 1:
        raise ParameterError(f"F must be an integer >= 1, got {F!r}")
    t = np.asarray(t, dtype=float)
    if len(measure) == 0:
        return np.zeros(t.shape, dtype=complex)[()]
    d = np.subtract.outer(t, measure.support)
    G0 = periodized_autocorrelation(0.0, params.sigma)
    kern = periodized_autocorrelation(d, params.sigma) * dirichlet_mean(d, int(F)) / G0
    return (kern @ measure.amplitudes)[()]


def inversion_from_measurements(Y: StftMeasurements, t, F: int | None = None):
    """The same average computed from the measured coefficients, frequencies |k| <= min(F, f_c)."""
    params = Y.params
    F = params.f_c if F is None else min(int(F), params.f_c)
    N = params.N
    n = np.arange(-N, N + 1)
    g = window_fourier_coefficient(n, params.sigma)
    rows = Y.matrix[params.f_c - F:params.f_c + F + 1] * g[None, :]
    k = np.arange(-F, F + 1)
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape, dtype=complex)
    for i, kk in enumerate(k):
        total = total + np.exp(2j * np.pi * np.multiply.outer(t, kk + n)) @ rows[i]
    G0 = float(np.sum(g * g))
    return (total / ((2 * F + 1) * G0))[()]
