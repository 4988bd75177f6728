"""Discrete measures, window parameters and the closed-form Gaussian kernels.

The window is g(t) = sigma**-0.5 * exp(-pi t^2 / (2 sigma^2)).  Its
autocorrelation is G(t) = exp(-pi t^2 / (4 sigma^2)) and the Fourier
coefficients of its 1-periodization are g_n = sqrt(2 sigma) exp(-2 pi sigma^2 n^2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TORUS = "torus"
REAL = "real"
_DOMAINS = (TORUS, REAL)

STRICT_TRUNCATION = 1e-6


class ParameterError(ValueError):
    """Raised for invalid window or kernel parameters."""


class MeasureError(ValueError):
    """Raised when a discrete measure violates its invariants."""


def _check_sigma(sigma: float) -> None:
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ParameterError(f"sigma must be positive and finite, got {sigma!r}")


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite sum of weighted Dirac masses.

    ``support`` is strictly increasing; on the torus every point lies in [0, 1).
    An empty support is the zero measure.
    """

    support: np.ndarray
    amplitudes: np.ndarray
    domain: str = TORUS

    def __post_init__(self):
        t = np.asarray(self.support, dtype=float).reshape(-1)
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.domain not in _DOMAINS:
            raise MeasureError(f"unknown domain {self.domain!r}")
        if t.shape != a.shape:
            raise MeasureError("support and amplitudes differ in length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
            raise MeasureError("non-finite support point or amplitude")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise MeasureError("support must be strictly increasing")
        if np.any(np.abs(a) == 0):
            raise MeasureError("zero amplitude in measure")
        if self.domain == TORUS and t.size and (t[0] < 0 or t[-1] >= 1):
            raise MeasureError("torus support points must lie in [0, 1)")
        t.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "support", t)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def zero(cls, domain: str = TORUS) -> "DiscreteMeasure":
        return cls(np.empty(0), np.empty(0, dtype=complex), domain)

    @classmethod
    def from_atoms(cls, support: Iterable[float], amplitudes: Iterable[complex],
                   domain: str = TORUS) -> "DiscreteMeasure":
        """Build a measure from unsorted atoms; torus points are wrapped into [0, 1)."""
        t = np.asarray(list(support), dtype=float)
        a = np.asarray(list(amplitudes), dtype=complex)
        if domain == TORUS:
            t = np.mod(t, 1.0)
            t[t >= 1.0] = 0.0
        order = np.argsort(t, kind="stable")
        return cls(t[order], a[order], domain)

    def __len__(self) -> int:
        return self.support.size

    @property
    def tv_norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes)))

    def scaled(self, c: complex) -> "DiscreteMeasure":
        return DiscreteMeasure(self.support, c * self.amplitudes, self.domain)

    def to_json(self) -> str:
        atoms = [{"t": float(t), "re": float(a.real), "im": float(a.imag)}
                 for t, a in zip(self.support, self.amplitudes)]
        return json.dumps({"domain": self.domain, "atoms": atoms})

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        obj = json.loads(text)
        try:
            domain = obj["domain"]
            atoms = obj["atoms"]
            t = [float(x["t"]) for x in atoms]
            a = [complex(float(x["re"]), float(x["im"])) for x in atoms]
        except (KeyError, TypeError) as exc:
            raise MeasureError(f"malformed measure JSON: {exc}") from exc
        if domain not in _DOMAINS:
            raise MeasureError(f"unknown domain {domain!r}")
        if len(set(t)) != len(t):
            raise MeasureError("duplicate support point")
        if t != sorted(t):
            raise MeasureError("atoms must be sorted by t")
        return cls(np.array(t), np.array(a, dtype=complex), domain)


@dataclass(frozen=True)
class WindowParams:
    """Gaussian window width ``sigma``, integer cutoff ``f_c``, truncation ``N``.

    With ``strict=True`` parameter sets whose truncated series drops a
    coefficient larger than 1e-6 relative (g_N / g_0 > 1e-6) are rejected.
    """

    sigma: float
    f_c: int
    N: int
    strict: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_sigma(self.sigma)
        if int(self.f_c) != self.f_c or self.f_c < 1:
            raise ParameterError(f"f_c must be an integer >= 1, got {self.f_c!r}")
        if int(self.N) != self.N or self.N < 0:
            raise ParameterError(f"N must be an integer >= 0, got {self.N!r}")
        object.__setattr__(self, "f_c", int(self.f_c))
        object.__setattr__(self, "N", int(self.N))
        if self.strict and self.truncation_ratio > STRICT_TRUNCATION:
            raise ParameterError(
                f"g_N/g_0 = {self.truncation_ratio:.3g} exceeds {STRICT_TRUNCATION:g}; increase N")

    @property
    def truncation_ratio(self) -> float:
        """g_N / g_0, the relative size of the last retained window coefficient."""
        return math.exp(-2 * math.pi * self.sigma ** 2 * self.N ** 2)

    @property
    def degree(self) -> int:
        """Highest frequency carried by the measurements, f_c + N."""
        return self.f_c + self.N

    @classmethod
    def strict_preset(cls, f_c: int, sigma: float | None = None) -> "WindowParams":
        """sigma = 1/(4 f_c) by default and the smallest N with g_N/g_0 <= 1e-6."""
        if sigma is None:
            sigma = 1.0 / (4 * f_c)
        _check_sigma(sigma)
        n = math.ceil(math.sqrt(math.log(1 / STRICT_TRUNCATION) / (2 * math.pi * sigma ** 2)))
        while math.exp(-2 * math.pi * sigma ** 2 * n ** 2) > STRICT_TRUNCATION:
            n += 1
        return cls(sigma, f_c, n, strict=True)

    @classmethod
    def paper_figure_preset(cls) -> "WindowParams":
        # g_50/g_0 ~ 0.675 here: measurements and solver share the same truncated series.
        return cls(1.0 / 200, 50, 50)


@dataclass(frozen=True)
class KernelJet:
    value: float | np.ndarray
    first_derivative: float | np.ndarray
    second_derivative: float | np.ndarray


def window_value(t, sigma: float):
    """Gaussian window g(t) on the real line."""
    _check_sigma(sigma)
    t = np.asarray(t, dtype=float)
    return np.exp(-np.pi * t * t / (2 * sigma * sigma)) / math.sqrt(sigma)


def periodized_window(t, sigma: float, images: int | None = None):
    """1-periodization of the window, summing enough images for double precision."""
    _check_sigma(sigma)
    if images is None:
        images = 2 + int(math.ceil(12 * sigma))
    t = np.asarray(t, dtype=float)
    return sum(window_value(t + n, sigma) for n in range(-images, images + 1))


def window_fourier_coefficient(n, sigma: float):
    """g_n, the n-th Fourier coefficient of the periodized window."""
    _check_sigma(sigma)
    n = np.asarray(n, dtype=float)
    return math.sqrt(2 * sigma) * np.exp(-2 * np.pi * sigma * sigma * n * n)


def autocorrelation_jet(t, sigma: float) -> KernelJet:
    """G, G' and G'' for G(t) = exp(-pi t^2 / (4 sigma^2))."""
    _check_sigma(sigma)
    t = np.asarray(t, dtype=float)
    a = np.pi / (2 * sigma * sigma)
    G = np.exp(-0.5 * a * t * t)
    return KernelJet(G, -a * t * G, (a * a * t * t - a) * G)


def periodized_autocorrelation(t, sigma: float, images: int | None = None):
    _check_sigma(sigma)
    if images is None:
        images = 2 + int(math.ceil(12 * sigma))
    t = np.asarray(t, dtype=float)
    return sum(autocorrelation_jet(t + n, sigma).value for n in range(-images, images + 1))


# below this |x| the closed forms of sinc'' lose digits to cancellation (error ~ eps / x^3)
_SMALL = 0.05


def sinc_jet(x):
    """sin(x)/x with first and second derivatives; Taylor series near the origin."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SMALL
    xs = np.where(small, 1.0, x)
    s, c = np.sin(xs), np.cos(xs)
    f = s / xs
    d1 = (xs * c - s) / xs ** 2
    d2 = (-xs * xs * s - 2 * xs * c + 2 * s) / xs ** 3
    x2 = x * x
    # truncation error of each series is below 1e-17 for |x| < 0.05
    f = np.where(small, 1 - x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72))), f)
    d1 = np.where(small, -x / 3 * (1 - x2 / 10 * (1 - x2 / 28 * (1 - x2 / 54))), d1)
    d2 = np.where(small, -1.0 / 3 + x2 / 10 - x2 * x2 / 168 + x2 ** 3 / 6480, d2)
    return f, d1, d2


def cert_kernel_jet(t, params: WindowParams) -> KernelJet:
    """K(t) = G(t) sinc(2 pi f_c t) and its first two derivatives."""
    w = 2 * np.pi * params.f_c
    G = autocorrelation_jet(t, params.sigma)
    s, s1, s2 = sinc_jet(w * np.asarray(t, dtype=float))
    s1, s2 = w * s1, w * w * s2
    return KernelJet(
        G.value * s,
        G.first_derivative * s + G.value * s1,
        G.second_derivative * s + 2 * G.first_derivative * s1 + G.value * s2,
    )


def cert_derivative_kernel_jet(t, params: WindowParams) -> KernelJet:
    """The beta-kernel G'(-t) sinc(2 pi f_c t) = -G'(t) sinc(2 pi f_c t) and derivatives.

    Third derivative of G is needed for the second derivative of this kernel.
    """
    t = np.asarray(t, dtype=float)
    w = 2 * np.pi * params.f_c
    a = np.pi / (2 * params.sigma ** 2)
    G = autocorrelation_jet(t, params.sigma)
    G3 = (3 * a * a * t - a ** 3 * t ** 3) * G.value
    s, s1, s2 = sinc_jet(w * t)
    s1, s2 = w * s1, w * w * s2
    return KernelJet(
        -G.first_derivative * s,
        -(G.second_derivative * s + G.first_derivative * s1),
        -(G3 * s + 2 * G.second_derivative * s1 + G.first_derivative * s2),
    )


def wrapped_distance(a, b):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def min_separation(support: Sequence[float], domain: str = TORUS) -> float:
    """Smallest gap between distinct points of a sorted support (wrapped on the torus)."""
    t = np.sort(np.asarray(support, dtype=float))
    if t.size < 2:
        return math.inf
    gaps = np.diff(t)
    if domain == TORUS:
        gaps = np.append(gaps, 1.0 - (t[-1] - t[0]))
        gaps = np.minimum(gaps, 1.0 - gaps)
    return float(gaps.min())
