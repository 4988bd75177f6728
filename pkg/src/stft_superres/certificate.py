"""Explicit interpolating dual certificate for well-separated supports.

The certificate is

    q(t) = sum_l alpha_l K(t - t_l) + beta_l Kt(t - t_l),

with K(t) = G(t) sinc(2 pi f_c t) and Kt(t) = G'(-t) sinc(2 pi f_c t).  The
coefficients are fixed by q(t_j) = eps_j and q'(t_j) = 0, so that |q| has a
local maximum of height 1 at every support point.  Verification bounds |q|
away from the support by grid evaluation plus a per-interval Lipschitz bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .measures import (
    REAL,
    TORUS,
    ParameterError,
    WindowParams,
    cert_derivative_kernel_jet,
    cert_kernel_jet,
    min_separation,
)

MAX_CONDITION = 1e12


class IllConditionedError(ValueError):
    """The interpolation system is singular or too badly conditioned to trust."""

    def __init__(self, message, condition=math.inf):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class Certificate:
    params: WindowParams
    support: np.ndarray
    signs: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    domain: str = REAL
    condition: float = 1.0
    interaction_radius: float = math.inf

    def __post_init__(self):
        t = np.asarray(self.support, dtype=float).reshape(-1)
        arrays = {name: np.asarray(getattr(self, name), dtype=complex).reshape(-1)
                  for name in ("signs", "alpha", "beta")}
        if any(a.shape != t.shape for a in arrays.values()):
            raise ParameterError("support, signs, alpha and beta must have equal length")
        if t.size and np.max(np.abs(np.abs(arrays["signs"]) - 1)) > 1e-12:
            raise ParameterError("signs must have unit modulus")
        object.__setattr__(self, "support", t)
        for name, a in arrays.items():
            object.__setattr__(self, name, a)

    def to_json(self) -> str:
        def cplx(a):
            return [[float(z.real), float(z.imag)] for z in a]

        return json.dumps({
            "support": [float(x) for x in self.support],
            "signs": cplx(self.signs),
            "alpha": cplx(self.alpha),
            "beta": cplx(self.beta),
            "params": {"sigma": self.params.sigma, "f_c": self.params.f_c, "N": self.params.N},
            "domain": self.domain,
            "condition": self.condition,
        })

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        obj = json.loads(text)

        def cplx(key):
            return np.array([complex(re, im) for re, im in obj[key]], dtype=complex)

        try:
            p = obj["params"]
            params = WindowParams(float(p["sigma"]), int(p["f_c"]), int(p.get("N", 0)))
            return cls(params, np.array(obj["support"], dtype=float), cplx("signs"),
                       cplx("alpha"), cplx("beta"), obj.get("domain", REAL),
                       float(obj.get("condition", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed certificate JSON: {exc}") from exc


@dataclass
class VerificationReport:
    max_interpolation_residual: float
    max_derivative_residual: float
    sup_off_support: float
    margin: float
    grid_spacing: float
    passed: bool
    exclusion_radius: float = 0.0
    near_node_max: float = 0.0
    grid_max: float = 0.0
    condition: float = 1.0

    def to_dict(self) -> dict:
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                for k, v in asdict(self).items()}


def default_interaction_radius(params: WindowParams, delta: float) -> float:
    """10 sigma max(1, 1/(delta f_c)); beyond it the Gaussian factor is below 1e-30."""
    if not math.isfinite(delta) or delta <= 0:
        return 10 * params.sigma
    return 10 * params.sigma * max(1.0, 1.0 / (delta * params.f_c))


def _offsets(d: np.ndarray, domain: str) -> list[np.ndarray]:
    """Differences to feed the kernels: d itself on R, three nearest images on the torus."""
    if domain == TORUS:
        d = (d + 0.5) % 1.0 - 0.5
        return [d - 1.0, d, d + 1.0]
    return [d]


def _jets(d: np.ndarray, params: WindowParams, domain: str, radius: float):
    """(K, K', K'', Kt, Kt', Kt'') summed over images, zeroed beyond ``radius``."""
    out = [np.zeros(d.shape) for _ in range(6)]
    for dd in _offsets(d, domain):
        near = np.abs(dd) <= radius
        if not near.any():
            continue
        a = cert_kernel_jet(dd, params)
        b = cert_derivative_kernel_jet(dd, params)
        for i, v in enumerate((a.value, a.first_derivative, a.second_derivative,
                               b.value, b.first_derivative, b.second_derivative)):
            out[i] += np.where(near, v, 0.0)
    return out


def build_certificate(support, signs, params: WindowParams, domain: str = REAL,
                      interaction_radius: float | None = None) -> Certificate:
    """Solve the 2S x 2S interpolation system for alpha and beta.

    The kernel matrices are real, so the complex right-hand side is handled by
    one real factorization.  Raises IllConditionedError when the condition
    number exceeds 1e12.
    """
    t = np.asarray(support, dtype=float).reshape(-1)
    eps = np.asarray(signs, dtype=complex).reshape(-1)
    if t.shape != eps.shape:
        raise ParameterError("support and signs differ in length")
    if t.size == 0:
        raise ParameterError("empty support")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ParameterError("support must be strictly increasing")
    if np.max(np.abs(np.abs(eps) - 1)) > 1e-12:
        raise ParameterError("signs must have unit modulus")
    if domain == TORUS and (t[0] < 0 or t[-1] >= 1):
        raise ParameterError("torus support points must lie in [0, 1)")
    delta = min_separation(t, domain)
    if interaction_radius is None:
        interaction_radius = default_interaction_radius(params, delta)
    d = np.subtract.outer(t, t)
    K, K1, _, Kt, Kt1, _ = _jets(d, params, domain, interaction_radius)
    A = np.block([[K, Kt], [K1, Kt1]])
    try:
        cond = float(np.linalg.cond(A))
    except np.linalg.LinAlgError:
        cond = math.inf
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError(f"interpolation system condition number {cond:.3g} exceeds "
                                  f"{MAX_CONDITION:g}", cond)
    rhs = np.concatenate([eps, np.zeros_like(eps)])
    coef = np.linalg.solve(A, rhs)
    S = t.size
    return Certificate(params, t, eps, coef[:S], coef[S:], domain, cond, interaction_radius)


def certificate_value(cert: Certificate, t, derivative: int = 0):
    """q(t) or its first/second derivative."""
    if derivative not in (0, 1, 2):
        raise ParameterError("derivative must be 0, 1 or 2")
    t = np.asarray(t, dtype=float)
    d = np.subtract.outer(t, cert.support)
    jets = _jets(d, cert.params, cert.domain, cert.interaction_radius)
    return (jets[derivative] @ cert.alpha + jets[3 + derivative] @ cert.beta)[()]


# ---------------------------------------------------------------------------
# derivative envelopes for the Lipschitz bound

_SINC_BOUND = (1.0, 0.4362, 1.0 / 3)  # sup |sinc|, |sinc'|, |sinc''| on the real line


def _derivative_majorants(s: np.ndarray, params: WindowParams):
    """Upper bounds for |K'(s)| and |Kt'(s)| built from |G^(k)| and sup |sinc^(k)|."""
    a = math.pi / (2 * params.sigma ** 2)
    w = 2 * math.pi * params.f_c
    G = np.exp(-0.5 * a * s * s)
    G1 = a * s * G
    G2 = np.abs(a * a * s * s - a) * G
    c0, c1, _ = _SINC_BOUND
    # the sinc factor is also bounded by 1/|w s| (and its derivative by 2/|w s|)
    with np.errstate(divide="ignore"):
        inv = np.where(s > 0, 1.0 / (w * s), np.inf)
    s0 = np.minimum(c0, inv)
    s1 = np.minimum(c1, 2 * inv)
    return G1 * s0 + G * w * s1, G2 * s0 + G1 * w * s1


class _Envelope:
    """Tabulated non-increasing majorant E(r) >= sup_{|s| >= r} |f(s)|."""

    def __init__(self, params: WindowParams, reach: float):
        self.step = min(params.sigma, 1.0 / params.f_c) / 512
        s = np.arange(0.0, reach + 2 * self.step, self.step)
        k1, kt1 = _derivative_majorants(s, params)
        # reverse running maximum, then a safety factor for the sampling
        self.tables = [np.maximum.accumulate(v[::-1])[::-1] * 1.02 for v in (k1, kt1)]

    def __call__(self, r: np.ndarray):
        i = np.minimum((np.asarray(r) / self.step).astype(int), self.tables[0].size - 1)
        return self.tables[0][i], self.tables[1][i]


def _interval_lipschitz(cert: Certificate, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Bound on |q'| over each [left_i, right_i] summed atom by atom."""
    reach = cert.interaction_radius if math.isfinite(cert.interaction_radius) else 1.0
    reach = max(reach, 20 * cert.params.sigma)
    env = _Envelope(cert.params, reach + 1.0)
    total = np.zeros(left.shape)
    shifts = (-1.0, 0.0, 1.0) if cert.domain == TORUS else (0.0,)
    amp_a, amp_b = np.abs(cert.alpha), np.abs(cert.beta)
    for tl, aa, bb in zip(cert.support, amp_a, amp_b):
        for sh in shifts:
            c = tl + sh
            r = np.where((left <= c) & (c <= right), 0.0,
                         np.minimum(np.abs(left - c), np.abs(right - c)))
            e1, e2 = env(np.minimum(r, env.step * (env.tables[0].size - 1)))
            total += aa * e1 + bb * e2
    return total


def verify_certificate(cert: Certificate, grid_spacing: float | None = None,
                       exclusion_radius: float | None = None, tol_interp: float = 1e-8,
                       margin_required: float = 1e-9, tol_derivative: float = 1e-6,
                       near_samples: int = 64) -> VerificationReport:
    """Check interpolation, stationarity and strict majorization of a certificate.

    Outside the exclusion neighbourhoods the supremum of |q| is bounded
    rigorously on each grid interval by max(|q(a)|, |q(b)|) + L (b - a) / 2.
    Inside them |q|^2 <= 1 is checked at ``near_samples`` points per node.
    """
    params = cert.params
    t = cert.support
    S = t.size
    delta = min_separation(t, cert.domain)
    if grid_spacing is None:
        grid_spacing = 1.0 / (64 * params.f_c)
    if exclusion_radius is None:
        exclusion_radius = delta / 4 if math.isfinite(delta) else 1.0 / (4 * params.f_c)
    if not grid_spacing > 0 or not exclusion_radius > 0:
        raise ParameterError("grid spacing and exclusion radius must be positive")

    interp = float(np.max(np.abs(certificate_value(cert, t) - cert.signs))) if S else 0.0
    deriv = float(np.max(np.abs(certificate_value(cert, t, 1)))) if S else 0.0

    # region to scan: the torus, or the support padded until the kernels are negligible
    if cert.domain == TORUS:
        lo, hi = 0.0, 1.0
    else:
        pad = max(cert.interaction_radius if math.isfinite(cert.interaction_radius) else 0.0,
                  12 * params.sigma)
        lo, hi = t[0] - pad, t[-1] + pad
    n = max(int(math.ceil((hi - lo) / grid_spacing)), 1)
    grid = lo + (hi - lo) * np.arange(n + 1) / n
    h = (hi - lo) / n

    # keep intervals that do not meet any open exclusion neighbourhood
    left, right = grid[:-1], grid[1:]
    keep = np.ones(left.size, dtype=bool)
    shifts = (-1.0, 0.0, 1.0) if cert.domain == TORUS else (0.0,)
    for tl in t:
        for sh in shifts:
            c = tl + sh
            keep &= (right <= c - exclusion_radius) | (left >= c + exclusion_radius)
    vals = np.abs(certificate_value(cert, grid))
    grid_max = 0.0
    sup_off = 0.0
    if keep.any():
        lk, rk = left[keep], right[keep]
        idx = np.flatnonzero(keep)
        endpoint = np.maximum(vals[idx], vals[idx + 1])
        grid_max = float(endpoint.max())
        lip = _interval_lipschitz(cert, lk, rk)
        sup_off = float(np.max(endpoint + lip * h / 2))
    if cert.domain != TORUS:
        # beyond the scanned region every kernel term is below exp(-36 pi)
        sup_off = max(sup_off, 0.0)

    near_max = 0.0
    near_ok = True
    if S:
        offs = exclusion_radius * np.linspace(-1, 1, 2 * near_samples + 1)
        offs = offs[offs != 0]
        pts = np.add.outer(t, offs).ravel()
        if cert.domain == TORUS:
            pts = pts % 1.0
        q2 = np.abs(certificate_value(cert, pts)) ** 2
        near_max = float(np.sqrt(q2.max()))
        near_ok = bool(np.all(q2 <= 1 + 2 * tol_interp))

    margin = 1.0 - sup_off
    passed = (interp <= tol_interp and deriv <= tol_derivative and near_ok
              and sup_off <= 1 - margin_required)
    return VerificationReport(interp, deriv, sup_off, margin, h, bool(passed),
                              float(exclusion_radius), near_max, grid_max, cert.condition)
