import math

import numpy as np
import pytest

from stft_superres import (
    Certificate,
    IllConditionedError,
    WindowParams,
    build_certificate,
    cert_derivative_kernel_jet,
    cert_kernel_jet,
    certificate_value,
    verify_certificate,
)
from stft_superres.measures import REAL, TORUS

P = WindowParams(1 / 200, 50, 0)


def random_support(rng, S, delta, jitter=0.5):
    gaps = delta * (1 + jitter * rng.uniform(size=S - 1))
    return np.concatenate([[0.0], np.cumsum(gaps)]) + rng.uniform()


def random_signs(rng, S):
    return np.exp(2j * np.pi * rng.uniform(size=S))


def test_single_atom_closed_form():
    cert = build_certificate([0.3], [1.0], P)
    assert cert.alpha[0] == pytest.approx(1.0, abs=1e-14) and abs(cert.beta[0]) < 1e-14
    theta = 0.7
    cert = build_certificate([0.3], [np.exp(1j * theta)], P)
    assert cert.alpha[0] == pytest.approx(np.exp(1j * theta), abs=1e-14)
    assert certificate_value(cert, 0.3) == pytest.approx(np.exp(1j * theta), abs=1e-14)
    t = np.linspace(0.2, 0.4, 201)
    t = t[np.abs(t - 0.3) > 1e-9]
    vals = certificate_value(build_certificate([0.3], [1.0], P), t)
    assert np.allclose(vals, cert_kernel_jet(t - 0.3, P).value, rtol=0, atol=1e-14)
    assert np.all(np.abs(vals) < 1)


def test_two_atoms_match_dense_solve():
    t = np.array([0.0, 1.5 / P.f_c])
    eps = np.array([1.0, 1.0])
    d = np.subtract.outer(t, t)
    K, Kt = cert_kernel_jet(d, P), cert_derivative_kernel_jet(d, P)
    A = np.block([[K.value, Kt.value], [K.first_derivative, Kt.first_derivative]])
    rhs = np.concatenate([eps, np.zeros(2)])
    coef = np.linalg.solve(A, rhs)
    cert = build_certificate(t, eps, P)
    assert np.allclose(cert.alpha, coef[:2], rtol=0, atol=1e-10)
    assert np.allclose(cert.beta, coef[2:], rtol=0, atol=1e-10)


def test_derivative_matches_finite_difference():
    rng = np.random.default_rng(0)
    t = random_support(rng, 4, 1.3 / P.f_c)
    cert = build_certificate(t, random_signs(rng, 4), P)
    h = 1e-7
    for s in rng.uniform(t[0] - 0.02, t[-1] + 0.02, 30):
        fd = (certificate_value(cert, s + h) - certificate_value(cert, s - h)) / (2 * h)
        assert abs(fd - certificate_value(cert, s, 1)) <= 1e-5 * max(1, abs(fd) / 100)


def test_phase_and_translation_equivariance():
    rng = np.random.default_rng(1)
    t = random_support(rng, 5, 1.2 / P.f_c)
    eps = random_signs(rng, 5)
    cert = build_certificate(t, eps, P)
    rot = np.exp(0.9j)
    rotated = build_certificate(t, rot * eps, P)
    assert np.allclose(rotated.alpha, rot * cert.alpha, rtol=0, atol=1e-10)
    assert np.allclose(rotated.beta, rot * cert.beta, rtol=0, atol=1e-10)
    s = rng.uniform(t[0] - 0.01, t[-1] + 0.01, 50)
    assert np.allclose(certificate_value(rotated, s), rot * certificate_value(cert, s), rtol=0, atol=1e-10)
    shift = 0.123
    moved = build_certificate(t + shift, eps, P)
    assert np.allclose(certificate_value(moved, s + shift), certificate_value(cert, s), rtol=0, atol=1e-10)


def test_built_certificates_interpolate():
    rng = np.random.default_rng(2)
    for S in (1, 3, 8, 20):
        t = random_support(rng, S, 1.1 / P.f_c)
        eps = random_signs(rng, S)
        cert = build_certificate(t, eps, P)
        rep = verify_certificate(cert)
        assert rep.max_interpolation_residual <= 1e-8
        assert rep.max_derivative_residual <= 1e-6


def test_single_atom_verification_passes():
    rep = verify_certificate(build_certificate([0.1], [1j], P))
    assert rep.passed and rep.margin > 0
    assert rep.sup_off_support >= rep.grid_max


def test_regime_examples_pass():
    rng = np.random.default_rng(3)
    for _ in range(10):
        S = int(rng.integers(2, 8))
        t = np.arange(S) * 1.2 / P.f_c + rng.uniform()
        rep = verify_certificate(build_certificate(t, random_signs(rng, S), P))
        assert rep.passed, rep


def test_close_atoms_fail():
    t = np.arange(3) * 0.2 / P.f_c
    try:
        cert = build_certificate(t, np.ones(3), P)
    except IllConditionedError:
        return
    rep = verify_certificate(cert)
    assert not rep.passed


def test_coincident_atoms_ill_conditioned():
    with pytest.raises(IllConditionedError):
        build_certificate([0.0, 1e-9], [1.0, 1.0], P)


def test_grid_bound_is_an_upper_bound():
    rng = np.random.default_rng(4)
    t = random_support(rng, 6, 1.1 / P.f_c, jitter=0.1)
    cert = build_certificate(t, random_signs(rng, 6), P)
    r = min_gap = float(np.min(np.diff(t))) / 4
    rep = verify_certificate(cert, exclusion_radius=r)
    dense = np.linspace(t[0] - 0.06, t[-1] + 0.06, 400_001)
    dist = np.min(np.abs(np.subtract.outer(dense, t)), axis=1)
    assert np.max(np.abs(certificate_value(cert, dense[dist >= min_gap]))) <= rep.sup_off_support


def test_torus_certificate():
    rng = np.random.default_rng(5)
    S = 6
    t = np.sort((np.arange(S) * 1.5 / P.f_c + 0.97) % 1.0)
    cert = build_certificate(t, random_signs(rng, S), P, domain=TORUS)
    rep = verify_certificate(cert)
    assert rep.passed
    assert certificate_value(cert, t[0] + 1.0) == pytest.approx(certificate_value(cert, t[0]), abs=1e-12)


def test_json_round_trip():
    rng = np.random.default_rng(6)
    t = random_support(rng, 3, 1.5 / P.f_c)
    cert = build_certificate(t, random_signs(rng, 3), P)
    back = Certificate.from_json(cert.to_json())
    assert np.array_equal(back.support, cert.support)
    assert np.array_equal(back.alpha, cert.alpha) and np.array_equal(back.beta, cert.beta)
    assert back.params == cert.params and back.domain == REAL
    assert verify_certificate(back).passed == verify_certificate(cert).passed
    rep = verify_certificate(cert).to_dict()
    assert set(rep) >= {"max_interpolation_residual", "max_derivative_residual", "sup_off_support",
                        "margin", "grid_spacing", "passed"}
    assert isinstance(rep["passed"], bool) and math.isfinite(rep["margin"])
