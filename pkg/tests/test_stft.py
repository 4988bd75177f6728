import numpy as np
import pytest

from stft_superres import (
    CorruptedMeasurementError,
    DiscreteMeasure,
    DomainError,
    MomentVector,
    ParameterError,
    StftMeasurements,
    WindowParams,
    adjoint_polynomial,
    complete_inversion_approx,
    fourier_moments,
    reduce_measurements,
    stft_coefficients,
    stft_time_function,
    window_fourier_coefficient,
)
from stft_superres.measures import REAL, periodized_window
from stft_superres.stft import inversion_from_measurements, stft_series_value


def random_measure(rng, S):
    t = np.sort(rng.choice(4096, S, replace=False) / 4096)
    return DiscreteMeasure(t, rng.normal(size=S) + 1j * rng.normal(size=S))


def direct_stft(mu, params):
    # y[k, n] straight from the definition, one atom at a time
    k = np.arange(-params.f_c, params.f_c + 1)[:, None]
    n = np.arange(-params.N, params.N + 1)[None, :]
    g = window_fourier_coefficient(n, params.sigma)
    Y = np.zeros((k.size, n.size), dtype=complex)
    for t, a in zip(mu.support, mu.amplitudes):
        Y += a * g * np.exp(-2j * np.pi * (n + k) * t)
    return Y


P = WindowParams(0.05, 6, 9)


def test_single_atom_examples():
    Y = stft_coefficients(DiscreteMeasure([0.0], [1.0]), P)
    g = window_fourier_coefficient(np.arange(-P.N, P.N + 1), P.sigma)
    assert np.allclose(Y.matrix, np.broadcast_to(g, Y.matrix.shape), rtol=0, atol=1e-15)
    Y = stft_coefficients(DiscreteMeasure([0.25], [1.0]), P)
    for k, n in [(0, 2), (3, -1), (-4, 6)]:
        assert Y.entry(k, n) == pytest.approx(-window_fourier_coefficient(n, P.sigma), abs=1e-15)


def test_stft_matches_definition_and_is_linear():
    rng = np.random.default_rng(0)
    a, b = random_measure(rng, 3), random_measure(rng, 2)
    Ya, Yb = stft_coefficients(a, P).matrix, stft_coefficients(b, P).matrix
    assert np.allclose(Ya, direct_stft(a, P), rtol=0, atol=1e-13)
    both = DiscreteMeasure.from_atoms(list(a.support) + list(b.support),
                                      list(a.amplitudes) + list(b.amplitudes))
    assert np.allclose(stft_coefficients(both, P).matrix, Ya + Yb, rtol=0, atol=1e-13)


def test_real_line_measure_rejected():
    mu = DiscreteMeasure([0.3], [1.0], REAL)
    with pytest.raises(DomainError):
        stft_coefficients(mu, P)
    with pytest.raises(DomainError):
        fourier_moments(mu, 3)


def test_adjoint_single_entry():
    C = np.zeros((2 * P.f_c + 1, 2 * P.N + 1), dtype=complex)
    k0, n0 = 2, -5
    C[k0 + P.f_c, n0 + P.N] = 1
    x = adjoint_polynomial(C, P)
    expected = np.zeros(2 * P.degree + 1)
    expected[P.degree + k0 + n0] = window_fourier_coefficient(n0, P.sigma)
    assert np.array_equal(x.coeffs, expected)
    assert not np.any(adjoint_polynomial(np.zeros_like(C), P).coeffs)
    with pytest.raises(ParameterError):
        adjoint_polynomial(C[:-1], P)


def test_adjoint_and_objective_identities():
    rng = np.random.default_rng(1)
    for _ in range(20):
        mu = random_measure(rng, 4)
        C = rng.normal(size=(2 * P.f_c + 1, 2 * P.N + 1)) + 1j * rng.normal(size=(2 * P.f_c + 1, 2 * P.N + 1))
        Y = stft_coefficients(mu, P)
        lhs = Y.inner(C)
        p = adjoint_polynomial(C, P)
        atom_form = float(np.sum(np.real(mu.amplitudes * np.conj(p(mu.support)))))
        u = reduce_measurements(Y)
        moment_form = float(np.sum(np.real(np.conj(u.moments) * p.coeffs)))
        assert atom_form == pytest.approx(lhs, rel=1e-11)
        assert moment_form == pytest.approx(lhs, rel=1e-12)


def test_anti_diagonal_consistency():
    rng = np.random.default_rng(2)
    Y = stft_coefficients(random_measure(rng, 5), P)
    g = window_fourier_coefficient(np.arange(-P.N, P.N + 1), P.sigma)
    ratio = Y.matrix / g[None, :]
    for m in range(-P.degree, P.degree + 1):
        vals = [ratio[k + P.f_c, m - k + P.N] for k in range(-P.f_c, P.f_c + 1) if abs(m - k) <= P.N]
        assert np.max(np.abs(np.array(vals) - vals[0])) <= 1e-12 * max(abs(vals[0]), 1)


def test_reduce_examples():
    u = reduce_measurements(stft_coefficients(DiscreteMeasure([0.0], [1.0]), P))
    assert np.allclose(u.moments, 1, rtol=0, atol=1e-14)
    u = reduce_measurements(stft_coefficients(DiscreteMeasure([0.25], [1.0]), P))
    assert u[1] == pytest.approx(-1j, abs=1e-14)
    rng = np.random.default_rng(3)
    mu = random_measure(rng, 5)
    u = reduce_measurements(stft_coefficients(mu, P))
    m = np.arange(-P.degree, P.degree + 1)
    direct = np.exp(-2j * np.pi * np.outer(m, mu.support)) @ mu.amplitudes
    assert np.max(np.abs(u.moments - direct)) <= 1e-12
    assert u.inconsistency <= 1e-12
    assert np.allclose(u.restrict(P.f_c).moments, fourier_moments(mu, P.f_c).moments, rtol=0, atol=1e-12)


def test_reduce_rejects_inconsistent_data():
    rng = np.random.default_rng(4)
    Y = stft_coefficients(random_measure(rng, 3), P)
    bad = Y.matrix.copy()
    bad[3, 4] *= 1.01
    with pytest.raises(CorruptedMeasurementError):
        reduce_measurements(StftMeasurements(P, bad))


def test_fourier_moments_examples():
    assert not np.any(fourier_moments(DiscreteMeasure.zero(), 4).moments)
    u = fourier_moments(DiscreteMeasure([0.5], [1.0]), 3)
    assert u[1] == pytest.approx(-1, abs=1e-15)
    assert u.moments.shape == (7,)


def test_csv_round_trips():
    rng = np.random.default_rng(5)
    Y = stft_coefficients(random_measure(rng, 3), P)
    back = StftMeasurements.from_csv(Y.to_csv(), P)
    assert np.array_equal(back.matrix, Y.matrix)
    u = reduce_measurements(Y)
    assert np.array_equal(MomentVector.from_csv(u.to_csv()).moments, u.moments)
    lines = Y.to_csv().splitlines()
    assert lines[0] == "k,n,re,im"
    with pytest.raises(ParameterError):
        StftMeasurements.from_csv("\n".join(lines[:-1]), P)
    with pytest.raises(ParameterError):
        StftMeasurements.from_csv("\n".join(lines + [lines[-1]]), P)
    with pytest.raises(ParameterError):
        MomentVector.from_csv("m,re,im\n0,1,0\n2,1,0\n")


def test_time_function_examples():
    mu = DiscreteMeasure([0.5], [1.0])
    assert stft_time_function(mu, P, 0, 0.5) == pytest.approx(periodized_window(0.0, P.sigma))
    with pytest.raises(ParameterError):
        stft_time_function(mu, P, P.f_c + 1, 0.0)


def test_time_function_matches_truncated_series():
    rng = np.random.default_rng(6)
    params = WindowParams(0.05, 4, 6)
    mu = random_measure(rng, 4)
    Y = stft_coefficients(mu, params)
    tail = 2 * np.sum(window_fourier_coefficient(np.arange(params.N + 1, params.N + 200), params.sigma))
    tau = rng.uniform(0, 1, 25)
    for k in (-4, 0, 3):
        err = np.abs(stft_time_function(mu, params, k, tau) - stft_series_value(Y, k, tau))
        assert np.all(err <= 3 * tail * mu.tv_norm)
    other = random_measure(rng, 2)
    both = DiscreteMeasure.from_atoms(list(mu.support) + list(other.support),
                                      list(mu.amplitudes) + list(2 * other.amplitudes))
    lhs = stft_time_function(both, params, 2, 0.37)
    rhs = stft_time_function(mu, params, 2, 0.37) + 2 * stft_time_function(other, params, 2, 0.37)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_inversion_on_atom_and_convergence():
    p = WindowParams(1 / 200, 50, 0)
    single = DiscreteMeasure([0.3], [2 - 1j])
    assert complete_inversion_approx(single, p, 0.3, 7) == pytest.approx(2 - 1j, abs=1e-14)
    mu = DiscreteMeasure([0.1, 0.45, 0.7], [1.0, 1j, -0.5 + 0.5j])
    t_off = 0.25
    e100 = abs(complete_inversion_approx(mu, p, t_off, 100))
    e200 = abs(complete_inversion_approx(mu, p, t_off, 200))
    assert e200 < e100
    bound = mu.tv_norm / (2 * 200 * np.sin(np.pi * 0.1))
    assert e200 <= bound
    with pytest.raises(ParameterError):
        complete_inversion_approx(mu, p, 0.2, 0)


def test_inversion_from_measurements_on_atom():
    params = WindowParams.strict_preset(20)
    mu = DiscreteMeasure([0.4], [1.5j])
    Y = stft_coefficients(mu, params)
    assert inversion_from_measurements(Y, 0.4) == pytest.approx(1.5j, abs=1e-10)
