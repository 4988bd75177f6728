import numpy as np
import pytest

from stft_superres import (
    DegenerateSupportError,
    DiscreteMeasure,
    MomentVector,
    SolverOptions,
    StftMeasurements,
    TrigPoly,
    WindowParams,
    extract_support,
    fit_amplitudes,
    fourier_moments,
    recover,
    recover_fourier,
    solve_dual,
    stft_coefficients,
)
from stft_superres.bench import support_error
from stft_superres.solver import polish_support, sup_norm


def fejer(M, center, height=1.0):
    m = np.arange(-M, M + 1)
    x = height * (1 - np.abs(m) / (M + 1)) / (M + 1) * np.exp(-2j * np.pi * m * center)
    return x


def spaced_measure(rng, S, delta, amp_scale=1.0):
    gaps = delta * (1 + 0.3 * rng.uniform(size=S))
    t = (rng.uniform() + np.concatenate([[0.0], np.cumsum(gaps[:-1])])) % 1.0
    a = amp_scale * (rng.normal(size=S) + 1j * rng.normal(size=S))
    return DiscreteMeasure.from_atoms(t, a)


@pytest.mark.parametrize("M", [1, 4, 20])
def test_dual_single_atom(M):
    u = fourier_moments(DiscreteMeasure([0.3], [5.0]), M)
    poly, obj = solve_dual(u)
    assert obj == pytest.approx(5.0, rel=1e-6)
    assert abs(poly(0.3)) == pytest.approx(1.0, abs=1e-6)
    assert obj <= 5.0 + 1e-7
    assert sup_norm(poly) <= 1 + 1e-12


def test_dual_zero_and_scaling():
    poly, obj = solve_dual(MomentVector(3, np.zeros(7)))
    assert obj == 0 and not np.any(poly.coeffs)
    rng = np.random.default_rng(0)
    u = fourier_moments(spaced_measure(rng, 3, 0.15), 10)
    poly1, obj1 = solve_dual(u)
    poly2, obj2 = solve_dual(u.scaled(2.0))
    assert obj2 == pytest.approx(2 * obj1, rel=1e-7)
    # the maximizer of the first problem is optimal for the second
    assert 2 * np.real(np.vdot(u.moments, poly1.coeffs)) == pytest.approx(obj2, rel=1e-7)


def test_extract_support_flags_constant_modulus():
    poly = TrigPoly(1, np.array([0, 0, 1], dtype=complex))
    est = extract_support(poly)
    assert est.degenerate and est.points.size == 0


def test_extract_support_fejer_peak():
    M = 40
    est = extract_support(TrigPoly(M, fejer(M, 0.3)))
    assert est.points.size == 1 and abs(est.points[0] - 0.3) <= 1e-9
    assert not est.degenerate


def test_extract_support_threshold():
    M = 60
    x = fejer(M, 0.2) + fejer(M, 0.7, 0.9)
    poly = TrigPoly(M, x)
    grid = np.arange(2 ** 16) / 2 ** 16
    q = np.abs(poly(grid))
    assert q.max() == pytest.approx(1.0, abs=1e-3)
    est = extract_support(poly, SolverOptions(selection_threshold=1e-3))
    dense_argmax = grid[np.argmax(q)]
    assert est.points.size == 1
    assert abs(est.points[0] - dense_argmax) <= 1 / 2 ** 16
    assert abs(est.points[0] - 0.2) <= 1e-3


def test_fit_amplitudes_examples():
    u = fourier_moments(DiscreteMeasure([0.6], [2 - 1j]), 4)
    a, res = fit_amplitudes(u, [0.6])
    assert a[0] == pytest.approx(2 - 1j, abs=1e-13) and res <= 1e-13
    u = fourier_moments(DiscreteMeasure([0.2, 0.8], [1 + 1j, -2]), 10)
    a, res = fit_amplitudes(u, [0.2, 0.8])
    assert np.allclose(a, [1 + 1j, -2], rtol=0, atol=1e-10) and res <= 1e-10
    a, res = fit_amplitudes(u, [0.2, 0.5, 0.8])
    assert abs(a[1]) <= 1e-8
    with pytest.raises(DegenerateSupportError):
        fit_amplitudes(u, [0.2, 0.2 + 1e-13])


def test_polish_drops_spurious_atom():
    mu = DiscreteMeasure([0.1, 0.4, 0.75], [3.0, 1 + 2j, -2j])
    u = fourier_moments(mu, 20)
    t0 = np.array([0.1 + 2e-5, 0.4 - 1e-5, 0.58, 0.75 + 3e-5])
    a0, _ = fit_amplitudes(u, t0)
    t, a, res, ok = polish_support(u, t0, a0, 1e-3, 1e-6)
    assert ok and res < 1e-12
    assert np.allclose(t, mu.support, atol=1e-10)
    assert np.allclose(a, mu.amplitudes, atol=1e-9)
    # without pruning the same refinement keeps all four atoms
    assert polish_support(u, t0, a0, 1e-3)[0].size == 4


def test_recover_zero_measurements():
    params = WindowParams(0.05, 4, 6)
    Y = StftMeasurements(params, np.zeros((9, 13), dtype=complex))
    r = recover(Y)
    assert len(r.measure) == 0 and r.primal_tv == 0 and r.duality_gap == 0 and r.reliable


def test_recover_strict_single_atom():
    params = WindowParams.strict_preset(50)
    mu = DiscreteMeasure([0.5], [3j])
    r = recover(stft_coefficients(mu, params))
    assert r.reliable and len(r.measure) == 1
    assert abs(r.measure.support[0] - 0.5) <= 1e-8
    assert abs(r.measure.amplitudes[0] - 3j) <= 1e-6
    assert abs(r.duality_gap) <= 1e-6 * r.primal_tv


def test_recover_separated_paper_preset():
    rng = np.random.default_rng(1)
    params = WindowParams.paper_figure_preset()
    mu = spaced_measure(rng, 5, 1.5 / 50, 100)
    r = recover(stft_coefficients(mu, params))
    assert r.reliable
    assert support_error(r.measure.support, mu.support) <= 1e-3
    assert r.dual_objective <= r.primal_tv + 1e-7 * r.primal_tv
    assert abs(r.duality_gap) <= 1e-4 * r.primal_tv
    assert r.sign_residual <= 1e-2
    assert np.all(r.support_residuals >= -2e-3)


def test_recover_fourier_examples():
    u = fourier_moments(DiscreteMeasure([0.77], [-1 + 2j]), 20)
    r = recover_fourier(u)
    assert len(r.measure) == 1 and abs(r.measure.support[0] - 0.77) <= 1e-8
    rng = np.random.default_rng(2)
    mu = spaced_measure(rng, 5, 2.5 / 20)
    r = recover_fourier(fourier_moments(mu, 20))
    assert support_error(r.measure.support, mu.support) <= 1e-3


def test_scale_equivariance():
    rng = np.random.default_rng(3)
    params = WindowParams.strict_preset(10)
    mu = spaced_measure(rng, 3, 1.5 / 10)
    Y = stft_coefficients(mu, params)
    r1 = recover(Y)
    r2 = recover(StftMeasurements(params, 7.5 * Y.matrix))
    assert r1.measure.support.size == r2.measure.support.size == 3
    assert np.allclose(r1.measure.support, r2.measure.support, rtol=0, atol=1e-9)
    assert np.allclose(r2.measure.amplitudes, 7.5 * r1.measure.amplitudes, rtol=1e-7, atol=0)


def test_weak_duality_on_random_runs():
    rng = np.random.default_rng(4)
    for _ in range(5):
        M = int(rng.integers(3, 15))
        mu = DiscreteMeasure.from_atoms(rng.uniform(size=4), rng.normal(size=4) + 1j)
        r = recover_fourier(fourier_moments(mu, M))
        # the true measure is feasible, so its TV bounds every dual value
        assert r.dual_objective <= mu.tv_norm + 1e-7 * mu.tv_norm
        if r.diagnostics["degenerate"]:
            # no measure is reported for a flat dual, so there is no primal value to compare
            assert not r.reliable and len(r.measure) == 0
        else:
            assert r.duality_gap >= -1e-7 * max(r.primal_tv, 1)


def test_result_serialization():
    r = recover_fourier(fourier_moments(DiscreteMeasure([0.25], [1.0]), 5))
    d = r.to_dict()
    assert set(d) == {"atoms", "dual_objective", "primal_tv", "duality_gap", "diagnostics"}
    assert d["atoms"][0]["t"] == pytest.approx(0.25, abs=1e-9)
    assert "iterations" in d["diagnostics"]


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(grid_oversampling=2)
    with pytest.raises(ValueError):
        SolverOptions(convergence_tolerance=0)
    with pytest.raises(ValueError):
        SolverOptions(max_iterations=0)
