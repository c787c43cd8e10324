import numpy as np
import numpy.testing as npt
import pytest

from analytic_core import (AnalyticFunction, BoundaryGrid, BoundarySignal, PowerSeries, antiderivative,
                           bergman_norm, fourier_analyze, fourier_synthesize, hardy_norm_Mp,
                           hardy_norm_domain, poisson_extend, random_disk_points)
from conformal import make_polynomial_map
from errors import DomainError, QuadratureError, SizeError


@pytest.mark.parametrize('n', [4, 12, 100, 7])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(SizeError):
        BoundaryGrid(n)


def test_grid_angles_and_modes():
    grid = BoundaryGrid(8)
    assert np.all(np.diff(grid.angles) > 0)
    assert grid.angles[0] == 0.0 and grid.angles[-1] < 2 * np.pi
    assert list(grid.modes) == [-4, -3, -2, -1, 0, 1, 2, 3]
    assert grid.index_of(0) == 4
    with pytest.raises(SizeError):
        grid.index_of(4)


def test_analyze_constant_and_pure_mode():
    grid = BoundaryGrid(8)
    coeffs = fourier_analyze(np.ones(8), grid)
    expected = np.zeros(8)
    expected[grid.index_of(0)] = 1.0
    npt.assert_allclose(coeffs, expected, atol=1e-15)

    coeffs = fourier_analyze(grid.points, grid)
    expected = np.zeros(8)
    expected[grid.index_of(1)] = 1.0
    npt.assert_allclose(coeffs, expected, atol=1e-15)


def test_synthesize_pure_mode():
    grid = BoundaryGrid(8)
    coeffs = np.zeros(8, dtype=complex)
    coeffs[grid.index_of(1)] = 1.0
    npt.assert_allclose(fourier_synthesize(coeffs, grid), grid.points, atol=1e-15)


@pytest.mark.parametrize('n', [8, 64, 256, 1024])
def test_round_trip(n):
    grid = BoundaryGrid(n)
    rng = np.random.default_rng(n)
    samples = rng.normal(size=n) + 1j * rng.normal(size=n)
    back = fourier_synthesize(fourier_analyze(samples, grid), grid)
    assert np.max(np.abs(back - samples)) <= 1e-12 * np.max(np.abs(samples))
    coeffs = rng.normal(size=n) + 1j * rng.normal(size=n)
    npt.assert_allclose(fourier_analyze(fourier_synthesize(coeffs, grid), grid), coeffs, atol=1e-12)


def test_length_mismatch():
    grid = BoundaryGrid(8)
    with pytest.raises(SizeError):
        fourier_analyze(np.ones(16), grid)
    with pytest.raises(SizeError):
        fourier_synthesize(np.ones(4), grid)
    with pytest.raises(SizeError):
        BoundarySignal(grid, np.ones(9))


def test_signal_views(small_grid):
    signal = BoundarySignal.from_modes(small_grid, {2: 1.0, -3: 0.5})
    assert signal.coefficient(2) == pytest.approx(1.0)
    assert signal.negative_mode_size() == pytest.approx(0.5)
    assert not signal.is_analytic()
    assert BoundarySignal.from_modes(small_grid, {0: 1.0, 5: 2.0}).is_analytic()
    derivative = signal.derivative()
    assert derivative.coefficient(2) == pytest.approx(2j)
    assert derivative.coefficient(-3) == pytest.approx(-1.5j)
    fine = signal.resample(256)
    npt.assert_allclose(fine.samples, np.exp(2j * fine.grid.angles) + 0.5 * np.exp(-3j * fine.grid.angles),
                        atol=1e-13)
    assert signal.norm() == pytest.approx(np.sqrt(1.25))


def test_samples_are_read_only(small_grid):
    signal = BoundarySignal.from_function(small_grid, np.cos)
    with pytest.raises(ValueError):
        signal.samples[0] = 2.0


def test_power_series_evaluation():
    f = PowerSeries([1.0, 2.0, 3.0])
    assert f(0.5) == pytest.approx(1 + 1 + 0.75)
    npt.assert_allclose(f.derivative().coeffs, [2.0, 6.0])
    assert PowerSeries.monomial(3).degree == 3


def test_circle_samples_fold_aliases():
    f = PowerSeries.geometric(40)
    theta = 2 * np.pi * np.arange(16) / 16
    npt.assert_allclose(f.circle_samples(0.7, 16), f(0.7 * np.exp(1j * theta)), atol=1e-13)


def test_analytic_function_derivatives_match_differences():
    points = random_disk_points(100)
    exp = AnalyticFunction(np.exp, np.exp, name='exp')
    square = AnalyticFunction.identity().times(AnalyticFunction.identity())
    for f in (exp, square, exp.compose(square), PowerSeries([1, -2, 0.5, 3]).as_function()):
        assert f.derivative_error(points) <= 1e-6


def test_poisson_extend_of_monomial_and_cosine(small_grid):
    z = BoundarySignal.from_modes(small_grid, {1: 1.0})
    assert poisson_extend(z, 0.5, 0.0) == pytest.approx(0.5)
    cos = BoundarySignal.from_function(small_grid, np.cos)
    assert poisson_extend(cos, 0.7, np.pi / 3) == pytest.approx(0.35)


def test_poisson_mean_value(small_grid):
    rng = np.random.default_rng(3)
    h = BoundarySignal(small_grid, rng.normal(size=64) + 1j * rng.normal(size=64))
    for theta in (0.0, 1.0, 4.0):
        assert poisson_extend(h, 0.0, theta) == pytest.approx(h.coefficient(0), abs=1e-14)


def test_poisson_extension_is_harmonic(small_grid):
    h = BoundarySignal.from_modes(small_grid, {n: 1.0 / (1 + abs(n)) for n in range(-8, 9)})
    z = random_disk_points(50, radius=0.8)
    step = 1e-3

    def u(w):
        return poisson_extend(h, np.abs(w), np.angle(w))

    laplacian = (u(z + step) + u(z - step) + u(z + 1j * step) + u(z - 1j * step) - 4 * u(z)) / step ** 2
    assert np.max(np.abs(laplacian)) <= 1e-4 * h.norm()


def test_poisson_extend_rejects_boundary(small_grid):
    h = BoundarySignal.from_modes(small_grid, {0: 1.0})
    with pytest.raises(DomainError):
        poisson_extend(h, 1.0, 0.0)


def test_hardy_norm_closed_forms():
    one = AnalyticFunction.constant(1.0)
    assert hardy_norm_Mp(one, 0.3, 3.0) == pytest.approx(1.0)
    assert hardy_norm_Mp(PowerSeries.monomial(2), 0.5, 2.0) == pytest.approx(0.25)
    cauchy = AnalyticFunction(lambda z: 1 / (1 - z), lambda z: 1 / (1 - z) ** 2)
    assert hardy_norm_Mp(cauchy, 0.9, 2.0) == pytest.approx(np.sqrt(1 / 0.19), rel=1e-9)


def test_hardy_norm_is_monotone():
    family = [PowerSeries([1.0, 0.5, -0.25]), PowerSeries.geometric(12), PowerSeries.monomial(5, 2.0)]
    radii = np.linspace(0.1, 0.95, 10)
    for f in family:
        for p in (1.0, 2.0, 3.5):
            values = [hardy_norm_Mp(f, r, p) for r in radii]
            assert all(a <= b + 1e-9 for a, b in zip(values, values[1:]))


def test_hardy_norm_domain():
    assert hardy_norm_domain(PowerSeries([1.0, 1.0]), 2.0, z0=0.5) == pytest.approx(np.sqrt(3), rel=1e-5)
    k = make_polynomial_map([0.2])
    z = AnalyticFunction(k.forward, k.forward_derivative, domain=k.name)
    assert hardy_norm_domain(z, 2.0, k, z0=0.1) == pytest.approx(1.0, rel=1e-5)


@pytest.mark.parametrize('f, p, expected', [
    (PowerSeries([1.0]), 1.0, 1.0),
    (PowerSeries.monomial(1), 2.0, np.sqrt(0.5)),
    (PowerSeries.monomial(3), 2.0, 0.5),
])
def test_bergman_norm_closed_forms(f, p, expected):
    assert bergman_norm(f, p) == pytest.approx(expected, rel=1e-10)


def test_bergman_norm_rejects_blow_up():
    pole = AnalyticFunction(lambda z: np.where(np.abs(z - 0.5) < 0.3, np.inf, 1.0), lambda z: 0 * z)
    with pytest.raises(QuadratureError):
        bergman_norm(pole, 1.0)


def test_antiderivative():
    npt.assert_allclose(antiderivative(PowerSeries([1.0])).coeffs, [0.0, 1.0])
    npt.assert_allclose(antiderivative(PowerSeries([0.0, 2.0])).coeffs, [0.0, 0.0, 1.0])
    f = PowerSeries.geometric(10)
    F = antiderivative(f)
    assert F(0.0) == 0
    npt.assert_allclose(F.derivative().coeffs, f.coeffs, rtol=1e-15)
