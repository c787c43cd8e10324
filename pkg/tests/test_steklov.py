import numpy as np
import pytest

from analytic_core import AnalyticFunction, BoundaryGrid, BoundarySignal, PowerSeries
from conformal import identity_map
from errors import DomainError, IntegrationError, InvalidGeneratorError, UnsupportedDataError
from semiflow import dilation, dtn_generator, parabolic, transplant_generator
from steklov import (RobinProblem, dtn_domain_relation_residual, dtn_multiplier_evolve,
                     generator_consistency_order, lax_evolve, littlewood_bound_check,
                     robin_evolve, robin_generator_apply, strong_continuity_residuals)

Z = AnalyticFunction.identity()


def monomial(grid, n, c=1.0):
    return BoundarySignal.from_modes(grid, {n: c})


def test_dtn_multiplier_damps_modes(small_grid):
    h = monomial(small_grid, 2)
    assert dtn_multiplier_evolve(h, 1.0).coefficient(2) == pytest.approx(np.exp(-2.0))
    np.testing.assert_allclose(dtn_multiplier_evolve(h, 0.0).samples, h.samples)
    constant = monomial(small_grid, 0, 3.0)
    np.testing.assert_allclose(dtn_multiplier_evolve(constant, 5.0).samples, 3.0, atol=1e-14)
    with pytest.raises(ValueError):
        dtn_multiplier_evolve(h, -1.0)


def test_lax_evolve_closed_forms(small_grid):
    cos = BoundarySignal.from_function(small_grid, np.cos)
    np.testing.assert_allclose(lax_evolve(cos, 1.0).samples, np.exp(-1.0) * np.cos(small_grid.angles),
                               atol=1e-14)
    assert lax_evolve(cos, 0.0) is cos
    h = monomial(small_grid, 3)
    assert lax_evolve(h, 0.5).coefficient(3) == pytest.approx(0.223130, abs=1e-6)


@pytest.mark.parametrize('t', [0.1, 0.5, 1.0, 2.0])
def test_oracles_agree(grid, t):
    rng = np.random.default_rng(5)
    modes = {n: rng.normal() + 1j * rng.normal() for n in range(-64, 65)}
    h = BoundarySignal.from_modes(grid, modes)
    gap = np.abs(lax_evolve(h, t).coeffs - dtn_multiplier_evolve(h, t).coeffs)
    assert np.max(gap) <= 1e-9


def test_robin_evolve_monomial(grid):
    u0 = monomial(grid, 3)
    free = robin_evolve(RobinProblem(dilation(), u0), 0.5)
    assert free.coefficient(3) == pytest.approx(np.exp(-1.5), abs=1e-8)
    weighted = robin_evolve(RobinProblem(dilation(), u0, AnalyticFunction.constant(1.0)), 0.5)
    assert weighted.coefficient(3) == pytest.approx(np.exp(-1.0), abs=1e-8)
    assert np.max(np.abs(weighted.coeffs - np.exp(0.5) * free.coeffs)) <= 1e-8


def test_robin_evolve_time_zero(grid, zoo):
    u0 = BoundarySignal.from_modes(grid, {0: 1.0, 2: 0.5j, 7: -1.0})
    for G in zoo.values():
        prob = RobinProblem(G, u0, Z)
        assert np.max(np.abs(robin_evolve(prob, 0.0).samples - u0.samples)) <= 1e-10
        with pytest.raises(ValueError):
            robin_evolve(prob, -0.1)


@pytest.mark.parametrize('t', [0.1, 0.5, 1.0, 2.0])
def test_robin_matches_dtn_multiplier(grid, t):
    u0 = BoundarySignal.from_modes(grid, {n: 1.0 / (1 + n) for n in range(0, 33)})
    evolved = robin_evolve(RobinProblem(dilation(), u0), t)
    assert np.max(np.abs(evolved.coeffs - dtn_multiplier_evolve(u0, t).coeffs)) <= 1e-7


@pytest.mark.parametrize('c', [-1.0, 0.5, 1.0])
def test_robin_constant_weight_shift(grid, c):
    u0 = BoundarySignal.from_modes(grid, {n: 1.0 for n in range(0, 17)})
    t = 0.7
    evolved = robin_evolve(RobinProblem(dilation(), u0, AnalyticFunction.constant(c)), t)
    expected = np.exp((c - np.abs(grid.modes)) * t) * u0.coeffs
    assert np.max(np.abs(evolved.coeffs - expected)) <= 1e-7


def test_robin_semigroup_law(grid, zoo):
    u0 = BoundarySignal.from_modes(grid, {0: 0.5, 1: 1.0, 2: -0.25})
    s, t = 0.3, 0.5
    for G in zoo.values():
        prob = RobinProblem(G, u0, Z)
        at_once = robin_evolve(prob, s + t)
        stepwise = robin_evolve(prob.with_initial(robin_evolve(prob, t)), s)
        assert np.max(np.abs(at_once.coeffs - stepwise.coeffs)) <= 1e-7


def test_robin_evolve_rejects_harmonic_data(small_grid):
    prob = RobinProblem(dilation(), BoundarySignal.from_function(small_grid, np.cos))
    assert not prob.analytic_flag
    with pytest.raises(UnsupportedDataError):
        robin_evolve(prob, 1.0)
    with pytest.raises(UnsupportedDataError):
        robin_generator_apply(prob)


def test_robin_evolve_reports_failing_node():
    grid = BoundaryGrid(16)
    bad = grid.points[5]
    G = AnalyticFunction(lambda z: np.where(z == bad, np.nan, -z), lambda z: -np.ones_like(z), name='-z')
    prob = RobinProblem(G, monomial(grid, 1))
    for threads in (0, 4):
        with pytest.raises(IntegrationError) as info:
            robin_evolve(prob, 0.5, threads=threads)
        assert info.value.node == 5


def test_problem_validation(small_grid, polynomial_map):
    u0 = monomial(small_grid, 1)
    outward = AnalyticFunction(lambda z: z, lambda z: np.ones_like(z), name='z')
    with pytest.raises(InvalidGeneratorError):
        RobinProblem(outward, u0)
    with pytest.raises(DomainError):
        RobinProblem(transplant_generator(dilation(), polynomial_map), u0)


def test_robin_on_polynomial_domain(polynomial_map):
    k = polynomial_map
    u0 = BoundarySignal.from_modes(k.grid, {0: 1.0, 3: 1.0, 5: 0.5})
    prob = RobinProblem(dtn_generator(k), u0, conformal_map=k)
    assert prob.domain_name == k.name
    evolved = robin_evolve(prob, 0.5)
    assert np.max(np.abs(evolved.coeffs - dtn_multiplier_evolve(u0, 0.5).coeffs)) <= 1e-8


def test_generator_apply_closed_forms(small_grid):
    square = robin_generator_apply(RobinProblem(dilation(), monomial(small_grid, 2)))
    np.testing.assert_allclose(square.samples, -2 * small_grid.points ** 2, atol=1e-13)

    constant = robin_generator_apply(RobinProblem(dilation(), monomial(small_grid, 0),
                                                  AnalyticFunction.constant(0.7)))
    np.testing.assert_allclose(constant.samples, 0.7, atol=1e-14)

    parabolic_problem = RobinProblem(parabolic(), monomial(small_grid, 1))
    applied = robin_generator_apply(parabolic_problem)
    np.testing.assert_allclose(applied.samples, (small_grid.points - 1) ** 2, atol=1e-13)

    def difference(t):
        return (robin_evolve(parabolic_problem, t, tol=1e-12).samples - parabolic_problem.u0.samples) / t

    extrapolated = 2 * difference(5e-4) - difference(1e-3)
    assert np.max(np.abs(extrapolated - applied.samples)) <= 1e-4


def test_generator_needs_headroom(grid):
    with pytest.raises(UnsupportedDataError):
        robin_generator_apply(RobinProblem(dilation(), monomial(grid, 100)))


def test_dtn_domain_relation(grid, polynomial_map):
    disk = identity_map(grid)
    assert dtn_domain_relation_residual(disk, monomial(grid, 2)) <= 1e-8
    assert dtn_domain_relation_residual(disk, monomial(grid, 0)) <= 1e-12
    h = BoundarySignal.from_modes(grid, {-2: 0.5, 1: 1.0, 3: 1j})
    assert dtn_domain_relation_residual(disk, h) <= 1e-8
    assert dtn_domain_relation_residual(polynomial_map, monomial(polynomial_map.grid, 1)) <= 1e-5


def test_consistency_order(small_grid):
    t_list = [1e-2, 1e-3, 1e-4]
    order = generator_consistency_order(RobinProblem(dilation(), monomial(small_grid, 2)), t_list)
    assert order.slope == pytest.approx(1.0, abs=0.2)
    assert len(order.residuals) == 3

    order = generator_consistency_order(RobinProblem(parabolic(), monomial(small_grid, 1), Z), t_list)
    assert order.slope == pytest.approx(1.0, abs=0.3)


def test_consistency_for_constant_data(small_grid):
    order = generator_consistency_order(RobinProblem(dilation(), monomial(small_grid, 0, 2.0)),
                                        [1e-2, 1e-3, 1e-4])
    assert np.isnan(order.slope)
    assert max(order.residuals) <= 1e-10


def test_consistency_validates_times(small_grid):
    prob = RobinProblem(dilation(), monomial(small_grid, 1))
    with pytest.raises(ValueError):
        generator_consistency_order(prob, [1e-2, 1e-3])
    with pytest.raises(ValueError):
        generator_consistency_order(prob, [0.5, 1e-2, 1e-3])


def test_littlewood_closed_forms():
    grid = BoundaryGrid(64)
    prob = RobinProblem(dilation(), monomial(grid, 0))
    norm, bound = littlewood_bound_check(PowerSeries([1.0]), prob, 0.8, 2.0)
    assert norm == pytest.approx(1.0, abs=1e-10)
    assert bound == pytest.approx(1.0, abs=1e-10)
    assert littlewood_bound_check(PowerSeries([0.0]), prob, 0.8, 2.0) == (0.0, 0.0)

    prob = RobinProblem(parabolic(), monomial(grid, 0))
    norm, bound = littlewood_bound_check(PowerSeries.monomial(1), prob, 1.0, 2.0)
    assert bound == pytest.approx(3.0 * np.sqrt(0.5), rel=1e-6)
    assert norm <= bound * (1 + 1e-3)


@pytest.mark.parametrize('p', [2.0, 3.0])
def test_littlewood_with_dissipative_weight(p):
    grid = BoundaryGrid(64)
    prob = RobinProblem(parabolic(), monomial(grid, 0), AnalyticFunction.constant(-0.5))
    f = PowerSeries([1.0, -0.5, 0.25])
    for t in (0.1, 0.5, 1.0):
        norm, bound = littlewood_bound_check(f, prob, t, p)
        assert norm <= bound * (1 + 1e-3)


def test_strong_continuity():
    grid = BoundaryGrid(64)
    prob = RobinProblem(parabolic(), monomial(grid, 0), Z)
    residuals = strong_continuity_residuals(PowerSeries([1.0, 1.0, 1.0]), prob, [0.5, 0.1, 0.01, 0.0], 2.0)
    assert all(later < earlier for earlier, later in zip(residuals, residuals[1:]))
    assert residuals[-1] == 0
