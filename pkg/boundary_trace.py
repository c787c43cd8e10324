"""Boundary values of interior functions.

Radial boundary functions f_r, radial traces with per-mode compensation,
and distributional boundary values of Bergman functions obtained by
pairing the antiderivative against test functions as r -> 1-.
"""
from collections import namedtuple
from dataclasses import dataclass, field
import logging

import numpy as np

from analytic_core import (BoundaryGrid, BoundarySignal, PowerSeries, antiderivative,
                           bergman_norm, hardy_norm_Mp)
from config import Config
from errors import DomainError, ProbeError

logger = logging.getLogger(__name__)

AntiderivativeBound = namedtuple('AntiderivativeBound', ['lhs', 'rhs', 'displayed_rhs'])


def _next_power_of_two(n):
    return 1 << max(3, int(np.ceil(np.log2(max(n, 1)))))


def _table_points(conformal_map, grid, r):
    w = r * grid.points
    return w if conformal_map is None else conformal_map.inverse(w)


def radial_boundary_function(f, conformal_map, r, grid):
    """
    Samples of f_r(x) = f(k^-1(r k(x))) at the boundary table points

    Args:
        f: function on Omega (on the disk when conformal_map is None)
        conformal_map (ConformalMap): map k: Omega -> D, or None for the disk
        r (float): radius in (0, 1)
        grid (BoundaryGrid): table grid

    Returns:
        BoundarySignal
    """
    if not 0 < r < 1:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    values = f(_table_points(conformal_map, grid, r))
    if not np.all(np.isfinite(values)):
        raise ProbeError(f"non-finite values of the radial function at r={r}")
    return BoundarySignal(grid, values)


def trace(field_function, conformal_map=None, grid=None, r_trace=None):
    """Boundary trace from values at k^-1(r e^{i theta_j}), mode n rescaled by r^-|n|"""
    grid = grid or BoundaryGrid(Config.GRID_SIZE)
    r_trace = r_trace or Config.TRACE_RADIUS
    values = field_function(_table_points(conformal_map, grid, r_trace))
    if not np.all(np.isfinite(values)):
        raise ProbeError(f"non-finite field values at trace radius {r_trace}")
    probe = BoundarySignal(grid, values)
    compensation = np.power(r_trace, -np.abs(grid.modes).astype(float))
    return BoundarySignal.from_coefficients(grid, probe.coeffs * compensation)


@dataclass(frozen=True, eq=False)
class BoundaryDistributionPairing:
    """Bergman-class series f with its antiderivative F and an r-sequence towards 1"""

    f: PowerSeries
    p: float = 1.0
    r_sequence: tuple = field(default_factory=lambda: Config.PAIRING_RADII)

    def __post_init__(self):
        radii = np.asarray(self.r_sequence, dtype=float)
        if radii.size == 0 or np.any(np.diff(radii) <= 0) or radii[-1] >= 1 or radii[0] <= 0:
            raise DomainError("r_sequence must be strictly increasing inside (0, 1)")
        if self.p < 1:
            raise DomainError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, 'F', antiderivative(self.f))

    @property
    def conjugate_exponent(self):
        return np.inf if self.p == 1 else self.p / (self.p - 1)


@dataclass(frozen=True)
class PairingResult:
    value: complex
    converged: bool
    radius: float
    history: list = field(default_factory=list, repr=False)
    form_gap: float = 0.0


def _check_test_function(phi):
    quarter = phi.grid.n_points // 4
    outside = np.abs(phi.grid.modes) > quarter
    scale = max(1.0, float(np.max(np.abs(phi.coeffs))))
    if np.any(np.abs(phi.coeffs[outside]) > 1e-12 * scale):
        raise ValueError(f"test function must be a trigonometric polynomial of degree <= {quarter}")


def pairing_forms(pairing, phi, r):
    """
    Direct and integration-by-parts forms of (1/2pi) int f(re^{it}) phi(e^{it}) dt.

    With chi(t) = phi(e^{it}) / (i r e^{it}) the second form reads
    -(1/2pi) int F(re^{it}) chi'(t) dt; the boundary term vanishes by
    periodicity. Both use a trapezoid rule fine enough to be exact.
    """
    quarter = phi.grid.n_points // 4
    n_quad = _next_power_of_two(max(phi.grid.n_points, pairing.F.degree + quarter + 2))
    fine = phi.resample(n_quad)
    theta = fine.grid.angles
    direct = np.mean(pairing.f.circle_samples(r, n_quad) * fine.samples)
    chi = BoundarySignal(fine.grid, fine.samples * np.exp(-1j * theta) / (1j * r))
    by_parts = -np.mean(pairing.F.circle_samples(r, n_quad) * chi.derivative().samples)
    return complex(direct), complex(by_parts)


def distributional_pairing(pairing, phi):
    """
    Limit of the boundary pairing <f*, phi> along pairing.r_sequence

    Convergence is declared once successive values differ by less than
    Config.PAIRING_TOL; otherwise the result is flagged as not converged.

    Returns:
        PairingResult
    """
    _check_test_function(phi)
    bergman_norm(pairing.f, pairing.p)  # raises QuadratureError outside the class
    history, previous, gap = [], None, 0.0
    for r in pairing.r_sequence:
        direct, by_parts = pairing_forms(pairing, phi, r)
        gap = max(gap, abs(direct - by_parts))
        history.append((r, direct, by_parts))
        if previous is not None and abs(by_parts - previous) < Config.PAIRING_TOL:
            return PairingResult(by_parts, True, r, history, gap)
        previous = by_parts
    logger.warning(f"pairing did not converge along r -> 1 (last change "
                   f"{abs(history[-1][2] - history[-2][2]) if len(history) > 1 else np.nan:.3e})")
    return PairingResult(previous, False, pairing.r_sequence[-1], history, gap)


def domain_pairing(f, conformal_map, phi, r_sequence=None):
    """
    Limit of int_{dOmega} f_r(x) phi(x) dx with the complex line element
    dx = (k^-1)'(e^{it}) i e^{it} dt carried by the boundary table.

    Args:
        f: function on Omega
        conformal_map (ConformalMap): map of Omega; phi is sampled at its table
        phi (BoundarySignal): test function values at the table points
    """
    r_sequence = r_sequence or Config.PAIRING_RADII
    grid = phi.grid
    w = grid.points
    line_element = conformal_map.inverse_derivative(w) * 1j * w
    history, previous = [], None
    for r in r_sequence:
        values = radial_boundary_function(f, conformal_map, r, grid).samples
        value = complex(2.0 * np.pi * np.mean(values * phi.samples * line_element))
        history.append((r, value, value))
        if previous is not None and abs(value - previous) < Config.PAIRING_TOL:
            return PairingResult(value, True, r, history)
        previous = value
    logger.warning(f"domain pairing on {conformal_map.name} did not converge")
    return PairingResult(previous, False, r_sequence[-1], history)


def antiderivative_bound_check(f, p, eps, r):
    """
    Integral mean of the antiderivative against its Bergman-norm bound

    Returns:
        AntiderivativeBound: lhs = M_p(r, F), rhs = ((r^p/eps)^(1/p) + eps r) ||f||_{A^p},
        and the displayed form (r^p/eps + (eps r)^p) ||f||_{A^p} for comparison
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if not 0 < eps < 1 or not 0 < r < 1:
        raise DomainError("eps and r must lie in (0, 1)")
    F = antiderivative(f)
    degree = F.degree
    lhs = hardy_norm_Mp(F, r, p, quad_points=_next_power_of_two(max(256, 4 * (degree + 1))))
    norm = bergman_norm(f, p, radial_points=max(Config.RADIAL_POINTS, degree + 2),
                        angular_points=_next_power_of_two(max(Config.ANGULAR_POINTS, 4 * (degree + 1))))
    rhs = ((r ** p / eps) ** (1.0 / p) + eps * r) * norm
    displayed = (r ** p / eps + (eps * r) ** p) * norm
    logger.debug(f"antiderivative bound: M_p={lhs:.6g}, bound={rhs:.6g}, displayed={displayed:.6g}")
    return AntiderivativeBound(lhs, rhs, displayed)
