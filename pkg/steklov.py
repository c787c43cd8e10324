"""Boundary evolution solvers.

The Dirichlet-to-Neumann semigroup on the disk is available twice: as
the Fourier multiplier e^{-|n|t} and as composition with the dilation
flow (Lax). The Dirichlet-to-Robin evolution on the disk or on a Jordan
domain is the trace of the weighted composition semigroup
S_t u = m_t (u o phi_t), integrated node by node on the disk side.

Sign convention: robin_generator_apply returns Tr(g u + G u') which is
-D_R u0, so d/dt robin_evolve at t = 0 equals robin_generator_apply.
"""
from collections import namedtuple
from dataclasses import dataclass
import logging

import numpy as np

from analytic_core import (AnalyticFunction, BoundarySignal, DISK, PowerSeries, bergman_nodes,
                           bergman_norm, fourier_synthesize, poisson_extend, random_disk_points)
from config import Config
from errors import (DegenerateMapError, DomainError, InvalidGeneratorError, SizeError,
                    UnsupportedDataError)
from semiflow import angle_condition_check, flow_integrate, flow_integrate_many, pullback_generator

logger = logging.getLogger(__name__)

LittlewoodBound = namedtuple('LittlewoodBound', ['norm', 'bound'])
ConsistencyOrder = namedtuple('ConsistencyOrder', ['slope', 'residuals'])


@dataclass(frozen=True, eq=False)
class RobinProblem:
    """
    Evolution d/dt u = g u + G d_z u with harmonic u and initial trace u0.

    On a Jordan domain u0 holds values at the boundary table points of
    conformal_map, so its coefficients are the disk-side coefficients.
    All computation happens on the disk side with the pulled-back
    generator and weight.
    """

    G: AnalyticFunction
    u0: BoundarySignal
    g: AnalyticFunction = None
    conformal_map: object = None

    def __post_init__(self):
        k = self.conformal_map
        if k is None:
            if self.G.domain != DISK:
                raise DomainError(f"generator {self.G.name} lives on {self.G.domain}, not on the disk")
            disk_G, disk_g = self.G, self.g
        else:
            if self.u0.grid.n_points != k.grid.n_points:
                raise SizeError("initial data must be sampled on the boundary table of the map")
            disk_G = self.G if self.G.domain == DISK else pullback_generator(self.G, k)
            disk_g = None
            if self.g is not None:
                disk_g = self.g if self.g.domain == DISK else self.g.compose(k.k_inverse)
        object.__setattr__(self, 'disk_G', disk_G)
        object.__setattr__(self, 'disk_g', disk_g)

        margin = angle_condition_check(disk_G, self.u0.grid)
        if margin > Config.ANGLE_TOL:
            raise InvalidGeneratorError(f"{self.G.name} points outwards near the boundary "
                                        f"(angle margin {margin:.3e})")
        object.__setattr__(self, 'angle_margin', margin)

        sup_real = None
        if disk_g is not None:
            sup_real = float(np.max(np.real(disk_g(random_disk_points(Config.SUP_SAMPLE_POINTS,
                                                                      radius=Config.PROBE_RADIUS)))))
            if not np.isfinite(sup_real):
                raise InvalidGeneratorError(f"sup Re g is not finite for {disk_g.name}")
        object.__setattr__(self, 'sup_real_g', sup_real)
        object.__setattr__(self, 'analytic_flag', self.u0.is_analytic())

    @property
    def grid(self):
        return self.u0.grid

    @property
    def domain_name(self):
        return DISK if self.conformal_map is None else self.conformal_map.name

    def holomorphic_extension(self):
        """Disk-side power series of u0, requires analytic data"""
        if not self.analytic_flag:
            raise UnsupportedDataError(f"initial data has negative modes up to "
                                       f"{self.u0.negative_mode_size():.3e}")
        return PowerSeries.from_signal(self.u0)

    def with_initial(self, u0):
        return RobinProblem(self.G, u0, self.g, self.conformal_map)


# Disk Dirichlet-to-Neumann oracles -------------------------------------------

def dtn_multiplier_evolve(h, t):
    """Mode n of h damped by e^{-|n| t}"""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    return BoundarySignal.from_coefficients(h.grid, h.coeffs * np.exp(-np.abs(h.grid.modes) * t))


def lax_evolve(h, t):
    """T_t h(e^{i theta}) = u(e^{-t} e^{i theta}), u the harmonic extension of h"""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t == 0:
        return h
    return BoundarySignal(h.grid, poisson_extend(h, np.exp(-t), h.grid.angles))


# Dirichlet-to-Robin evolution ----------------------------------------------------

def robin_evolve(prob, t, tol=None, threads=None):
    """
    Trace of m_t (u o phi_t) at the boundary nodes

    Args:
        prob (RobinProblem): generator, weight and analytic initial data
        t (float): time, t >= 0
        tol (float): flow tolerance per node
        threads (int): worker threads (defaults to Config.THREADS)

    Returns:
        BoundarySignal
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    U = prob.holomorphic_extension()
    if t == 0:
        return prob.u0
    nodes = prob.grid.points
    result = flow_integrate_many(prob.disk_G, nodes, t, tol, weight=prob.disk_g, threads=threads)
    values = U(result.endpoint)
    if prob.disk_g is not None:
        values = np.exp(result.weight_integral) * values
    logger.info(f"Robin evolution on {prob.domain_name} to t={t:g}: {result.steps_taken} steps")
    return BoundarySignal(prob.grid, values)


def _check_headroom(signal):
    n = signal.grid.n_points
    top = np.abs(signal.grid.modes) >= 3 * n // 8
    scale = max(1.0, float(np.max(np.abs(signal.coeffs))))
    if np.any(np.abs(signal.coeffs[top]) > 1e-8 * scale):
        raise UnsupportedDataError("initial data is not band-limited enough to differentiate")


def robin_generator_apply(prob):
    """Tr(g u + G u') on the disk side (equals -D_R u0)"""
    U = prob.holomorphic_extension()
    _check_headroom(prob.u0)
    w = prob.grid.points
    values = prob.disk_G(w) * U.derivative()(w)
    if prob.disk_g is not None:
        values = values + prob.disk_g(w) * U(w)
    return BoundarySignal(prob.grid, values)


def dtn_domain_relation_residual(conformal_map, h):
    """
    max_j |-d_nu u - Tr((G . grad u) |k'|)| with G = -k/k'

    u is the transplanted harmonic extension U o k of h. The normal
    derivative uses the disk multiplier |n| scaled by |k'|; the right side
    evaluates G at the table points through the forward map and the
    Wirtinger derivatives of U.
    """
    k = conformal_map
    grid = h.grid
    if grid.n_points != k.grid.n_points:
        raise SizeError("h must be sampled on the boundary table of the map")
    coeffs = h.coeffs
    modes = grid.modes
    half = grid.n_points // 2

    abs_k_prime = 1.0 / np.abs(k.inverse_derivative(grid.points))
    if np.any(abs_k_prime < 1e-10):
        raise DegenerateMapError(f"{k.name}: |k'| below 1e-10 on the boundary")
    lhs = -abs_k_prime * fourier_synthesize(np.abs(modes) * coeffs, grid)

    w = k.forward(k.table)
    k_prime = 1.0 / k.inverse_derivative(w)
    G = -w / k_prime
    positive = coeffs[half + 1:]                     # h_1 .. h_{N/2-1}
    negative = coeffs[half - 1::-1]                  # h_-1 .. h_-N/2
    U_w = PowerSeries(positive * np.arange(1, positive.size + 1))(w)
    U_wbar = PowerSeries(negative * np.arange(1, negative.size + 1))(np.conj(w))
    u_z = U_w * k_prime
    u_zbar = U_wbar * np.conj(k_prime)
    rhs = np.abs(k_prime) * (u_z * G + u_zbar * np.conj(G))
    return float(np.max(np.abs(lhs - rhs)))


def generator_consistency_order(prob, t_list, tol=1e-12):
    """
    Slope of log ||(S_t u0 - u0)/t - Gamma u0|| against log t

    Returns:
        ConsistencyOrder: slope (nan when every residual is below 1e-10) and
        the residual per t
    """
    t_list = [float(t) for t in t_list]
    if len(t_list) < 3:
        raise ValueError("at least three times are needed to fit an order")
    if any(not 0 < t <= 0.1 for t in t_list):
        raise ValueError("times must lie in (0, 0.1]")
    gamma = robin_generator_apply(prob).samples
    u0 = prob.u0.samples
    residuals = []
    for t in t_list:
        evolved = robin_evolve(prob, t, tol).samples
        gap = (evolved - u0) / t - gamma
        residuals.append(float(np.sqrt(np.mean(np.abs(gap) ** 2))))
    logger.debug(f"consistency residuals {residuals}")
    if max(residuals) <= 1e-10:
        return ConsistencyOrder(float('nan'), residuals)
    slope = np.polyfit(np.log(t_list), np.log(np.maximum(residuals, 1e-300)), 1)[0]
    return ConsistencyOrder(float(slope), residuals)


# Weighted composition on Bergman spaces -----------------------------------------

def _weighted_composition(f, prob, t, points, tol=None):
    flat = np.ravel(points)
    result = flow_integrate_many(prob.disk_G, flat, t, tol, weight=prob.disk_g)
    values = f(result.endpoint)
    if prob.disk_g is not None:
        values = np.exp(result.weight_integral) * values
    return values.reshape(np.shape(points))


def littlewood_bound_check(f, prob, t, p, tol=None):
    """
    Bergman norm of m_t (f o phi_t) against the subordination bound
    ||m_t||_inf^(1/p) (1 + |phi_t(0)|)/(1 - |phi_t(0)|) ||f||_{A^p}

    Norms are taken on the disk side; the sup of |m_t| is sampled at
    Config.SUP_SAMPLE_POINTS interior points.

    Returns:
        LittlewoodBound
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if not np.any(np.asarray(f.coeffs)):
        return LittlewoodBound(0.0, 0.0)
    points, weights = bergman_nodes(Config.RADIAL_POINTS, Config.ANGULAR_POINTS)
    values = _weighted_composition(f, prob, t, points, tol)
    norm = float(np.sum(np.abs(values) ** p * weights) ** (1.0 / p))

    m_sup = 1.0
    if prob.disk_g is not None:
        samples = random_disk_points(Config.SUP_SAMPLE_POINTS, radius=Config.PROBE_RADIUS)
        weight = flow_integrate(prob.disk_G, samples, t, tol, weight=prob.disk_g).weight_integral
        m_sup = float(np.max(np.abs(np.exp(weight))))
    a = abs(flow_integrate(prob.disk_G, 0j, t, tol).endpoint)
    bound = m_sup ** (1.0 / p) * (1 + a) / (1 - a) * bergman_norm(f, p)
    logger.debug(f"Littlewood check t={t:g} p={p:g}: norm {norm:.6g}, bound {bound:.6g}")
    return LittlewoodBound(norm, bound)


def strong_continuity_residuals(f, prob, t_list, p, tol=None):
    """||S_t f - f||_{A^p} for each t in t_list"""
    points, weights = bergman_nodes(Config.RADIAL_POINTS, Config.ANGULAR_POINTS)
    base = f(points)
    residuals = []
    for t in t_list:
        values = _weighted_composition(f, prob, t, points, tol) if t > 0 else base
        residuals.append(float(np.sum(np.abs(values - base) ** p * weights) ** (1.0 / p)))
    return residuals
