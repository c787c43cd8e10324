"""Cocycle weights m_t along a semiflow.

Three kinds are supported: exponential cocycles exp(int_0^t g(phi_s) ds),
coboundaries omega(phi_t)/omega and the derivative cocycle phi_t'.
Exponential weights are integrated in log space together with the flow
and exponentiated once, so no complex logarithm is ever taken.
"""
from dataclasses import dataclass
import logging

import numpy as np

from analytic_core import AnalyticFunction, DISK, random_disk_points
from config import Config
from errors import DegenerateWeightError
from semiflow import flow_integrate

logger = logging.getLogger(__name__)

EXPONENTIAL = 'exponential'
COBOUNDARY = 'coboundary'
DERIVATIVE = 'derivative'
KINDS = (EXPONENTIAL, COBOUNDARY, DERIVATIVE)


@dataclass(frozen=True, eq=False)
class CocycleSpec:
    """Weight kind plus the semiflow generator it is attached to"""

    kind: str
    G: AnalyticFunction
    function: AnalyticFunction = None
    sample_points: np.ndarray = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown cocycle kind {self.kind!r}")
        if self.kind != DERIVATIVE and self.function is None:
            raise ValueError(f"{self.kind} cocycle needs a function")
        sup_real = None
        if self.kind == EXPONENTIAL:
            points = self.sample_points
            if points is None:
                if self.G.domain != DISK:
                    raise ValueError("sample points are required for cocycles on a Jordan domain")
                points = random_disk_points(Config.SUP_SAMPLE_POINTS, radius=0.999)
            sup_real = float(np.max(np.real(self.function(points))))
            if not np.isfinite(sup_real):
                raise ValueError(f"sup Re g is not finite for {self.function.name}")
            logger.debug(f"exponential cocycle {self.function.name}: sup Re g ~ {sup_real:.6g}")
        object.__setattr__(self, 'sup_real', sup_real)

    @classmethod
    def exponential(cls, G, g, sample_points=None):
        return cls(EXPONENTIAL, G, g, sample_points)

    @classmethod
    def coboundary(cls, G, omega):
        return cls(COBOUNDARY, G, omega)

    @classmethod
    def derivative(cls, G):
        return cls(DERIVATIVE, G)


def _checked_omega(omega, z):
    values = omega(z)
    if np.any(np.abs(values) < 1e-12):
        logger.error(f"coboundary weight {omega.name} vanishes at an evaluation point")
        raise DegenerateWeightError(f"|{omega.name}| < 1e-12 at an evaluation point")
    return values


def cocycle_eval(spec, z, t, tol=None):
    """
    Weight m_t(z) for the given cocycle

    Args:
        spec (CocycleSpec): cocycle kind, generator and weight function
        z: point(s) in the domain of the generator
        t (float): time, t >= 0
        tol (float): flow integration tolerance

    Returns:
        complex or np.ndarray
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t == 0:
        return np.ones(np.shape(z), dtype=complex)[()]
    if spec.kind == EXPONENTIAL:
        result = flow_integrate(spec.G, z, t, tol, weight=spec.function)
        return np.exp(result.weight_integral)
    if spec.kind == COBOUNDARY:
        start = _checked_omega(spec.function, z)
        end = flow_integrate(spec.G, z, t, tol).endpoint
        return _checked_omega(spec.function, end) / start
    return flow_integrate(spec.G, z, t, tol).derivative


def cocycle_identity_residual(spec, s, t, sample_points, tol=None):
    """max |m_{s+t}(z) - m_s(phi_t(z)) m_t(z)| over the samples"""
    if s < 0 or t < 0:
        raise ValueError("s and t must be non-negative")
    z = np.asarray(sample_points, dtype=complex)
    inner = flow_integrate(spec.G, z, t, tol).endpoint
    lhs = cocycle_eval(spec, z, s + t, tol)
    rhs = cocycle_eval(spec, inner, s, tol) * cocycle_eval(spec, z, t, tol)
    return float(np.max(np.abs(lhs - rhs)))


def derivative_vs_exponential_check(G, z, t, tol=None):
    """|phi_t'(z) - exp(int_0^t G'(phi_s(z)) ds)| from the variational equation
    and from integrating G' along the flow"""
    result = flow_integrate(G, z, t, tol)
    gap = np.abs(result.derivative - np.exp(result.log_derivative_integral))
    return float(np.max(gap))


def exponential_of(h):
    """omega = exp(h) as an analytic function (coboundary weight)"""
    return AnalyticFunction(lambda z: np.exp(h(z)), lambda z: h.derivative(z) * np.exp(h(z)),
                            domain=h.domain, name=f"exp({h.name})")

