"""Semiflow generators and the flow ODE.

A generator G produces the semiflow d/dt phi_t = G(phi_t), phi_0 = id.
Flows are integrated with the Dormand-Prince 5(4) pair on an augmented
state that also carries the variational equation v' = G'(z) v, an optional
weight integral w' = g(z) and the log-derivative integral q' = G'(z).
All states of a batch share the step size; the error norm is the max over
the batch, so each node meets the tolerance individually.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging

import numpy as np

from analytic_core import AnalyticFunction, DISK, random_disk_points
from config import Config
from errors import (DegenerateMapError, IntegrationError, InvalidGeneratorError,
                    InvarianceViolationError, NumericalError, ProbeError)

logger = logging.getLogger(__name__)

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B_EMBEDDED = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bh for b, bh in zip(_B, _B_EMBEDDED))

_Z, _V, _W, _Q = range(4)


@dataclass(frozen=True)
class FlowResult:
    """Endpoint of the augmented flow system (arrays for batched starts)"""

    endpoint: object
    derivative: object
    weight_integral: object
    steps_taken: int
    est_error: float
    log_derivative_integral: object = 0j
    trajectory: list = field(default_factory=list, repr=False)


def _scalarize(value, scalar):
    return complex(value) if scalar else value


def flow_integrate(G, z0, t, tol=None, weight=None, record=False, max_steps=None):
    """
    Integrate z' = G(z), v' = G'(z) v (and w' = g(z)) from z0 up to time t

    Args:
        G (AnalyticFunction): semiflow generator
        z0: start point or array of start points in G's domain
        t (float): flow time, t >= 0
        tol (float): local error tolerance (absolute + relative)
        weight (AnalyticFunction): optional cocycle integrand g
        record (bool): keep (t, z, v) after each accepted step

    Returns:
        FlowResult
    """
    if t < 0:
        raise ValueError(f"flow time must be non-negative, got {t}")
    tol = tol or Config.ODE_TOL
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    max_steps = max_steps or Config.ODE_MAX_STEPS
    scalar = np.ndim(z0) == 0
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex)).copy()
    on_disk = G.domain == DISK

    y = np.zeros((4, z0.size), dtype=complex)
    y[_Z] = z0
    y[_V] = 1.0
    trajectory = [(0.0, z0.copy(), y[_V].copy())] if record else []

    def finish(state, steps, err):
        return FlowResult(
            endpoint=_scalarize(state[_Z, 0], scalar) if scalar else state[_Z].copy(),
            derivative=_scalarize(state[_V, 0], scalar) if scalar else state[_V].copy(),
            weight_integral=_scalarize(state[_W, 0], scalar) if scalar else state[_W].copy(),
            steps_taken=steps,
            est_error=err,
            log_derivative_integral=_scalarize(state[_Q, 0], scalar) if scalar else state[_Q].copy(),
            trajectory=trajectory,
        )

    if t == 0:
        return finish(y, 0, 0.0)

    def rhs(state):
        z = state[_Z]
        slope = G.derivative(z)
        out = np.empty_like(state)
        out[_Z] = G(z)
        out[_V] = slope * state[_V]
        out[_W] = weight(z) if weight is not None else 0.0
        out[_Q] = slope
        return out

    k1 = rhs(y)
    blown = ~np.all(np.isfinite(k1), axis=0)
    if np.any(blown):
        raise IntegrationError("generator is not finite at the start point(s)", partial=finish(y, 0, 0.0),
                               node=int(np.argmax(blown)))
    h = min(t, 0.1 / max(1.0, float(np.max(np.abs(k1)))))
    time, steps, worst = 0.0, 0, 0.0
    min_step = Config.ODE_MIN_STEP * max(1.0, t)
    ratio = np.zeros(y.shape)

    while time < t:
        if steps >= max_steps:
            raise IntegrationError(f"step budget of {max_steps} exhausted at t={time:.6g}",
                                   partial=finish(y, steps, worst), node=_worst_node(ratio))
        h = min(h, t - time)
        stages = [k1]
        for i in range(1, 7):
            increment = sum(a * k for a, k in zip(_A[i], stages))
            stages.append(rhs(y + h * increment))
        y_new = y + h * sum(b * k for b, k in zip(_B, stages))
        error = h * sum(e * k for e, k in zip(_E, stages))
        scale = 1.0 + np.maximum(np.abs(y), np.abs(y_new))
        ratio = np.abs(error) / scale
        blown = ~np.all(np.isfinite(y_new), axis=0)
        if np.any(blown):
            ratio[:, blown] = np.inf
        err = float(np.max(ratio)) / tol

        if err <= 1.0:
            time = t if t - time - h <= 1e-15 * t else time + h
            y = y_new
            steps += 1
            worst = max(worst, err * tol)
            k1 = stages[6]
            if on_disk:
                states = y[_Z]
                projected = _keep_in_disk(states)
                if projected is not states:
                    y[_Z] = projected
                    k1 = rhs(y)
            elif getattr(G, 'conformal_map', None) is not None:
                _check_in_domain(G.conformal_map, y[_Z])
            if record:
                trajectory.append((time, y[_Z].copy(), y[_V].copy()))
        factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        if not np.isfinite(err):
            factor = 0.2
        h *= factor
        if time < t and h < min_step:
            logger.error(f"flow step underflow at t={time:.6g} (h={h:.3e})")
            raise IntegrationError(f"step size underflow at t={time:.6g}", partial=finish(y, steps, worst),
                                   node=_worst_node(ratio))

    logger.debug(f"flow to t={t:g} finished in {steps} steps (batch of {z0.size})")
    return finish(y, steps, worst)


def _worst_node(ratio):
    """Start point with the largest error ratio on the last attempted step"""
    per_node = np.max(np.nan_to_num(ratio, nan=np.inf), axis=0)
    return int(np.argmax(per_node))


def _check_in_domain(conformal_map, x):
    """States on Omega must map into the closed disk under k"""
    radius = np.abs(conformal_map.forward(x))
    escaped = radius > 1.0 + Config.DISK_CLIP_TOL
    if np.any(escaped):
        node = int(np.argmax(escaped))
        raise InvarianceViolationError(f"flow left {conformal_map.name} (|k(x)|={radius[node]:.12f})", node=node)


def _keep_in_disk(z):
    """Radially project small overshoots back onto the closed disk"""
    radius = np.abs(z)
    outside = radius > 1.0
    if not np.any(outside):
        return z
    escaped = radius > 1.0 + Config.DISK_CLIP_TOL
    if np.any(escaped):
        node = int(np.argmax(escaped))
        raise InvarianceViolationError(f"flow left the closed disk (|z|={radius[node]:.12f})", node=node)
    logger.debug(f"radially clipped {int(np.sum(outside))} state(s) back to the unit circle")
    return np.where(outside, z / np.where(outside, radius, 1.0), z)


def flow_integrate_many(G, nodes, t, tol=None, weight=None, threads=None):
    """Integrate from many start points, split across worker threads"""
    threads = Config.THREADS if threads is None else threads
    nodes = np.asarray(nodes, dtype=complex)
    if threads <= 1 or nodes.size < 2 * threads:
        return flow_integrate(G, nodes, t, tol, weight)
    chunks = np.array_split(np.arange(nodes.size), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(flow_integrate, G, nodes[idx], t, tol, weight) for idx in chunks]
        results = []
        for idx, future in zip(chunks, futures):
            try:
                results.append(future.result())
            except IntegrationError as e:
                node = None if e.node is None else int(idx[e.node])
                raise IntegrationError(e.detail, partial=e.partial, node=node) from e
            except InvarianceViolationError as e:
                node = None if e.node is None else int(idx[e.node])
                raise InvarianceViolationError(e.detail, node=node) from e
    return FlowResult(
        endpoint=np.concatenate([r.endpoint for r in results]),
        derivative=np.concatenate([r.derivative for r in results]),
        weight_integral=np.concatenate([r.weight_integral for r in results]),
        steps_taken=max(r.steps_taken for r in results),
        est_error=max(r.est_error for r in results),
        log_derivative_integral=np.concatenate([r.log_derivative_integral for r in results]),
    )


def semigroup_residual(G, s, t, sample_points, tol=None):
    """max |phi_{s+t}(z) - phi_s(phi_t(z))| over the samples"""
    if s < 0 or t < 0:
        raise ValueError("s and t must be non-negative")
    points = np.asarray(sample_points, dtype=complex)
    direct = flow_integrate(G, points, s + t, tol).endpoint
    inner = flow_integrate(G, points, t, tol).endpoint
    composed = flow_integrate(G, inner, s, tol).endpoint
    return float(np.max(np.abs(direct - composed)))


# Generators ------------------------------------------------------------------

def _positivity_samples():
    n = 100
    circle = Config.PROBE_RADIUS * np.exp(2j * np.pi * np.arange(n) / n)
    return np.concatenate([circle, random_disk_points(n, radius=Config.PROBE_RADIUS)])


@dataclass(frozen=True, eq=False)
class BPGenerator:
    """Berkson-Porta data: G(z) = F(z)(conj(b) z - 1)(z - b), Re F >= 0"""

    F: AnalyticFunction
    b: complex

    def __post_init__(self):
        b = complex(self.b)
        object.__setattr__(self, 'b', b)
        if abs(b) > 1 + 1e-12:
            raise InvalidGeneratorError(f"Denjoy-Wolff point must satisfy |b| <= 1, got {b}")
        real_part = np.real(self.F(_positivity_samples()))
        if not np.all(np.isfinite(real_part)):
            raise InvalidGeneratorError("F is not finite at the positivity samples")
        low = float(np.min(real_part))
        if low < -Config.POSITIVITY_TOL:
            raise InvalidGeneratorError(f"Re F must be non-negative, sampled minimum {low:.3e}")

    def generator(self):
        b, F = self.b, self.F
        bc = np.conj(b)

        def factor(z):
            return (bc * z - 1) * (z - b)

        def factor_derivative(z):
            return 2 * bc * z - (1 + abs(b) ** 2)

        G = AnalyticFunction(lambda z: F(z) * factor(z),
                             lambda z: F.derivative(z) * factor(z) + F(z) * factor_derivative(z),
                             domain=DISK, name=f"BP({F.name}, b={b:g})")
        G.denjoy_wolff = b
        return G


def bp_generator(F, b):
    """Generator G(z) = F(z)(conj(b) z - 1)(z - b) from Berkson-Porta data"""
    return BPGenerator(F, b).generator()


def dilation(domain=DISK):
    """G(z) = -z, phi_t(z) = e^{-t} z"""
    G = AnalyticFunction(lambda z: -z, lambda z: -np.ones_like(z), domain=domain, name='-z')
    G.denjoy_wolff = 0j
    return G


def rotation():
    """G(z) = i z, phi_t(z) = e^{it} z"""
    return AnalyticFunction(lambda z: 1j * z, lambda z: 1j * np.ones_like(z), name='iz')


def parabolic():
    """G(z) = (z - 1)^2 with boundary Denjoy-Wolff point 1"""
    G = AnalyticFunction(lambda z: (z - 1) ** 2, lambda z: 2 * (z - 1), name='(z-1)^2')
    G.denjoy_wolff = 1 + 0j
    return G


def angle_condition_check(G, grid, r_probe=None):
    """max_j Re(G(r e^{i theta_j}) conj(r e^{i theta_j})) on a radial probe circle"""
    r_probe = r_probe or Config.PROBE_RADIUS
    if not 0 < r_probe < 1:
        raise ValueError(f"probe radius must lie in (0, 1), got {r_probe}")
    z = r_probe * grid.points
    values = np.real(G(z) * np.conj(z))
    if not np.all(np.isfinite(values)):
        raise ProbeError(f"{G.name} is not finite on |z|={r_probe}")
    return float(np.max(values))


def _check_slope(slope, where):
    size = np.abs(slope)
    if np.any(size < Config.MIN_DERIVATIVE) or np.any(size > 1.0 / Config.MIN_DERIVATIVE):
        raise DegenerateMapError(f"conformal derivative degenerate {where}")


def transplant_generator(G_disk, conformal_map):
    """
    Move a disk generator to Omega: G(x) = G_disk(k(x)) / k'(x)

    The flows are conjugate, phi_t = k^-1 o psi_t o k.
    """
    k = conformal_map

    def value(x):
        w = k.forward(x)
        slope = k.inverse_derivative(w)
        _check_slope(slope, 'in transplant')
        return G_disk(w) * slope

    def derivative(x):
        w = k.forward(x)
        slope = k.inverse_derivative(w)
        _check_slope(slope, 'in transplant')
        return G_disk.derivative(w) + G_disk(w) * k.inverse_second_derivative(w) / slope

    G = AnalyticFunction(value, derivative, domain=k.name, name=f"T[{G_disk.name}]")
    G.disk_generator = G_disk
    G.conformal_map = k
    return G


def pullback_generator(G, conformal_map):
    """Disk generator G_D(w) = G(k^-1(w)) k'(k^-1(w)), inverse of transplant_generator"""
    if getattr(G, 'disk_generator', None) is not None:
        return G.disk_generator
    k = conformal_map

    def value(w):
        slope = k.inverse_derivative(w)
        _check_slope(slope, 'in pullback')
        return G(k.inverse(w)) / slope

    def derivative(w):
        slope = k.inverse_derivative(w)
        _check_slope(slope, 'in pullback')
        return G.derivative(k.inverse(w)) - G(k.inverse(w)) * k.inverse_second_derivative(w) / slope ** 2

    return AnalyticFunction(value, derivative, domain=DISK, name=f"P[{G.name}]")


def flow_conjugacy_residual(G_disk, conformal_map, t, sample_points, tol=None):
    """max |phi_t(x) - k^-1(psi_t(k(x)))| for the transplanted flow phi and disk flow psi"""
    k = conformal_map
    x = np.asarray(sample_points, dtype=complex)
    on_domain = flow_integrate(transplant_generator(G_disk, k), x, t, tol).endpoint
    through_disk = k.inverse(flow_integrate(G_disk, k.forward(x), t, tol).endpoint)
    return float(np.max(np.abs(on_domain - through_disk)))


@dataclass(frozen=True, eq=False)
class ConformalBPGenerator:
    """Conformal Berkson-Porta data (F, tau, k)"""

    F: AnalyticFunction
    tau: complex
    k: object

    def disk_data(self):
        b = complex(self.k.forward(self.tau))
        return BPGenerator(self.F, b)

    def generator(self):
        G = transplant_generator(self.disk_data().generator(), self.k)
        G.name = f"confBP({self.F.name}, tau={complex(self.tau):g})"
        return G


def conformal_bp_generator(F, tau, conformal_map):
    """G(x) = F(k(x)) (conj(k(tau)) k(x) - 1)(k(x) - k(tau)) / k'(x)"""
    return ConformalBPGenerator(F, tau, conformal_map).generator()


def dtn_generator(conformal_map):
    """G(x) = -k(x)/k'(x); on the disk this is the dilation generator -z"""
    k = conformal_map

    def value(x):
        w = k.forward(x)
        return -w * k.inverse_derivative(w)

    def derivative(x):
        w = k.forward(x)
        slope = k.inverse_derivative(w)
        _check_slope(slope, 'for the DtN generator')
        return -(slope + w * k.inverse_second_derivative(w)) / slope

    G = AnalyticFunction(value, derivative, domain=k.name, name='-k/k\'')
    G.disk_generator = dilation()
    G.conformal_map = k
    return G


def boundary_angle_check_domain(G, conformal_map, grid=None, r_probe=None):
    """max_j Re(G(x_j) conj(nu(x_j))) at x_j = k^-1(r e^{i theta_j})"""
    k = conformal_map
    grid = grid or k.grid
    r_probe = r_probe or Config.PROBE_RADIUS
    w = r_probe * grid.points
    x = k.inverse(w)
    k_prime = 1.0 / k.inverse_derivative(w)
    if np.any(np.abs(k_prime) < 1e-10):
        raise DegenerateMapError(f"{k.name}: |k'| below 1e-10 near the boundary")
    nu = w / np.abs(w) / k_prime * np.abs(k_prime)
    values = np.real(G(x) * np.conj(nu))
    if not np.all(np.isfinite(values)):
        raise ProbeError(f"{G.name} is not finite near the boundary of {k.name}")
    return float(np.max(values))


def denjoy_wolff_estimate(G, seeds=None, t_long=1000.0, tol=None, agreement=1e-6):
    """
    Denjoy-Wolff point of the semiflow.

    Generators built from Berkson-Porta data carry b; otherwise the
    long-time endpoints of several seeds must agree.
    """
    known = getattr(G, 'denjoy_wolff', None)
    if known is not None:
        return complex(known)
    if seeds is None:
        seeds = np.array([0.0, 0.5, -0.5, 0.5j, -0.5j])
    ends = flow_integrate(G, seeds, t_long, tol).endpoint
    spread = float(np.max(np.abs(ends - ends[0])))
    if spread > agreement:
        raise NumericalError(f"long-time flow endpoints disagree by {spread:.3e}")
    return complex(np.mean(ends))


def angular_limit_probe(G, a, radii):
    """|G(r a)| along the radius towards the boundary point a"""
    radii = np.asarray(radii, dtype=float)
    return np.abs(G(radii * complex(a)))


def boundary_entry_time(G, z, t_grid, tol=None):
    """First t in t_grid with |phi_t(z)| < 1 - 1e-9, or None"""
    for t in sorted(t_grid):
        if abs(flow_integrate(G, z, t, tol).endpoint) < 1 - 1e-9:
            return t
    return None
