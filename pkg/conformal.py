"""Conformal maps k: Omega -> D for smooth Jordan domains.

Every map is represented by its inverse k^-1 as a power series on the
closed disk. The forward map is evaluated by damped Newton inversion of
that series. Two families are provided: polynomial maps
k^-1(w) = w + sum_{j>=2} c_j w^j and boundary correspondences of
star-like domains solved by Theodorsen's iteration.
"""
from dataclasses import dataclass
import logging

import numpy as np
from scipy import fft as sfft

from analytic_core import (AnalyticFunction, BoundaryGrid, DISK, PowerSeries,
                           fourier_analyze, fourier_synthesize, random_disk_points)
from config import Config
from errors import (DegenerateMapError, DomainError, InvalidMapError,
                    InversionError, MappingError)

logger = logging.getLogger(__name__)


class ConformalMap:
    """Paired maps k, k^-1 with derivatives and a boundary correspondence table"""

    def __init__(self, inverse_series, grid=None, name='Omega', sigma=None):
        """
        Args:
            inverse_series (PowerSeries): k^-1 on the closed unit disk
            grid (BoundaryGrid): grid of the boundary table
            name (str): domain label attached to functions living on Omega
            sigma (array): polar angles of the table points, if known
        """
        self.inverse_series = inverse_series
        self.inverse_derivative_series = inverse_series.derivative()
        self._second_derivative_series = self.inverse_derivative_series.derivative()
        self.grid = grid or BoundaryGrid(Config.GRID_SIZE)
        self.name = name

        a = inverse_series.coeffs
        self.center = complex(a[0])
        self._scale = complex(a[1]) if a.size > 1 else 0j
        if abs(self._scale) < Config.MIN_DERIVATIVE:
            raise DegenerateMapError(f"(k^-1)'(0) vanishes for {name}")

        self.theta = self.grid.angles
        self.table = self.inverse(self.grid.points)
        self.table.setflags(write=False)
        if sigma is None:
            sigma = np.unwrap(np.angle(self.table - self.center))
        self.sigma = np.asarray(sigma, dtype=float)

    def __repr__(self):
        return f"ConformalMap({self.name}, degree={self.inverse_series.degree})"

    # inverse k^-1: D -> Omega

    def inverse(self, w):
        return self.inverse_series(w)

    def inverse_derivative(self, w):
        return self.inverse_derivative_series(w)

    def inverse_second_derivative(self, w):
        return self._second_derivative_series(w)

    # forward k: Omega -> D

    def forward(self, x, max_iter=None, tol=None):
        """Newton inversion of k^-1 with step halving when the residual grows"""
        max_iter = max_iter or Config.NEWTON_MAX_ITER
        tol = tol or Config.NEWTON_TOL
        x = np.asarray(x, dtype=complex)
        w = (x - self.center) / self._scale
        residual = self.inverse(w) - x
        for iteration in range(max_iter):
            size = np.abs(residual)
            if np.all(size <= tol * np.maximum(1.0, np.abs(x))):
                logger.debug(f"{self.name}: Newton converged in {iteration} iterations")
                return w
            slope = self.inverse_derivative(w)
            if np.any(np.abs(slope) < Config.MIN_DERIVATIVE):
                raise DegenerateMapError(f"{self.name}: (k^-1)' vanishes during inversion")
            step = residual / slope
            damping = np.ones(np.shape(w))
            for _ in range(30):
                trial = w - damping * step
                trial_residual = self.inverse(trial) - x
                worse = np.abs(trial_residual) > size
                if not np.any(worse & (size > tol)):
                    break
                damping = np.where(worse, 0.5 * damping, damping)
            w, residual = trial, trial_residual
        if np.all(np.abs(residual) <= 1e3 * tol * np.maximum(1.0, np.abs(x))):
            return w
        raise InversionError(f"{self.name}: Newton inversion failed, residual {np.max(np.abs(residual)):.3e}")

    def forward_derivative(self, x):
        return 1.0 / self.inverse_derivative(self.forward(x))

    # analytic-function views

    @property
    def k(self):
        return AnalyticFunction(self.forward, self.forward_derivative, domain=self.name, name='k')

    @property
    def k_inverse(self):
        return AnalyticFunction(self.inverse, self.inverse_derivative, domain=DISK, name='k^-1')

    # diagnostics

    def round_trip_error(self):
        """max_j |k(k^-1(e^{i theta_j})) - e^{i theta_j}| over the boundary table"""
        return float(np.max(np.abs(self.forward(self.table) - self.grid.points)))

    def validate(self, n_samples=100):
        """Check k o k^-1 = id inside and |k'| away from zero on the table"""
        w = random_disk_points(n_samples, radius=0.95)
        error = float(np.max(np.abs(self.forward(self.inverse(w)) - w)))
        if error > 1e-8:
            raise InvalidMapError(f"{self.name}: interior round trip error {error:.3e}")
        k_prime = 1.0 / np.abs(self.inverse_derivative(self.grid.points))
        if np.min(k_prime) < 1e-10:
            raise DegenerateMapError(f"{self.name}: |k'| = {np.min(k_prime):.3e} on the boundary")
        return self


def identity_map(grid=None):
    return ConformalMap(PowerSeries([0.0, 1.0]), grid, name='disk')


def make_polynomial_map(c, grid=None, name=None):
    """
    Map with inverse k^-1(w) = w + sum_{j>=2} c_j w^j

    Args:
        c: coefficients [c_2, c_3, ...] or a {j: c_j} mapping
        grid (BoundaryGrid): boundary table grid

    Returns:
        ConformalMap
    """
    if isinstance(c, dict):
        terms = {int(j): complex(v) for j, v in c.items()}
    else:
        terms = {j + 2: complex(v) for j, v in enumerate(c)}
    if any(j < 2 for j in terms):
        raise InvalidMapError("polynomial map coefficients start at c_2")
    weight = sum(j * abs(v) for j, v in terms.items())
    if weight >= 1:
        raise InvalidMapError(f"univalence criterion sum j|c_j| < 1 violated ({weight:.4f})")
    coeffs = np.zeros(max(terms, default=1) + 1, dtype=complex)
    coeffs[1] = 1.0
    for j, v in terms.items():
        coeffs[j] = v
    conformal_map = ConformalMap(PowerSeries(coeffs), grid,
                                 name=name or ('disk' if not terms else 'polynomial'))
    return conformal_map.validate()


def conjugate_function(samples, grid):
    """Periodic Hilbert transform: multiplier -i sgn(n), Nyquist mode dropped"""
    coeffs = fourier_analyze(np.asarray(samples, dtype=float), grid)
    multiplier = -1j * np.sign(grid.modes)
    multiplier[0] = 0.0
    return np.real(fourier_synthesize(coeffs * multiplier, grid))


@dataclass(frozen=True, eq=False)
class StarLikeDomain:
    """Domain {rho(theta) e^{i theta}}: radius function sampled or in closed form"""

    radius: object
    name: str = 'starlike'

    def __post_init__(self):
        probe = np.asarray(self.radius(np.linspace(0.0, 2.0 * np.pi, 1025)), dtype=float)
        if np.min(probe) <= 0:
            raise DomainError(f"{self.name}: radius function must stay positive")
        if abs(probe[0] - probe[-1]) > 1e-10 * max(1.0, abs(probe[0])):
            raise DomainError(f"{self.name}: radius function is not periodic")

    def __call__(self, theta):
        return np.asarray(self.radius(np.asarray(theta, dtype=float)), dtype=float)

    @classmethod
    def from_samples(cls, samples, name='starlike'):
        """Trigonometric interpolant of samples on [0, 2pi], first == last"""
        samples = np.asarray(samples, dtype=float)
        if abs(samples[0] - samples[-1]) > 1e-12 * max(1.0, abs(samples[0])):
            raise DomainError(f"{name}: first and last radius samples must match")
        values = samples[:-1]
        n = values.size
        coeffs = sfft.fft(values) / n
        freqs = sfft.fftfreq(n, d=1.0 / n)
        if n % 2 == 0:
            coeffs[n // 2] *= 0.5
            coeffs = np.append(coeffs, coeffs[n // 2])
            freqs = np.append(freqs, n // 2)

        def radius(theta):
            theta = np.asarray(theta, dtype=float)
            return np.real(np.exp(1j * np.multiply.outer(theta, freqs)) @ coeffs)

        return cls(radius, name)

    @classmethod
    def limacon(cls, eps):
        """rho(theta) = 1 + eps cos(theta)"""
        return cls(lambda theta: 1.0 + eps * np.cos(theta), name=f"limacon({eps:g})")

    def log_derivative_bound(self, n=4096):
        theta = 2.0 * np.pi * np.arange(n) / n
        h = 1e-6
        rho = self(theta)
        return float(np.max(np.abs((self(theta + h) - self(theta - h)) / (2 * h) / rho)))


def theodorsen_solve(dom, grid=None, max_iter=None, tol=None):
    """
    Boundary correspondence of a star-like domain by Theodorsen's iteration

    Iterates sigma <- theta + K[log rho(sigma)] with K the periodic
    conjugation until successive sigma differ by less than tol.

    Returns:
        ConformalMap: inverse series from the Fourier coefficients of the table
    """
    grid = grid or BoundaryGrid(Config.GRID_SIZE)
    max_iter = max_iter or Config.THEODORSEN_MAX_ITER
    tol = tol or Config.THEODORSEN_TOL
    theta = grid.angles
    bound = dom.log_derivative_bound()
    if bound >= 1:
        logger.warning(f"{dom.name}: max |rho'/rho| = {bound:.3f} >= 1, iteration may diverge")

    sigma = np.array(theta)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        updated = theta + conjugate_function(np.log(dom(sigma)), grid)
        residual = float(np.max(np.abs(updated - sigma)))
        sigma = updated
        logger.debug(f"{dom.name}: Theodorsen iteration {iteration}, residual {residual:.3e}")
        if residual < tol:
            break
    else:
        logger.error(f"{dom.name}: no convergence after {max_iter} iterations")
        raise MappingError(f"Theodorsen iteration did not converge in {max_iter} iterations "
                           f"(last residual {residual:.3e})", residual=residual)

    table = dom(sigma) * np.exp(1j * sigma)
    coeffs = fourier_analyze(table, grid)
    leak = float(np.max(np.abs(coeffs[: grid.n_points // 2])))
    if leak > 1e-8:
        logger.warning(f"{dom.name}: boundary table has negative modes up to {leak:.2e}")
    series = PowerSeries(coeffs[grid.n_points // 2:])
    logger.info(f"{dom.name}: boundary correspondence found in {iteration} iterations")
    return ConformalMap(series, grid, name=dom.name, sigma=sigma).validate()


def unit_normal(conformal_map, x):
    """Outer unit normal nu(x) = k(x)/k'(x) |k'(x)| at boundary points"""
    w = conformal_map.forward(x)
    k_prime = 1.0 / conformal_map.inverse_derivative(w)
    if np.any(np.abs(k_prime) < 1e-10):
        raise DegenerateMapError(f"{conformal_map.name}: |k'| below 1e-10 at a boundary point")
    return w / k_prime * np.abs(k_prime)
