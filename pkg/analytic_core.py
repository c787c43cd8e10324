"""Power series, boundary Fourier analysis, Poisson extension and the
Hardy/Bergman integral means used throughout the solvers.

Boundary data live on a uniform grid of N = 2^m angles. Coefficients are
stored in natural order n = -N/2 .. N/2-1; the Nyquist mode -N/2 counts as
a negative frequency.
"""
from dataclasses import dataclass, field
from functools import cached_property
import logging

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import fft as sfft
from scipy.special import roots_legendre

from config import Config
from errors import DomainError, QuadratureError, SizeError

logger = logging.getLogger(__name__)

DISK = 'disk'


@dataclass(frozen=True)
class BoundaryGrid:
    """Uniform grid theta_j = 2*pi*j/N on the unit circle"""

    n_points: int

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < Config.MIN_GRID_SIZE:
            raise SizeError(f"grid size must be an integer >= {Config.MIN_GRID_SIZE}, got {n}")
        if n & (n - 1):
            raise SizeError(f"grid size must be a power of two, got {n}")

    @cached_property
    def angles(self):
        theta = 2.0 * np.pi * np.arange(self.n_points) / self.n_points
        theta.setflags(write=False)
        return theta

    @cached_property
    def modes(self):
        """Frequencies matching the coefficient layout of fourier_analyze"""
        n = np.arange(-self.n_points // 2, self.n_points // 2)
        n.setflags(write=False)
        return n

    @property
    def points(self):
        return np.exp(1j * self.angles)

    def index_of(self, mode):
        """Position of frequency `mode` in a coefficient array"""
        if not -self.n_points // 2 <= mode < self.n_points // 2:
            raise SizeError(f"mode {mode} outside the band of an N={self.n_points} grid")
        return mode + self.n_points // 2


def fourier_analyze(samples, grid):
    """
    Discrete Fourier coefficients of boundary samples

    Args:
        samples: complex values at the grid angles
        grid (BoundaryGrid): grid the samples live on

    Returns:
        np.ndarray: coefficients h_n for n = -N/2 .. N/2-1
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (grid.n_points,):
        raise SizeError(f"expected {grid.n_points} samples, got shape {samples.shape}")
    return sfft.fftshift(sfft.fft(samples)) / grid.n_points


def fourier_synthesize(coeffs, grid):
    """Inverse of fourier_analyze"""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (grid.n_points,):
        raise SizeError(f"expected {grid.n_points} coefficients (modes -N/2..N/2-1), got shape {coeffs.shape}")
    return sfft.ifft(sfft.ifftshift(coeffs)) * grid.n_points


@dataclass(frozen=True, eq=False)
class BoundarySignal:
    """Complex samples on a boundary grid with lazily derived coefficients"""

    grid: BoundaryGrid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex)
        if samples.shape != (self.grid.n_points,):
            raise SizeError(f"expected {self.grid.n_points} samples, got shape {samples.shape}")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @classmethod
    def from_coefficients(cls, grid, coeffs):
        coeffs = np.array(coeffs, dtype=complex)
        signal = cls(grid, fourier_synthesize(coeffs, grid))
        coeffs.setflags(write=False)
        signal.__dict__['coeffs'] = coeffs
        return signal

    @classmethod
    def from_modes(cls, grid, modes):
        """Build a band-limited signal from a {frequency: coefficient} mapping"""
        coeffs = np.zeros(grid.n_points, dtype=complex)
        for n, c in modes.items():
            coeffs[grid.index_of(n)] += c
        return cls.from_coefficients(grid, coeffs)

    @classmethod
    def from_function(cls, grid, func):
        """Sample func(theta) at the grid angles"""
        return cls(grid, func(grid.angles))

    @cached_property
    def coeffs(self):
        coeffs = fourier_analyze(self.samples, self.grid)
        coeffs.setflags(write=False)
        return coeffs

    def coefficient(self, mode):
        return self.coeffs[self.grid.index_of(mode)]

    def analytic_part(self):
        """Coefficients of the non-negative modes, a_0 .. a_{N/2-1}"""
        return np.array(self.coeffs[self.grid.n_points // 2:])

    def negative_mode_size(self):
        return float(np.max(np.abs(self.coeffs[: self.grid.n_points // 2])))

    def is_analytic(self, tol=1e-10):
        """True when negative-mode coefficients are below tol relative to the signal"""
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        return self.negative_mode_size() <= tol * scale

    def norm(self):
        """Root-mean-square norm (equals the l2 norm of the coefficients)"""
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def derivative(self):
        """Derivative with respect to the angle, computed spectrally"""
        return BoundarySignal.from_coefficients(self.grid, 1j * self.grid.modes * self.coeffs)

    def resample(self, n_points):
        """Trigonometric interpolation onto a finer grid (zero padding)"""
        grid = BoundaryGrid(n_points)
        if n_points < self.grid.n_points:
            raise SizeError("resampling only refines the grid")
        coeffs = np.zeros(n_points, dtype=complex)
        for n, c in zip(self.grid.modes, self.coeffs):
            coeffs[grid.index_of(int(n))] = c
        return BoundarySignal.from_coefficients(grid, coeffs)


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Taylor polynomial sum_n a_n z^n centred at 0 (nominal radius 1)"""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=complex))

    def __post_init__(self):
        coeffs = np.atleast_1d(np.array(self.coeffs, dtype=complex))
        if coeffs.size == 0:
            coeffs = np.zeros(1, dtype=complex)
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def monomial(cls, n, c=1.0):
        coeffs = np.zeros(n + 1, dtype=complex)
        coeffs[n] = c
        return cls(coeffs)

    @classmethod
    def geometric(cls, degree):
        """Truncation of 1/(1-z) = sum z^n"""
        return cls(np.ones(degree + 1, dtype=complex))

    @classmethod
    def from_signal(cls, signal):
        """Holomorphic part of boundary data (non-negative modes)"""
        return cls(signal.analytic_part())

    @property
    def degree(self):
        return self.coeffs.size - 1

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def derivative(self):
        if self.coeffs.size == 1:
            return PowerSeries(np.zeros(1, dtype=complex))
        return PowerSeries(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def circle_samples(self, r, n_points):
        """
        Values on |z| = r at n_points equispaced angles via one inverse FFT.

        Coefficients beyond n_points are folded onto their aliases, which is
        exactly what the trapezoid rule sees.
        """
        scaled = self.coeffs * np.power(float(r), np.arange(self.coeffs.size))
        folded = np.zeros(n_points, dtype=complex)
        padded = np.zeros(-(-scaled.size // n_points) * n_points, dtype=complex)
        padded[: scaled.size] = scaled
        folded += padded.reshape(-1, n_points).sum(axis=0)
        return sfft.ifft(folded) * n_points

    def as_function(self, name=None):
        deriv = self.derivative()
        return AnalyticFunction(self, deriv, name=name or f"series(deg={self.degree})")


class AnalyticFunction:
    """Holomorphic map with an explicit derivative rule.

    Both rules must accept numpy arrays. `domain` is DISK for functions on
    the unit disk, or the name of a Jordan domain.
    """

    def __init__(self, func, deriv, domain=DISK, name=None):
        self._func = func
        self._deriv = deriv
        self.domain = domain
        self.name = name or getattr(func, '__name__', 'f')
        # set by generator constructors when known
        self.denjoy_wolff = None
        self.disk_generator = None
        self.conformal_map = None

    def __call__(self, z):
        return self._func(np.asarray(z, dtype=complex))

    def derivative(self, z):
        return self._deriv(np.asarray(z, dtype=complex))

    def __repr__(self):
        return f"AnalyticFunction({self.name}, domain={self.domain})"

    @classmethod
    def constant(cls, c, domain=DISK):
        c = complex(c)
        return cls(lambda z: c + 0j * z, lambda z: 0j * z, domain=domain, name=f"const({c:g})")

    @classmethod
    def identity(cls, domain=DISK):
        return cls(lambda z: z, lambda z: np.ones_like(z), domain=domain, name='z')

    def plus(self, other):
        return AnalyticFunction(lambda z: self(z) + other(z),
                                lambda z: self.derivative(z) + other.derivative(z),
                                domain=self.domain, name=f"({self.name}+{other.name})")

    def times(self, other):
        return AnalyticFunction(lambda z: self(z) * other(z),
                                lambda z: self.derivative(z) * other(z) + self(z) * other.derivative(z),
                                domain=self.domain, name=f"({self.name}*{other.name})")

    def scaled(self, c):
        return AnalyticFunction(lambda z: c * self(z), lambda z: c * self.derivative(z),
                                domain=self.domain, name=f"{c}*{self.name}")

    def compose(self, inner):
        """self o inner (chain rule for the derivative)"""
        return AnalyticFunction(lambda z: self(inner(z)),
                                lambda z: self.derivative(inner(z)) * inner.derivative(z),
                                domain=inner.domain, name=f"{self.name}o{inner.name}")

    def derivative_error(self, points, h=1e-5):
        """Max relative gap between the derivative rule and a central difference"""
        points = np.asarray(points, dtype=complex)
        fd = (self(points + h) - self(points - h)) / (2 * h)
        exact = self.derivative(points)
        scale = np.maximum(np.abs(exact), 1.0)
        return float(np.max(np.abs(fd - exact) / scale))


def random_disk_points(n, radius=0.95, seed=None):
    """Uniformly distributed points in the disk |z| < radius"""
    rng = np.random.default_rng(Config.RANDOM_SEED if seed is None else seed)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n))


def poisson_extend(h, r, theta):
    """
    Harmonic extension u(r e^{i theta}) = sum_n h_n r^|n| e^{i n theta}

    Args:
        h (BoundarySignal): boundary values
        r: radius (scalar or array) in [0, 1)
        theta: angle(s) in radians, broadcast against r

    Returns:
        complex or np.ndarray: extension values
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise DomainError(f"Poisson extension needs 0 <= r < 1, got {r}")
    theta = np.asarray(theta, dtype=float)
    modes = h.grid.modes
    r_b, t_b = np.broadcast_arrays(r, theta)
    powers = np.power.outer(r_b, np.abs(modes))
    waves = np.exp(1j * np.multiply.outer(t_b, modes))
    values = np.sum(h.coeffs * powers * waves, axis=-1)
    return values[()] if values.ndim == 0 else values


def _clip_radius(r):
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    if r >= 1:
        raise DomainError(f"radius must be below 1, got {r}")
    return min(r, Config.NORM_RADIUS_MAX)


def hardy_norm_Mp(f, r, p, quad_points=256):
    """Integral mean M_p(r, f) by the trapezoid rule on |z| = r"""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    r = _clip_radius(r)
    theta = 2.0 * np.pi * np.arange(quad_points) / quad_points
    values = np.abs(f(r * np.exp(1j * theta))) ** p
    if not np.all(np.isfinite(values)):
        raise QuadratureError(f"non-finite integrand on |z|={r}")
    return float(np.mean(values) ** (1.0 / p))


def bergman_nodes(radial_points, angular_points):
    """Gauss-Legendre in r times trapezoid in theta for normalized area measure.

    Returns (points, weights) with weights summing to 1.
    """
    x, w = roots_legendre(radial_points)
    r = 0.5 * (x + 1.0)
    w_r = 0.5 * w * 2.0 * r  # d(r^2) = 2 r dr on [0, 1]
    theta = 2.0 * np.pi * np.arange(angular_points) / angular_points
    points = np.outer(r, np.exp(1j * theta))
    weights = np.outer(w_r, np.full(angular_points, 1.0 / angular_points))
    return points, weights


def bergman_norm(f, p, radial_points=None, angular_points=None):
    """(int_D |f|^p dA)^(1/p) with dA normalized to total mass 1"""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    points, weights = bergman_nodes(radial_points or Config.RADIAL_POINTS,
                                    angular_points or Config.ANGULAR_POINTS)
    values = np.abs(f(points)) ** p
    if not np.all(np.isfinite(values)):
        raise QuadratureError("non-finite value in Bergman quadrature")
    return float(np.sum(values * weights) ** (1.0 / p))


def antiderivative(f):
    """Antiderivative F with F(0) = 0 and F_{n+1} = a_n/(n+1)"""
    coeffs = np.zeros(f.coeffs.size + 1, dtype=complex)
    coeffs[1:] = f.coeffs / np.arange(1, f.coeffs.size + 1)
    return PowerSeries(coeffs)


def hardy_norm_domain(f, p, conformal_map=None, z0=None, quad_points=1024):
    """
    Hardy norm (u0(z0))^(1/p), u0 the least harmonic majorant of |f|^p.

    Computed on the disk side as M_p(r, f o k^-1 o M_a) near r = 1, where
    M_a(w) = (w + a)/(1 + conj(a) w) moves 0 to a = k(z0). Values depend
    on z0; finiteness does not.
    """
    if conformal_map is None:
        a = 0j if z0 is None else complex(z0)
        inverse = lambda w: w
    else:
        a = 0j if z0 is None else complex(conformal_map.forward(z0))
        inverse = conformal_map.inverse
    if abs(a) >= 1:
        raise DomainError(f"base point must lie inside the domain, k(z0)={a}")

    def pulled_back(w):
        return f(inverse((w + a) / (1 + np.conj(a) * w)))

    return hardy_norm_Mp(pulled_back, Config.NORM_RADIUS_MAX, p, quad_points)
