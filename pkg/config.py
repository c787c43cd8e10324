import os
from dotenv import load_dotenv

load_dotenv()


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value not in (None, '') else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value not in (None, '') else default


class Config:
    """Numerical defaults shared by the library and the command line"""

    # Boundary discretization
    GRID_SIZE = _env_int('GRID_SIZE', 256)
    MIN_GRID_SIZE = 8

    # Flow integration (Dormand-Prince 5(4))
    ODE_TOL = _env_float('ODE_TOL', 1e-10)
    ODE_MAX_STEPS = _env_int('ODE_MAX_STEPS', 1_000_000)
    ODE_MIN_STEP = _env_float('ODE_MIN_STEP', 1e-14)
    DISK_CLIP_TOL = 1e-6  # radial projection allowed up to this overshoot

    # Boundary probing
    TRACE_RADIUS = _env_float('TRACE_RADIUS', 1.0 - 1e-6)
    PROBE_RADIUS = _env_float('PROBE_RADIUS', 0.999)
    NORM_RADIUS_MAX = 1.0 - 1e-6
    ANGLE_TOL = _env_float('ANGLE_TOL', 1e-3)
    POSITIVITY_TOL = 1e-10

    # Conformal maps
    NEWTON_MAX_ITER = _env_int('NEWTON_MAX_ITER', 50)
    NEWTON_TOL = _env_float('NEWTON_TOL', 1e-13)
    THEODORSEN_MAX_ITER = _env_int('THEODORSEN_MAX_ITER', 200)
    THEODORSEN_TOL = _env_float('THEODORSEN_TOL', 1e-13)
    MIN_DERIVATIVE = 1e-12

    # Quadrature
    RADIAL_POINTS = _env_int('RADIAL_POINTS', 48)
    ANGULAR_POINTS = _env_int('ANGULAR_POINTS', 256)
    SUP_SAMPLE_POINTS = 500

    # Distributional pairings: r = 1 - 10^-m
    PAIRING_RADII = tuple(1.0 - 10.0 ** -m for m in range(1, 13))
    PAIRING_TOL = 1e-8

    # Reproducible random sampling for invariant checks
    RANDOM_SEED = _env_int('RANDOM_SEED', 12345)

    # Worker parallelism (0 = sequential)
    THREADS = _env_int('STEKLOV_THREADS', 0)

    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'
