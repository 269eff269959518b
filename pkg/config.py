import os
from dotenv import load_dotenv
load_dotenv()


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    return int(raw, 0)  # accepts 0x-prefixed seeds


def _env_float(name, default):
    raw = os.environ.get(name)
    return float(raw) if raw else default


class Config:
    """Base configuration."""
    APP_NAME = os.environ.get('APP_NAME', 'convpow')
    APP_DESCRIPTION = os.environ.get(
        'APP_DESCRIPTION',
        'Convolution powers on Z^d: spectral classification, heat-kernel attractors and envelope fitting'
    )

    # Sampling and output
    SEED = _env_int('CONVPOW_SEED', 0xC0FFEE)
    OUT_DIR = os.environ.get('CONVPOW_OUT_DIR') or 'convpow_out'
    LOG_LEVEL = os.environ.get('CONVPOW_LOG_LEVEL', 'INFO')

    # Parallelism: passed as `workers` to scipy.fft (-1 = all cores)
    THREADS = _env_int('CONVPOW_THREADS', -1)

    # Resource budgets
    FFT_MAX_CELLS = _env_int('CONVPOW_FFT_MAX_CELLS', 2 ** 25)
    QUADRATURE_MAX_NODES = _env_int('CONVPOW_QUADRATURE_MAX_NODES', 2 ** 24)
    DIRECT_COST_THRESHOLD = _env_float('CONVPOW_DIRECT_COST_THRESHOLD', 5e7)
    MAX_SERIES_ORDER = _env_int('CONVPOW_MAX_SERIES_ORDER', 16)

    # Lattice
    PRUNE_REL = 1e-15

    # Spectral
    GRID_OVERSAMPLE = 64            # grid_per_axis = 64 x per-axis support width
    MAXIMIZER_TOL = 1e-9
    MERGE_RADIUS = 1e-4
    SERIES_SNAP_TOL = 1e-13

    # Homogeneity
    EXPANSION_ORDER = 8
    M_MAX = 4
    PD_TOL = 1e-8
    PD_SAMPLES = 10_000
    EXPONENT_RESIDUAL_TOL = 1e-10
    MAX_WEIGHT_DENOMINATOR = 32

    # Legendre-Fenchel
    LF_MULTISTART_PER_AXIS = 5
    LF_MAX_ITER = 100
    LF_GRAD_TOL = 1e-12
    LF_BOX_SCALE = 4.0

    # Quadrature
    TARGET_EPS = _env_float('CONVPOW_TARGET_EPS', 1e-10)
    MAX_REFINEMENTS = 6

    # Bounds
    M_GRID = tuple(round(0.05 * k, 2) for k in range(1, 13))
    GAUSS_N_LIST = tuple(range(10, 201, 10))
    LLT_N_LIST = (50, 100, 200, 400)
    WINDOW = (-50, 50)
    BOUNDED_TREND_RATIO = 1.1
    UNBOUNDED_TREND_RATIO = 2.0


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    TESTING = False
    LOG_LEVEL = os.environ.get('CONVPOW_LOG_LEVEL', 'DEBUG')


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False
    TESTING = False
    LOG_LEVEL = os.environ.get('CONVPOW_LOG_LEVEL', 'WARNING')


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    DEBUG = True
    LOG_LEVEL = 'WARNING'


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': Config
}
