APP_NAME = "KG Currents"

# 度规 (−1, 1, 1, 1)
METRIC_SIGNATURE = (-1.0, 1.0, 1.0, 1.0)

MIN_POINTS_PER_AXIS = 8
MAX_DENSE_POINTS = 4096

# 时间差分步长 (单位 1/M)
DEFAULT_TIME_STEP = 1e-3
DEFAULT_GENERATOR_STEP = 1e-6

ON_SHELL_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-12
BOUNDARY_FRACTION = 0.1
BOUNDARY_NEGLIGIBLE = 1e-10

BESSEL_TRUNCATION = 1e-18
QUADRATURE_RTOL = 1e-12
NW_QUADRATURE_TOLERANCE = 1e-8
GAUGE_FACTOR_TOLERANCE = 1e-10

IDENTITY_SCAN_THETA_MAX = 1e6
IDENTITY_SCAN_SAMPLES = 1_000_000
IDENTITY_SCAN_TOLERANCE = 1e-9

REPORT_SCHEMA = 1
FLOAT_FORMAT = ".17g"

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_DOCUMENT = 3

EXPERIMENTS = (
    "continuity",
    "covariance",
    "nonrel-limit",
    "inner-products",
    "localized-compare",
    "gauge-orbit",
    "classify-group",
    "em-spectrum",
    "total-probability",
)
