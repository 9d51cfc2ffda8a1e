# core/constants.py
"""
Constantes de configuración para el cálculo de métricas sobre espacios de moduli.
Centraliza tolerancias, pasos de diferencias finitas y parámetros de salida.
"""

# ===========================
# Tolerancias numéricas
# ===========================
RANK_TOL = 1e-9           # rango relativo (valores singulares / pivotes QR)
RESIDUAL_TOL = 1e-8       # residuos relativos de identidades
IDENTITY_TOL = 1e-10      # identidades exactas por construcción
HERMITIAN_TOL = 1e-8
NILPOTENCY_TOL = 1e-10

# ===========================
# Jets y series
# ===========================
MAX_JET_ORDER = 4
PF_TAIL_TOL = 1e-12
PF_RADIUS_FRACTION = 0.8
PF_MAX_TERMS = 4000
PF_MIN_TERMS = 8
PF_PAIRING_ORDER_FACTOR = 2    # coeficientes hasta orden 2d en la derivación de Q
PF_REFERENCE_FRACTION = 0.1    # punto de referencia z = 0.1·r_max
BRANCH_CUT_TOL = 1e-6

# ===========================
# Diferencias finitas
# ===========================
FD_STEP = 1e-4
FD_POTENTIAL_STEP = 1e-3
FD_RICHARDSON_LEVELS = 2
FD_TOL = 1e-4
FD_TOL_PARTIAL = 1e-3
FD_TOL_POTENTIAL = 1e-5

# ===========================
# Asintótica en dimensión 1
# ===========================
RAY_POINTS = 40
TREND_FACTOR = 4.0
WP_LEADING_U = (10.0, 20.0, 50.0, 100.0)
# Potencial monomio en u: λr²u² = l/4 salvo O(r). Si no, la desviación es O(1/u).
WP_LEADING_TOL = 1e-6
WP_LEADING_RATE = 10.0
ANGULAR_SAMPLES = 16

# ===========================
# Informes
# ===========================
DEFAULT_SEED = 20240917
PAIRS_PER_POINT = 50
MODEL_SCHEMA_VERSION = "1.0"
REPORT_SCHEMA_VERSION = "1.0"
TOLERANCE_NOTE = "tolerancias fijadas por la implementación (no provienen de la teoría)"

# ===========================
# Salida
# ===========================
CSV_DIGITS = 17
SVG_WIDTH = 800
SVG_HEIGHT = 480
SVG_MARGIN = 60
DEFAULT_OUTPUT_DIR = "salida"
MAX_FILENAME_LENGTH = 128

# ===========================
# Registro
# ===========================
DEFAULT_LOG_LEVEL = "WARNING"
