"""
Fichero de configuracion global para el proyecto TwinFock.
"""

from pathlib import Path

# Directorio de trabajo (raiz del repositorio)
WORKDIR = Path(__file__).resolve().parents[2]

# Tope de fotones para los coeficientes binomiales exactos
BINOMIAL_CAP = 64

# Tope de fotones totales (m + m') para el oraculo de fuerza bruta
ORACLE_PHOTON_CAP = 12

# Tolerancias numericas de las matrices densidad y del operador de paridad
HERMITICITY_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
DIAGONAL_TOLERANCE = 1e-12
IMAGINARY_TOLERANCE = 1e-12
FRINGE_TOLERANCE = 1e-12

# Denominador por debajo del cual la sensibilidad se considera divergente
DIVERGENCE_THRESHOLD = 1e-14

# Formato de salida
SIGNIFICANT_DIGITS = 9
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"
DIVERGENCE_LABEL = "inf"
