"""
Fichero de configuracion para la seccion TwinFock.
"""

import math

from src.common.config import WORKDIR

# Busqueda de la fase optima
PHASE_SEARCH_TOLERANCE = 1e-10
# Mejora relativa minima para descartar la semilla analitica
SEED_PREFERENCE_TOLERANCE = 1e-12

# Busqueda de perdidas de cruce (biseccion sobre un intervalo obtenido por duplicacion)
CROSSOVER_TOLERANCE = 1e-6
CROSSOVER_START_LOSS = 0.01
CROSSOVER_MAX_LOSS = 1.0 - 1e-9

# Cota por defecto de m + m' al enumerar candidatos
DEFAULT_MAX_TOTAL = 20

# Valores por defecto de la tabla de sensibilidades optimas con dm fijo
TABLE1_LOSS = 0.05
TABLE1_DELTA_M = 6
TABLE1_MAX_TOTAL = 22

# Paths relativos
FIGURES_OUTPUT_DIR = WORKDIR / "output"

# Conjuntos de datos de las figuras. Cada rejilla es (inicio, fin, pasos).
FIGURE_DATASETS = [
    {
        "name": "visibility_contour",
        "quantity": "visibility",
        "states": ["1:0", "3:2", "6:0", "8:2"],
        "loss_grid": (0.0, 1.0, 21),
        "loss_b_grid": (0.0, 1.0, 21),
    },
    {
        "name": "visibility_equal_arms",
        "quantity": "visibility",
        "states": ["1:0", "2:1", "3:2", "2:0", "3:1", "4:2", "6:0", "8:2"],
        "loss_grid": (0.0, 1.0, 101),
    },
    {
        "name": "sensitivity_phase",
        "quantity": "sensitivity",
        "states": ["6:0", "8:2"],
        "loss_grid": (0.05, 0.05, 1),
        "phi_grid": (0.0, math.pi / 3, 241),
    },
    {
        "name": "sensitivity_loss",
        "quantity": "optimal_sensitivity",
        "states": ["6:0", "8:2", "10:4", "12:6", "14:8"],
        "loss_grid": (0.0, 0.5, 51),
    },
]
