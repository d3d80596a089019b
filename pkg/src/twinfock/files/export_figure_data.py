"""
Script que genera los datos de las figuras (visibilidad, sensibilidad frente a
fase y frente a perdidas), la tabla de sensibilidades optimas y las perdidas de
cruce, y los guarda en un directorio de salida.
"""

import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.common.functions import to_csv, to_json, write_output
from src.common.logger import logger
from src.twinfock.classes.exceptions import TwinFockError
from src.twinfock.classes.state_channel import TwinFockState
from src.twinfock.classes.strategy import (
    SweepGrid,
    sensitivity_crossover_loss,
    snl_crossover_loss,
    sweep,
    table1,
)
from src.twinfock.config.config import FIGURE_DATASETS, FIGURES_OUTPUT_DIR

# Pares de estados cuyas sensibilidades optimas se cruzan
CROSSOVER_PAIRS = [("6:0", "8:2")]
SNL_CROSSOVER_STATES = ["6:0", "8:2"]


def _linspace(grid: Optional[Tuple[float, float, int]]) -> Optional[List[float]]:
    if grid is None:
        return None
    start, stop, steps = grid
    return [float(value) for value in np.linspace(start, stop, steps)]


def build_grid(dataset: Dict[str, Any]) -> SweepGrid:
    """
    Construye la rejilla de un conjunto de datos de figura.

    :param dataset: Definicion con estados y rejillas (inicio, fin, pasos).
    :return: Rejilla del barrido.
    :rtype: SweepGrid
    """
    return SweepGrid(
        states=[TwinFockState.parse(text) for text in dataset["states"]],
        loss_a_values=_linspace(dataset["loss_grid"]) or [],
        loss_b_values=_linspace(dataset.get("loss_b_grid")),
        phi_values=_linspace(dataset.get("phi_grid")),
    )


def crossover_summary() -> List[Dict[str, Any]]:
    """Perdidas de cruce con el limite shot-noise y entre estados."""
    rows: List[Dict[str, Any]] = []
    for text in SNL_CROSSOVER_STATES:
        state = TwinFockState.parse(text)
        rows.append(
            {"state": text, "versus": "snl", "loss": snl_crossover_loss(state)}
        )
    for first, second in CROSSOVER_PAIRS:
        rows.append(
            {
                "state": first,
                "versus": second,
                "loss": sensitivity_crossover_loss(
                    TwinFockState.parse(first), TwinFockState.parse(second)
                ),
            }
        )
    return rows


def export_figure_datasets(
    output_dir: Path,
    datasets: Optional[Sequence[Dict[str, Any]]] = None,
) -> List[Path]:
    """
    Escribe un CSV por conjunto de datos, la tabla y el resumen de cruces.

    :param output_dir: Directorio de salida.
    :param datasets: Definiciones de los conjuntos de datos; por defecto FIGURE_DATASETS.
    :return: Rutas de los ficheros escritos.
    :rtype: List[Path]
    """
    if datasets is None:
        datasets = FIGURE_DATASETS

    written: List[Path] = []
    for dataset in datasets:
        path = output_dir / f"{dataset['name']}.csv"
        logger.info(f"Generando '{dataset['name']}' ({dataset['quantity']}).")
        df = sweep(build_grid(dataset), dataset["quantity"])
        write_output(to_csv(df), path)
        written.append(path)

    path = output_dir / "table1.csv"
    write_output(to_csv(table1()), path)
    written.append(path)

    path = output_dir / "crossovers.json"
    write_output(to_json(crossover_summary()), path)
    written.append(path)
    return written


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Exporta los datos de las figuras.")
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=FIGURES_OUTPUT_DIR,
        help="Directorio donde se guardan los ficheros.",
    )
    args = parser.parse_args(argv)

    try:
        logger.info(f"Exportando datos de figuras en {args.output_dir}.")
        written = export_figure_datasets(args.output_dir)
        logger.info(f"Se escribieron {len(written)} ficheros.")
    except TwinFockError as e:
        logger.error(f"Error durante la exportacion: {e}")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
