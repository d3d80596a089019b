"""
Script para almacenar funciones comunes entre los distintos ficheros.
"""

import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd
import yaml

from src.common.config import DIVERGENCE_LABEL, FLOAT_FORMAT, SIGNIFICANT_DIGITS


def format_number(value: float) -> str:
    """
    Formatea un numero real con un numero fijo de cifras significativas.

    :param value: Valor a formatear.
    :type value: float
    :return: Texto con el valor; los infinitos se escriben como 'inf'.
    :rtype: str
    """
    if math.isinf(value):
        return DIVERGENCE_LABEL
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def json_number(value: Any) -> Any:
    """
    Prepara un valor para su serializacion JSON.

    Los enteros se mantienen, los reales se redondean a las cifras
    significativas configuradas, los infinitos pasan a la cadena 'inf' y los NaN a null.

    :param value: Valor a serializar.
    :return: Valor apto para ``json.dumps``.
    """
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return DIVERGENCE_LABEL
        return float(format_number(value))
    return value


def to_json(payload: Any) -> str:
    """
    Convierte un diccionario o una lista de diccionarios en texto JSON.

    :param payload: Diccionario o lista de diccionarios.
    :return: Texto JSON terminado en salto de linea.
    :rtype: str
    """
    if isinstance(payload, list):
        data = [
            {key: json_number(value) for key, value in item.items()}
            for item in payload
        ]
    else:
        data = {key: json_number(value) for key, value in payload.items()}
    return json.dumps(data, indent=4, ensure_ascii=False) + "\n"


def to_csv(df: pd.DataFrame) -> str:
    """
    Convierte un DataFrame en texto CSV con formato numerico estable.

    :param df: DataFrame a convertir.
    :type df: pd.DataFrame
    :return: Texto CSV sin indice.
    :rtype: str
    """
    return df.to_csv(
        index=False,
        float_format=FLOAT_FORMAT,
        na_rep="",
        lineterminator="\n",
    )


def load_config_file(config_path: Union[Path, str]) -> Dict[str, Any]:
    """
    Lee un fichero YAML de configuracion clave-valor.

    Las claves se normalizan sustituyendo guiones por guiones bajos para que
    coincidan con los destinos de los argumentos de la linea de comandos.

    :param config_path: Ruta al fichero YAML.
    :type config_path: Union[Path, str]
    :return: Diccionario con la configuracion.
    :rtype: Dict[str, Any]
    :raises ValueError: Si el fichero no existe o no contiene un diccionario.
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise ValueError(f"No existe el fichero de configuracion '{config_path}'.")

    with open(config_path, "r", encoding="utf-8") as config_file:
        try:
            data = yaml.safe_load(config_file)
        except yaml.YAMLError as e:
            raise ValueError(
                f"El fichero '{config_path}' no es un YAML valido: {e}"
            ) from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(
            f"El fichero '{config_path}' debe contener pares clave-valor."
        )
    return {str(key).lstrip("-").replace("-", "_"): value for key, value in data.items()}


def write_output(text: str, output_file: Optional[Union[Path, str]] = None) -> None:
    """
    Escribe el resultado en un fichero o, si no se indica, en la salida estandar.

    :param text: Texto a escribir.
    :type text: str
    :param output_file: Ruta del fichero de salida.
    :type output_file: Optional[Union[Path, str]]
    """
    if output_file is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    if isinstance(output_file, str):
        output_file = Path(output_file)

    # Crear carpeta en caso de que no exista
    output_file.parent.mkdir(parents=True, exist_ok=True)

    with open(output_file, "w", encoding="utf-8", newline="") as file:
        file.write(text)
