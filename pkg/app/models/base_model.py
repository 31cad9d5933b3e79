"""
Modelo base - Estructura base para todos los modelos de dominio
"""
from typing import Dict, Any

import numpy as np


class BaseModel:
    """Modelo base con operaciones comunes"""

    def to_dict(self) -> Dict[str, Any]:
        """Convierte el modelo a diccionario con tipos nativos de Python"""
        return {
            key: _to_native(value) for key, value in self.__dict__.items()
            if not key.startswith('_')
        }

    def validate(self) -> None:
        """Valida los datos del modelo"""
        # Implementar validaciones específicas en subclases
        pass

    def __repr__(self) -> str:
        """Representación en string del modelo"""
        return f"{self.__class__.__name__}({self.to_dict()})"


def _to_native(value: Any) -> Any:
    """Convierte arreglos y escalares de numpy a listas y números nativos"""
    if isinstance(value, BaseModel):
        return value.to_dict()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_to_native(item) for item in value]
    if isinstance(value, dict):
        return {key: _to_native(item) for key, item in value.items()}
    return value


def frozen_array(values, dtype=float) -> np.ndarray:
    """Copia de solo lectura de un arreglo"""
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array
