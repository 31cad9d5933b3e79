"""
Modelo de configuración de una ejecución de la línea de comandos
"""
from typing import Dict, List, Optional

from .base_model import BaseModel


class RunConfig(BaseModel):
    """Configuración resuelta de un comando (se embebe en cada reporte)"""

    FORMATS = ('report', 'csv')

    def __init__(
        self,
        command: str,
        source: str,
        horizon: Optional[int] = None,
        mechanism: Optional[str] = None,
        k: Optional[int] = None,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
        prior: str = 'uniform',
        start: str = 'uniform',
        tolerances: Optional[Dict[str, float]] = None,
        grid: Optional[List[int]] = None,
        out: Optional[str] = None,
        output_format: str = 'report'
    ):
        self.command = command
        self.source = source
        self.horizon = horizon
        self.mechanism = mechanism
        self.k = k
        self.trials = trials
        self.seed = seed
        self.prior = prior
        self.start = start
        self.tolerances = tolerances or {}
        self.grid = grid
        self.out = out
        self.output_format = output_format

    def validate(self) -> None:
        """Valida rangos de los parámetros"""
        if not self.source:
            raise ValueError("Debe indicar --fixture o --file")
        if self.horizon is not None and self.horizon < 0:
            raise ValueError("El horizonte N debe ser no negativo")
        if self.trials is not None and self.trials < 1:
            raise ValueError("El número de ensayos debe ser al menos 1")
        if self.k is not None and self.k < 0:
            raise ValueError("k debe ser no negativo")
        for name, value in self.tolerances.items():
            if value <= 0:
                raise ValueError(f"La tolerancia '{name}' debe ser positiva")
        if self.grid is not None and (not self.grid or min(self.grid) < 0):
            raise ValueError("La grilla debe contener horizontes no negativos")
        if self.output_format not in self.FORMATS:
            raise ValueError(f"Formato desconocido: '{self.output_format}'")
