"""
Servicio de mecanismos de control negativo
"""
import logging

import numpy as np

from app.exceptions.custom_exceptions import ValidationError
from app.models.chain import TransitionMatrix
from app.services.base_service import BaseMechanismService

logger = logging.getLogger(__name__)


class FixedWindowService(BaseMechanismService):
    """
    Control de ventana fija: borra [0, k) y libera todo desde el índice k.

    No protege X_0 (salvo cadenas triviales); existe para que la auditoría
    tenga casos que deben fallar. Con k = 0 es la identidad ('none').
    """

    def __init__(self, k: int = 1, chain_service=None, config=None):
        super().__init__(chain_service, config)
        if k < 0:
            raise ValidationError("k debe ser no negativo")
        self.k = int(k)
        self.mechanism_id = 'none' if self.k == 0 else 'fixed-window'

    def hazard_table(self, chain: TransitionMatrix, horizon: int) -> np.ndarray:
        hazards = np.zeros((horizon + 1, chain.size, chain.size))
        hazards[min(self.k, horizon + 1):] = 1.0
        return hazards

    def describe(self) -> dict:
        data = super().describe()
        data['k'] = self.k
        return data
