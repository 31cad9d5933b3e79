"""
Construcción de mecanismos a partir de su identificador
"""
from typing import Optional

from app.exceptions.custom_exceptions import ValidationError
from app.services.base_service import BaseMechanismService
from app.services.control_service import FixedWindowService
from app.services.smr_service import SmrMechanismService
from app.services.sst_service import SstMechanismService

MECHANISM_IDS = ('sst', 'smr', 'fixed-window', 'none')


def build_mechanism(mechanism_id: str, k: Optional[int] = None, chain_service=None,
                    config=None) -> BaseMechanismService:
    """
    Retorna el servicio del mecanismo indicado

    Raises:
        ValidationError: Si el identificador es desconocido o falta k
    """
    if mechanism_id == 'sst':
        return SstMechanismService(chain_service, config)
    if mechanism_id == 'smr':
        return SmrMechanismService(chain_service, config)
    if mechanism_id == 'fixed-window':
        if k is None:
            raise ValidationError("El mecanismo fixed-window requiere --k")
        return FixedWindowService(k, chain_service, config)
    if mechanism_id == 'none':
        return FixedWindowService(0, chain_service, config)
    raise ValidationError(f"Mecanismo desconocido: '{mechanism_id}' (opciones: {', '.join(MECHANISM_IDS)})")
