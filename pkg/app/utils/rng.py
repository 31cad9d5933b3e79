"""
Flujos de números aleatorios reproducibles por (master_seed, stream_id)
"""
import logging
import secrets
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64 - 1


class RngStream:
    """
    Flujo de uniformes determinista.

    Dos instancias con el mismo (master_seed, stream_id) producen la misma
    secuencia en cualquier plataforma: PCG64 sembrado con un SeedSequence cuyo
    spawn_key es el stream_id.
    """

    def __init__(self, master_seed: int, stream_id: int = 0):
        if not 0 <= int(master_seed) <= MAX_SEED:
            raise ValueError("master_seed debe ser un entero de 64 bits sin signo")
        if int(stream_id) < 0:
            raise ValueError("stream_id debe ser no negativo")
        self._master_seed = int(master_seed)
        self._stream_id = int(stream_id)
        sequence = np.random.SeedSequence(entropy=self._master_seed, spawn_key=(self._stream_id,))
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def master_seed(self) -> int:
        return self._master_seed

    @property
    def stream_id(self) -> int:
        return self._stream_id

    @property
    def generator(self) -> np.random.Generator:
        """Generador subyacente para muestreo vectorizado"""
        return self._generator

    def uniform(self) -> float:
        """Una variable uniforme en [0, 1)"""
        return float(self._generator.random())

    def uniforms(self, size) -> np.ndarray:
        """Arreglo de uniformes en [0, 1)"""
        return self._generator.random(size)

    def derive(self, stream_id: int) -> 'RngStream':
        """Flujo hermano con el mismo master_seed"""
        return RngStream(self._master_seed, stream_id)

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self._master_seed}, stream_id={self._stream_id})"


def draw_seed(seed: Optional[int] = None) -> int:
    """Retorna la semilla dada o sortea una nueva de 64 bits"""
    if seed is not None:
        return int(seed)
    drawn = secrets.randbits(64)
    logger.warning(f"No se indicó semilla; se usa la semilla sorteada {drawn}")
    return drawn
