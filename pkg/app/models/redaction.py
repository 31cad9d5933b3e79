"""
Modelos de salidas de redacción: trayectorias liberadas y leyes de ventana
"""
from typing import List, Optional, Sequence

import numpy as np

from .base_model import BaseModel, frozen_array
from .chain import StateSpace, Trajectory

ERASURE = None
ERASURE_SYMBOL = '*'


class RedactedTrajectory(BaseModel):
    """
    Trayectoria liberada Y_0, ..., Y_N.

    Las posiciones borradas forman exactamente el prefijo [0, T); el resto
    coincide con la trayectoria fuente. T = 0 corresponde a la liberación
    completa (solo controles negativos).
    """

    def __init__(self, symbols: Sequence[Optional[int]], window_length: int):
        self.symbols = [ERASURE if s is ERASURE else int(s) for s in symbols]
        self.window_length = int(window_length)
        self.validate()

    @classmethod
    def from_window(cls, trajectory: Trajectory, window_length: int) -> 'RedactedTrajectory':
        """Borra el prefijo [0, T) de la trayectoria"""
        symbols = [
            ERASURE if t < window_length else state
            for t, state in enumerate(trajectory.states)
        ]
        return cls(symbols, window_length)

    @property
    def horizon(self) -> int:
        return len(self.symbols) - 1

    @property
    def erasure_count(self) -> int:
        """Distorsión de Hamming d_H(X, Y)"""
        return sum(1 for s in self.symbols if s is ERASURE)

    def validate(self) -> None:
        """Valida el invariante de prefijo"""
        if not 0 <= self.window_length <= len(self.symbols):
            raise ValueError(f"Longitud de ventana fuera de rango: {self.window_length}")
        for t, symbol in enumerate(self.symbols):
            erased = symbol is ERASURE
            if erased != (t < self.window_length):
                raise ValueError(f"Las posiciones borradas no forman el prefijo [0, {self.window_length})")

    def matches(self, trajectory: Trajectory) -> bool:
        """Verifica que los símbolos liberados coincidan con la fuente"""
        return all(
            symbol is ERASURE or symbol == state
            for symbol, state in zip(self.symbols, trajectory.states)
        )

    def labels(self, state_space: StateSpace) -> List[str]:
        return [ERASURE_SYMBOL if s is ERASURE else state_space.label_of(s) for s in self.symbols]


class SstRedaction(BaseModel):
    """Salida del mecanismo SST: trayectoria liberada y tiempo de parada tau"""

    def __init__(self, released: RedactedTrajectory, tau: int):
        self.released = released
        self.tau = int(tau)
        if self.released.window_length != self.tau:
            raise ValueError("tau debe coincidir con la longitud de ventana")


class WindowLaw(BaseModel):
    """Distribución de la longitud de ventana T sobre {0, ..., N+1}"""

    def __init__(self, probabilities):
        self.probabilities = frozen_array(probabilities)

    @property
    def horizon(self) -> int:
        return self.probabilities.shape[0] - 2

    def atom(self, t: int) -> float:
        """P(T = t)"""
        if 0 <= t < self.probabilities.shape[0]:
            return float(self.probabilities[t])
        return 0.0

    def total(self) -> float:
        return float(self.probabilities.sum())

    def mean_erasures(self) -> float:
        """E[min(T, N+1)], la distorsión esperada"""
        support = np.arange(self.probabilities.shape[0])
        return float(np.dot(np.minimum(support, self.horizon + 1), self.probabilities))

    def survival(self, t: int) -> float:
        """P(T > t)"""
        return float(self.probabilities[t + 1:].sum())

    def to_dict(self):
        return {str(t): float(p) for t, p in enumerate(self.probabilities)}
