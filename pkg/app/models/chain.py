"""
Modelos de cadena de Markov finita: espacio de estados, matriz de transición,
vectores de probabilidad, diagnósticos y trayectorias
"""
import threading
from typing import List, Optional, Sequence

import numpy as np

from .base_model import BaseModel, frozen_array


class StateSpace(BaseModel):
    """Espacio de estados con etiquetas ordenadas y distintas"""

    def __init__(self, labels: Sequence[str]):
        self.labels = [str(label) for label in labels]
        self.validate()
        self._index = {label: i for i, label in enumerate(self.labels)}

    @classmethod
    def of_size(cls, n: int) -> 'StateSpace':
        """Espacio con etiquetas '0', '1', ..., 'n-1'"""
        return cls([str(i) for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.labels)

    def validate(self) -> None:
        """Valida tamaño y unicidad de etiquetas"""
        if len(self.labels) < 1:
            raise ValueError("El espacio de estados debe tener al menos un estado")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("Las etiquetas de estado deben ser únicas")

    def index_of(self, label: str) -> int:
        """Índice interno de una etiqueta"""
        try:
            return self._index[str(label)]
        except KeyError:
            raise ValueError(f"Estado desconocido: {label}")

    def label_of(self, index: int) -> str:
        return self.labels[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, StateSpace) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(tuple(self.labels))


class TransitionMatrix(BaseModel):
    """
    Matriz de transición estocástica por filas (inmutable).

    Las potencias P^t se calculan por multiplicación iterada y se memorizan
    en la propia instancia.
    """

    def __init__(self, entries, state_space: Optional[StateSpace] = None):
        self.entries = frozen_array(entries)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError(f"La matriz debe ser cuadrada, forma recibida {self.entries.shape}")
        self.state_space = state_space or StateSpace.of_size(self.entries.shape[0])
        if self.state_space.size != self.entries.shape[0]:
            raise ValueError(
                f"Dimensión inconsistente: {self.state_space.size} etiquetas para una matriz "
                f"{self.entries.shape[0]}x{self.entries.shape[1]}"
            )
        self._powers: List[np.ndarray] = [frozen_array(np.eye(self.size))]
        self._powers_lock = threading.Lock()

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def labels(self) -> List[str]:
        return self.state_space.labels

    def power(self, t: int) -> np.ndarray:
        """P^t con memoización por t"""
        if t < 0:
            raise ValueError("El exponente debe ser no negativo")
        powers = self._powers
        if len(powers) > t:
            return powers[t]
        # La lista publicada nunca se modifica: se extiende una copia y se reemplaza
        with self._powers_lock:
            powers = list(self._powers)
            while len(powers) <= t:
                powers.append(frozen_array(powers[-1] @ self.entries))
            self._powers = powers
        return powers[t]

    def to_dict(self):
        return {'states': list(self.labels), 'matrix': self.entries.tolist()}


class ProbabilityVector(BaseModel):
    """Vector de probabilidad sobre un espacio de estados"""

    def __init__(self, weights, state_space: Optional[StateSpace] = None):
        self.weights = frozen_array(weights)
        self.state_space = state_space or StateSpace.of_size(self.weights.shape[0])

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def validate(self, tolerance: float = 1e-12) -> None:
        """Valida no negatividad y normalización"""
        if self.weights.ndim != 1:
            raise ValueError("El vector de probabilidad debe ser unidimensional")
        if np.any(self.weights < 0):
            raise ValueError("El vector de probabilidad tiene entradas negativas")
        if abs(self.weights.sum() - 1.0) > tolerance:
            raise ValueError(f"El vector de probabilidad suma {self.weights.sum()!r}, no 1")

    @property
    def minimum(self) -> float:
        return float(self.weights.min())

    def is_strictly_positive(self) -> bool:
        return bool(np.all(self.weights > 0))

    def to_dict(self):
        return dict(zip(self.state_space.labels, self.weights.tolist()))


class StationaryDistribution(ProbabilityVector):
    """Distribución estacionaria con indicador de unicidad"""

    def __init__(self, weights, state_space: Optional[StateSpace] = None, unique: bool = True):
        super().__init__(weights, state_space)
        self.unique = unique


class ChainDiagnostics(BaseModel):
    """Diagnóstico estructural de una cadena"""

    def __init__(
        self,
        row_stochastic: bool,
        irreducible: bool,
        period: int,
        doubly_stochastic: bool,
        stationary_support_full: bool,
        stationary_unique: bool = True,
        reversible: bool = False
    ):
        self.row_stochastic = row_stochastic
        self.irreducible = irreducible
        self.period = period
        self.aperiodic = period == 1
        self.doubly_stochastic = doubly_stochastic
        self.stationary_support_full = stationary_support_full
        self.stationary_unique = stationary_unique
        self.reversible = reversible

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic

    @property
    def warnings(self) -> List[str]:
        """Advertencias legibles para reportes"""
        messages = []
        if not self.irreducible:
            messages.append("cadena reducible: el período se reporta para la componente del estado 0")
        if not self.stationary_unique:
            messages.append("la distribución estacionaria no es única")
        if not self.stationary_support_full:
            messages.append("la distribución estacionaria tiene masa cero en algún estado")
        return messages


class Trajectory(BaseModel):
    """Trayectoria realizada X_0, ..., X_N como índices de estado"""

    def __init__(self, states: Sequence[int]):
        self.states = [int(s) for s in states]
        if not self.states:
            raise ValueError("La trayectoria debe tener al menos el estado inicial")

    @property
    def horizon(self) -> int:
        return len(self.states) - 1

    @property
    def initial(self) -> int:
        return self.states[0]

    def validate(self, n: int) -> None:
        """Valida que todos los índices pertenezcan al espacio de estados"""
        for t, state in enumerate(self.states):
            if not 0 <= state < n:
                raise ValueError(f"Estado fuera de rango en t={t}: {state}")

    def labels(self, state_space: StateSpace) -> List[str]:
        return [state_space.label_of(s) for s in self.states]

    def __len__(self) -> int:
        return len(self.states)
