"""
Tablas por tiempo que gobiernan los mecanismos SST y SMR
"""
from typing import List

import numpy as np

from .base_model import BaseModel, frozen_array


class SeparationTable(BaseModel):
    """a[x0][t] = min_x P^t(x0, x) / pi(x) para t en [0, N]"""

    def __init__(self, a, stationary):
        self.a = frozen_array(a)
        self.stationary = frozen_array(stationary)

    @property
    def horizon(self) -> int:
        return self.a.shape[1] - 1

    def increments(self) -> np.ndarray:
        """a[x0][t] - a[x0][t-1] para t >= 1 (columna 0 igual a a[x0][0])"""
        return np.diff(self.a, axis=1, prepend=0.0)

    def spread(self) -> np.ndarray:
        """max_x0 a[x0][t] - min_x0 a[x0][t] por tiempo"""
        return self.a.max(axis=0) - self.a.min(axis=0)


class AlphaTable(BaseModel):
    """alpha[t] = sum_v min_u P^t(u, v) para t en [0, N]"""

    def __init__(self, alpha):
        self.alpha = frozen_array(alpha)

    @property
    def horizon(self) -> int:
        return self.alpha.shape[0] - 1

    def __getitem__(self, t: int) -> float:
        return float(self.alpha[t])


class ConditionalKernelSequence(BaseModel):
    """
    Núcleos C_t(u, v) = P(X_t = v | X_0 = u, Y_0 = ... = Y_{t-1} = *).

    La secuencia termina en el primer t con s_t = 1 (alpha_t = 1): desde allí
    la liberación es determinista y los núcleos posteriores no se definen.
    """

    def __init__(self, kernels: List[np.ndarray], s: List[float], horizon: int):
        self.kernels = [frozen_array(kernel) for kernel in kernels]
        self.s = frozen_array(s)
        self.horizon = int(horizon)

    @property
    def terminated_at(self) -> int:
        """Último t con núcleo definido"""
        return len(self.kernels) - 1

    @property
    def complete(self) -> bool:
        return self.terminated_at >= self.horizon

    def kernel(self, t: int) -> np.ndarray:
        return self.kernels[t]

    def column_minima(self, t: int) -> np.ndarray:
        """m_t(v) = min_u C_t(u, v)"""
        return self.kernels[t].min(axis=0)
