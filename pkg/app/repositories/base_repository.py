"""
Repositorio base - Estructura base para fuentes de cadenas y destinos de reportes
"""
from typing import Any, List, Optional


class BaseRepository:
    """Repositorio base con operaciones de lectura y escritura comunes"""

    def __init__(self, config=None):
        """Inicializa el repositorio con la configuración de la aplicación"""
        self.config = config

    def get(self, identifier: str) -> Any:
        """Obtiene una entidad por identificador (ruta o nombre)"""
        raise NotImplementedError("Método get debe ser implementado en subclases")

    def save(self, entity: Any, destination: Optional[str] = None) -> Optional[str]:
        """Persiste una entidad; retorna la ruta escrita o None si va a stdout"""
        raise NotImplementedError("Método save debe ser implementado en subclases")

    def list_available(self) -> List[str]:
        """Lista los identificadores disponibles"""
        raise NotImplementedError("Método list_available debe ser implementado en subclases")

    def exists(self, identifier: str) -> bool:
        """Verifica si una entidad existe"""
        raise NotImplementedError("Método exists debe ser implementado en subclases")
