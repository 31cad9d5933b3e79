"""
Repositorio de reportes - Documentos YAML y vistas CSV
"""
import io
import logging
from typing import Any, Dict, Optional

import click
import pandas as pd
import yaml

from app.config.settings import Config
from app.repositories.base_repository import BaseRepository

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.12g'


class ReportRepository(BaseRepository):
    """Escribe reportes en stdout o en la ruta indicada por --out"""

    def __init__(self, config=None):
        super().__init__(config or Config())

    def save(self, entity: Dict[str, Any], destination: Optional[str] = None) -> Optional[str]:
        """Escribe un documento de reporte YAML"""
        return self._write(self.render_report(entity), destination)

    def save_csv(self, frame: pd.DataFrame, destination: Optional[str] = None) -> Optional[str]:
        """Escribe una vista CSV con formato de punto flotante fijo"""
        return self._write(self.render_csv(frame), destination)

    @staticmethod
    def render_report(document: Dict[str, Any]) -> str:
        return yaml.safe_dump(document, sort_keys=False, allow_unicode=True, default_flow_style=False)

    @staticmethod
    def render_csv(frame: pd.DataFrame) -> str:
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
        return buffer.getvalue()

    def _write(self, text: str, destination: Optional[str]) -> Optional[str]:
        if destination is None:
            click.echo(text, nl=False)
            return None
        with open(destination, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        logger.info(f"Reporte escrito en {destination}")
        return destination
