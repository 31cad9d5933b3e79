"""
Controlador base - Estructura común de los comandos de línea de comandos
"""
import logging
from typing import Any, Dict, Optional

import click
import numpy as np

from app.config.settings import Config
from app.exceptions.custom_exceptions import EnumerationGuardError, ServiceError, ValidationError
from app.models.chain import ProbabilityVector
from app.models.run_config import RunConfig
from app.models.schemas import ReportDocumentSchema
from app.repositories.chain_repository import ChainRepository
from app.repositories.report_repository import ReportRepository
from app.utils.rng import MAX_SEED, draw_seed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_AUDIT_FAIL = 3


def source_options(command):
    """Opciones --fixture / --file comunes a todos los comandos"""
    command = click.option('--file', 'file_path', default=None, help='Archivo de descripción de cadena')(command)
    command = click.option('--fixture', default=None, help="Cadena del catálogo, p. ej. 'two_state(0.25)'")(command)
    return command


def seed_option(command):
    return click.option('--seed', type=click.IntRange(0, MAX_SEED), default=None,
                        help='Semilla maestra de 64 bits')(command)


def chain_source(fixture: Optional[str], file_path: Optional[str]) -> str:
    """Fuente de la cadena como 'fixture:ESPEC' o 'file:RUTA'"""
    if fixture is not None and file_path is not None:
        raise click.UsageError("Indique solo una fuente: --fixture o --file")
    if fixture is not None:
        return f"fixture:{fixture}"
    if file_path is not None:
        return f"file:{file_path}"
    return ''


class BaseController:
    """Controlador base con carga de cadenas, reportes y códigos de salida"""

    def __init__(self, chains=None, reports=None, config=None):
        self.config = config or Config()
        self.chains = chains or ChainRepository(config=self.config)
        self.reports = reports or ReportRepository(self.config)

    def execute(self, action, run_config: RunConfig) -> int:
        """Valida la configuración, ejecuta la acción y traduce excepciones"""
        try:
            run_config.validate()
        except ValueError as e:
            return self.error_response(str(e), EXIT_VALIDATION)
        try:
            return action(run_config)
        except Exception as e:
            message, status = self.handle_exception(e)
            return self.error_response(message, status)

    def handle_exception(self, e: Exception):
        """Mapea excepciones a (mensaje, código de salida)"""
        if isinstance(e, (ValidationError, EnumerationGuardError)):
            return str(e), EXIT_VALIDATION
        if isinstance(e, ServiceError):
            return f"{e.__class__.__name__}: {str(e)}", EXIT_INTERNAL
        logger.exception("Error interno no controlado")
        return f"Error interno: {str(e)}", EXIT_INTERNAL

    def load_chain(self, run_config: RunConfig):
        kind, _, value = run_config.source.partition(':')
        if kind == 'file':
            return self.chains.load_chain(file=value)
        return self.chains.load_chain(fixture=value)

    def resolve_prior(self, chain, spec: str) -> ProbabilityVector:
        """'uniform' o ruta a un documento YAML con pesos por etiqueta"""
        if spec == 'uniform':
            return ProbabilityVector(np.full(chain.size, 1.0 / chain.size), chain.state_space)
        return self.chains.load_prior(spec, chain)

    def resolve_start(self, chain, spec: str):
        """Ley de X_0 para Monte-Carlo: 'uniform' o la etiqueta de un estado"""
        if spec == 'uniform':
            return np.full(chain.size, 1.0 / chain.size)
        try:
            return chain.state_space.index_of(spec)
        except ValueError as e:
            raise ValidationError(str(e))

    def resolve_seed(self, seed: Optional[int]) -> int:
        """Semilla dada o sorteada; la sorteada se informa en stderr"""
        resolved = draw_seed(seed)
        if seed is None:
            click.echo(f"seed: {resolved}", err=True)
        return resolved

    def success_response(self, kind: str, result: Any, run_config: RunConfig,
                         status_code: int = EXIT_OK) -> int:
        """Escribe el documento de reporte y retorna el código de salida"""
        document = ReportDocumentSchema().dump({
            'app': self.config.APP_NAME,
            'version': self.config.APP_VERSION,
            'kind': kind,
            'run_config': run_config.to_dict(),
            'result': result,
        })
        self.reports.save(dict(document), run_config.out)
        return status_code

    def error_response(self, message: str, status_code: int = EXIT_VALIDATION,
                       details: Optional[Dict[str, Any]] = None) -> int:
        """Diagnóstico en stderr y código de salida"""
        click.echo(f"error: {message}", err=True)
        if details:
            for key, value in details.items():
                click.echo(f"  {key}: {value}", err=True)
        return status_code
