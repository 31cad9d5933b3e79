"""
Repositorio de cadenas - Carga de archivos de descripción y del catálogo
"""
import logging
import os
from typing import List, Optional

import yaml
from marshmallow import ValidationError as SchemaValidationError

from app.config.settings import Config
from app.exceptions.custom_exceptions import ChainParseError, ValidationError
from app.models.chain import ProbabilityVector, TransitionMatrix
from app.models.schemas import ChainFileSchema, PriorFileSchema
from app.repositories.base_repository import BaseRepository
from app.repositories.fixture_repository import FixtureRepository
from app.services.chain_service import ChainService

logger = logging.getLogger(__name__)


class ChainRepository(BaseRepository):
    """
    Fuente de matrices de transición validadas: archivos YAML con los campos
    `states` y `matrix`, o cadenas del catálogo.
    """

    def __init__(self, chain_service=None, fixtures=None, config=None):
        super().__init__(config or Config())
        self.chain_service = chain_service or ChainService(self.config)
        self.fixtures = fixtures or FixtureRepository(self.config)
        self.schema = ChainFileSchema()

    def get(self, identifier: str) -> TransitionMatrix:
        """Carga una cadena desde un archivo"""
        if not self.exists(identifier):
            raise ChainParseError(f"No se encontró el archivo de cadena '{identifier}'")
        with open(identifier, 'r', encoding='utf-8') as handle:
            return self.parse(handle.read(), identifier)

    def parse(self, text: str, name: str = '<cadena>') -> TransitionMatrix:
        """
        Interpreta y valida un documento de cadena

        Raises:
            ChainParseError: Con línea y campo del error de sintaxis o esquema
            ValidationError: Si la matriz no es estocástica (nombrando la fila)
        """
        try:
            document = yaml.safe_load(text)
            root = yaml.compose(text)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            raise ChainParseError(
                f"Sintaxis inválida en '{name}': {getattr(e, 'problem', None) or str(e)}",
                line=mark.line + 1 if mark else None
            )
        if not isinstance(document, dict):
            raise ChainParseError(f"'{name}' debe ser un documento con los campos 'states' y 'matrix'", line=1)

        try:
            data = self.schema.load(document)
        except SchemaValidationError as e:
            field, message = _first_error(e.messages)
            raise ChainParseError(
                f"Archivo de cadena inválido '{name}': {message}",
                line=_field_line(root, field), field=field
            )

        try:
            chain = self.chain_service.build_transition_matrix(data['matrix'], data['states'])
        except ValidationError as e:
            raise ChainParseError(f"{str(e)} en '{name}'", line=_field_line(root, 'matrix'), field='matrix')
        logger.info(f"Cadena '{name}' cargada con {chain.size} estados")
        return chain

    def get_fixture(self, spec: str) -> TransitionMatrix:
        """Construye y valida una cadena del catálogo"""
        labels, matrix = self.fixtures.get(spec)
        return self.chain_service.build_transition_matrix(matrix, labels)

    def load_chain(self, file: Optional[str] = None, fixture: Optional[str] = None) -> TransitionMatrix:
        """
        Carga una cadena desde exactamente una fuente y ejecuta validate_chain

        Raises:
            ValidationError: Si no se indica exactamente una fuente
        """
        if (file is None) == (fixture is None):
            raise ValidationError("Indique exactamente una fuente: --fixture o --file")
        chain = self.get(file) if file is not None else self.get_fixture(fixture)
        self.chain_service.validate_chain(chain)
        return chain

    def load_prior(self, path: str, chain: TransitionMatrix) -> ProbabilityVector:
        """
        Carga una distribución a priori sobre X_0 (`weights`: etiqueta -> peso)

        Raises:
            ChainParseError: Si el documento es inválido o no cubre los estados
        """
        if not self.exists(path):
            raise ChainParseError(f"No se encontró el archivo de distribución a priori '{path}'")
        with open(path, 'r', encoding='utf-8') as handle:
            try:
                document = yaml.safe_load(handle.read())
            except yaml.YAMLError as e:
                mark = getattr(e, 'problem_mark', None)
                raise ChainParseError(f"Sintaxis inválida en '{path}'", line=mark.line + 1 if mark else None)
        try:
            data = PriorFileSchema().load(document if isinstance(document, dict) else {})
        except SchemaValidationError as e:
            field, message = _first_error(e.messages)
            raise ChainParseError(f"Distribución a priori inválida '{path}': {message}", field=field)

        weights = data['weights']
        unknown = set(weights) - set(chain.labels)
        if unknown:
            raise ChainParseError(f"Estados desconocidos en '{path}': {sorted(unknown)}", field='weights')
        prior = ProbabilityVector([weights.get(label, 0.0) for label in chain.labels], chain.state_space)
        try:
            prior.validate(self.config.ROW_SUM_TOLERANCE)
        except ValueError as e:
            raise ChainParseError(f"{str(e)} en '{path}'", field='weights')
        return prior

    def list_available(self) -> List[str]:
        return self.fixtures.list_available()

    def exists(self, identifier: str) -> bool:
        return os.path.isfile(identifier)


def _first_error(messages, prefix=None):
    """Primer (campo, mensaje) de un árbol de errores de marshmallow"""
    if isinstance(messages, dict):
        key = sorted(messages, key=str)[0]
        field = prefix if prefix is not None else (None if key == '_schema' else str(key))
        return _first_error(messages[key], field)
    if isinstance(messages, list) and messages:
        return _first_error(messages[0], prefix)
    return prefix, str(messages)


def _field_line(root, field: Optional[str]) -> Optional[int]:
    """Línea (1-based) donde aparece el campo en el documento"""
    if root is None or field is None or not isinstance(root, yaml.MappingNode):
        return None
    for key, value in root.value:
        if key.value == field:
            return value.start_mark.line + 1
    return None
