"""
Esquemas de serialización (marshmallow) para archivos de cadena y reportes
"""
from marshmallow import Schema, fields, validates_schema, ValidationError as SchemaValidationError


class ChainFileSchema(Schema):
    """Documento de cadena: `states` (etiquetas) y `matrix` (filas)"""

    states = fields.List(fields.String(), required=True)
    matrix = fields.List(fields.List(fields.Float(allow_nan=False)), required=True)

    @validates_schema
    def validate_dimensions(self, data, **kwargs):
        states = data.get('states', [])
        matrix = data.get('matrix', [])
        if not states:
            raise SchemaValidationError("Debe declarar al menos un estado", 'states')
        if len(set(states)) != len(states):
            raise SchemaValidationError("Las etiquetas de estado deben ser únicas", 'states')
        if len(matrix) != len(states):
            raise SchemaValidationError(
                f"Dimensión inconsistente: {len(states)} estados y {len(matrix)} filas", 'matrix'
            )
        for row, values in enumerate(matrix):
            if len(values) != len(states):
                raise SchemaValidationError(
                    f"La fila {row} tiene {len(values)} entradas; se esperaban {len(states)}", 'matrix'
                )


class PriorFileSchema(Schema):
    """Documento de distribución a priori: `weights` por etiqueta"""

    weights = fields.Dict(keys=fields.String(), values=fields.Float(allow_nan=False), required=True)


class RunConfigSchema(Schema):
    """Configuración resuelta embebida en cada reporte"""

    command = fields.String()
    source = fields.String()
    horizon = fields.Integer(allow_none=True)
    mechanism = fields.String(allow_none=True)
    k = fields.Integer(allow_none=True)
    trials = fields.Integer(allow_none=True)
    seed = fields.Integer(allow_none=True)
    prior = fields.String()
    start = fields.String()
    tolerances = fields.Dict(keys=fields.String(), values=fields.Float())
    grid = fields.List(fields.Integer(), allow_none=True)
    out = fields.String(allow_none=True)
    output_format = fields.String(data_key='format')


class ReportDocumentSchema(Schema):
    """Documento de reporte: configuración, tipo y resultado"""

    app = fields.String()
    version = fields.String()
    kind = fields.String()
    run_config = fields.Nested(RunConfigSchema)
    result = fields.Raw()
