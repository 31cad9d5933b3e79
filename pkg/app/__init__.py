"""
Aplicación de línea de comandos para mecanismos de redacción con privacidad perfecta
"""
import logging
import sys
from typing import List, Optional

import click

from app.config.settings import get_config

EXIT_USAGE = 2


def create_app():
    """Factory function para crear el grupo de comandos"""

    config = get_config()

    @click.group(name='markov-redaction')
    @click.version_option(config.APP_VERSION, prog_name=config.APP_NAME)
    def cli():
        """Mecanismos SST y SMR, auditoría de privacidad y análisis de distorsión"""

    configure_logging(config)
    configure_commands(cli)
    return cli


def configure_logging(config):
    """Configura el handler raíz en stderr con el nivel de la configuración"""
    logging.basicConfig(
        level=getattr(logging, str(config.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr
    )


def configure_commands(cli):
    """Registra los comandos de la aplicación"""
    from .controllers.audit_controller import audit_command
    from .controllers.chain_controller import bound_command, validate_command
    from .controllers.distortion_controller import distortion_command, sweep_command
    from .controllers.mechanism_controller import mechanism_command

    for command in (validate_command, mechanism_command, audit_command,
                    distortion_command, bound_command, sweep_command):
        cli.add_command(command)


def run_command(argv: Optional[List[str]] = None) -> int:
    """
    Ejecuta un comando y retorna su código de salida

    0 éxito, 2 validación, 3 auditoría fallida, 1 error interno.
    """
    cli = create_app()
    try:
        result = cli.main(args=list(argv or []), prog_name='markov-redaction', standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        return 1
    return result if isinstance(result, int) else 0
