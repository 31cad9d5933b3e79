"""
Punto de entrada principal de la aplicación
"""
import sys

from app import run_command

if __name__ == '__main__':
    sys.exit(run_command(sys.argv[1:]))
