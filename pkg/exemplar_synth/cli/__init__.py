from .base import BaseCommand, CommandError
from .main import main, run

__all__ = ["BaseCommand", "CommandError", "main", "run"]
