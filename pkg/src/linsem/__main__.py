"""The CLI for the linsem package."""
from .cli import app

app()
