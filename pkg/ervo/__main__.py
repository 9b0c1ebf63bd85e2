"""python -m ervo: the command-line interface."""
from ervo.cli import cli_dispatch

raise SystemExit(cli_dispatch())
