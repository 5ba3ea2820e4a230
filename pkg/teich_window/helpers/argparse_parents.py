"""Argparse parent parsers commonly used."""
from typing import Optional
import argparse
import pathlib

from .argparse_actions import NonNegative, ParseWindow, StartLogger
from .logger import get_stderr_logger

def logger(filename: Optional['pathlib.Path'] = None) -> argparse.ArgumentParser:
    """Parent parser to initiate a logging system.

    Args:
      filename: optional; default filename for logging.
    """
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('-v', '--vv', '--vvv', default=filename,
                        action=StartLogger,
                        help='Logging setup')
    parser.set_defaults(log=get_stderr_logger('teichwin'))

    return parser

def enumeration() -> argparse.ArgumentParser:
    """Window and candidate enumeration bounds."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--window', action=ParseWindow, default=None,
                        help='Window centre pants and radius')
    parser.add_argument('--max-chain', action=NonNegative, default=None,
                        help='Maximum pants of chain candidates')
    parser.add_argument('--max-wind', action=NonNegative, default=None,
                        help='Maximum winding of candidates')
    parser.add_argument('--jobs', action=NonNegative, default=None,
                        help='Worker threads for length evaluations')

    return parser

def output() -> argparse.ArgumentParser:
    """Output format and destination."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--format', dest='fmt', choices=['json', 'csv'],
                        default='json',
                        help='Output format')
    parser.add_argument('--out', type=pathlib.Path, default=None,
                        help='Output file, standard output by default')

    return parser
