"""Collection of actions to process different command line inputs."""
from typing import List, Union
import argparse
import json
import pathlib

from .logger import get_stderr_logger, update_logger

def validate_path(path: pathlib.Path,
                  check_is_file: bool = False,
                  check_is_dir: bool = False,
                  mkdir: bool = False) -> pathlib.Path:
    """Performs several checks on input path.

    Args:
      path: path to check.
      check_is_file: optional; check whether is file and exists.
      check_is_dir: optional; check whether is a directory and exists.
      mkdir: optional; make directories if they do not exist.

    Returns:
      A validated resolved pathlib.Path object
    """
    path = path.expanduser().resolve()
    if check_is_file and not path.is_file():
        raise IOError(f'{path} does not exist')
    elif check_is_dir or mkdir:
        if not path.is_dir() and not mkdir:
            raise IOError(f'{path} directory does not exist')
        else:
            path.mkdir(parents=True, exist_ok=True)

    return path

def validate_paths(filenames: Union[str, List[str]],
                   check_is_file: bool = False,
                   check_is_dir: bool = False,
                   mkdir: bool = False):
    """Performs several checks on input list of file names.

    Args:
      filenames: list of filenames to check.
      check_is_file: optional; check whether is file and exists.
      check_is_dir: optional; check whether is a directory and exists.
      mkdir: optional; make directories if they do not exist.

    Returns:
      Validated pathlib.Path from the input strings.
    """
    try:
        # Case single string file name
        validated = pathlib.Path(filenames)
        validated = validate_path(validated, check_is_file=check_is_file,
                                  check_is_dir=check_is_dir, mkdir=mkdir)
    except TypeError:
        # Case multiple file names
        validated = []
        for filename in filenames:
            aux = pathlib.Path(filename)
            aux = validate_path(aux, check_is_file=check_is_file,
                                check_is_dir=check_is_dir, mkdir=mkdir)
            validated.append(aux)

    return validated

class StartLogger(argparse.Action):
    """Start a logger with the verbose level of the option string.

    The default value of the argument is the log file name.
    """

    def __init__(self, option_strings, dest, nargs=0, **kwargs):
        if nargs != 0:
            raise ValueError('nargs not allowed')
        super().__init__(option_strings, dest, nargs=0, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        verbose = option_string.lstrip('-')
        log = get_stderr_logger('teichwin')
        log = update_logger(log, filename=self.default, verbose=verbose)
        setattr(namespace, 'log', log)

class CheckFile(argparse.Action):
    """Validate a file name."""

    def __call__(self, parser, namespace, values, option_string=None):
        try:
            values = validate_paths(values, check_is_file=True)
        except IOError as exc:
            parser.error(str(exc))
        setattr(namespace, self.dest, values)

class ReadJSON(argparse.Action):
    """Load a JSON document; repeated options accumulate.

    Parse errors propagate as `json.JSONDecodeError`.
    """

    def __call__(self, parser, namespace, values, option_string=None):
        try:
            path = validate_path(pathlib.Path(values), check_is_file=True)
        except IOError as exc:
            parser.error(str(exc))
        with path.open('r', encoding='utf-8') as stream:
            document = json.load(stream)
        loaded = list(getattr(namespace, self.dest, None) or [])
        loaded.append((path, document))
        setattr(namespace, self.dest, loaded)

class ParseWindow(argparse.Action):
    """Read a window as `CENTER:RADIUS`."""

    def __init__(self, option_strings, dest, nargs=None, **kwargs):
        if nargs is not None:
            raise ValueError('nargs not allowed')
        kwargs.setdefault('metavar', 'CENTER:RADIUS')
        super().__init__(option_strings, dest, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        center, _, radius = values.partition(':')
        try:
            center, radius = int(center), int(radius)
        except ValueError:
            parser.error(f'Invalid window {values!r}, expected CENTER:RADIUS')
        if center < 0 or radius < 0:
            parser.error(f'Window values must be non-negative: {values}')
        setattr(namespace, self.dest, (center, radius))

class NonNegative(argparse.Action):
    """Store a non-negative integer."""

    def __call__(self, parser, namespace, values, option_string=None):
        try:
            value = int(values)
        except ValueError:
            parser.error(f'{option_string} needs an integer: {values!r}')
        if value < 0:
            parser.error(f'{option_string} must be non-negative: {value}')
        setattr(namespace, self.dest, value)
