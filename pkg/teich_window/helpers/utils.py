"""Configuration utilities."""
from configparser import ConfigParser
from inspect import signature
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Union

from ..common_types import SectionProxy

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / 'config' / 'default.cfg'

def read_config(filename: Union[None, str, Path] = None) -> ConfigParser:
    """Read the package defaults and update them from `filename`.

    Args:
      filename: optional; user configuration file.
    """
    config = ConfigParser()
    config.read(DEFAULT_CONFIG)
    if filename is not None:
        filename = Path(filename).expanduser().resolve()
        if not filename.is_file():
            raise IOError(f'{filename} does not exist')
        config.read(filename)

    return config

def get_func_params(func: Callable,
                    config: SectionProxy,
                    required_keys: Sequence[str] = (),
                    ignore_keys: Sequence[str] = (),
                    float_keys: Sequence[str] = (),
                    int_keys: Sequence[str] = (),
                    bool_keys: Sequence[str] = (),
                    cfgvars: Optional[Dict] = None) -> Dict:
    """Fill the keyword arguments of `func` from a configuration section.

    Values in `cfgvars` take precedence over those in `config`. Keys not in
    the signature of `func` are ignored.

    Args:
      func: function to inspect.
      config: configuration parser section proxy.
      required_keys: optional; required keys.
      ignore_keys: optional; keys to ignore.
      float_keys: optional; keys required as float type.
      int_keys: optional; keys required as int type.
      bool_keys: optional; keys required as bool type.
      cfgvars: optional; values replacing those in config.
    """
    if cfgvars is None:
        cfgvars = {}

    for opt in required_keys:
        if opt not in config and opt not in cfgvars:
            raise KeyError(f'Missing {opt} in configuration')

    pars = {}
    for key in signature(func).parameters:
        if key in ignore_keys:
            continue
        if key in cfgvars and cfgvars[key] is not None:
            pars[key] = cfgvars[key]
        elif key not in config:
            continue
        elif key in float_keys:
            pars[key] = config.getfloat(key)
        elif key in int_keys:
            pars[key] = config.getint(key)
        elif key in bool_keys:
            pars[key] = config.getboolean(key)
        else:
            pars[key] = config.get(key)

    return pars
