"""Run configuration of `teichwin`."""
from configparser import ConfigParser
from dataclasses import InitVar, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .exceptions import UsageError
from .helpers.utils import read_config
from .scenarios import SCENARIOS

COMMANDS = ('surface', 'metric', 'scenario')
FORMATS = ('json', 'csv')

@dataclass
class RunConfig:
    """Structures a `teichwin` run.

    Unset values are filled from the configuration file.
    """
    command: str
    """Subcommand name."""
    template: str = 'builtin:flute'
    """Template file or `builtin:NAME`."""
    surfaces: List[Tuple[Path, Dict]] = field(default_factory=list)
    """Loaded surface documents."""
    window: Optional[Tuple[int, int]] = None
    """Window centre and radius."""
    max_chain: Optional[int] = None
    """Maximum pants of chain candidates."""
    max_wind: Optional[int] = None
    """Maximum candidate winding."""
    scenario: Optional[str] = None
    """Scenario name."""
    n_max: Optional[int] = None
    """Number of scenario rows."""
    fmt: str = 'json'
    """Output format."""
    out: Optional[Path] = None
    """Output file, standard output if `None`."""
    jobs: Optional[int] = None
    """Worker threads."""
    seed: int = 0
    """Seed of randomized scenario steps."""
    scan: Optional[int] = None
    """Index range of FN distances and Shiga scans."""
    template_dump: bool = False
    """Include the template document in surface reports."""
    configfile: InitVar[Optional[Path]] = None
    """User configuration file."""
    config: ConfigParser = field(init=False, repr=False)
    """Configuration parser."""

    def __post_init__(self, configfile):
        self.config = read_config(configfile)
        if self.window is None:
            self.window = (self.config.getint('window', 'center', fallback=0),
                           self.config.getint('window', 'radius', fallback=2))
        if self.max_chain is None:
            self.max_chain = self.config.getint('curves', 'max_chain',
                                                fallback=3)
        if self.max_wind is None:
            self.max_wind = self.config.getint('curves', 'max_wind',
                                               fallback=2)
        if self.jobs is None:
            self.jobs = self.config.getint('enumeration', 'jobs', fallback=1)
        if self.scan is None:
            self.scan = self.config.getint('fn_space', 'shiga_n', fallback=20)
        self.validate()

    def validate(self) -> None:
        """Check the run values."""
        if self.command not in COMMANDS:
            raise UsageError(f'Unknown command {self.command}')
        if self.fmt not in FORMATS:
            raise UsageError(f'Unknown format {self.fmt}')
        for name in ('max_chain', 'max_wind', 'jobs'):
            if getattr(self, name) < 0:
                raise UsageError(f'{name} must be non-negative')
        if min(self.window) < 0:
            raise UsageError(f'Invalid window {self.window}')
        if self.scan < 1:
            raise UsageError(f'Scan range must be positive: {self.scan}')
        if self.n_max is not None and self.n_max < 1:
            raise UsageError(f'n_max must be positive: {self.n_max}')
        if self.command == 'scenario' and self.scenario not in SCENARIOS:
            raise UsageError(f'Unknown scenario {self.scenario!r}; valid '
                             f'names: {", ".join(SCENARIOS)}')
        if self.command == 'surface' and len(self.surfaces) != 1:
            raise UsageError('surface needs exactly one --surface')
        if self.command == 'metric' and len(self.surfaces) != 2:
            raise UsageError('metric needs exactly two --surface')
        if self.fmt == 'csv' and self.command != 'scenario':
            raise UsageError('CSV output is only available for scenarios')
