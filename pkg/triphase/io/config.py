"""Parsing of the run configuration files.

A configuration file holds `key = value` lines grouped in the sections
`[phys]`, `[grid]`, `[solver]`, `[scenario]` and `[output]`, e.g.

    # comment
    [phys]
    kappa_a = 1.0
    kappa_b = 1.0
    kappa_s_tilde = 1.0
    alpha_s = 20
    beta = 1

    [grid]
    n_h = 16

All `[phys]` keys are required; the others default to the values below.
"""

import hashlib
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Dict, Optional, Tuple

from triphase.coupling.interface import CouplingScheme
from triphase.errors import ConfigurationError, DomainError
from triphase.io.typing import FilePath
from triphase.io.utils import copen, detect_compression
from triphase.scenario import Scenario
from triphase.solver.picard import PicardStart, SolverConfig
from triphase.state.params import GridSpec, PhysParams

DEFAULT_GRID = GridSpec(l_h=16.0, n_h=16, l_z=8.0, n_z=16, dt=1e-3,
                        t_end=0.5)


@dataclass(frozen=True)
class OutputConfig:
  """Settings of the emitted artifacts and of the auxiliary computations."""
  archive: bool = False
  constants_trials: int = 16
  probe_steps: int = 32
  oracle_mult: int = 2
  oracle_t_end: float = 0.1
  refinements: int = 2
  holder_q: float = 0.25
  oracle_scheme: str = 'explicit'

  def __post_init__(self):
    if self.constants_trials < 1:
      raise ConfigurationError('constants_trials must be at least 1')
    if self.probe_steps < 1:
      raise ConfigurationError('probe_steps must be at least 1')
    if self.oracle_mult < 1:
      raise ConfigurationError('oracle_mult must be at least 1')
    if self.refinements < 2:
      raise ConfigurationError('refinements must be at least 2')
    if not self.oracle_t_end > 0:
      raise ConfigurationError('oracle_t_end must be positive')
    if not 0 < self.holder_q <= 1:
      raise ConfigurationError('holder_q must be in (0, 1]')
    if self.oracle_scheme not in ('explicit', 'implicit', 'crank_nicolson'):
      raise ConfigurationError(
          f'unknown oracle_scheme "{self.oracle_scheme}"')


@dataclass(frozen=True)
class RunConfig:
  phys: PhysParams
  grid: GridSpec = DEFAULT_GRID
  solver: SolverConfig = SolverConfig()
  scenario: Scenario = Scenario()
  output: OutputConfig = OutputConfig()
  source: Optional[str] = field(default=None, compare=False)

  def to_text(self) -> str:
    """Serializes every setting, defaults included, in the file format."""
    lines = []
    for section, obj in (('phys', self.phys), ('grid', self.grid),
                         ('solver', self.solver),
                         ('scenario', self.scenario),
                         ('output', self.output)):
      lines.append(f'[{section}]')
      for f in fields(obj):
        lines.append(f'{f.name} = {_format(getattr(obj, f.name))}')
      lines.append('')
    return '\n'.join(lines)

  @property
  def digest(self) -> str:
    """Gets the SHA-256 hex digest of `to_text()`."""
    return hashlib.sha256(self.to_text().encode('utf-8')).hexdigest()


def _format(value: Any) -> str:
  if isinstance(value, bool):
    return 'true' if value else 'false'
  if isinstance(value, (CouplingScheme, PicardStart)):
    return value.name.lower()
  if isinstance(value, float):
    return repr(value)
  return str(value)


def _parse_bool(text: str) -> bool:
  if text == 'true':
    return True
  if text == 'false':
    return False
  raise ValueError(f'expected true or false, but got "{text}"')


def _parse_int(text: str) -> int:
  value = float(text)
  if not value.is_integer():
    raise ValueError(f'expected an integer, but got "{text}"')
  return int(value)


def _enum(cls) -> Callable[[str], Any]:
  def parse(text: str):
    try:
      return cls[text.upper()]
    except KeyError:
      raise ValueError(f'expected one of '
                       f'{", ".join(m.name.lower() for m in cls)}, '
                       f'but got "{text}"') from None
  return parse


def _schema(cls) -> Dict[str, Callable[[str], Any]]:
  parsers = {}
  for f in fields(cls):
    if f.type in (bool, 'bool'):
      parsers[f.name] = _parse_bool
    elif f.type in (int, 'int'):
      parsers[f.name] = _parse_int
    elif f.type in (float, 'float'):
      parsers[f.name] = float
    elif f.type in (CouplingScheme, 'CouplingScheme'):
      parsers[f.name] = _enum(CouplingScheme)
    elif f.type in (PicardStart, 'PicardStart'):
      parsers[f.name] = _enum(PicardStart)
    else:
      parsers[f.name] = str
  return parsers


_sections: Dict[str, Tuple[type, Dict[str, Callable[[str], Any]]]] = {
    'phys': (PhysParams, _schema(PhysParams)),
    'grid': (GridSpec, _schema(GridSpec)),
    'solver': (SolverConfig, _schema(SolverConfig)),
    'scenario': (Scenario, _schema(Scenario)),
    'output': (OutputConfig, _schema(OutputConfig)),
}


def parse_config_text(text: str, *, source: Optional[str] = None) \
        -> RunConfig:
  """Parses the content of a configuration file.

  Raises:
      ConfigurationError: if a line is malformed, a section or key is unknown
      or repeated, a value can't be parsed, a `[phys]` key is missing or the
      values are inconsistent. The error names the line where possible.
  """
  values: Dict[str, Dict[str, Any]] = {name: {} for name in _sections}
  lines: Dict[str, Dict[str, int]] = {name: {} for name in _sections}
  section = None
  for no, raw in enumerate(text.splitlines(), start=1):
    line = raw.split('#', 1)[0].strip()
    if not line:
      continue
    if line.startswith('[') and line.endswith(']'):
      section = line[1:-1].strip()
      if section not in _sections:
        raise ConfigurationError(f'unknown section "[{section}]"', line=no)
      continue
    key, sep, value = (p.strip() for p in line.partition('='))
    if not sep or not key:
      raise ConfigurationError(f'expected "key = value", but got "{line}"',
                               line=no)
    if section is None:
      raise ConfigurationError(f'key "{key}" outside of a section', line=no)
    parsers = _sections[section][1]
    if key not in parsers:
      raise ConfigurationError(f'unknown key "{key}" in [{section}]', line=no)
    if key in values[section]:
      raise ConfigurationError(f'duplicate key "{key}" in [{section}]',
                               line=no)
    try:
      values[section][key] = parsers[key](value)
    except ValueError as e:
      raise ConfigurationError(f'invalid value of "{key}": {e}',
                               line=no) from None
    lines[section][key] = no
  missing = [f.name for f in fields(PhysParams)
             if f.name not in values['phys']]
  if missing:
    raise ConfigurationError(
        f'missing key "{missing[0]}" in [phys]')
  built = {}
  for name, (cls, _) in _sections.items():
    base = DEFAULT_GRID if name == 'grid' else None
    try:
      if base is not None:
        built[name] = base.with_changes(**values[name])
      else:
        built[name] = cls(**values[name])
    except (ConfigurationError, DomainError) as e:
      first = min(lines[name].values(), default=None)
      raise ConfigurationError(f'[{name}] {e}', line=first) from None
  return RunConfig(built['phys'], built['grid'], built['solver'],
                   built['scenario'], built['output'], source=source)


def parse_config(fp: FilePath, *, encoding: str = 'utf-8') -> RunConfig:
  """Reads and parses a configuration file, which may be compressed.

  Raises:
      FileNotFoundError: if the file doesn't exist.
      ConfigurationError: see `parse_config_text`.
  """
  with copen(fp, mode='text', compression=detect_compression(fp),
             encoding=encoding) as f:
    text = f.read()
  return parse_config_text(text, source=str(fp))
