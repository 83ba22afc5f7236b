"""Families of trace-compatible initial temperatures."""

from dataclasses import dataclass

import numpy as np

from triphase.coupling.lift import profile, project_compatible
from triphase.errors import ConfigurationError
from triphase.io.archive import read_first_state
from triphase.state.field import TriField
from triphase.state.params import GridSpec, PhysParams

GAUSSIAN_BUMP = 'gaussian-bump'
PURE_LIFT = 'pure-lift'
SINGLE_MODE = 'single-mode'
FILE = 'file'

FAMILIES = (GAUSSIAN_BUMP, PURE_LIFT, SINGLE_MODE, FILE)


@dataclass(frozen=True)
class Scenario:
  """Names a family of initial data and its parameters.

  `amplitude` scales the surface field, `bulk_amplitude` the bulk bumps,
  `width` is the horizontal and `depth_width` the vertical width of the bumps,
  and `depth` the distance of the bulk bumps from the interface. single-mode
  uses `mode_x` and `mode_z` and file reads `path`. `seed` jitters the
  horizontal bump center by up to `jitter` and seeds the constant estimation.
  """
  name: str = 'default'
  family: str = GAUSSIAN_BUMP
  amplitude: float = 1.0
  bulk_amplitude: float = 0.5
  width: float = 1.5
  depth: float = 2.0
  depth_width: float = 1.0
  mode_x: int = 1
  mode_z: int = 1
  jitter: float = 0.0
  path: str = ''
  seed: int = 0

  def __post_init__(self):
    if self.family not in FAMILIES:
      raise ConfigurationError(f'unknown scenario family "{self.family}", '
                               f'expected one of {", ".join(FAMILIES)}')
    if self.family == FILE and not self.path:
      raise ConfigurationError('the file family needs a path')
    if not (self.width > 0 and self.depth > 0 and self.depth_width > 0):
      raise ConfigurationError('widths and depth must be positive')
    if self.mode_z < 1:
      raise ConfigurationError(
          f'mode_z must be at least 1, but was {self.mode_z}')
    if self.jitter < 0:
      raise ConfigurationError(
          f'jitter must be nonnegative, but was {self.jitter}')


def _center(scenario: Scenario):
  if scenario.jitter == 0:
    return 0.0, 0.0
  rng = np.random.default_rng(scenario.seed)
  c1, c2 = rng.uniform(-scenario.jitter, scenario.jitter, size=2)
  return float(c1), float(c2)


def horizontal_gaussian(grid: GridSpec, width: float, center=(0.0, 0.0)):
  x1, x2 = grid.x[:, None], grid.x[None, :]
  return np.exp(-((x1 - center[0]) ** 2 + (x2 - center[1]) ** 2)
                / (2 * width ** 2))


def bulk_bump(grid: GridSpec, depth: float, depth_width: float) -> np.ndarray:
  """Gets a vertical bump centered at `depth` that vanishes like z^4 at the
  interface."""
  z = grid.z
  return (z / depth) ** 4 * np.exp(-(z - depth) ** 2 / (2 * depth_width ** 2))


def build_initial_data(scenario: Scenario, grid: GridSpec,
                       params: PhysParams) -> TriField:
  """Builds trace-compatible initial temperatures on the grid.

  gaussian-bump puts a horizontal Gaussian on the surface, extends it into both
  slabs along the lift profile and adds bulk bumps below the interface;
  pure-lift is the extension alone; single-mode is one Fourier-sine mode in the
  upper slab with zero surface field; file reads the first state of a
  trajectory archive. The analytic families are sampled pointwise, so nested
  grids see the same field at shared nodes. Only archived fields get their
  extrapolated traces matched to the surface field.

  Raises:
      ConfigurationError: if an archive lives on another grid.
  """
  if scenario.family == FILE:
    theta = read_first_state(scenario.path)
    if theta.grid.with_changes(dt=grid.dt, t_end=grid.t_end) != grid:
      raise ConfigurationError(
          f'the archive "{scenario.path}" lives on another grid')
    return project_compatible(TriField(theta.f_a, theta.f_b, theta.f_s, grid),
                              params)
  if scenario.family == SINGLE_MODE:
    x1 = grid.x[:, None, None]
    z = grid.z[None, None, :]
    xi = 2 * np.pi * scenario.mode_x / grid.l_h
    k = scenario.mode_z * np.pi / grid.l_z
    f_a = scenario.amplitude * np.cos(xi * (x1 + grid.l_h / 2)) \
        * np.sin(k * z) * np.ones(grid.bulk_shape)
    return TriField(f_a, np.zeros(grid.bulk_shape),
                    np.zeros(grid.surface_shape), grid)
  g_h = horizontal_gaussian(grid, scenario.width, _center(scenario))
  f_s = scenario.amplitude * g_h
  psi = profile(grid, params.beta).samples
  ext = f_s[:, :, None] * psi[None, None, :]
  if scenario.family == PURE_LIFT:
    return TriField(ext, ext, f_s, grid)
  bump = g_h[:, :, None] * bulk_bump(grid, scenario.depth,
                                     scenario.depth_width)[None, None, :]
  return TriField(ext + scenario.bulk_amplitude * bump,
                  ext + 0.5 * scenario.bulk_amplitude * bump, f_s, grid)
