"""Shared grids and fields of the unit tests."""

import numpy as np

from triphase.coupling.lift import project_compatible
from triphase.scenario import Scenario, build_initial_data
from triphase.state.field import TriField
from triphase.state.params import GridSpec, PhysParams

SMALL_GRID = GridSpec(l_h=8.0, n_h=8, l_z=4.0, n_z=8, dt=1e-3, t_end=0.02)
PARAMS = PhysParams(kappa_a=1.0, kappa_b=0.5, kappa_s_tilde=1.0, alpha_s=20.0,
                    beta=1.0)


def random_field(grid: GridSpec = SMALL_GRID, seed: int = 0) -> TriField:
  rng = np.random.default_rng(seed)
  return TriField(rng.standard_normal(grid.bulk_shape),
                  rng.standard_normal(grid.bulk_shape),
                  rng.standard_normal(grid.surface_shape), grid)


def compatible_field(grid: GridSpec = SMALL_GRID,
                     params: PhysParams = PARAMS, **kwargs) -> TriField:
  """Gets a narrow Gaussian bump whose extrapolated bulk traces are matched to
  the surface field."""
  scenario = Scenario(**{'width': 1.0, 'depth': 1.5, 'depth_width': 0.5,
                         **kwargs})
  return project_compatible(build_initial_data(scenario, grid, params), params)


def lifted_field(grid: GridSpec = SMALL_GRID, seed: int = 0) -> TriField:
  """Gets smooth u-variables: a few low sine modes in the bulk and a smooth
  surface field."""
  x1, x2, z = grid.mesh()
  rng = np.random.default_rng(seed)
  c = rng.uniform(0.5, 1.5, size=3)
  k1 = np.pi / grid.l_z
  f_a = c[0] * np.cos(2 * np.pi * x1 / grid.l_h) * np.sin(k1 * z) \
      * np.ones(grid.bulk_shape)
  f_b = c[1] * np.sin(2 * np.pi * x2 / grid.l_h) * np.sin(2 * k1 * z) \
      * np.ones(grid.bulk_shape)
  f_s = c[2] * np.cos(2 * np.pi * (grid.x[:, None] + grid.x[None, :])
                      / grid.l_h)
  return TriField(f_a, f_b, f_s, grid)
