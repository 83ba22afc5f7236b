"""A finite-difference reference solver for the temperatures themselves.

The oracle discretizes the three equations on the sampled grid with centered
second differences, shares the interface unknown between both slabs and the
surface, and holds the far walls at zero. It shares no discretization with the
spectral solver: its Laplacians are sparse matrices, its time stepping is a
classical one-step scheme and its interface fluxes are one-sided differences.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from triphase.errors import ConfigurationError
from triphase.io.table import Table
from triphase.state.field import TriField, h_norm
from triphase.state.params import GridSpec, PhysParams
from triphase.state.trajectory import Trajectory, Variables

logger = logging.getLogger(__name__)


class FDScheme(Enum):
  EXPLICIT = 1
  IMPLICIT = 2
  CRANK_NICOLSON = 3


class InterfaceStencil(Enum):
  """Discretization of the surface equation.

  ONE_SIDED takes the normal derivatives from second-order one-sided
  differences. CONSERVATIVE treats the interface node as a finite volume with
  half a cell of each slab, which gives it the capacity `alpha_S + dz` and the
  lateral conductance `kappa_S + (kappa_A + kappa_B) dz / 2`.
  """
  ONE_SIDED = 1
  CONSERVATIVE = 2


@dataclass
class OracleReport:
  scheme: FDScheme
  stencil: InterfaceStencil
  dt: float
  stride: int
  steps: int
  frozen_surface: bool = False
  meta: dict = field(default_factory=dict)


def oracle_grid(grid: GridSpec, mult: int = 2,
                dt: Optional[float] = None) -> GridSpec:
  """Refines a grid by `mult` in every axis such that the nodes of `grid` are
  nodes of the refined grid.

  Raises:
      ConfigurationError: if mult is less than one.
  """
  if mult < 1:
    raise ConfigurationError(f'mult must be at least 1, but was {mult}')
  return grid.with_changes(n_h=grid.n_h * mult, n_z=mult * (grid.n_z + 1) - 1,
                           dt=grid.dt if dt is None else dt)


def _periodic_second_difference(n: int, h: float) -> sp.csr_matrix:
  main = -2.0 * np.ones(n)
  off = np.ones(n - 1)
  mat = sp.diags([off, main, off], [-1, 0, 1], shape=(n, n), format='lil')
  mat[0, n - 1] += 1.0
  mat[n - 1, 0] += 1.0
  return mat.tocsr() / h ** 2


def _dirichlet_second_difference(m: int, dz: float) -> sp.csr_matrix:
  return sp.diags([np.ones(m - 1), -2.0 * np.ones(m), np.ones(m - 1)],
                  [-1, 0, 1], shape=(m, m), format='csr') / dz ** 2


def _unit(m: int, idx: int) -> sp.csr_matrix:
  return sp.csr_matrix(([1.0], ([idx], [0])), shape=(m, 1))


def capacity(grid: GridSpec, params: PhysParams,
             stencil: InterfaceStencil) -> float:
  """Gets the heat capacity per area of the interface node."""
  if stencil == InterfaceStencil.CONSERVATIVE:
    return params.alpha_s + grid.dz
  return params.alpha_s


def assemble_operator(grid: GridSpec, params: PhysParams,
                      stencil: InterfaceStencil = InterfaceStencil.ONE_SIDED,
                      *, frozen_surface: bool = False) -> sp.csr_matrix:
  """Assembles the matrix A of `dU/dt = A U` for the unknowns
  `U = (theta_A, theta_B, theta_S)` flattened in C order.

  Args:
      grid (GridSpec): the grid; the interior nodes of a slab sit at the
      distances `m dz`, m = 1, ..., n_z, and the far wall at `(n_z+1) dz`.
      params (PhysParams): the coefficients of the system.
      stencil (InterfaceStencil, optional): discretization of the surface
      equation. Defaults to ONE_SIDED.
      frozen_surface (bool, optional): True holds theta_S fixed in time.
      Defaults to False.

  Returns:
      sp.csr_matrix: a square sparse matrix.
  """
  n, m = grid.n_h, grid.n_z
  if m < 2:
    raise ConfigurationError(f'the oracle needs n_z >= 2, but was {m}')
  dz = grid.dz
  d1 = _periodic_second_difference(n, grid.h)
  eye_n = sp.identity(n, format='csr')
  lap_h = sp.kron(d1, eye_n) + sp.kron(eye_n, d1)
  eye_s = sp.identity(n * n, format='csr')
  lap_bulk = sp.kron(lap_h, sp.identity(m)) \
      + sp.kron(eye_s, _dirichlet_second_difference(m, dz))
  into_bulk = sp.kron(eye_s, _unit(m, 0)) / dz ** 2
  pick = [sp.kron(eye_s, _unit(m, j).T) for j in range(2)]
  k_a, k_b = params.kappa_a, params.kappa_b
  cap = capacity(grid, params, stencil)
  if frozen_surface:
    s_a = sp.csr_matrix((n * n, n * n * m))
    s_b = sp.csr_matrix((n * n, n * n * m))
    s_s = sp.csr_matrix((n * n, n * n))
  elif stencil == InterfaceStencil.ONE_SIDED:
    s_s = (params.kappa_s * lap_h - 1.5 * (k_a + k_b) / dz * eye_s) / cap
    s_a = k_a * (4 * pick[0] - pick[1]) / (2 * dz * cap)
    s_b = k_b * (4 * pick[0] - pick[1]) / (2 * dz * cap)
  else:
    lateral = params.kappa_s + (k_a + k_b) * dz / 2
    s_s = (lateral * lap_h - (k_a + k_b) / dz * eye_s) / cap
    s_a = k_a * pick[0] / (dz * cap)
    s_b = k_b * pick[0] / (dz * cap)
  return sp.bmat([[k_a * lap_bulk, None, k_a * into_bulk],
                  [None, k_b * lap_bulk, k_b * into_bulk],
                  [s_a, s_b, s_s]], format='csr', dtype=float)


def check_cfl(grid: GridSpec, params: PhysParams, operator: sp.csr_matrix,
              dt: float) -> None:
  """Checks the stability of the explicit scheme: `dt <= min(h, dz)^2 / (6
  max kappa)` in the bulk, and the Gershgorin bound `dt sum_j |A_ij| <= 2` on
  the surface rows.

  Raises:
      ConfigurationError: if dt violates either condition.
  """
  kappa = max(params.kappa_a, params.kappa_b)
  limit = min(grid.h, grid.dz) ** 2 / (6 * kappa)
  if dt > limit:
    raise ConfigurationError(
        f'dt={dt} violates the explicit stability limit {limit:.3e}')
  surface = operator[-grid.n_h ** 2:]
  radius = float(np.max(np.abs(surface).sum(axis=1))) if surface.nnz else 0.0
  if dt * radius > 2:
    raise ConfigurationError(f'dt={dt} violates the surface stability limit '
                             f'{2 / radius:.3e}')


def _pack(f: TriField) -> np.ndarray:
  return np.concatenate([f.f_a.ravel(), f.f_b.ravel(), f.f_s.ravel()])


def _unpack(u: np.ndarray, grid: GridSpec) -> TriField:
  nb = grid.n_h ** 2 * grid.n_z
  return TriField(u[:nb].reshape(grid.bulk_shape),
                  u[nb:2 * nb].reshape(grid.bulk_shape),
                  u[2 * nb:].reshape(grid.surface_shape), grid)


def _march(theta0: TriField, params: PhysParams, t_end: Optional[float],
           scheme: FDScheme, stencil: InterfaceStencil,
           sample_dt: Optional[float], frozen_surface: bool) \
        -> Tuple[sp.csr_matrix, int, int, Iterator[np.ndarray]]:
  grid = theta0.grid
  dt = grid.dt
  times = grid.times(t_end)
  sample_dt = dt if sample_dt is None else sample_dt
  stride = int(round(sample_dt / dt))
  if stride < 1 or abs(stride * dt - sample_dt) > 1e-9 * sample_dt \
          or (times.size - 1) % stride != 0:
    raise ConfigurationError(
        f'sample_dt={sample_dt} must be a multiple of dt={dt} dividing t_end')
  op = assemble_operator(grid, params, stencil, frozen_surface=frozen_surface)
  eye = sp.identity(op.shape[0], format='csc')
  if scheme == FDScheme.EXPLICIT:
    check_cfl(grid, params, op, dt)

    def advance(u):
      return u + dt * (op @ u)
  elif scheme == FDScheme.IMPLICIT:
    lu = splu((eye - dt * op).tocsc())

    def advance(u):
      return lu.solve(u)
  else:
    lu = splu((eye - 0.5 * dt * op).tocsc())
    rhs = (eye + 0.5 * dt * op).tocsr()

    def advance(u):
      return lu.solve(rhs @ u)

  steps = times.size - 1

  def samples() -> Iterator[np.ndarray]:
    u = _pack(theta0)
    yield u
    for step in range(1, steps + 1):
      u = advance(u)
      if step % stride == 0:
        yield u
    logger.debug('oracle took %d %s steps on %dx%dx%d nodes', steps,
                 scheme.name.lower(), grid.n_h, grid.n_h, grid.n_z)

  return op, stride, steps, samples()


def oracle_solve(theta0: TriField, params: PhysParams,
                 t_end: Optional[float] = None, *,
                 scheme: FDScheme = FDScheme.IMPLICIT,
                 stencil: InterfaceStencil = InterfaceStencil.ONE_SIDED,
                 sample_dt: Optional[float] = None,
                 frozen_surface: bool = False) -> Trajectory:
  """Solves the system for temperatures with finite differences on the grid of
  theta0, whose time step is the step of the scheme.

  Args:
      theta0 (TriField): initial temperatures; the interface values are
      taken from the surface field.
      params (PhysParams): the coefficients of the system.
      t_end (float, optional): final time. Defaults to the grid's t_end.
      scheme (FDScheme, optional): the time stepping. Defaults to IMPLICIT.
      stencil (InterfaceStencil, optional): the surface discretization.
      Defaults to ONE_SIDED.
      sample_dt (float, optional): spacing of the stored states, a multiple of
      the step. Defaults to the step.
      frozen_surface (bool, optional): True holds theta_S at its initial
      value. Defaults to False.

  Raises:
      ConfigurationError: if the explicit scheme is unstable for the step, or
      the times aren't multiples of the step.

  Returns:
      Trajectory: physical states with derivatives `A U` and an OracleReport.
  """
  grid = theta0.grid
  op, stride, steps, samples = _march(theta0, params, t_end, scheme, stencil,
                                      sample_dt, frozen_surface)
  states, derivs = [], []
  for u in samples:
    states.append(_unpack(u, grid))
    derivs.append(_unpack(op @ u, grid))
  states[0] = theta0.with_weight(1.0)
  report = OracleReport(scheme, stencil, grid.dt, stride, steps,
                        frozen_surface)
  return Trajectory(stride * grid.dt * np.arange(len(states)), states, derivs,
                    Variables.PHYSICAL, report=report)


def oracle_states(theta0: TriField, params: PhysParams,
                  t_end: Optional[float] = None, *,
                  scheme: FDScheme = FDScheme.IMPLICIT,
                  stencil: InterfaceStencil = InterfaceStencil.ONE_SIDED,
                  sample_dt: Optional[float] = None,
                  frozen_surface: bool = False) -> Iterator[TriField]:
  """Runs `oracle_solve` lazily: yields the sampled states one at a time and
  keeps only the current one in memory.

  Raises:
      ConfigurationError: for the reasons of `oracle_solve`.
  """
  _, _, _, samples = _march(theta0, params, t_end, scheme, stencil,
                            sample_dt, frozen_surface)
  return (_unpack(u, theta0.grid) for u in samples)


def _heat(f: TriField, cap: float) -> float:
  grid = f.grid
  return grid.h ** 2 * (grid.dz * float(np.sum(f.f_a) + np.sum(f.f_b))
                        + cap * float(np.sum(f.f_s)))


def _far_flux(f: TriField, params: PhysParams) -> float:
  grid = f.grid
  return -grid.h ** 2 / grid.dz * (
      params.kappa_a * float(np.sum(f.f_a[..., -1]))
      + params.kappa_b * float(np.sum(f.f_b[..., -1])))


def _energy(f: TriField, cap: float) -> float:
  grid = f.grid
  return grid.h ** 2 * (grid.dz * float(np.sum(f.f_a ** 2)
                                        + np.sum(f.f_b ** 2))
                        + cap * float(np.sum(f.f_s ** 2)))


def heat_ledger(traj: Trajectory, params: PhysParams) -> Table:
  """Tabulates the total heat of an oracle trajectory against the heat lost
  through the far walls.

  The heat is `h^2 (dz sum theta_A + dz sum theta_B + c sum theta_S)` with the
  capacity c of the interface node. The far-wall flux enters every step the
  way the time stepping evaluates the operator, so for the CONSERVATIVE
  stencil the defect only holds rounding errors. The weighted energy column
  uses the same capacities.

  Raises:
      ConfigurationError: if the trajectory doesn't come from `oracle_solve`
      or doesn't store every step.
  """
  report = traj.report
  if not isinstance(report, OracleReport) or report.stride != 1:
    raise ConfigurationError(
        'the heat ledger needs an oracle trajectory storing every step')
  cap = capacity(traj.grid, params, report.stencil)
  heat = np.array([_heat(s, cap) for s in traj.states])
  flux = np.array([_far_flux(s, params) for s in traj.states])
  if report.scheme == FDScheme.EXPLICIT:
    loss = flux[:-1]
  elif report.scheme == FDScheme.IMPLICIT:
    loss = flux[1:]
  else:
    loss = 0.5 * (flux[1:] + flux[:-1])
  defect = np.concatenate([[0.0], np.diff(heat) - report.dt * loss])
  table = Table(('time', 'total_heat', 'far_wall_flux', 'heat_defect',
                 'weighted_energy'))
  table.extend(zip(traj.times, heat, flux, defect,
                   [_energy(s, cap) for s in traj.states]))
  scale = max(float(np.max(np.abs(heat))), 1e-300)
  table.meta['max_relative_defect'] = table.max('heat_defect') / scale
  return table


def _strides(fine: GridSpec, grid: GridSpec) -> Tuple[int, int]:
  if fine.l_h != grid.l_h or fine.l_z != grid.l_z or \
          fine.n_h % grid.n_h != 0 or (fine.n_z + 1) % (grid.n_z + 1) != 0:
    raise ConfigurationError('the grids aren\'t nested')
  return fine.n_h // grid.n_h, (fine.n_z + 1) // (grid.n_z + 1)


def restrict_field(f: TriField, grid: GridSpec) -> TriField:
  """Subsamples a field to a coarser grid whose nodes are nodes of the
  field's grid.

  Raises:
      ConfigurationError: if the grids aren't nested.
  """
  mh, mz = _strides(f.grid, grid)
  return TriField(f.f_a[::mh, ::mh, mz - 1::mz], f.f_b[::mh, ::mh, mz - 1::mz],
                  f.f_s[::mh, ::mh], grid, f.weight_s)


def restrict(traj: Trajectory, grid: GridSpec) -> Trajectory:
  """Subsamples a trajectory to a coarser grid whose nodes are nodes of the
  trajectory's grid; times are kept.

  Raises:
      ConfigurationError: if the grids aren't nested.
  """
  _strides(traj.grid, grid)
  derivs = None if traj.derivs is None \
      else [restrict_field(d, grid) for d in traj.derivs]
  return Trajectory(traj.times, [restrict_field(s, grid) for s in traj.states],
                    derivs, traj.variables, report=traj.report)


def _aligned(first: Trajectory, second: Trajectory) \
        -> Tuple[np.ndarray, list, list]:
  if len(first) == len(second) and \
          np.allclose(first.times, second.times, rtol=1e-9, atol=0):
    return first.times, list(first.states), list(second.states)
  coarse, fine = (first, second) if first.dt >= second.dt else (second, first)
  ratio = int(round(coarse.dt / fine.dt)) if fine.dt > 0 else 0
  if ratio < 1 or abs(ratio * fine.dt - coarse.dt) > 1e-9 * coarse.dt:
    raise ConfigurationError('time steps of the trajectories aren\'t nested')
  sampled = list(fine.states[::ratio])
  if len(sampled) != len(coarse):
    raise ConfigurationError('trajectories cover different time spans')
  if coarse is first:
    return coarse.times, list(coarse.states), sampled
  return coarse.times, sampled, list(coarse.states)


def _relative_l2(times: np.ndarray, diffs: Iterable[float],
                 sizes: Iterable[float]) -> float:
  num = den = 0.0
  prev = None
  for j, (d, s) in enumerate(zip(diffs, sizes)):
    if prev is not None:
      step = 0.5 * float(times[j] - times[j - 1])
      num += step * (d ** 2 + prev[0] ** 2)
      den += step * (s ** 2 + prev[1] ** 2)
    prev = d, s
  if prev is None:
    raise ConfigurationError('trajectories cover different time spans')
  if times.size < 2:
    num, den = prev[0] ** 2, prev[1] ** 2
  num, den = math.sqrt(num), math.sqrt(den)
  return num / den if den > 0 else num


def oracle_difference(reference: Trajectory, other: Trajectory) -> float:
  """Gets the relative L2((0,T) x domain) difference of two trajectories on
  the same spatial grid, sampled at the common times.

  Returns:
      float: `||other - reference|| / ||reference||`, or the absolute
      difference if the reference vanishes.

  Raises:
      ConfigurationError: if the spatial or time grids are incompatible.
  """
  if reference.grid.with_changes(dt=other.grid.dt,
                                 t_end=other.grid.t_end) != other.grid:
    raise ConfigurationError('trajectories live on different spatial grids')
  times, ref, oth = _aligned(reference, other)
  diffs = (h_norm(b.with_weight(1.0) - a.with_weight(1.0))
           for a, b in zip(ref, oth))
  return _relative_l2(np.asarray(times), diffs,
                      (h_norm(a.with_weight(1.0)) for a in ref))


def oracle_compare(reference: Trajectory, theta0: TriField,
                   params: PhysParams, *,
                   scheme: FDScheme = FDScheme.IMPLICIT,
                   stencil: InterfaceStencil = InterfaceStencil.ONE_SIDED) \
        -> float:
  """Gets `oracle_difference(reference, restrict(oracle_solve(...)))` without
  holding the oracle trajectory: each sampled state is restricted to the
  reference grid and folded into the time integrals as the oracle steps.

  Args:
      reference (Trajectory): the trajectory to compare with; its times set
      the final time and the sample spacing of the oracle.
      theta0 (TriField): initial temperatures on a refinement of the
      reference grid, whose time step is the oracle's step.
      params (PhysParams): the coefficients of the system.
      scheme (FDScheme, optional): the time stepping. Defaults to IMPLICIT.
      stencil (InterfaceStencil, optional): the surface discretization.
      Defaults to ONE_SIDED.

  Raises:
      ConfigurationError: if the grids aren't nested or the reference times
      aren't multiples of the oracle step.

  Returns:
      float: the relative L2((0,T) x domain) difference.
  """
  grid = reference.grid
  _strides(theta0.grid, grid)
  times = reference.times
  t_end = float(times[-1])
  sample_dt = reference.dt if times.size > 1 else None
  states = oracle_states(theta0, params, t_end, scheme=scheme,
                         stencil=stencil, sample_dt=sample_dt)

  def diffs():
    count = 0
    for ref, state in zip(reference.states, states):
      count += 1
      yield h_norm(restrict_field(state, grid).with_weight(1.0)
                   - ref.with_weight(1.0))
    if count != times.size:
      raise ConfigurationError('trajectories cover different time spans')

  sizes = (h_norm(ref.with_weight(1.0)) for ref in reference.states)
  return _relative_l2(times, diffs(), sizes)
