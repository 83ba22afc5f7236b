"""Checks of the solution properties on stored trajectories: the weighted
energy equality, continuity at the initial time, trace compatibility, Hölder
continuity of LV and uniqueness."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from triphase.coupling.lift import LiftedSpectrum, lift_to_u
from triphase.coupling.traces import EXTRAPOLATE, trace_minus, trace_plus
from triphase.errors import ConfigurationError, DomainError
from triphase.io.table import Table
from triphase.spectral.engine import SpectralTri, apply_l_power, \
    spectral_norm, to_spectral
from triphase.state.field import TriField, h_norm
from triphase.state.params import PhysParams
from triphase.state.trajectory import Trajectory, Variables, time_l2

logger = logging.getLogger(__name__)

ENERGY_COLUMNS = ('time', 'weighted_energy', 'dissipation_rate',
                  'cumulative_dissipation', 'energy_balance', 'energy_defect')


def _lifted(state: TriField, traj: Trajectory, params: PhysParams) \
        -> TriField:
  if traj.variables == Variables.LIFTED:
    return state
  return lift_to_u(state, params, trace_tol=math.inf)


def _spectrum(state: TriField, traj: Trajectory,
              params: PhysParams) -> LiftedSpectrum:
  if traj.variables == Variables.LIFTED:
    return LiftedSpectrum.from_lifted(to_spectral(state), params.beta)
  return LiftedSpectrum.expand(state, params, traces='surface')


def energy_ledger(traj: Trajectory, params: PhysParams) -> Table:
  """Tabulates the weighted energy equality along a trajectory.

  The weighted energy is `||theta_A||^2 + ||theta_B||^2 + alpha_S
  ||theta_S||^2` and the dissipation rate `2 kappa_A ||grad theta_A||^2 + 2
  kappa_B ||grad theta_B||^2 + 2 kappa_S ||grad_h theta_S||^2`, both evaluated
  in closed form on the lifted representation. Their balance, the energy plus
  the accumulated dissipation, is constant for exact solutions. The defect of
  every row is the drift of the balance since t = 0 relative to the initial
  energy; the metadata holds the largest drift over all pairs of times.

  Args:
      traj (Trajectory): lifted or physical states.
      params (PhysParams): the coefficients of the system.

  Returns:
      Table: one row per stored time.
  """
  spectra = [_spectrum(s, traj, params) for s in traj.states]
  energy = np.array([sp.energy(params.alpha_s) for sp in spectra])
  rate = np.array([sp.dissipation_rate(params) for sp in spectra])
  if len(traj) > 1:
    cumulative = cumulative_trapezoid(rate, traj.times, initial=0.0)
  else:
    cumulative = np.zeros(1)
  balance = energy + cumulative
  scale = energy[0]
  if scale > 0:
    defect = (balance - balance[0]) / scale
    max_defect = float((np.max(balance) - np.min(balance)) / scale)
  else:
    defect = np.zeros_like(balance)
    max_defect = 0.0
  table = Table(ENERGY_COLUMNS, meta={'max_defect': max_defect})
  table.extend(zip(traj.times, energy, rate, cumulative, balance, defect))
  return table


def weighted_energy_monotone(ledger: Table, rtol: float = 1e-12) -> bool:
  """Tells whether the weighted energy of a ledger is nonincreasing up to
  `rtol` times the initial energy."""
  energy = ledger.column('weighted_energy')
  if energy.size < 2:
    return True
  slack = rtol * max(energy[0], 0.0)
  monotone = bool(np.all(np.diff(energy) <= slack))
  if not monotone:
    logger.warning('weighted energy increases by up to %.3e',
                   float(np.max(np.diff(energy))))
  return monotone


def _component_norms(f: TriField) -> Tuple[float, float, float]:
  grid = f.grid
  bulk = grid.h ** 2 * grid.dz
  return (math.sqrt(bulk * float(np.sum(f.f_a ** 2))),
          math.sqrt(bulk * float(np.sum(f.f_b ** 2))),
          math.sqrt(grid.h ** 2 * float(np.sum(f.f_s ** 2))))


def dyadic_indices(count: int, size: int) -> List[int]:
  """Gets the indices 1, 2, 4, ... below size, at most `count` of them."""
  out, idx = [], 1
  while idx < size and len(out) < count:
    out.append(idx)
    idx *= 2
  return out


def initial_continuity(traj: Trajectory, theta0: TriField,
                       count: int = 4) -> Table:
  """Measures `||theta(t) - theta_0||` at the times dt, 2 dt, 4 dt, ...

  The metadata holds the exponent p of the least-squares fit `C t^p` of the
  total distances, or NaN if fewer than two distances are positive.
  """
  if theta0.grid != traj.grid:
    raise ConfigurationError('theta0 lives on a different grid')
  table = Table(('time', 'upper_distance', 'lower_distance',
                 'surface_distance', 'total_distance'))
  for j in dyadic_indices(count, len(traj)):
    a, b, s = _component_norms(traj.states[j] - theta0)
    table.append((traj.times[j], a, b, s, math.sqrt(a * a + b * b + s * s)))
  times = table.column('time')
  total = table.column('total_distance')
  positive = total > 0
  exponent = math.nan
  if np.count_nonzero(positive) >= 2:
    exponent = float(np.polyfit(np.log(times[positive]),
                                np.log(total[positive]), 1)[0])
  table.meta['exponent'] = exponent
  return table


def trace_gap(traj: Trajectory, params: PhysParams, *,
              method: str = EXTRAPOLATE) -> Table:
  """Tabulates `max |gamma_+[theta_A] - theta_S|` and `max |gamma_-[theta_B] -
  theta_S|` over time.

  The gap is the trace of the lifted bulk fields. With method 'series' it is
  the sine-series trace, which vanishes for every state the spectral solver
  produces; with 'extrapolate' it comes from the samples next to the interface.
  """
  table = Table(('time', 'upper_gap', 'lower_gap'))
  for t, state in zip(traj.times, traj.states):
    u = _lifted(state, traj, params)
    table.append((t, float(np.max(np.abs(trace_plus(u.f_a, u.grid,
                                                    method=method)))),
                  float(np.max(np.abs(trace_minus(u.f_b, u.grid,
                                                  method=method))))))
  table.meta['max_gap'] = max(table.max('upper_gap'), table.max('lower_gap'))
  return table


def holder_probe(traj: Trajectory, params: PhysParams, q: float,
                 window: Optional[Tuple[float, float]] = None) -> Table:
  """Samples `||LV(t2) - LV(t1)||_H / (t2 - t1)^q` over pairs of stored times
  in the window at the separations dt, 2 dt, 4 dt, ...

  Args:
      traj (Trajectory): lifted or physical states.
      params (PhysParams): the coefficients defining L.
      q (float): the Hölder exponent, in (0, 1].
      window (Tuple[float, float], optional): the interval [eps, T0] of the
      sampled times. Defaults to the whole trajectory without t = 0.

  Raises:
      DomainError: if q or the window is invalid.

  Returns:
      Table: the largest ratio per separation.
  """
  if not 0 < q <= 1:
    raise DomainError(f'q must be in (0, 1], but was {q}')
  dt = traj.dt
  if window is None:
    window = (dt, float(traj.times[-1]))
  eps, t0 = window
  if not 0 < eps < t0:
    raise DomainError(f'window must satisfy 0 < eps < T0, but was {window}')
  idx = np.flatnonzero((traj.times >= eps - 1e-12 * t0)
                       & (traj.times <= t0 + 1e-12 * t0))
  lv = {int(j): apply_l_power(to_spectral(_lifted(traj.states[j], traj,
                                                  params)), 1.0, params)
        for j in idx}
  table = Table(('separation', 'max_ratio'))
  for sep in dyadic_indices(len(traj), idx.size):
    ratio = 0.0
    for j in idx:
      if j + sep in lv:
        diff: SpectralTri = lv[j + sep] - lv[int(j)]
        ratio = max(ratio, spectral_norm(diff) / (sep * dt) ** q)
    table.append((sep * dt, ratio))
  table.meta['max_ratio'] = table.max('max_ratio') if len(table) else 0.0
  return table


def uniqueness_gap(first: Trajectory, second: Trajectory,
                   params: Optional[PhysParams] = None) -> float:
  """Gets the distance of two trajectories on the same time grid.

  Without params it is `max_t ||first(t) - second(t)||_H`; with params it is
  the X_T norm of the difference, which needs stored derivatives.

  Raises:
      ConfigurationError: if the time grids differ.
  """
  if len(first) != len(second) or \
          not np.allclose(first.times, second.times, rtol=0, atol=1e-12):
    raise ConfigurationError('trajectories live on different time grids')
  sup = max(h_norm(a - b) for a, b in zip(first.states, second.states))
  if params is None:
    return sup
  d = [h_norm(a - b) for a, b in zip(first.require_derivs(),
                                     second.require_derivs())]
  lv = [spectral_norm(apply_l_power(to_spectral(a - b), 1.0, params))
        for a, b in zip(first.states, second.states)]
  return sup + time_l2(d, first.times) + time_l2(lv, first.times)
