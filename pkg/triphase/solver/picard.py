"""Picard iteration for the lifted system on a time window and the windowed
global extension.

Each Picard step is a linear problem: the forcing F is assembled from the
previous iterate, including its stored surface derivative, and the next
iterate is its Duhamel solution from the same initial data. The iteration on
one window stops once the X_T norm of the increment falls below the tolerance.
Global solutions chain windows, restarting every window from the terminal state
of the previous one.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from triphase.coupling.constants import ConstantsReport
from triphase.coupling.interface import CouplingScheme, forcing_arrays
from triphase.coupling.lift import DEFAULT_TRACE_TOL, lift_to_u, \
    lower_to_theta
from triphase.coupling.traces import trace_minus, trace_plus
from triphase.diagnostics.checks import energy_ledger
from triphase.errors import ConfigurationError, DataError, \
    NonConvergenceError
from triphase.io.table import Table
from triphase.solver.duhamel import SpectralPath, frozen_path, integrate
from triphase.spectral.engine import SpectralTri, apply_l_power, \
    bulk_weight, from_spectral, spectral_norm, surface_weight, to_spectral
from triphase.state.field import TriField
from triphase.state.params import PhysParams
from triphase.state.trajectory import Trajectory, Variables

logger = logging.getLogger(__name__)

DIVERGENCE_RUN = 3

REPORT_COLUMNS = ('window', 'iteration', 'increment', 'ratio', 'xt_norm',
                  'apriori_bound', 'apriori_slack', 'maxreg_slack')


class PicardStart(Enum):
  """The first Picard iterate: the homogeneous solution from v0, or v0 held
  constant in time."""
  HOMOGENEOUS = 1
  FROZEN = 2


@dataclass(frozen=True)
class SolverConfig:
  """Settings of the Picard iteration and the window chaining.

  With `adapt_window`, a window whose contraction ratio exceeds
  `contraction_target` is halved and solved again; `cap_window` additionally
  caps the window length with the measured C_star before the first window.
  """
  window_t: float = 0.05
  max_picard_iters: int = 60
  picard_tol: float = 1e-10
  contraction_target: float = 0.5
  adapt_window: bool = True
  scheme: CouplingScheme = CouplingScheme.CONSERVATIVE
  trace_tol: float = DEFAULT_TRACE_TOL
  start: PicardStart = PicardStart.HOMOGENEOUS
  cap_window: bool = False

  def __post_init__(self):
    if not 0 < self.window_t <= 1:
      raise ConfigurationError(
          f'window_t must be in (0, 1], but was {self.window_t}')
    if self.max_picard_iters < 1:
      raise ConfigurationError('max_picard_iters must be at least 1, but was '
                               f'{self.max_picard_iters}')
    if not self.picard_tol > 0:
      raise ConfigurationError(
          f'picard_tol must be positive, but was {self.picard_tol}')
    if not 0 < self.contraction_target < 1:
      raise ConfigurationError('contraction_target must be in (0, 1), but was '
                               f'{self.contraction_target}')
    if not self.trace_tol > 0:
      raise ConfigurationError(
          f'trace_tol must be positive, but was {self.trace_tol}')

  def with_changes(self, **changes) -> 'SolverConfig':
    return replace(self, **changes)


@dataclass(frozen=True)
class PicardRecord:
  """Diagnostics of one Picard iteration; `ratio` is NaN while no earlier
  increment above the tolerance exists."""
  window: int
  m: int
  increment: float
  ratio: float
  xt_norm: float
  apriori_bound: float
  apriori_slack: float
  maxreg_slack: float


@dataclass(frozen=True)
class WindowRecord:
  index: int
  start: float
  end: float
  iterations: int
  converged: bool


@dataclass
class SolverReport:
  """Collects the Picard diagnostics of all windows of a run."""
  records: List[PicardRecord] = field(default_factory=list)
  windows: List[WindowRecord] = field(default_factory=list)
  constants: Optional[ConstantsReport] = None

  @property
  def converged(self) -> bool:
    return all(w.converged for w in self.windows)

  def ratios(self, window: Optional[int] = None) -> np.ndarray:
    ratios = [r.ratio for r in self.records
              if window is None or r.window == window]
    ratios = np.asarray(ratios, dtype=float)
    return ratios[np.isfinite(ratios)]

  def max_ratio(self, window: Optional[int] = None) -> float:
    ratios = self.ratios(window)
    return float(np.max(ratios)) if ratios.size else 0.0

  def geometric_excess(self, rate: float) -> float:
    """Gets how far the increments miss geometric decay with `rate`: the
    largest `ratio - rate` over the iterations following the first ratio at
    most `rate` of each window, or 0 if no window contracts that fast."""
    excess = 0.0
    for index in sorted({r.window for r in self.records}):
      ratios = self.ratios(index)
      below = np.flatnonzero(ratios <= rate)
      if below.size and below[0] + 1 < ratios.size:
        excess = max(excess, float(np.max(ratios[below[0] + 1:])) - rate)
    return excess

  def slack_deficit(self, name: str) -> float:
    """Gets the largest negated `apriori_slack` or `maxreg_slack`, NaN if no
    record measured it.

    Raises:
        KeyError: if the slack isn't known.
    """
    if name not in ('apriori_slack', 'maxreg_slack'):
      raise KeyError(f'no slack "{name}" in the Picard records')
    slacks = np.array([getattr(r, name) for r in self.records], dtype=float)
    slacks = slacks[np.isfinite(slacks)]
    return float(np.max(-slacks)) if slacks.size else math.nan

  def to_table(self) -> Table:
    """Gets one row per Picard iteration."""
    table = Table(REPORT_COLUMNS, meta={'converged': self.converged})
    for r in self.records:
      table.append((r.window, r.m, r.increment, r.ratio, r.xt_norm,
                    r.apriori_bound, r.apriori_slack, r.maxreg_slack))
    return table


def _time_l2(arr: np.ndarray, weight: float, times: np.ndarray) -> float:
  axes = tuple(range(1, arr.ndim))
  sq = weight * np.sum(np.abs(arr) ** 2, axis=axes)
  if times.size < 2:
    return 0.0
  return math.sqrt(max(float(trapezoid(sq, times)), 0.0))


def _check_lifted(v0: TriField, tol: float) -> None:
  grid = v0.grid
  scale = v0.max_abs()
  if scale == 0:
    return
  gap = max(float(np.max(np.abs(trace_plus(v0.f_a, grid)))),
            float(np.max(np.abs(trace_minus(v0.f_b, grid)))))
  if gap / scale > tol:
    raise DataError(f'v0 isn\'t lifted: its bulk traces reach {gap / scale:.3e}'
                    f' (relative), which exceeds the tolerance {tol:.1e}',
                    gap=gap / scale)


def _warn_thresholds(constants: Optional[ConstantsReport],
                     params: PhysParams) -> None:
  if constants is None:
    return
  if params.alpha_s <= constants.alpha_0:
    logger.warning('alpha_S=%g doesn\'t exceed alpha_0=%g, the contraction '
                   'may fail', params.alpha_s, constants.alpha_0)
  if params.beta <= constants.beta_0:
    logger.warning('beta=%g doesn\'t exceed beta_0=%g, the contraction may '
                   'fail', params.beta, constants.beta_0)


def _window_times(length: float, dt: float) -> np.ndarray:
  steps = length / dt
  n = int(round(steps))
  if n < 1 or abs(steps - n) > 1e-9 * max(1.0, steps):
    raise ConfigurationError(
        f'window length {length} isn\'t a positive multiple of dt={dt}')
  return dt * np.arange(n + 1)


def _iterate(c0: SpectralTri, times: np.ndarray, config: SolverConfig,
             params: PhysParams, constants: Optional[ConstantsReport],
             window: int, report: SolverReport) -> Tuple[SpectralPath, bool]:
  grid = c0.grid
  v0_norm = spectral_norm(c0)
  half_norm = spectral_norm(apply_l_power(c0, 0.5, params))
  bound = 2 * v0_norm + 4 * half_norm
  zero_s = np.zeros((times.size,) + grid.surface_shape, dtype=complex)
  zero_b = np.zeros((times.size,) + grid.bulk_shape, dtype=complex)
  if config.start == PicardStart.HOMOGENEOUS:
    path = integrate(c0, zero_b, zero_b, zero_s, times, params)
  else:
    path = frozen_path(c0, times)
  previous = math.nan
  diverging = 0
  for m in range(1, config.max_picard_iters + 1):
    f_a, f_b, f_s = forcing_arrays(path.a, path.b, path.s, path.ds, grid,
                                   params, config.scheme)
    nxt = integrate(c0, f_a, f_b, f_s, times, params)
    increment = (nxt - path).xt_norm(params)
    ratio = increment / previous if previous > config.picard_tol \
        else math.nan
    sup, d_norm, l_norm = nxt.xt_parts(params)
    if constants is not None:
      bw, sw = bulk_weight(grid), surface_weight(grid)
      maxreg = 2 * half_norm + constants.k_a * _time_l2(f_a, bw, times) \
          + constants.k_b * _time_l2(f_b, bw, times) \
          + constants.k_s * _time_l2(f_s, sw, times) - (d_norm + l_norm)
    else:
      maxreg = math.nan
    xt = sup + d_norm + l_norm
    report.records.append(PicardRecord(window, m, increment, ratio, xt, bound,
                                       bound - xt, maxreg))
    logger.debug('window %d iteration %d: increment %.3e, ratio %.3f', window,
                 m, increment, ratio)
    if bound - xt < 0 or maxreg < 0:
      logger.warning('window %d iteration %d: negative slack, a priori %.3e, '
                     'maximal regularity %.3e', window, m, bound - xt, maxreg)
    path = nxt
    if increment < config.picard_tol:
      return path, True
    diverging = diverging + 1 if ratio > 1 else 0
    if diverging >= DIVERGENCE_RUN:
      raise NonConvergenceError(
          f'increments grew in {DIVERGENCE_RUN} consecutive iterations, last '
          f'ratio {ratio:.3f}', report=report, window=window)
    previous = increment
  return path, False


def picard_iterate(v0: TriField, config: SolverConfig, params: PhysParams, *,
                   constants: Optional[ConstantsReport] = None) \
        -> Tuple[Trajectory, SolverReport]:
  """Solves the lifted system on one window `[0, config.window_t]`.

  Args:
      v0 (TriField): lifted initial data with zero interface traces.
      config (SolverConfig): the iteration settings.
      params (PhysParams): the coefficients of the system.
      constants (ConstantsReport, optional): measured constants, which enable
      the threshold warnings and the maximal-regularity slack. Defaults to
      None.

  Raises:
      DataError: if v0 has bulk traces above `config.trace_tol`.
      ConfigurationError: if the window isn't a multiple of dt.
      NonConvergenceError: if the increments grow in three consecutive
      iterations.

  Returns:
      Tuple[Trajectory, SolverReport]: the last iterate in u-variables and the
      per-iteration diagnostics. The report isn't converged if the iteration
      stopped at `max_picard_iters`.
  """
  _check_lifted(v0, config.trace_tol)
  _warn_thresholds(constants, params)
  times = _window_times(config.window_t, v0.grid.dt)
  report = SolverReport(constants=constants)
  path, converged = _iterate(to_spectral(v0), times, config, params,
                             constants, 0, report)
  report.windows.append(WindowRecord(0, 0.0, float(times[-1]),
                                     len(report.records), converged))
  return path.to_trajectory().with_report(report), report


def adapt_window(config: SolverConfig, report: Optional[SolverReport] = None,
                 constants: Optional[ConstantsReport] = None,
                 dt: Optional[float] = None,
                 window: Optional[int] = None) -> SolverConfig:
  """Shrinks the window length.

  The length is capped at `(1/(4 C_star))^2` when constants are given, and
  halved when a ratio in the report exceeds the contraction target. With dt, it
  is rounded down to a multiple of dt.

  Raises:
      ConfigurationError: if the length drops below dt.
  """
  length = config.window_t
  if constants is not None and constants.c_star_big > 0:
    length = min(length, (1 / (4 * constants.c_star_big)) ** 2, 1.0)
  if report is not None and \
          report.max_ratio(window) > config.contraction_target:
    logger.warning('contraction ratio %.3f exceeds %.3f, halving the window '
                   'to %g', report.max_ratio(window),
                   config.contraction_target, length / 2)
    length /= 2
  if dt is not None:
    length = math.floor(length / dt * (1 + 1e-12)) * dt
    if length < dt:
      raise ConfigurationError(
          f'window length underflows the time step dt={dt}')
  return config.with_changes(window_t=length)


def _lower_path(path: SpectralPath, params: PhysParams) \
        -> Tuple[List[TriField], List[TriField]]:
  states, derivs = [], []
  for j in range(len(path)):
    states.append(lower_to_theta(from_spectral(path.state(j)), params))
    derivs.append(lower_to_theta(from_spectral(path.deriv(j)), params))
  return states, derivs


def solve_global(theta0: TriField, t_end: Optional[float] = None,
                 config: SolverConfig = SolverConfig(),
                 params: PhysParams = PhysParams(), *,
                 constants: Optional[ConstantsReport] = None) -> Trajectory:
  """Solves the system for temperatures on `[0, t_end]` by chaining windows.

  Args:
      theta0 (TriField): trace-compatible initial temperatures.
      t_end (float, optional): final time, a multiple of dt. Defaults to the
      grid's t_end.
      config (SolverConfig, optional): the iteration settings. Defaults to
      SolverConfig().
      params (PhysParams, optional): the coefficients of the system. Defaults
      to PhysParams().
      constants (ConstantsReport, optional): measured constants, which cap the
      window length. Defaults to None.

  Raises:
      DataError: if the traces of theta0 are incompatible.
      NonConvergenceError: if a window fails to converge; the error carries
      the window index and the report.

  Returns:
      Trajectory: temperatures with stored derivatives, the solver report and
      the energy ledger.
  """
  grid = theta0.grid
  t_end = grid.t_end if t_end is None else t_end
  v0 = lift_to_u(theta0, params, trace_tol=config.trace_tol)
  _warn_thresholds(constants, params)
  if config.adapt_window:
    config = adapt_window(
        config, constants=constants if config.cap_window else None,
        dt=grid.dt)
  report = SolverReport(constants=constants)
  c0 = to_spectral(v0)
  states, derivs = [], []
  start, index = 0.0, 0
  while start < t_end - 0.5 * grid.dt:
    length = min(config.window_t, t_end - start)
    logger.info('window %d: [%g, %g]', index, start, start + length)
    times = _window_times(length, grid.dt)
    first = len(report.records)
    try:
      path, converged = _iterate(c0, times, config, params, constants, index,
                                 report)
    except NonConvergenceError:
      if not config.adapt_window:
        raise
      path, converged = None, False
    if config.adapt_window and \
            report.max_ratio(index) > config.contraction_target:
      shrunk = adapt_window(config, report, dt=grid.dt, window=index)
      if shrunk.window_t < config.window_t:
        del report.records[first:]
        config = shrunk
        continue
    if not converged:
      report.windows.append(WindowRecord(index, start, start + length,
                                         len(report.records) - first, False))
      raise NonConvergenceError(
          f'no convergence within {config.max_picard_iters} iterations',
          report=report, window=index)
    report.windows.append(WindowRecord(index, start, start + length,
                                       len(report.records) - first, True))
    s, d = _lower_path(path, params)
    skip = 1 if states else 0
    states.extend(s[skip:])
    derivs.extend(d[skip:])
    c0 = path.state(len(path) - 1)
    start += float(times[-1])
    index += 1
  if not states:
    states, derivs = [theta0], [theta0 * 0.0]
  traj = Trajectory(grid.dt * np.arange(len(states)), states, derivs,
                    Variables.PHYSICAL, report=report)
  return traj.with_ledger(energy_ledger(traj, params))


def deriv_residual(traj: Trajectory, params: PhysParams,
                   scheme: CouplingScheme = CouplingScheme.CONSERVATIVE) \
        -> float:
  """Gets `max_j ||dv/dt + Lv - F(v)||_H` over the stored times.

  F is assembled from each stored state and its own stored derivative.
  Temperatures are lifted first.

  Raises:
      StateError: if the trajectory has no stored derivatives.
  """
  derivs = traj.require_derivs()
  residual = 0.0
  for state, deriv in zip(traj.states, derivs):
    if traj.variables == Variables.PHYSICAL:
      state = lift_to_u(state, params, trace_tol=math.inf)
      deriv = lift_to_u(deriv, params, trace_tol=math.inf)
    c, d = to_spectral(state), to_spectral(deriv)
    f_a, f_b, f_s = forcing_arrays(c.c_a, c.c_b, c.c_s, d.c_s, c.grid,
                                   params, scheme)
    lv = apply_l_power(c, 1.0, params)
    res = d + lv - SpectralTri(f_a, f_b, f_s, c.grid, c.weight_s)
    residual = max(residual, spectral_norm(res))
  return residual

