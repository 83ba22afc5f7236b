"""Batch entry point of the simulator and its verification harness.

    triphase <simulate|verify|constants|convergence> --config PATH [--out DIR]

Every command writes its tables as CSV files and a `manifest.json` into the
output directory. The artifact names carry the first 12 hex digits of the
SHA-256 hash of the configuration echo.
"""

import argparse
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from importlib import metadata
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy

from triphase import __version__
from triphase.coupling.constants import ConstantsReport, estimate_constants
from triphase.coupling.lift import lift_to_u, lower_to_theta, \
    weighted_surface_norm
from triphase.coupling.traces import SERIES
from triphase.diagnostics.checks import holder_probe, initial_continuity, \
    trace_gap, uniqueness_gap, weighted_energy_monotone
from triphase.diagnostics.variational import gateaux_check, \
    heat_balance_residual, transport_check
from triphase.errors import ConfigurationError, TriphaseError
from triphase.io.archive import write_trajectory
from triphase.io.config import RunConfig, parse_config
from triphase.io.csv import write_table
from triphase.io.table import Table
from triphase.oracle.fd import FDScheme, oracle_compare, oracle_grid
from triphase.scenario import Scenario, build_initial_data
from triphase.settings import worker_count
from triphase.solver.picard import PicardStart, adapt_window, \
    deriv_residual, picard_iterate, solve_global
from triphase.spectral.bounds import approximation_supremum, \
    smoothing_supremum
from triphase.spectral.engine import apply_semigroup, commutation_defect, \
    from_spectral, semigroup_energy_defect, spectral_norm, to_spectral
from triphase.spectral.kernel import propagate_surface
from triphase.state.field import TriField, h_norm
from triphase.state.params import GridSpec
from triphase.state.trajectory import Trajectory

logger = logging.getLogger(__name__)

COMMANDS = ('simulate', 'verify', 'constants', 'convergence')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

ENERGY_DEFECT_TOL = 1e-6
GEOMETRIC_SLACK = 0.05

COLUMN_MEANINGS: Dict[str, str] = {
    'time': 'sample time',
    'weighted_energy': '||theta_A||^2 + ||theta_B||^2 + alpha_S ||theta_S||^2',
    'dissipation_rate': '2 kappa_A ||grad theta_A||^2 + 2 kappa_B ||grad '
                        'theta_B||^2 + 2 kappa_S ||grad_h theta_S||^2',
    'cumulative_dissipation': 'time integral of the dissipation rate from 0',
    'energy_balance': 'weighted energy plus cumulative dissipation',
    'energy_defect': 'drift of the energy balance since t = 0 relative to the '
                     'initial energy',
    'upper_gap': 'max |trace of the lifted upper field - theta_S|',
    'lower_gap': 'max |trace of the lifted lower field - theta_S|',
    'upper_distance': '||theta_A(t) - theta_A(0)||',
    'lower_distance': '||theta_B(t) - theta_B(0)||',
    'surface_distance': '||theta_S(t) - theta_S(0)||',
    'total_distance': '||theta(t) - theta(0)||_H',
    'separation': 'time separation of the compared states',
    'max_ratio': 'max ||LV(t2) - LV(t1)||_H / (t2 - t1)^q',
    'window': 'index of the time window',
    'iteration': 'Picard iteration within the window',
    'increment': 'X_T norm of the difference of consecutive iterates',
    'ratio': 'increment over the previous increment',
    'xt_norm': 'X_T norm of the iterate',
    'apriori_bound': '2 ||v_0||_H + 4 ||L^(1/2) v_0||_H',
    'apriori_slack': 'a priori bound minus the X_T norm of the iterate',
    'maxreg_slack': 'maximal-regularity bound minus ||V\'|| + ||LV||',
    'check': 'name of the verified property',
    'value': 'measured value of the property',
    'threshold': 'bound the value has to respect',
    'passed': '1 if the value respects the bound, else 0',
    'level': 'refinement level of the oracle',
    'oracle_mult': 'refinement factor of the oracle grid in every axis',
    'oracle_h': 'horizontal spacing of the oracle grid',
    'oracle_dt': 'time step of the oracle',
    'relative_difference': 'relative L2((0,T) x domain) difference of the '
                           'spectral solution and the restricted oracle',
    'observed_order': 'log2 of the ratio of consecutive differences',
}


def _versions() -> Dict[str, str]:
  try:
    own = metadata.version('triphase')
  except metadata.PackageNotFoundError:
    own = __version__
  return {'triphase': own, 'numpy': np.__version__, 'scipy': scipy.__version__}


class Artifacts:
  """Collects the files a command writes into its output directory."""

  def __init__(self, out: Path, config: RunConfig) -> None:
    self.out = out
    self.config = config
    self.tag = config.digest[:12]
    self.files: List[str] = []
    self.columns: Dict[str, str] = {}
    out.mkdir(parents=True, exist_ok=True)

  def path(self, stem: str, suffix: str) -> Path:
    name = f'{stem}-{self.tag}.{suffix}'
    self.files.append(name)
    return self.out / name

  def table(self, stem: str, table: Table) -> None:
    write_table(table, self.path(stem, 'csv'))
    for col in table.columns:
      self.columns[col] = COLUMN_MEANINGS.get(col, col)
    logger.info('wrote %s with %d rows', self.files[-1], len(table))

  def manifest(self, command: str,
               constants: Optional[ConstantsReport] = None,
               extra: Optional[dict] = None) -> Path:
    """Writes `manifest.json`, which names the config hash of every
    artifact."""
    data = {
        'command': command,
        'config': self.config.to_text(),
        'config_source': self.config.source,
        'config_sha256': self.config.digest,
        'seed': self.config.scenario.seed,
        'versions': _versions(),
        'constants': None if constants is None else asdict(constants),
        'columns': dict(sorted(self.columns.items())),
        'artifacts': list(self.files),
    }
    if extra:
      data.update(extra)
    path = self.out / 'manifest.json'
    with open(path, 'w', encoding='utf-8') as f:
      json.dump(data, f, indent=2, sort_keys=True)
      f.write('\n')
    logger.info('wrote %s', path)
    return path


def _estimate(config: RunConfig) -> ConstantsReport:
  return estimate_constants(config.grid, config.phys,
                            config.output.constants_trials,
                            seed=config.scenario.seed,
                            steps=config.output.probe_steps)


def simulate(config: RunConfig, out: Path) -> int:
  """Solves the configured scenario and writes its diagnostics."""
  artifacts = Artifacts(out, config)
  phys = config.phys
  constants = _estimate(config)
  theta0 = build_initial_data(config.scenario, config.grid, phys)
  traj = solve_global(theta0, config=config.solver, params=phys,
                      constants=constants)
  artifacts.table('energy_ledger', traj.energy_ledger)
  artifacts.table('trace_gap', trace_gap(traj, phys, method=SERIES))
  artifacts.table('initial_continuity', initial_continuity(traj, theta0))
  if len(traj) > 1:
    artifacts.table('holder_probe',
                    holder_probe(traj, phys, config.output.holder_q))
  artifacts.table('picard_report', traj.report.to_table())
  if config.output.archive:
    path = artifacts.path('trajectory', 'lz4')
    write_trajectory(traj, path)
    logger.info('wrote %s', path.name)
  artifacts.manifest('simulate', constants, {
      'max_energy_defect': traj.energy_ledger.meta['max_defect'],
      'energy_monotone': weighted_energy_monotone(traj.energy_ledger,
                                                  rtol=1e-9),
  })
  return EXIT_OK


def constants(config: RunConfig, out: Path) -> int:
  """Estimates the constants and writes their report."""
  artifacts = Artifacts(out, config)
  report = _estimate(config)
  with open(artifacts.path('constants', 'txt'), 'w', encoding='utf-8') as f:
    f.write(report.to_text())
  artifacts.manifest('constants', report, {
      'thresholds_met': report.thresholds_met(config.phys)})
  return EXIT_OK


@dataclass(frozen=True)
class Check:
  """A verified property: `measure` returns a value which must not exceed
  `threshold`, or must reach it with `at_least`."""
  name: str
  measure: Callable[[], float]
  threshold: float
  at_least: bool = False

  def run(self) -> tuple:
    value = float(self.measure())
    if self.at_least:
      passed = value >= self.threshold
    else:
      passed = value <= self.threshold
    if not passed:
      logger.warning('check %s failed: %.3e vs %.3e', self.name, value,
                     self.threshold)
    return self.name, value, self.threshold, 1.0 if passed else 0.0


def random_field(grid: GridSpec, rng: np.random.Generator) -> TriField:
  return TriField(rng.standard_normal(grid.bulk_shape),
                  rng.standard_normal(grid.bulk_shape),
                  rng.standard_normal(grid.surface_shape), grid)


def _relative_max(first, second) -> float:
  diff = max(float(np.max(np.abs(a - b))) for a, b in
             ((first.c_a, second.c_a), (first.c_b, second.c_b),
              (first.c_s, second.c_s)))
  scale = max(float(np.max(np.abs(a))) for a in
              (first.c_a, first.c_b, first.c_s))
  return diff / scale if scale > 0 else diff


def _spectral_checks(config: RunConfig) -> List[Check]:
  grid, phys = config.grid, config.phys
  rng = np.random.default_rng(config.scenario.seed)
  c = to_spectral(random_field(grid, rng))
  states = [to_spectral(random_field(grid, rng)) for _ in range(100)]
  t, s = 0.03, 0.07

  def contraction():
    return max(spectral_norm(apply_semigroup(d, 0.1, phys))
               / spectral_norm(d) - 1.0 for d in states)

  def smoothing():
    return max(abs(m - closed) / closed for m, closed in
               (smoothing_supremum(q, 0.1) for q in (0.25, 0.5, 1.0)))

  def surface_norm():
    f_s = rng.standard_normal(grid.surface_shape)
    size = grid.h * float(np.sqrt(np.sum(np.square(f_s))))
    defect = 0.0
    for beta in (0.5, 1.0, 2.0, 4.0):
      params = replace(phys, beta=beta)
      closed = math.sqrt(-math.expm1(-2 * beta * grid.l_z) / (2 * beta))
      measured = weighted_surface_norm(f_s, params, '+', grid) / size
      defect = max(defect, abs(measured - closed) / closed)
    return defect

  def surface_kernel():
    width = grid.l_h / 10
    t_k = width ** 2 / (2 * phys.kappa_s_tilde)
    x1, x2 = grid.x[:, None], grid.x[None, :]
    f_s = np.exp(-(x1 ** 2 + x2 ** 2) / (2 * width ** 2))
    field = TriField(np.zeros(grid.bulk_shape), np.zeros(grid.bulk_shape),
                     f_s, grid)
    spectral = from_spectral(apply_semigroup(to_spectral(field), t_k,
                                             phys)).f_s
    kernel = propagate_surface(f_s, grid, t_k, phys)
    return float(np.max(np.abs(kernel - spectral)) / np.max(spectral))

  times = np.linspace(0.0, 0.5, 11)
  return [
      Check('semigroup_identity',
            lambda: _relative_max(apply_semigroup(c, 0.0, phys), c), 0.0),
      Check('semigroup_composition',
            lambda: _relative_max(
                apply_semigroup(apply_semigroup(c, s, phys), t, phys),
                apply_semigroup(c, t + s, phys)), 1e-12),
      Check('semigroup_contraction', contraction, 1e-12),
      Check('commutation_defect', lambda: commutation_defect(c, 0.1, phys),
            1e-12),
      Check('semigroup_energy_defect',
            lambda: semigroup_energy_defect(c, times, phys, exact=True),
            1e-10),
      Check('smoothing_supremum_defect', smoothing, 1e-6),
      Check('approximation_supremum',
            lambda: max(approximation_supremum(q, 0.1)
                        for q in (0.25, 0.5, 1.0)), 1.0),
      Check('weighted_surface_norm_defect', surface_norm, 1e-8),
      Check('surface_kernel_defect', surface_kernel, 1e-3),
  ]


def _solution_checks(config: RunConfig, theta0: TriField,
                     traj: Trajectory) -> List[Check]:
  phys, solver = config.phys, config.solver
  report = traj.report
  ledger = traj.energy_ledger
  deriv_scale = max(max(h_norm(d) for d in traj.derivs), 1e-300)

  def round_trip():
    back = lower_to_theta(lift_to_u(theta0, phys,
                                    trace_tol=solver.trace_tol), phys)
    return (back - theta0).max_abs() / max(theta0.max_abs(), 1e-300)

  def uniqueness(alternative: bool):
    grid = theta0.grid
    window = adapt_window(solver.with_changes(
        window_t=min(solver.window_t, grid.t_end)), dt=grid.dt)
    v0 = lift_to_u(theta0, phys, trace_tol=solver.trace_tol)
    first, _ = picard_iterate(v0, window, phys)
    if not alternative:
      second, _ = picard_iterate(v0, window, phys)
      return uniqueness_gap(first, second)
    other = PicardStart.FROZEN if window.start == PicardStart.HOMOGENEOUS \
        else PicardStart.HOMOGENEOUS
    second, _ = picard_iterate(v0, window.with_changes(start=other), phys)
    return uniqueness_gap(first, second, phys)

  def phi_field(constrained: bool) -> TriField:
    variation = Scenario(name='variation', amplitude=0.7,
                         bulk_amplitude=-0.3, width=2.0, depth=3.0)
    phi = build_initial_data(variation, theta0.grid, phys)
    if constrained:
      return phi
    return TriField(phi.f_a, 0.5 * phi.f_b, 1.5 * phi.f_s, phi.grid)

  def continuity():
    table = initial_continuity(traj, theta0)
    if table.max('total_distance') == 0:
      return math.inf
    return table.meta['exponent']

  def transport():
    table = transport_check(traj)
    rates = max(float(np.max(np.abs(traj.derivs[0].f_a))), 1e-300)
    return table.meta['max_defect'] / (rates * theta0.grid.l_h ** 2
                                       * theta0.grid.l_z)

  def iterations():
    return max(w.iterations for w in report.windows)

  checks = [
      Check('lift_round_trip', round_trip, 1e-12),
      Check('picard_max_ratio', lambda: np.nan_to_num(report.max_ratio()),
            solver.contraction_target + GEOMETRIC_SLACK),
      Check('picard_iterations', iterations, 40),
      Check('picard_geometric_excess',
            lambda: report.geometric_excess(solver.contraction_target),
            GEOMETRIC_SLACK),
      Check('apriori_bound_excess',
            lambda: report.slack_deficit('apriori_slack'), 1e-8),
      Check('maxreg_slack_deficit',
            lambda: report.slack_deficit('maxreg_slack'), 1e-8),
      Check('energy_defect', lambda: ledger.meta['max_defect'],
            ENERGY_DEFECT_TOL),
      Check('energy_increase',
            lambda: 0.0 if weighted_energy_monotone(ledger, rtol=1e-9)
            else 1.0, 0.0),
      Check('trace_gap', lambda: trace_gap(traj, phys,
                                           method=SERIES).meta['max_gap'],
            1e-10),
      Check('duplicate_run_gap',
            lambda: uniqueness(False), 1e-12),
      Check('picard_start_gap', lambda: uniqueness(True), 1e-8),
      Check('gateaux_constrained_defect',
            lambda: gateaux_check(theta0, phi_field(True), phys,
                                  trace_tol=solver.trace_tol)
            .meta['max_defect'], 1e-6),
      Check('gateaux_boundary_term_defect',
            lambda: gateaux_check(theta0, phi_field(False), phys,
                                  constrained=False).meta['max_defect'],
            1e-6),
      Check('derivative_residual',
            lambda: deriv_residual(traj, phys, solver.scheme) / deriv_scale,
            1e-6),
      Check('heat_balance_residual',
            lambda: heat_balance_residual(traj, phys, solver.scheme)
            .meta['max_residual'] / deriv_scale, 1e-6),
      Check('initial_continuity_exponent', continuity, 0.5, at_least=True),
  ]
  if len(traj) > 1:
    checks.append(Check('transport_defect', transport, 1e-2))
  return checks


def verify(config: RunConfig, out: Path) -> int:
  """Runs the invariant suite on the configured scenario.

  Returns:
      int: 0 if every check passes, else 1.
  """
  artifacts = Artifacts(out, config)
  constants = _estimate(config)
  theta0 = build_initial_data(config.scenario, config.grid, config.phys)
  traj = solve_global(theta0, config=config.solver, params=config.phys,
                      constants=constants)
  checks = _spectral_checks(config) + _solution_checks(config, theta0, traj)
  with ThreadPoolExecutor(max_workers=worker_count()) as pool:
    rows = list(pool.map(lambda check: check.run(), checks))
  table = Table(('check', 'value', 'threshold', 'passed'), rows)
  failed = [row[0] for row in rows if row[3] == 0]
  artifacts.table('verify', table)
  artifacts.manifest('verify', constants, {'failed_checks': failed})
  if failed:
    logger.error('%d of %d checks failed: %s', len(failed), len(rows),
                 ', '.join(failed))
    return EXIT_FAILURE
  logger.info('all %d checks passed', len(rows))
  return EXIT_OK


def convergence(config: RunConfig, out: Path) -> int:
  """Compares the spectral solution with the oracle on refined grids.

  Level l runs the oracle on the grid refined by `oracle_mult 2^l`. The
  explicit oracle divides dt by 4^l to stay stable; the other schemes by 2^l.
  """
  artifacts = Artifacts(out, config)
  grid, phys, output = config.grid, config.phys, config.output
  scheme = FDScheme[output.oracle_scheme.upper()]
  t_end = output.oracle_t_end
  theta0 = build_initial_data(config.scenario, grid, phys)
  reference = solve_global(theta0, t_end, config.solver, phys)
  table = Table(('level', 'oracle_mult', 'oracle_h', 'oracle_dt',
                 'relative_difference', 'observed_order'))
  previous = math.nan
  for level in range(output.refinements):
    mult = output.oracle_mult * 2 ** level
    shrink = 4 ** level if scheme == FDScheme.EXPLICIT else 2 ** level
    fine = oracle_grid(grid, mult, dt=grid.dt / shrink)
    fine_theta0 = build_initial_data(config.scenario, fine, phys)
    diff = oracle_compare(reference, fine_theta0, phys, scheme=scheme)
    order = math.log2(previous / diff) if previous > 0 and diff > 0 \
        else math.nan
    logger.info('level %d: oracle %dx refined, difference %.3e', level, mult,
                diff)
    table.append((level, mult, fine.h, fine.dt, diff, order))
    previous = diff
  artifacts.table('convergence', table)
  artifacts.manifest('convergence')
  return EXIT_OK


_runners = {
    'simulate': simulate,
    'verify': verify,
    'constants': constants,
    'convergence': convergence,
}


def build_parser() -> argparse.ArgumentParser:
  parser = argparse.ArgumentParser(
      prog='triphase',
      description='Spectral simulator and verification harness of the '
                  'three-phase heat system.')
  parser.add_argument('command', choices=COMMANDS)
  parser.add_argument('--config', required=True,
                      help='path to the configuration file')
  parser.add_argument('--out', default='.',
                      help='directory of the artifacts (default: .)')
  parser.add_argument('--verbose', action='store_true',
                      help='log the Picard iterations and oracle steps')
  return parser


def run(command: str, config_path: str, out: str = '.') -> int:
  """Parses the configuration and runs a command.

  Returns:
      int: the exit status; 2 if the configuration can't be read or is
      invalid, 1 if the command fails.
  """
  try:
    config = parse_config(config_path)
  except (ConfigurationError, FileNotFoundError) as e:
    logger.error('%s: %s', config_path, e)
    return EXIT_USAGE
  logger.info('running %s with config %s (sha256 %s)', command, config_path,
              config.digest[:12])
  try:
    return _runners[command](config, Path(out))
  except ConfigurationError as e:
    logger.error('invalid configuration: %s', e)
    return EXIT_USAGE
  except TriphaseError as e:
    logger.error('%s failed: %s', command, e)
    return EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
  args = build_parser().parse_args(argv)
  logging.basicConfig(
      level=logging.DEBUG if args.verbose else logging.INFO,
      format='%(asctime)s %(levelname)s %(name)s: %(message)s')
  return run(args.command, os.fspath(args.config), args.out)
