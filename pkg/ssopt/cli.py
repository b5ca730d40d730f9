""" Command line front end

    python run_ssopt.py solve    --input instance.json --output result.json
    python run_ssopt.py simulate --input instance.json --policy s=-4,S=2
    python run_ssopt.py sweep    --input instance.json --xi-min 1 --xi-max 10 --xi-steps 10
    python run_ssopt.py verify   --input result.json
    python run_ssopt.py compare  --input instance.json --policy s=-4,S=2 --m-list 1,2,4,8

Exit codes: 0 ok, 2 invalid input or arguments, 3 certificate failure,
4 simulation contradicts analytics.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np
import pandas as pd
import yaml

from . import params
from .analytics import Analytics, AnalyticsContext, CertificateConfig, QuadratureConfig, RootFindConfig, \
    vstar_certificate
from .errors import PolicyError, SSOptError, ValidationError
from .model import load_instance, validate
from .simulator import PathConfig, Trajectory, comparison_experiment, create_policy, estimate_ac
from .solver import GridConfig, solve
from .utils import dump_csv, from_json_float, setup_default_logging, to_jsonable, write_csv, write_json
from .version import __version__

_logger = logging.getLogger('ssopt')

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CERTIFICATE = 3
EXIT_SIMULATION = 4


def parse_policy(text, m=None):
    """'s=-4,S=2' -> (s, S) policy, 's=-1' -> base stock; m wraps it in a bounded modification."""
    fields = {}
    for part in (text or '').split(','):
        if not part.strip():
            continue
        if '=' not in part:
            raise PolicyError('policy fields look like s=<v>,S=<v>, got {!r}'.format(part))
        key, value = part.split('=', 1)
        fields[key.strip()] = float(value)
    if set(fields) - {'s', 'S'} or 's' not in fields:
        raise PolicyError('policy needs s and optionally S, got {!r}'.format(text))
    spec = {'kind': 'ss', **fields} if 'S' in fields else {'kind': 'base_stock', 's': fields['s']}
    if m is not None:
        spec = {'kind': 'bounded_modification', 'base': spec, 'm': m}
    return spec


def parse_m_list(text):
    values = [v for v in str(text).split(',') if v.strip()]
    if not values:
        raise ValueError('--m-list is empty')
    return [int(v) for v in values]


def _log_config(config):
    _logger.info('Resolved configuration:')
    for key, value in config.items():
        _logger.info('\t{}: {}'.format(key, value))


def _context(instance, args):
    return AnalyticsContext(instance, QuadratureConfig(args.quadrature, args.quad_tol),
                            RootFindConfig(tol=args.root_tol))


def _certificate_config(args):
    return CertificateConfig(grid_points=args.cert_points, tol=args.tol, pairs=args.pairs, seed=args.cert_seed)


def _path_config(args):
    return PathConfig(args.horizon, args.dt, args.seed, args.reps, args.burn_in)


def _emit(doc, output):
    if output:
        write_json(doc, output)
    else:
        _logger.info(json.dumps(to_jsonable(doc), indent=2))


def command_solve(args):
    instance = load_instance(args.input)
    context = _context(instance, args)
    cert = _certificate_config(args)
    grid = GridConfig(args.grid_log_points, args.grid_uniform_points)
    config = {'method': args.method, 'cross_check': args.cross_check, **context.to_dict(),
              'certificate': cert.to_dict(), 'grid': grid.to_dict()}
    _log_config(config)
    result = solve(instance, method=args.method, cross_check=args.cross_check, context=context,
                   certificate_config=cert, grid_config=grid)
    _emit({'version': __version__, 'instance': instance.to_dict(), 'config': config, 'result': result.to_dict()},
          args.output)
    if result.certificate is not None and not result.certificate.passed:
        _logger.error('Certificate failed: {}'.format(', '.join(result.certificate.failures)))
        return EXIT_CERTIFICATE
    return EXIT_OK


def command_verify(args):
    with open(args.input) as f:
        doc = json.load(f)
    for key in ('instance', 'result'):
        if key not in doc:
            raise ValueError('result file has no {!r} section'.format(key))
    instance = validate(doc['instance'])
    res = doc['result']
    s_star, S_star, nu_star = (from_json_float(res[k]) for k in ('s_star', 'S_star', 'nu_star'))
    saved = doc.get('config', {})
    quad = saved.get('quadrature', {})
    context = AnalyticsContext(instance, QuadratureConfig(quad.get('scheme', args.quadrature),
                                                          quad.get('tol', args.quad_tol)),
                               RootFindConfig(tol=saved.get('rootfind', {}).get('tol', args.root_tol)))
    cert_config = _certificate_config(args)
    _log_config({'input': args.input, **context.to_dict(), 'certificate': cert_config.to_dict()})
    report = vstar_certificate(Analytics(context), s_star, S_star, nu_star, cert_config)
    _emit({'version': __version__, 'instance': instance.to_dict(), 'config': cert_config.to_dict(),
           'candidate': {'s_star': s_star, 'S_star': S_star, 'nu_star': nu_star},
           'certificate': report.to_dict()}, args.output)
    if not report.passed:
        _logger.error('Certificate failed: {}'.format(', '.join(report.failures)))
        return EXIT_CERTIFICATE
    _logger.info('Certificate passed')
    return EXIT_OK


def _analytic_cost(analytics, policy):
    if policy.kind == 'ss':
        return analytics.gamma(policy.s, policy.S)
    if policy.kind == 'base_stock':
        return analytics.base_stock_cost(policy.s)
    return None


def command_simulate(args):
    instance = load_instance(args.input)
    policy = create_policy(parse_policy(args.policy, args.m))
    path_config = _path_config(args)
    config = {'policy': policy.to_dict(), **path_config.to_dict(), 'sim_tol': args.sim_tol}
    _log_config(config)
    trajectory = Trajectory(args.record_every) if args.trajectory else None
    estimate = estimate_ac(policy, path_config, instance, trajectory=trajectory, progress=args.progress)
    if trajectory is not None:
        trajectory.to_csv(args.trajectory, {'version': __version__, 'instance': instance.to_dict(), 'config': config,
                                            'seeds': estimate.seeds})

    analytic = _analytic_cost(Analytics(_context(instance, args)), policy)
    doc = {'version': __version__, 'instance': instance.to_dict(), 'config': config,
           'estimate': estimate.to_dict(), 'analytic': analytic}
    code = EXIT_OK
    if analytic is not None and math.isfinite(analytic):
        gap = abs(estimate.avg_cost - analytic) / abs(analytic)
        doc['relative_gap'] = gap
        doc['within_tolerance'] = gap <= args.sim_tol
        _logger.info('analytic {:.6g}, simulated {:.6g} (relative gap {:.3%})'.format(
            analytic, estimate.avg_cost, gap))
        if gap > args.sim_tol:
            _logger.warning('Simulation differs from analytics by {:.3%} > {:.3%}'.format(gap, args.sim_tol))
            code = EXIT_SIMULATION
    _emit(doc, args.output)
    return code


def command_sweep(args):
    if args.xi_steps < 1 or args.xi_min < 0 or args.xi_max < args.xi_min:
        raise ValueError('empty xi range: [{}, {}] with {} steps'.format(args.xi_min, args.xi_max, args.xi_steps))
    instance = load_instance(args.input)
    context = _context(instance, args)
    config = {'xi_min': args.xi_min, 'xi_max': args.xi_max, 'xi_steps': args.xi_steps, **context.to_dict()}
    _log_config(config)
    analytics = Analytics(context)
    xi = np.linspace(args.xi_min, args.xi_max, args.xi_steps)
    theta, s, S = analytics.theta_array(xi)
    frame = pd.DataFrame({'xi': xi, 'theta': theta, 's_tilde': s, 'S_tilde': S})
    header = {'version': __version__, 'instance': instance.to_dict(), 'config': config}
    if args.output:
        write_csv(frame, args.output, header)
    else:
        dump_csv(frame, sys.stdout, header)
    return EXIT_OK


def command_compare(args):
    instance = load_instance(args.input)
    base = create_policy(parse_policy(args.policy))
    m_list = parse_m_list(args.m_list)
    path_config = _path_config(args)
    config = {'policy': base.to_dict(), 'm_list': m_list, **path_config.to_dict()}
    _log_config(config)
    table = comparison_experiment(base, m_list, path_config, instance, progress=args.progress)
    if args.output and args.output.endswith('.csv'):
        write_csv(table, args.output, {'version': __version__, 'instance': instance.to_dict(), 'config': config})
    else:
        _emit({'version': __version__, 'instance': instance.to_dict(), 'config': config,
               'table': table.to_dict(orient='records')}, args.output)
    if not table['holds'].all() or table['coupling_violations'].sum():
        _logger.warning('Comparison bound or coupling failed on some rows')
        return EXIT_SIMULATION
    return EXIT_OK


def _add_analytics_args(p):
    p.add_argument('--quadrature', default='auto', choices=['auto', 'simpson'], help='g0 evaluation scheme')
    p.add_argument('--quad-tol', type=float, default=params.quad_tol, help='quadrature tolerance')
    p.add_argument('--root-tol', type=float, default=params.root_tol, help='root-finding tolerance')


def _add_certificate_args(p):
    p.add_argument('--tol', type=float, default=params.cert_tol, help='certificate tolerance')
    p.add_argument('--cert-points', type=int, default=params.cert_grid_points, help='certificate grid size')
    p.add_argument('--pairs', type=int, default=params.cert_pairs, help='random pairs for the order-cost check')
    p.add_argument('--cert-seed', type=int, default=params.cert_seed)


def _add_sim_args(p):
    p.add_argument('--horizon', type=float, default=1e4, help='simulated time T')
    p.add_argument('--dt', type=float, default=1e-3, help='grid step')
    p.add_argument('--reps', type=int, default=8, help='replications')
    p.add_argument('--seed', type=int, default=0, help='master seed')
    p.add_argument('--burn-in', type=float, default=params.burn_in, help='discarded fraction of the horizon')


def common_parser():
    """Flags shared by every command; also parsed on their own to find --config early."""
    parser = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    parser.add_argument('--config', default='', help='YAML file with defaults for any flag')
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--progress', action='store_true', help='show progress bars')
    return parser


def build_parser(common=None):
    parser = argparse.ArgumentParser(prog='ssopt', parents=[common or common_parser()],
                                     description='Optimal (s, S) policies for Brownian inventory '
                                                 'with quantity-dependent setup costs.')
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('solve', help='optimal policy with certificate')
    p.add_argument('--input', required=True)
    p.add_argument('--output', default='')
    p.add_argument('--method', default='auto', choices=['auto', 'step', 'grid'])
    p.add_argument('--cross-check', action='store_true', help='also run the grid search and report the gap')
    p.add_argument('--grid-log-points', type=int, default=params.grid_log_points)
    p.add_argument('--grid-uniform-points', type=int, default=params.grid_uniform_points)
    _add_analytics_args(p)
    _add_certificate_args(p)
    p.set_defaults(func=command_solve)

    p = sub.add_parser('simulate', help='Monte Carlo average cost of a policy')
    p.add_argument('--input', required=True)
    p.add_argument('--policy', required=True, help='s=<v>,S=<v> or s=<v> for base stock')
    p.add_argument('--m', type=int, default=None, help='order-up-to bound of a bounded modification')
    p.add_argument('--output', default='')
    p.add_argument('--sim-tol', type=float, default=params.sim_tol, help='allowed relative gap to analytics')
    p.add_argument('--trajectory', default='', help='CSV file for the replication-0 trajectory')
    p.add_argument('--record-every', type=int, default=1000, help='trajectory thinning in grid steps')
    _add_sim_args(p)
    _add_analytics_args(p)
    p.set_defaults(func=command_simulate)

    p = sub.add_parser('sweep', help='theta(xi) and matched levels on a xi grid')
    p.add_argument('--input', required=True)
    p.add_argument('--xi-min', type=float, required=True)
    p.add_argument('--xi-max', type=float, required=True)
    p.add_argument('--xi-steps', type=int, required=True)
    p.add_argument('--output', default='')
    _add_analytics_args(p)
    p.set_defaults(func=command_sweep)

    p = sub.add_parser('verify', help='re-run the certificate on a solve result')
    p.add_argument('--input', required=True)
    p.add_argument('--output', default='')
    _add_analytics_args(p)
    _add_certificate_args(p)
    p.set_defaults(func=command_verify)

    p = sub.add_parser('compare', help='bounded modification Y_m against its base policy')
    p.add_argument('--input', required=True)
    p.add_argument('--policy', required=True)
    p.add_argument('--m-list', required=True, help='comma separated bounds, e.g. 1,2,4,8')
    p.add_argument('--output', default='', help='.csv for a table, otherwise JSON')
    _add_sim_args(p)
    p.set_defaults(func=command_compare)
    return parser, sub


def _parse_args(argv):
    # --config is parsed first; its values become defaults that explicit flags override
    common = common_parser()
    top, _ = common.parse_known_args(argv)
    parser, sub = build_parser(common)
    if not top.config:
        return parser.parse_args(argv)
    with open(top.config) as f:
        cfg = yaml.safe_load(f) or {}
    cfg = {str(k).replace('-', '_'): v for k, v in cfg.items()}
    # first pass finds the command and every flag it takes
    first = parser.parse_args(argv)
    command = first.command
    known = set(vars(first)) - {'command', 'func'}
    for key in sorted(set(cfg) - known):
        _logger.warning('Ignoring config key {!r} in {}: not a flag of {}'.format(key, top.config, command))
    # top-level keys go on the top-level parser so sub-command defaults never mask them
    parser.set_defaults(**{k: v for k, v in cfg.items() if k in vars(top)})
    sub.choices[command].set_defaults(**{k: v for k, v in cfg.items() if k in known - set(vars(top))})
    return parser.parse_args(argv)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID
    except (OSError, yaml.YAMLError) as e:
        _logger.error('Cannot read config: {}'.format(e))
        return EXIT_INVALID

    handler = setup_default_logging(getattr(logging, args.log_level))
    try:
        return int(args.func(args))
    except json.JSONDecodeError as e:
        _logger.error('Malformed JSON in {} at line {} column {}: {}'.format(args.input, e.lineno, e.colno, e.msg))
        return EXIT_INVALID
    except ValidationError as e:
        for v in e.violations:
            _logger.error('Invalid instance: {}'.format(v))
        return EXIT_INVALID
    except (ValueError, PolicyError, OSError) as e:
        _logger.error('{}: {}'.format(type(e).__name__, e))
        return EXIT_INVALID
    except SSOptError as e:
        _logger.error('{}: {}'.format(type(e).__name__, e))
        return 1
    finally:
        logging.root.removeHandler(handler)
