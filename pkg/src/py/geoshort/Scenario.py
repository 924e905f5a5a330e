################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import os
import time

from . import util
from . import Surfaces
from . import Loop
from .Log import get_logger
from .Errors import ConfigError
from .Birkhoff import FlowStop, choose_params, validate_params, iterate_flow
from .Region import make_region, audit_delta_convexity, pushout_audit
from .Family import make_family, collar_pipeline
from .Drivers import minimize_in_class, minmax_sweep
from .GroupAudit import audit_catalog
from .Report import read_loop_csv
from .SVG import region_field

__all__ = ['Scenario', 'run_scenario']


_loop_generators = {
    'latitude': Loop.latitude,
    'parallel': Loop.parallel,
    'torus-line': Loop.torus_line,
    'zigzag': Loop.zigzag,
    'torus-circle': Loop.torus_circle,
    'polygon': Loop.polygon,
}


def _kwargs(d): return {str(k).replace('-', '_'): v for k, v in d.items()}


class Scenario(object):
    '''One experiment described by a prepared config.

    `base` is the directory relative file names in the config resolve
    against.'''

    def __init__(self, config, log = None, base = '.'):
        self.config = config
        self.log = log if log is not None else get_logger('Scenario')
        self.base = base
        self.kind = config['scenario']['kind']
        self.seed = config['scenario']['seed']
        self.threads = config['scenario']['threads']
        self.messages = []


    def _log_cb(self, msg):
        msg = msg.get('log', {})
        if msg.get('level') in ('warning', 'error'):
            self.messages.append(dict(level = msg['level'],
                                      source = msg.get('source'),
                                      msg = msg.get('msg')))


    # Builders
    def manifold(self):
        cfg = self.config['manifold']
        return Surfaces.make(cfg['name'], cfg['params'])


    def region(self, m):
        cfg = self.config['region']
        if cfg['kind'] == 'none': return None

        spec = dict(cfg['params'])
        spec['kind'] = cfg['kind']
        spec['closure-margin'] = cfg['closure-margin']
        return make_region(m, spec)


    def loop(self, m):
        cfg = self.config['loop']
        kind = cfg['kind']

        if kind == 'csv':
            if not cfg['file']:
                raise ConfigError('scenario', 'csv loops need "loop.file"')
            path = os.path.join(self.base, cfg['file'])
            try:
                return read_loop_csv(path, m)
            except (OSError, ValueError) as e:
                raise ConfigError('scenario', 'cannot read %s: %s', path, e)

        try:
            return _loop_generators[kind](m, **_kwargs(cfg['params']))
        except TypeError as e:
            raise ConfigError('scenario', 'bad parameters for %s loop: %s',
                              kind, e)


    def family(self, m):
        cfg = self.config['family']
        return make_family(m, dict(cfg['params'], kind = cfg['kind']))


    def params(self, m, length, region = None):
        '''Derived parameters, with any of E, R, L replaced from the config.'''
        cfg = self.config['params']
        derived = choose_params(
            m, length, region, energy_factor = cfg['energy-factor'],
            radius_factor = cfg['radius-factor'], relaxed = cfg['relaxed'],
            log = self.log)

        E, R, L = cfg['E'], cfg['R'], cfg['L']
        if not (E or R or L): return derived

        return validate_params(E or derived.E, R or derived.R, L or derived.L,
                               m, region, cfg['relaxed'], self.log)


    def stop(self):
        cfg = self.config['stop']
        return FlowStop(length_decrement = cfg['length-decrement'] or None,
                        residual_tol = cfg['residual-tol'],
                        max_iter = cfg['max-iter'],
                        point_factor = cfg['point-factor'],
                        record_stride = cfg['record-stride'])


    # Scenarios
    def _single_flow(self, report):
        m = report['m']
        region = report['U']
        loop = self.loop(m)
        params = self.params(m, loop.length, region)
        flow = iterate_flow(loop, params, self.stop(), log = self.log)

        result = flow.to_json()
        if region is not None:
            result['restricted_length'] = Loop.LoopMeasure(flow.loop).measure(
                region.closure(region.eta))

        role = 'critical' if flow.classification == 'converged_geodesic' \
            else 'final'
        report.update(params = params, result = result, trace = flow.lengths,
                      loops = [dict(role = 'initial', points = loop.points),
                               dict(role = role, points = flow.loop.points)])


    def _minimize_in_class(self, report):
        m = report['m']
        region = report['U']
        if region is None:
            raise ConfigError('minimize_in_class', 'scenario needs a region')

        loop = self.loop(m)
        params = self.params(m, loop.length, region)
        audit = self._convexity(m, region)

        res = minimize_in_class(m, region, loop, params, self.stop(), audit,
                                self.log)

        role = 'critical' if res.classification == 'converged_geodesic' \
            else 'final'
        loops = [dict(role = 'initial', points = loop.points),
                 dict(role = role, points = res.loop.points)]
        if res.witness is not None and res.witness['loop'] is not None:
            loops.append(dict(role = 'witness', points = res.witness['loop']))

        report.update(params = params, result = res.to_json(),
                      trace = res.flow.lengths, loops = loops)


    def _minmax_sweep(self, report):
        m = report['m']
        region = report['U']
        family = self.family(m)
        params = self.params(m, family.width(), region)
        result = {}

        if self.config['dichotomy']['enabled']:
            if region is None:
                raise ConfigError('collar_pipeline', 'dichotomy needs a region')

            cfg = self.config['dichotomy']
            collar, _ = collar_pipeline(
                family, region, params, zeta = cfg['zeta'] or None,
                max_steps = cfg['max-steps'], threads = self.threads,
                log = self.log)
            result['collar'] = collar

        sweep = minmax_sweep(m, family, params, self.stop(), region,
                             self.threads, self.log)
        result.update(sweep.to_json())

        role = 'critical' if sweep.classification == 'converged_geodesic' \
            else 'final'
        report.update(params = params, result = result, trace = sweep.widths,
                      loops = [dict(role = 'initial',
                                    points = family[family.critical()].points),
                               dict(role = role, points = sweep.loop.points)])


    def _convexity(self, m, region):
        cfg = self.config['audit']
        return audit_delta_convexity(m, region, cfg['delta'] or region.rho,
                                     n_samples = cfg['samples'],
                                     seed = self.seed, log = self.log)


    def _region_audit(self, report):
        m = report['m']
        region = report['U']
        if region is None:
            raise ConfigError('region_audit', 'scenario needs a region')

        convexity = self._convexity(m, region)
        samples = self.config['audit']['pushout-samples']
        pushout = pushout_audit(region, samples, seed = self.seed,
                                log = self.log) if samples else None

        passed = convexity['passed'] and (pushout is None or pushout['passed'])
        report.update(result = dict(passed = passed, convexity = convexity,
                                    pushout = pushout))


    def _group_audit(self, report):
        cfg = self.config['audit']
        report.update(result = audit_catalog(cfg['max-order'], cfg['extras'],
                                             self.threads, self.log))


    def run(self):
        start = time.time()
        stamp = util.timestamp()
        root = self.log.log
        root.add_listener(self._log_cb)

        report = dict(tool = dict(name = 'geoshort',
                                  version = util.get_version()),
                      config = self.config, kind = self.kind, loops = [],
                      trace = [])

        try:
            if self.kind != 'group_audit':
                m = self.manifold()
                region = self.region(m)
                report.update(m = m, U = region, manifold = m.describe())
                if region is not None:
                    report.update(region = region.to_json(),
                                  region_field = region_field(m, region))

            self.log.info('Running %s' % self.kind)
            getattr(self, '_' + self.kind)(report)

        finally: root.remove_listener(self._log_cb)

        report.pop('m', None)
        report.pop('U', None)

        name = self.config['manifold']['name']
        report['title'] = self.kind if self.kind == 'group_audit' else \
            '%s on %s' % (self.kind, name)
        if 'params' in report: report['params'] = report['params'].to_json()
        report['warnings'] = list(self.messages)
        report['timing'] = dict(start = stamp,
                                elapsed = time.time() - start)

        return util.jsonable(report)


def run_scenario(config, log = None, base = '.'):
    return Scenario(config, log, base).run()
