################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import numpy as np

from . import util
from .Loop import LoopMeasure, loop_metric
from .Birkhoff import (FlowStop, iterate_flow, birkhoff_step, to_form,
                       geodesic_residual, homotopy_phi)
from .Family import family_flow_step
from .Region import audit_delta_convexity
from .Errors import ConfigError

__all__ = ['ClassResult', 'SweepResult', 'working_region', 'homotopy_chain',
           'minimize_in_class', 'minmax_sweep']


class ClassResult(object):
    def __init__(self, flow, meets, witness, audit, working, restricted,
                 chain_gap):
        self.flow = flow
        self.meets = meets
        self.witness = witness
        self.audit = audit
        self.working = working
        self.restricted = restricted
        self.chain_gap = chain_gap


    @property
    def loop(self): return self.flow.loop
    @property
    def classification(self): return self.flow.classification


    def trapped(self): return all(self.meets)


    def to_json(self):
        return dict(flow = self.flow.to_json(), meets = self.meets,
                    trapped = self.trapped(), witness = self.witness,
                    audit = self.audit, working = self.working,
                    restricted_length = self.restricted,
                    chain_gap = self.chain_gap)


class SweepResult(object):
    def __init__(self, family, widths, classification, iterations, critical,
                 residual, records):
        self.family = family
        self.widths = list(widths)
        self.classification = classification
        self.iterations = iterations
        self.critical = critical
        self.residual = residual
        self.records = records


    @property
    def width(self): return self.widths[-1]
    @property
    def loop(self): return self.family[self.critical]


    def monotone(self, slack = 1e-8):
        pairs = zip(self.widths, self.widths[1:])
        return all(b <= a + slack for a, b in pairs)


    def to_json(self):
        return dict(width = self.width, widths = self.widths,
                    classification = self.classification,
                    iterations = self.iterations, critical = self.critical,
                    residual = self.residual,
                    critical_loop = self.loop.points.tolist(),
                    family = self.family.to_json())


def working_region(m, region, loop, params):
    '''Indicator of points outside W = U(lambda + 2 alpha) together with the
    initial bounding box grown by 4R.'''
    lam = region.lam if region.lam is not None else loop.length
    level = lam + 2 * region.alpha
    lo, hi = loop.bbox()
    grow = 4 * params.R
    bounded = np.array([p is None for p in m.periods])

    def outside(P):
        P = np.asarray(P, dtype = float)
        inbox = np.all(((lo - grow <= P) & (P <= hi + grow)) | ~bounded,
                       axis = -1)
        return ~(inbox | (region.signed_distance(P) < level))

    desc = dict(level = level, lower = (lo - grow).tolist(),
                upper = (hi + grow).tolist())
    return outside, desc


def homotopy_chain(recorded, params, samples = 4):
    '''Expand recorded consecutive iterates into the concatenated Birkhoff
    homotopies between them, sampled at `samples` interior times each.'''
    chain = []
    for (i, a), (k, b) in zip(recorded, recorded[1:]):
        if k != i + 1: continue
        for s in np.arange(samples + 1) / float(samples):
            chain.append(dict(step = k, s = float(s),
                              points = homotopy_phi(a, s, params)
                              .points.tolist()))
    return chain


def minimize_in_class(m, region, loop, params, stop = None, audit = None,
                      log = None):
    '''Shorten a loop that should not be freely homotopic into M \\ U,
    checking at every iterate that its image still meets the closure of U.'''
    stop = FlowStop.from_json(stop).to_json()
    stop['record_stride'] = stop['record_stride'] or 1
    stop = FlowStop(**stop)
    if region.lam is None: region = region.using(lam = loop.length)

    if audit is None:
        audit = audit_delta_convexity(m, region, region.rho, log = log)
    if not audit['passed'] and log is not None:
        log.warning('Region failed the convexity audit with %d violations'
                    % audit['violation_count'])

    loop = to_form(loop, params)
    outside, working = working_region(m, region, loop, params)
    closure = region.closure()

    meets = [bool(np.any(closure(loop.image())))]
    witness = [None]

    def on_step(i, current):
        meets.append(bool(np.any(closure(current.image()))))
        if not meets[-1] and witness[0] is None: witness[0] = i

    if not meets[0]: witness[0] = 0

    flow = iterate_flow(loop, params, stop, escape = outside, log = log,
                        on_step = on_step)

    if flow.classification == 'escaped_region':
        raise ConfigError('minimize_in_class', 'loop left the working region '
                          'W: %s', flow.reason)

    evidence = None
    if witness[0] is not None:
        i = witness[0]
        steps = [(k, l) for k, l in flow.recorded if k <= i]
        found = dict(steps).get(i)
        evidence = dict(iteration = i,
                        loop = None if found is None else
                        found.points.tolist(),
                        chain = homotopy_chain(steps, params))

        if log is not None:
            log.warning('Iterate %d avoids U: the class is freely homotopic '
                        'into the complement' % i)

    restricted = LoopMeasure(flow.loop).measure(region.closure(region.eta))

    # Gap between the last recorded iterate before the limit and the limit
    earlier = [l for k, l in flow.recorded if k < flow.iterations]
    last = earlier[-1] if earlier else flow.loop
    chain_gap = loop_metric(last, flow.loop) if len(last) == len(flow.loop) \
        else None

    return ClassResult(flow, meets, evidence, audit, working, restricted,
                       chain_gap)


def minmax_sweep(m, family, params, stop = None, region = None,
                 threads = None, log = None):
    '''Flow a sweepout and track its width, the largest member length.'''
    stop = FlowStop.from_json(stop)
    family = family.replace([to_form(loop, params) for loop in family])

    widths = [family.width()]
    delta = stop.decrement(widths[0])
    point = stop.point_factor * m.conv_bound()
    records = []
    classification = 'max_iterations'
    j = 0

    while True:
        if family.width() < point:
            classification = 'point_loop'
            break

        if stop.max_iter <= j: break
        j += 1

        if region is None:
            members = util.map_ordered(lambda l: birkhoff_step(l, params),
                                       family.members, threads)
            family = family.replace(members)
        else:
            family, record = family_flow_step(family, region, params, j,
                                              threads, log)
            records.append(record)

        decrement = widths[-1] - family.width()
        widths.append(family.width())

        if log is not None and log.is_debug():
            log.debug('sweep step %d %s' % (j, util.log_json(dict(
                width = widths[-1], critical = family.critical()))))

        if decrement < delta and point <= family.width():
            if geodesic_residual(family[family.critical()]) < \
                    stop.residual_tol:
                classification = 'converged_geodesic'
                break

    critical = family.critical()
    residual = geodesic_residual(family[critical]) \
        if 0 < family[critical].length else 0.0

    if log is not None:
        log.info('Sweep %s after %d steps %s' % (classification, j,
                 util.log_json(dict(width = family.width(),
                                    residual = residual))))

    return SweepResult(family, widths, classification, j, critical, residual,
                       records)
