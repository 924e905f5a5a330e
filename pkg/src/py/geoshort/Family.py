################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import math

import numpy as np

from . import util
from .Loop import (DiscreteLoop, LoopMeasure, latitude, parallel,
                   torus_circle, loop_metric)
from .Birkhoff import birkhoff_step, homotopy_phi, geodesic_residual
from .Region import pushout_loop
from .Errors import ConfigError, ContractionRefused

__all__ = ['LoopFamily', 'contract_loop', 'family_flow_step', 'cutoff',
           'in_s_set', 'measure_zeta', 'dichotomy_drive', 'contraction_step',
           'pushout_family', 'collar_pipeline', 'latitude_sweepout',
           'circle_sweepout', 'parallel_family', 'make_family']


class LoopFamily(object):
    '''Loops over a uniform grid on [0, 1]; end nodes are boundary members.'''

    def __init__(self, members, grid = None, boundary = None):
        self.members = list(members)
        k = len(self.members)
        if k < 2: raise ValueError('A family needs at least two members')

        self.grid = np.linspace(0, 1, k) if grid is None else np.asarray(grid)
        if boundary is None:
            boundary = [i in (0, k - 1) for i in range(k)]
        self.boundary = list(boundary)


    def __len__(self): return len(self.members)
    def __getitem__(self, i): return self.members[i]
    def __iter__(self): return iter(self.members)


    @property
    def manifold(self): return self.members[0].manifold


    def replace(self, members):
        return LoopFamily(members, self.grid, self.boundary)


    def lengths(self): return [loop.length for loop in self.members]
    def width(self): return max(self.lengths())
    def critical(self): return int(np.argmax(self.lengths()))


    def continuity(self):
        '''Largest loop distance between adjacent members.'''
        return max(loop_metric(a, b)
                   for a, b in zip(self.members, self.members[1:]))


    def to_json(self):
        return dict(grid = self.grid.tolist(), boundary = self.boundary,
                    lengths = self.lengths(),
                    members = [loop.points.tolist() for loop in self.members])


def contract_loop(loop, t):
    '''Contract a short loop to its basepoint along geodesics.'''
    m = loop.manifold
    bound = m.conv_bound()

    if bound <= loop.length:
        raise ContractionRefused('contract_loop', 'length %.6g not below the '
                                 'convexity bound %.6g', loop.length, bound)

    P = loop.points
    if t <= 0: return loop
    if 1 <= t: return DiscreteLoop(m, np.repeat(P[:1], len(P), axis = 0))

    base = np.repeat(P[:1], len(P), axis = 0)
    V = m.log(P, base, op = 'contract_loop')
    return DiscreteLoop(m, m.exp(P, V, t), op = 'contract_loop')


def cutoff(grid, zero, one):
    '''Continuous cutoff on the grid: 0 on `zero`, 1 on `one`, distance ratio
    in between.'''
    zero = np.asarray(zero, dtype = bool)
    one = np.asarray(one, dtype = bool)
    grid = np.asarray(grid, dtype = float)

    if not one.any(): return np.zeros(len(grid))
    if not zero.any(): return np.ones(len(grid))

    d0 = np.abs(grid[:, None] - grid[zero][None]).min(axis = 1)
    d1 = np.abs(grid[:, None] - grid[one][None]).min(axis = 1)
    return np.clip(d0 / (d0 + d1), 0, 1)


def _image_distances(region, loop):
    d = region.signed_distance(loop.image())
    return float(d.min()), float(d.max())


def _cap(region, family):
    if region.lam is not None: return float(region.lam)
    return family.width()


def family_flow_step(family, region, params, j, threads = None, log = None):
    '''One cutoff step of the family flow.

    Members whose image leaves V = U(2 lambda) are frozen, members touching
    the closure of U take a full Birkhoff step, and the rest move along the
    Birkhoff homotopy up to their cutoff value.'''
    lam = _cap(region, family)
    spans = [_image_distances(region, loop) for loop in family]
    lo = np.array([s[0] for s in spans])
    hi = np.array([s[1] for s in spans])

    d0 = 2 * lam <= hi
    d1 = lo <= region.closure_tolerance

    both = np.nonzero(d0 & d1)[0]
    if len(both):
        raise ConfigError('family_flow_step', 'member %d both leaves U(2 '
                          'lambda) and meets U; lambda = %.6g is too small',
                          int(both[0]), lam)

    chi = cutoff(family.grid, d0, d1)

    def step(i):
        if chi[i] <= 0: return family[i]
        return homotopy_phi(family[i], chi[i], params)

    members = util.map_ordered(step, range(len(family)), threads)
    out = family.replace(members)

    # Safety checks on the step
    checks = dict(boundary = [], kept_out = [], over_cap = [])
    for i, (a, b) in enumerate(zip(family, out)):
        b_lo = _image_distances(region, b)[0]
        meets = b_lo < 0

        if family.boundary[i] and meets: checks['boundary'].append(i)
        if 0 <= lo[i] and meets: checks['kept_out'].append(i)
        if meets and lam < b.length: checks['over_cap'].append(i)

    record = dict(j = j, chi = chi.tolist(), D0 = np.nonzero(d0)[0].tolist(),
                  D1 = np.nonzero(d1)[0].tolist(), lengths = out.lengths(),
                  checks = checks)

    if log is not None:
        if any(checks.values()):
            log.warning('Family step %d safety findings %s' % (j, checks))
        if log.is_debug():
            log.debug('family step %d %s' % (j, util.log_json(dict(
                width = out.width(), full = int((chi >= 1).sum()),
                frozen = int((chi <= 0).sum())))))

    return out, record


def in_s_set(loop, region, lam, eta):
    '''Loops of length at most lambda spending length at least eta in the
    closure of U(eta).'''
    if lam < loop.length: return False
    return eta <= LoopMeasure(loop).measure(region.closure(eta))


def measure_zeta(family, region, params, lam, eta, floor = 1e-6):
    '''Smallest one-step length decrement over members of the S-set.'''
    zeta = math.inf

    for loop in family:
        if not in_s_set(loop, region, lam, eta): continue
        zeta = min(zeta, loop.length - birkhoff_step(loop, params).length)

    return max(floor, zeta) if zeta < math.inf else floor


def _alternative(loop, region, eta):
    d = region.signed_distance(loop.image())
    if 0 <= d.min(): return 'avoids'
    if d.max() < eta and loop.length < eta: return 'small'
    return 'candidate'


def dichotomy_drive(family, region, params, zeta = None, eta = None,
                    max_steps = 1000, threads = None, log = None):
    '''Run Q = ceil(lambda / zeta) + 1 family steps and sort every member
    into: image avoids U, short loop inside U(eta), or geodesic candidate.'''
    if eta is None: eta = region.eta
    lam = _cap(region, family)
    region = region.using(lam = lam)

    if zeta is None: zeta = measure_zeta(family, region, params, lam, eta)
    Q = int(math.ceil(lam / zeta)) + 1
    steps = min(Q, max_steps)

    if steps < Q and log is not None:
        log.warning('Dichotomy needs Q = %d steps, running %d' % (Q, steps))

    records = []
    j = 0
    for j in range(1, steps + 1):
        before = family.lengths()
        family, record = family_flow_step(family, region, params, j, threads,
                                          log)
        records.append(record)

        alts = [_alternative(loop, region, eta) for loop in family]
        if 'candidate' not in alts: break

        moved = max(abs(a - b) for a, b in zip(before, family.lengths()))
        if moved <= 1e-12 * max(1.0, lam): break

    members = []
    for i, loop in enumerate(family):
        alt = _alternative(loop, region, eta)
        entry = dict(index = i, v = float(family.grid[i]), alternative = alt,
                     length = loop.length,
                     restricted = LoopMeasure(loop).measure(
                         region.closure(eta)))
        if alt == 'candidate':
            entry['residual'] = geodesic_residual(loop)
        members.append(entry)

    report = dict(Q = Q, zeta = zeta, steps = j, lam = lam, eta = eta,
                  truncated = j < Q and any(
                      m['alternative'] == 'candidate' for m in members),
                  members = members,
                  candidates = [m['index'] for m in members
                                if m['alternative'] == 'candidate'])

    if log is not None:
        log.info('Dichotomy after %d of %d steps %s' % (j, Q, util.log_json(
            dict(zeta = zeta, candidates = report['candidates']))))

    return report, family, records


def contraction_step(family, region, eta = None, skip = ()):
    '''Contract members touching the closure of U(-eta) to their basepoints,
    cut off between members avoiding U(-eta) and members meeting U(-2 eta).'''
    if eta is None: eta = region.eta
    margin = region.closure_tolerance

    lo = np.array([_image_distances(region, loop)[0] for loop in family])
    d0 = -eta <= lo
    d1 = lo <= -2 * eta + margin
    chi = cutoff(family.grid, d0, d1)

    members = []
    constant = []
    deep = []

    for i, loop in enumerate(family):
        if i in skip or -eta + margin < lo[i] or chi[i] <= 0:
            members.append(loop)
            continue

        out = contract_loop(loop, chi[i])
        members.append(out)

        if out.length == 0: constant.append(i)
        elif _image_distances(region, out)[0] < -3 * eta: deep.append(i)

    record = dict(chi = chi.tolist(), D0 = np.nonzero(d0)[0].tolist(),
                  D1 = np.nonzero(d1)[0].tolist(), constant = constant,
                  deep = deep)

    return family.replace(members), record


def pushout_family(family, region, skip = ()):
    '''Apply the push-out flow for its full horizon to every member.'''
    members = []
    inside = []

    for i, loop in enumerate(family):
        if i in skip:
            members.append(loop)
            continue

        out = pushout_loop(region, loop, region.T)
        members.append(out)

        if 0 < out.length and \
                _image_distances(region, out)[0] < region.eta - 1e-6:
            inside.append(i)

    return family.replace(members), dict(inside = inside)


def collar_pipeline(family, region, params, zeta = None, max_steps = 1000,
                    threads = None, log = None):
    '''Family flow, contraction and push-out composed; returns the outcome
    per member and the homotopy record of every stage.'''
    report, family, records = dichotomy_drive(
        family, region, params, zeta, max_steps = max_steps, threads = threads,
        log = log)
    skip = set(report['candidates'])

    family, contraction = contraction_step(family, region, skip = skip)
    family, pushout = pushout_family(family, region, skip = skip)

    outcomes = []
    for i, loop in enumerate(family):
        if i in skip: outcome = 'candidate'
        elif loop.length == 0: outcome = 'constant'
        elif i in pushout['inside']: outcome = 'inside'
        else: outcome = 'avoids'
        outcomes.append(outcome)

    if log is not None:
        log.info('Collar pipeline outcomes %s' % dict(
            (o, outcomes.count(o)) for o in sorted(set(outcomes))))

    return dict(outcomes = outcomes, dichotomy = report, flow = records,
                contraction = contraction, pushout = pushout,
                Q = report['Q'], zeta = report['zeta']), family


# Family generators
def latitude_sweepout(m, members, n):
    '''Latitudes from pole to pole; the ends are constant loops.'''
    grid = np.linspace(0, 1, members)
    return LoopFamily([latitude(m, v * math.pi, n) for v in grid], grid)


def circle_sweepout(m, members, n, center = (0.5, 0.5), radius = 0.35):
    grid = np.linspace(0, 1, members)
    loops = [torus_circle(m, n, center, radius * math.sin(math.pi * v))
             for v in grid]
    return LoopFamily(loops, grid)


def parallel_family(m, members, n, z0 = -0.7, z1 = 0.7):
    grid = np.linspace(0, 1, members)
    loops = [parallel(m, z0 + (z1 - z0) * v, n) for v in grid]
    return LoopFamily(loops, grid)


_generators = {
    'latitude-sweepout': latitude_sweepout,
    'circle-sweepout': circle_sweepout,
    'parallel-family': parallel_family,
}


def make_family(m, spec):
    spec = {str(k).replace('-', '_'): v for k, v in dict(spec).items()}
    kind = spec.pop('kind', None)
    if kind not in _generators:
        raise ConfigError('family', 'unknown family generator "%s"', kind)

    try:
        return _generators[kind](m, **spec)
    except TypeError as e:
        raise ConfigError('family', 'bad parameters for %s: %s', kind, e)
