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
from .Loop import DiscreteLoop
from .Errors import (ParamsError, FlowStepRefused, NoUniqueGeodesic,
                     EscapeError, ConfigError)

__all__ = ['BirkhoffParams', 'FlowStop', 'FlowResult', 'validate_params',
           'choose_params', 'to_form', 'even_replace', 'odd_replace',
           'const_speed', 'birkhoff_step', 'homotopy_phi', 'geodesic_path',
           'iterate_flow', 'geodesic_residual', 'CLASSIFICATIONS']


CLASSIFICATIONS = ('converged_geodesic', 'point_loop', 'escaped_region',
                   'max_iterations')


class BirkhoffParams(object):
    def __init__(self, E, R, L, relaxed = False, warnings = ()):
        self.E = float(E)
        self.R = float(R)
        self.L = int(L)
        self.relaxed = relaxed
        self.warnings = list(warnings)


    @property
    def n(self): return 2 * self.L


    def __repr__(self):
        return 'BirkhoffParams(E=%.6g, R=%.6g, L=%d%s)' % (
            self.E, self.R, self.L, ', relaxed' if self.relaxed else '')


    def to_json(self):
        return dict(E = self.E, R = self.R, L = self.L, relaxed = self.relaxed,
                    warnings = self.warnings)


def _radius_bounds(m, region = None):
    bounds = [('conv/2', m.conv_bound() / 2),
              ('inj/4', m.injectivity_floor / 4)]

    if region is not None:
        bounds.append(('alpha/4', region.alpha / 4))
        bounds.append(('rho/2', region.rho / 2))

    return bounds


def validate_params(E, R, L, m, region = None, relaxed = False, log = None):
    '''Check the step radius and segment count against the manifold (and
    region) bounds, reporting every violated clause.'''
    errors = []
    warnings = []

    if not 0 < R: errors.append('R = %.6g must be positive' % R)
    if E < 0: errors.append('E = %.6g must be nonnegative' % E)
    if L < 1 or int(L) != L: errors.append('L = %s must be a positive integer'
                                           % L)

    for name, bound in _radius_bounds(m, region):
        if not R < bound:
            errors.append('R = %.6g >= %s = %.6g' % (R, name, bound))

    if 0 < R:
        clauses = []
        if L < E / R ** 2:
            clauses.append('L = %d < E/R^2 = %.6g' % (L, E / R ** 2))
        if L < math.sqrt(E):
            clauses.append('L = %d < sqrt(E) = %.6g' % (L, math.sqrt(E)))

        if relaxed: warnings += clauses
        else: errors += clauses

    if errors: raise ParamsError('validate_params', errors)

    if log is not None:
        for w in warnings: log.warning('Relaxed parameters: %s' % w)

    return BirkhoffParams(E, R, L, relaxed, warnings)


def choose_params(m, length, region = None, energy_factor = 1.05,
                  radius_factor = 0.99, relaxed = False, log = None):
    '''Derive (E, R, L) for a loop of the given length.'''
    if not 0 < radius_factor < 1:
        raise ConfigError('choose_params', 'radius factor must lie in (0, 1)')

    E = (energy_factor * length) ** 2
    R = radius_factor * min(b for name, b in _radius_bounds(m, region))

    if relaxed: L = int(math.ceil(length / R))
    else: L = int(math.ceil(max(E / R ** 2, math.sqrt(E))))

    return validate_params(E, R, max(2, L), m, region, relaxed, log)


def _check_form(loop, params, op):
    if len(loop) != params.n:
        raise FlowStepRefused(op, 'loop has %d breakpoints, expected 2L = %d',
                              len(loop), params.n)


def _replace(loop, params, parity, op):
    '''Keep the breakpoints of the given parity and join consecutive ones by
    minimizing segments, reinserting their midpoints.'''
    _check_form(loop, params, op)
    m = loop.manifold
    n = len(loop)

    A = loop.points[parity::2]
    B = np.roll(A, -1, axis = 0)

    try:
        V = m.log(A, B, op = op)
        span = m.norm(A, V)
        far = np.nonzero(params.R * (1 + 1e-9) < span)[0]
        if len(far):
            raise FlowStepRefused(op, 'anchor spacing %.6g exceeds R = %.6g '
                                  'at anchor %d', float(span[far[0]]),
                                  params.R, int(far[0]))

        M, W = m.halve(A, V, op = op)

    except (NoUniqueGeodesic, EscapeError) as e:
        raise FlowStepRefused(op, 'no minimizing segment: %s' % e)

    mids = (parity + 1 + 2 * np.arange(len(A))) % n

    P = np.empty_like(loop.points)
    U = np.empty_like(loop.velocities)
    P[parity::2] = A
    P[mids] = M
    U[parity::2] = 0.5 * V
    U[mids] = W

    return DiscreteLoop(m, P, U)


def even_replace(loop, params):
    return _replace(loop, params, 0, 'even_replace')


def odd_replace(loop, params):
    return _replace(loop, params, 1, 'odd_replace')


def _arc_points(loop, fractions):
    '''Points at the given fractions of arc length from the basepoint.'''
    total = loop.length
    c = np.concatenate([[0], np.cumsum(loop.lengths)])
    s = np.asarray(fractions, dtype = float) * total

    i = np.searchsorted(c, s, side = 'right') - 1
    i = np.clip(i, 0, len(loop) - 1)

    lengths = loop.lengths[i]
    t = np.zeros_like(s)
    pos = 0 < lengths
    t[pos] = np.clip((s[pos] - c[i][pos]) / lengths[pos], 0, 1)

    return loop.manifold.exp(loop.points[i], t[:, None] * loop.velocities[i])


def arc_fractions(loop):
    '''Arc-length fraction of every breakpoint.'''
    total = loop.length
    c = np.concatenate([[0], np.cumsum(loop.lengths)[:-1]])
    return c / total if 0 < total else np.arange(len(loop)) / len(loop)


def const_speed(loop, n = None):
    '''Resample at equal arc length starting from the basepoint.

    New breakpoints lie on the old segments, so the length can only drop
    where a new chord cuts an old corner.'''
    if n is None: n = len(loop)
    m = loop.manifold

    if not 0 < loop.length:
        return DiscreteLoop(m, np.repeat(loop.points[:1], n, axis = 0))

    P = _arc_points(loop, np.arange(n) / n)
    P[0] = loop.points[0]

    return DiscreteLoop(m, P, op = 'const_speed')


def to_form(loop, params):
    '''Bring a loop into 2L-form.'''
    if len(loop) == params.n: return loop
    return const_speed(loop, params.n)


def birkhoff_step(loop, params):
    if not params.relaxed and params.E * (1 + 1e-9) < loop.energy:
        raise FlowStepRefused('birkhoff_step', 'energy %.6g exceeds cap %.6g',
                              loop.energy, params.E)

    return const_speed(odd_replace(even_replace(loop, params), params))


def geodesic_path(loop_a, loop_b, t):
    '''Pointwise geodesic homotopy from loop_a to loop_b at time t.'''
    m = loop_a.manifold
    if t <= 0: return loop_a
    if 1 <= t: return loop_b

    P = loop_a.points
    V = m.log(P, loop_b.points, op = 'homotopy')
    return DiscreteLoop(m, m.exp(P, V, t), op = 'homotopy')


def _half_homotopy(loop, replaced, s):
    '''Geodesic interpolation to the replaced loop on [0, 1/2], then the
    blend toward its constant speed reparametrization on [1/2, 1].'''
    if s <= 0.5: return geodesic_path(loop, replaced, 2 * s)

    x = np.arange(len(replaced)) / len(replaced)
    tau = (2 - 2 * s) * arc_fractions(replaced) + (2 * s - 1) * x
    P = _arc_points(replaced, tau)
    P[0] = replaced.points[0]

    return DiscreteLoop(replaced.manifold, P, op = 'homotopy')


def homotopy_phi(loop, s, params):
    '''Homotopy from the loop (s = 0) to its Birkhoff image (s = 1).'''
    s = float(np.clip(s, 0, 1))
    even = even_replace(loop, params)

    if s <= 0.5: return geodesic_path(loop, even, 2 * s)

    return _half_homotopy(even, odd_replace(even, params), 2 * s - 1)


def _caused_by(e, cls):
    while e is not None:
        if isinstance(e, cls): return True
        e = e.__context__
    return False


def geodesic_residual(loop):
    '''Largest corner angle plus relative spread of segment lengths.'''
    m = loop.manifold
    P = loop.points

    out = loop.velocities
    inc = -m.log(P, np.roll(P, 1, axis = 0), op = 'geodesic_residual')

    a = m.norm(P, out)
    b = m.norm(P, inc)
    ok = (0 < a) & (0 < b)

    angle = 0.0
    if ok.any():
        c = m.inner(P[ok], out[ok], inc[ok]) / (a[ok] * b[ok])
        angle = float(np.max(np.arccos(np.clip(c, -1, 1))))

    lengths = loop.lengths[0 < loop.lengths]
    spread = 0.0
    if len(lengths):
        spread = float((lengths.max() - lengths.min()) / lengths.mean())

    return angle + spread


class FlowStop(object):
    def __init__(self, length_decrement = None, residual_tol = 1e-4,
                 max_iter = 10000, point_factor = 1e-4, record_stride = 0):
        self.length_decrement = length_decrement
        self.residual_tol = float(residual_tol)
        self.max_iter = int(max_iter)
        self.point_factor = float(point_factor)
        self.record_stride = int(record_stride)


    @classmethod
    def from_json(cls, d):
        if d is None: return cls()
        if isinstance(d, FlowStop): return d
        kwargs = {k.replace('-', '_'): v for k, v in d.items()}
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigError('flow_stop', 'bad stop criteria: %s' % e)


    def decrement(self, length0):
        if self.length_decrement is not None: return self.length_decrement
        return 1e-7 * length0


    def to_json(self):
        return dict(length_decrement = self.length_decrement,
                    residual_tol = self.residual_tol, max_iter = self.max_iter,
                    point_factor = self.point_factor,
                    record_stride = self.record_stride)


class FlowResult(object):
    def __init__(self, loop, iterations, lengths, classification, residual,
                 params, stop, recorded = None, reason = None):
        self.loop = loop
        self.iterations = iterations
        self.lengths = list(lengths)
        self.classification = classification
        self.residual = residual
        self.params = params
        self.stop = stop
        self.recorded = recorded or []
        self.reason = reason


    @property
    def length(self): return self.loop.length


    def monotone(self, slack = 1e-8):
        pairs = zip(self.lengths, self.lengths[1:])
        return all(b <= a + slack for a, b in pairs)


    def to_json(self):
        d = dict(classification = self.classification,
                 iterations = self.iterations, length = self.length,
                 residual = self.residual, lengths = self.lengths,
                 loop = self.loop.points.tolist(),
                 params = self.params.to_json(), stop = self.stop.to_json())
        if self.reason: d['reason'] = self.reason
        return d


def iterate_flow(loop, params, stop = None, escape = None, log = None,
                 on_step = None):
    '''Iterate the Birkhoff map until the loop settles, collapses, escapes or
    the iteration budget runs out.

    `escape` maps an array of chart points to booleans (True = outside the
    working region). `on_step(i, loop)` is called after every accepted step.
    '''
    stop = FlowStop.from_json(stop)
    m = loop.manifold
    loop = to_form(loop, params)

    lengths = [loop.length]
    delta = stop.decrement(loop.length)
    point = stop.point_factor * m.conv_bound()
    recorded = [(0, loop)] if stop.record_stride else []

    classification = 'max_iterations'
    reason = None
    i = 0

    while True:
        if loop.length < point:
            classification = 'point_loop'
            break

        if stop.max_iter <= i: break

        try:
            nxt = birkhoff_step(loop, params)
        except FlowStepRefused as e:
            if escape is None or not _caused_by(e, EscapeError): raise
            classification, reason = 'escaped_region', str(e)
            break

        i += 1
        decrement = loop.length - nxt.length
        loop = nxt
        lengths.append(loop.length)

        if stop.record_stride and i % stop.record_stride == 0:
            recorded.append((i, loop))
        if on_step is not None: on_step(i, loop)

        if log is not None and log.is_debug():
            log.debug('step %d %s' % (i, util.log_json(dict(
                length = loop.length, decrement = decrement))))

        if escape is not None and np.any(escape(loop.image())):
            classification = 'escaped_region'
            reason = 'loop left the working region at step %d' % i
            break

        if decrement < delta and not loop.is_point(point):
            if geodesic_residual(loop) < stop.residual_tol:
                classification = 'converged_geodesic'
                break

    residual = geodesic_residual(loop) if 0 < loop.length else 0.0
    if stop.record_stride and (not recorded or recorded[-1][0] != i):
        recorded.append((i, loop))

    if log is not None:
        log.info('Flow %s after %d steps %s' % (classification, i,
                 util.log_json(dict(length = loop.length,
                                    residual = residual))))

    return FlowResult(loop, i, lengths, classification, residual, params, stop,
                      recorded, reason)
