################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import copy
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.interpolate import RegularGridInterpolator
from scipy.integrate import cumulative_trapezoid

from . import util
from .Loop import discretize
from .Errors import ConfigError, NoUniqueGeodesic, PreconditionError

__all__ = ['ConcaveRegion', 'sublevel_indicator', 'pushout_point',
           'pushout_audit', 'pushout_loop', 'audit_delta_convexity', 'band',
           'cap', 'ball', 'complement_ball', 'grid_region', 'make_region',
           'bump']


def _smooth_step(x):
    '''C-infinity transition from 0 (x <= 0) to 1 (x >= 1).'''
    x = np.asarray(x, dtype = float)
    with np.errstate(divide = 'ignore', over = 'ignore', invalid = 'ignore'):
        f = np.where(0 < x, np.exp(-1 / np.where(0 < x, x, 1)), 0.0)
        y = 1 - x
        g = np.where(0 < y, np.exp(-1 / np.where(0 < y, y, 1)), 0.0)
    return np.where(1 <= x, 1.0, np.where(x <= 0, 0.0, f / (f + g)))


def bump(xi, theta):
    '''Smooth bump equal to 1 on [-1 + theta, 1 - theta], zero outside
    (-1, 1).'''
    xi = np.asarray(xi, dtype = float)
    return (_smooth_step((xi + 1) / theta) *
            _smooth_step((1 - xi) / theta))


class ConcaveRegion(object):
    '''Bounded open region U given by its signed boundary distance
    (negative inside) plus the collar constants of the push-out flow.'''

    def __init__(self, manifold, kind, distance, rho, eta, theta = 0.25,
                 alpha = None, lam = None, closure_margin = 1e-3,
                 params = None, cell = 0.0):
        if alpha is None: alpha = manifold.conv_bound()

        if not 0 < rho: raise ConfigError('region', 'rho must be positive')
        if not 0 < theta < 1:
            raise ConfigError('region', 'theta must lie in (0, 1)')
        if not 0 < eta <= alpha:
            raise ConfigError('region', 'eta = %g must lie in (0, alpha = %g]',
                              eta, alpha)

        self.manifold = manifold
        self.kind = kind
        self.distance = distance
        self.rho = float(rho)
        self.eta = float(eta)
        self.theta = float(theta)
        self.alpha = float(alpha)
        self.lam = lam
        self.closure_margin = float(closure_margin)
        self.cell = float(cell)
        self.params = dict(params or {})


    def using(self, **kwargs):
        r = copy.copy(self)
        for k, v in kwargs.items(): setattr(r, k, v)
        return r


    def __repr__(self): return 'ConcaveRegion(%s)' % self.kind


    def to_json(self):
        return dict(kind = self.kind, params = self.params, rho = self.rho,
                    eta = self.eta, theta = self.theta, alpha = self.alpha,
                    lam = self.lam, closure_margin = self.closure_margin,
                    cell = self.cell,
                    collar_width = self.collar_width, T = self.T)


    # Distance and sublevels
    def signed_distance(self, P):
        P = np.asarray(P, dtype = float)
        shape = P.shape[:-1]
        P = self.manifold.wrap(P.reshape(-1, self.manifold.dim))
        return np.asarray(self.distance(P), dtype = float).reshape(shape)


    def contains(self, P): return self.signed_distance(P) < 0
    def sublevel(self, r): return lambda P: self.signed_distance(P) < r


    @property
    def closure_tolerance(self):
        '''Closure test slack: the margin, or one cell of a grid field.'''
        return max(self.closure_margin, self.cell)


    def closure(self, r = 0.0):
        tol = self.closure_tolerance
        return lambda P: self.signed_distance(P) <= r + tol


    # Collar
    @property
    def collar_width(self): return 3 * self.eta / (1 - self.theta)


    @property
    def T(self): return 2 - 2 * self.theta


    def xi(self, P):
        return np.clip(self.signed_distance(P) / self.collar_width, -1, 1)


    def psi(self, xi): return bump(xi, self.theta)


    def flow_xi(self, xi, t, steps = 64):
        '''Integrate xi' = psi(xi) for time t.'''
        xi = np.array(xi, dtype = float)
        h = t / steps

        for i in range(steps):
            k1 = self.psi(xi)
            k2 = self.psi(xi + 0.5 * h * k1)
            k3 = self.psi(xi + 0.5 * h * k2)
            k4 = self.psi(xi + h * k3)
            xi = xi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

        return xi


    def gradient(self, P):
        '''Chart gradient of the signed distance by central differences.'''
        P = np.asarray(P, dtype = float)
        h = 1e-6 * max(1.0, self.eta)
        grad = []

        for i in range(self.manifold.dim):
            e = np.zeros(self.manifold.dim)
            e[i] = h
            grad.append((self.signed_distance(P + e) -
                         self.signed_distance(P - e)) / (2 * h))

        return np.stack(grad, axis = -1)


    def _level_velocity(self, P):
        '''Velocity moving the signed distance up at unit rate.'''
        m = self.manifold
        grad = self.gradient(P)
        G = np.linalg.solve(m.metric_at(P), grad[..., None])[..., 0]
        sq = (grad * G).sum(axis = -1)
        ok = 1e-12 < sq
        out = np.zeros_like(G)
        out[ok] = G[ok] / sq[ok, None]
        return out


    def move_to_level(self, P, target, corrections = 4):
        '''Move points along the gradient flow of the signed distance until it
        reaches `target`.'''
        m = self.manifold
        P = np.array(P, dtype = float)
        target = np.broadcast_to(np.asarray(target, dtype = float),
                                 P.shape[:1])
        gap = target - self.signed_distance(P)

        steps = max(1, int(math.ceil(np.max(np.abs(gap), initial = 0) /
                                     (0.05 * self.eta))))
        h = gap[:, None] / steps

        for i in range(steps):
            k1 = self._level_velocity(P)
            k2 = self._level_velocity(m.wrap(P + 0.5 * h * k1))
            k3 = self._level_velocity(m.wrap(P + 0.5 * h * k2))
            k4 = self._level_velocity(m.wrap(P + h * k3))
            P = m.wrap(P + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))

        for i in range(corrections):
            r = target - self.signed_distance(P)
            P = m.wrap(P + r[:, None] * self._level_velocity(P))

        return P


    def pushout_points(self, P, t):
        '''Push-out flow: the collar coordinate follows xi' = psi(xi); points
        outside the collar stay put.'''
        P = np.asarray(P, dtype = float)
        if t <= 0: return np.array(P)

        d = self.signed_distance(P)
        w = self.collar_width
        inside = np.abs(d) < w
        out = np.array(P, dtype = float)
        if not inside.any(): return out

        xi = self.flow_xi(d[inside] / w, t)
        target = np.maximum(xi * w, d[inside])
        out[inside] = self.move_to_level(P[inside], target)

        return out


def sublevel_indicator(region, r): return region.sublevel(r)


def pushout_point(region, p, t):
    return region.pushout_points(np.asarray(p, dtype = float)[None], t)[0]


def pushout_loop(region, loop, t):
    if t <= 0: return loop
    P = region.pushout_points(loop.points, t)
    return discretize(loop.manifold, P, op = 'pushout_loop')


def pushout_audit(region, n_samples = 1000, seed = 0, tol = 1e-6,
                  log = None):
    '''Push sampled collar points with d >= -3 eta for the full horizon and
    count those ending below eta.'''
    m = region.manifold
    rng = np.random.default_rng(seed)

    P = _chart_uniform(m, rng, 8 * n_samples + 64)
    d = region.signed_distance(P)
    P = P[(-3 * region.eta <= d) & (d < region.collar_width)][:n_samples]

    after = region.signed_distance(region.pushout_points(P, region.T))
    bad = np.nonzero(after < region.eta - tol)[0]

    report = dict(passed = not len(bad), samples = len(P),
                  violations = len(bad),
                  min_distance = float(after.min()) if len(P) else None,
                  worst = P[bad[:8]].tolist())

    if log is not None:
        log.info('Push-out audit %s' % util.log_json(dict(
            samples = len(P), violations = len(bad))))

    return report


def audit_delta_convexity(m, region, delta, n_samples = 200, seed = 0,
                          boundary_probes = None, tol = 1e-7, samples = 16,
                          log = None):
    '''Check that minimizing segments between nearby points of the
    complement of U stay out of U.

    Random pairs are drawn in the complement; boundary probes join two points
    of the boundary about `delta` apart along the level set.  delta may
    not exceed the declared rho.'''
    if not 0 < delta <= region.rho:
        raise PreconditionError('audit_delta_convexity', 'audit distance %g '
                                'must lie in (0, rho = %g]', delta, region.rho)

    rng = np.random.default_rng(seed)
    if boundary_probes is None: boundary_probes = n_samples // 2

    P, Q = _random_pairs(m, region, delta, n_samples, rng)
    kinds = ['random'] * len(P)

    if boundary_probes:
        bp, bq = _boundary_pairs(m, region, delta, boundary_probes, rng)
        P = np.concatenate([P, bp])
        Q = np.concatenate([Q, bq])
        kinds += ['boundary'] * len(bp)

    violations = []
    checked = 0

    if len(P):
        try:
            V = m.log(P, Q, op = 'audit_delta_convexity')
            ok = np.ones(len(P), dtype = bool)
        except NoUniqueGeodesic:
            V, ok = _log_each(m, P, Q)

        X = m.midpoint_samples(P[ok], V[ok], samples)
        d = region.signed_distance(X).min(axis = 0)
        checked = int(ok.sum())

        for i, depth in zip(np.nonzero(ok)[0], d):
            if depth < -tol:
                violations.append(dict(p = P[i].tolist(), q = Q[i].tolist(),
                                       depth = float(-depth), kind = kinds[i]))

    report = dict(passed = not violations, delta = delta, checked = checked,
                  random = kinds.count('random'),
                  boundary = kinds.count('boundary'),
                  violations = violations[:32],
                  violation_count = len(violations))

    if log is not None:
        log.info('Convexity audit %s' % util.log_json(dict(
            passed = report['passed'], checked = checked,
            violations = len(violations))))

    return report


def _log_each(m, P, Q):
    V = np.zeros_like(P)
    ok = np.zeros(len(P), dtype = bool)

    for i in range(len(P)):
        try:
            V[i] = m.log(P[i:i + 1], Q[i:i + 1])[0]
            ok[i] = True
        except NoUniqueGeodesic: pass

    return V, ok


def _chart_uniform(m, rng, n):
    lo, hi = m.lower, m.upper
    return lo + rng.random((n, m.dim)) * (hi - lo)


def _random_direction(m, P, rng, length):
    V = rng.normal(size = P.shape)
    norm = m.norm(P, V)
    return V * (length / np.maximum(norm, 1e-300))[:, None]


def _random_pairs(m, region, delta, n, rng):
    P = _chart_uniform(m, rng, 8 * n + 64)
    P = P[region.signed_distance(P) >= 0][:n]
    if not len(P): return P, P

    length = delta * np.sqrt(rng.random(len(P)))
    Q = m.exp(P, _random_direction(m, P, rng, length))
    keep = (region.signed_distance(Q) >= 0) & m.inside(Q)

    return P[keep], Q[keep]


def _boundary_pairs(m, region, delta, n, rng):
    w = region.collar_width
    P = _chart_uniform(m, rng, 32 * n + 64)
    P = P[np.abs(region.signed_distance(P)) < w][:n]
    if not len(P): return P, P

    P = region.move_to_level(P, 0.0)

    # Step along the level set, then settle back onto it
    grad = region.gradient(P)
    T = np.stack([-grad[:, 1], grad[:, 0]], axis = 1)
    norm = m.norm(P, T)
    ok = 1e-12 < norm
    P, T, norm = P[ok], T[ok], norm[ok]
    Q = m.exp(P, T * (0.9 * delta / norm)[:, None])
    Q = region.move_to_level(Q, 0.0)

    d = region.signed_distance
    keep = (np.abs(d(P)) < 1e-8) & (np.abs(d(Q)) < 1e-8) & m.inside(Q)
    return P[keep], Q[keep]


# Region catalogue
def _arc_length(m, profile):
    '''Meridian arc length s(z) from z = 0 on a surface of revolution.'''
    if profile == 'cosh': return np.sinh

    z = np.linspace(m.lower[0], m.upper[0], 4001)
    P = np.stack([z, np.zeros_like(z)], axis = 1)
    speed = np.sqrt(m.metric_at(P)[:, 0, 0])
    s = cumulative_trapezoid(speed, z, initial = 0)
    s -= np.interp(0.0, z, s)

    return lambda Z: np.interp(Z, z, s)


def band(m, center = 0.0, half_width = 0.5, **kwargs):
    '''U = {|z - center| < half_width} on a surface of revolution.'''
    if m.name != 'revolution':
        raise ConfigError('region', 'band regions need a surface of revolution')
    if half_width <= 0:
        raise ConfigError('region', 'half-width must be positive')

    s = _arc_length(m, m.params.get('profile'))
    lo, hi = s(center - half_width), s(center + half_width)

    def distance(P):
        S = s(P[:, 0])
        return np.maximum(lo - S, S - hi)

    return ConcaveRegion(m, 'band', distance, params = dict(
        center = center, half_width = half_width), **kwargs)


def cap(m, theta0 = 0.5, side = 'north', **kwargs):
    '''Polar cap {theta < theta0} (north) or {theta > theta0} (south) on a
    round sphere.'''
    if m.name != 'sphere': raise ConfigError('region', 'caps need a sphere')
    if side not in ('north', 'south'):
        raise ConfigError('region', 'cap side must be north or south')

    a = m.params['radius']
    sign = 1 if side == 'north' else -1

    def distance(P): return sign * a * (P[:, 0] - theta0)

    return ConcaveRegion(m, 'cap', distance, params = dict(
        theta0 = theta0, side = side), **kwargs)


def _ball_distance(m, center):
    c = np.asarray(center, dtype = float)

    def dist(P):
        C = np.broadcast_to(c, P.shape)
        return m.norm(C, m.diff(C, P))

    return dist


def ball(m, center = (0.5, 0.5), radius = 0.2, **kwargs):
    '''Chart ball of a flat torus.'''
    if m.name != 'flat_torus':
        raise ConfigError('region', 'balls need a flat torus')
    dist = _ball_distance(m, center)

    return ConcaveRegion(m, 'ball', lambda P: dist(P) - radius, params = dict(
        center = list(center), radius = radius), **kwargs)


def complement_ball(m, center = (0.5, 0.5), radius = 0.2, **kwargs):
    if m.name != 'flat_torus':
        raise ConfigError('region', 'balls need a flat torus')
    dist = _ball_distance(m, center)

    return ConcaveRegion(m, 'complement-ball', lambda P: radius - dist(P),
                         params = dict(center = list(center), radius = radius),
                         **kwargs)


def _shape(m, shape):
    kind = shape.get('kind', 'disk')

    if kind == 'disk':
        c = np.asarray(shape.get('center', [0.5, 0.5]), dtype = float)
        r = float(shape.get('radius', 0.2))
        return lambda P: (m.diff(np.broadcast_to(c, P.shape), P) ** 2).sum(
            axis = 1) < r * r

    if kind == 'box':
        lo = np.asarray(shape['lower'], dtype = float)
        hi = np.asarray(shape['upper'], dtype = float)
        return lambda P: np.all((lo < P) & (P < hi), axis = 1)

    if kind == 'band':
        axis = int(shape.get('axis', 0))
        c = float(shape.get('center', 0))
        h = float(shape.get('half-width', 0.5))
        return lambda P: np.abs(P[:, axis] - c) < h

    raise ConfigError('region', 'unknown grid shape "%s"', kind)


_stencil = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)]


def grid_region(m, shape = None, resolution = 512, **kwargs):
    '''Region from a chart shape with the signed distance computed on a grid
    by a 16-neighbour metric-weighted Dijkstra sweep.'''
    inside_fn = _shape(m, shape or {})
    res = int(resolution)
    if res < 8: raise ConfigError('region', 'grid resolution too small')

    axes = []
    for k in range(m.dim):
        if m.periods[k] is not None:
            axes.append(m.lower[k] + np.arange(res) * m.periods[k] / res)
        else: axes.append(np.linspace(m.lower[k], m.upper[k], res))

    X, Y = np.meshgrid(axes[0], axes[1], indexing = 'ij')
    nodes = np.stack([X.ravel(), Y.ravel()], axis = 1)
    inside = np.asarray(inside_fn(nodes), dtype = bool)
    N = len(nodes)
    I, J = np.divmod(np.arange(N), res)

    rows, cols, weights = [], [], []
    source = np.full(N, np.inf)
    step = np.array([axes[0][1] - axes[0][0], axes[1][1] - axes[1][0]])

    for a, b in _stencil:
        i2, j2 = I + a, J + b
        ok = np.ones(N, dtype = bool)
        for k, idx in ((0, i2), (1, j2)):
            if m.periods[k] is None: ok &= (0 <= idx) & (idx < res)
        i2, j2 = i2 % res, j2 % res

        u = np.arange(N)[ok]
        v = (i2 * res + j2)[ok]
        D = np.array([a, b]) * step
        mid = nodes[u] + 0.5 * D
        w = m.norm(mid, np.broadcast_to(D, mid.shape))

        rows.append(u)
        cols.append(v)
        weights.append(w)

        cross = inside[u] != inside[v]
        np.minimum.at(source, u[cross], 0.5 * w[cross])
        np.minimum.at(source, v[cross], 0.5 * w[cross])

    # A virtual node joined to both sides of every crossing edge
    seeded = np.nonzero(np.isfinite(source))[0]
    if not len(seeded):
        raise ConfigError('region', 'grid shape has no boundary on the chart')

    rows.append(np.full(len(seeded), N))
    cols.append(seeded)
    weights.append(source[seeded])

    graph = coo_matrix((np.concatenate(weights),
                        (np.concatenate(rows), np.concatenate(cols))),
                       shape = (N + 1, N + 1)).tocsr()
    dist = dijkstra(graph, directed = False, indices = N)[:N]
    field = np.where(inside, -dist, dist).reshape(res, res)

    # Close periodic axes for interpolation
    grid = list(axes)
    for k in range(m.dim):
        if m.periods[k] is not None:
            grid[k] = np.append(axes[k], m.lower[k] + m.periods[k])
            field = np.concatenate([field, np.take(field, [0], axis = k)],
                                   axis = k)

    interp = RegularGridInterpolator(grid, field, bounds_error = False,
                                     fill_value = None)
    cell = m.norm(nodes, np.broadcast_to(step, nodes.shape)).max()

    return ConcaveRegion(m, 'grid', lambda P: interp(P), params = dict(
        shape = shape or {}, resolution = res), cell = float(cell), **kwargs)


_builders = {
    'band': band,
    'cap': cap,
    'ball': ball,
    'complement-ball': complement_ball,
    'grid': grid_region,
}


def make_region(m, spec):
    '''Build a region from a config map: `kind`, shape parameters and the
    collar constants rho, eta, theta, alpha and closure-margin.'''
    spec = {str(k).replace('-', '_'): v for k, v in dict(spec).items()}
    kind = spec.pop('kind', None)
    if kind not in _builders:
        raise ConfigError('region', 'unknown region kind "%s"', kind)

    for k in list(spec):
        if spec[k] is None: del spec[k]

    missing = [k for k in ('rho', 'eta') if k not in spec]
    if missing:
        raise ConfigError('region', '%s region needs %s in region.params',
                          kind, ' and '.join(missing))

    try:
        return _builders[kind](m, **spec)
    except TypeError as e:
        raise ConfigError('region', 'bad parameters for %s: %s', kind, e)
