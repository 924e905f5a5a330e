################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import math

import numpy as np

from .Errors import RefinementNeeded, ResampleNeeded, NoUniqueGeodesic

__all__ = ['DiscreteLoop', 'LoopMeasure', 'loop_length', 'loop_energy',
           'discretize', 'restricted_length', 'loop_metric', 'loop_gap',
           'measure_continuity_gap', 'latitude', 'parallel', 'torus_line',
           'zigzag', 'torus_circle', 'polygon']


class DiscreteLoop(object):
    '''Closed piecewise-geodesic loop through cyclically ordered breakpoints.

    Segment i runs from b_i to b_{i+1 mod n}; its initial velocity (over unit
    parameter) and length are computed once and cached.
    '''

    def __init__(self, manifold, points, velocities = None, op = 'loop'):
        self.manifold = manifold
        P = manifold.wrap(np.asarray(points, dtype = float))

        if P.ndim != 2 or P.shape[1] != manifold.dim or len(P) < 2:
            raise ValueError('Need at least two %d-dimensional breakpoints'
                             % manifold.dim)

        if velocities is None:
            velocities = manifold.log(P, np.roll(P, -1, axis = 0), op = op)

        self.points = P
        self.velocities = np.array(velocities, dtype = float)
        self.lengths = manifold.norm(P, self.velocities)

        self.points.flags.writeable = False
        self.velocities.flags.writeable = False
        self.lengths.flags.writeable = False


    def __len__(self): return len(self.points)
    def __repr__(self): return 'DiscreteLoop(n=%d, length=%.6g)' % (
            len(self), self.length)


    @property
    def length(self): return float(self.lengths.sum())


    @property
    def energy(self): return float(len(self) * (self.lengths ** 2).sum())


    def with_points(self, P, op = 'loop'):
        return DiscreteLoop(self.manifold, P, op = op)


    def rotated(self, k):
        P = np.roll(self.points, -k, axis = 0)
        V = np.roll(self.velocities, -k, axis = 0)
        return DiscreteLoop(self.manifold, P, V)


    def segment_samples(self, k):
        '''Points at parameters (j + 1/2) / k on every segment, shape (k, n,
        dim).'''
        return self.manifold.midpoint_samples(self.points, self.velocities, k)


    def image(self, k = 4):
        '''Breakpoints plus k interior samples per segment.'''
        S = self.segment_samples(k).reshape(-1, self.manifold.dim)
        return np.concatenate([self.points, S])


    def is_point(self, threshold): return self.length < threshold


    def bbox(self):
        P = self.points
        return P.min(axis = 0), P.max(axis = 0)


    def to_json(self):
        return dict(n = len(self), length = self.length,
                    points = self.points.tolist())


def loop_length(loop): return loop.length
def loop_energy(loop): return loop.energy


def discretize(m, samples, rho = None, op = 'discretize'):
    '''Geodesic interpolation through `samples`, checking the spacing bound
    min(rho / 2, conv / 2) between cyclically consecutive samples.'''
    P = m.wrap(np.asarray(samples, dtype = float))
    bound = m.conv_bound() / 2
    if rho is not None: bound = min(bound, rho / 2)

    Q = np.roll(P, -1, axis = 0)
    try:
        V = m.log(P, Q, op = op)
    except NoUniqueGeodesic:
        # Locate the first pair the solver cannot join
        for i in range(len(P)):
            try:
                m.log(P[i:i + 1], Q[i:i + 1], op = op)
            except NoUniqueGeodesic:
                raise RefinementNeeded(op, i, 'samples cannot be joined')
        raise

    d = m.norm(P, V)
    far = np.nonzero(bound < d)[0]
    if len(far):
        raise RefinementNeeded(op, int(far[0]), 'spacing %.6g exceeds %.6g'
                               % (d[far[0]], bound))

    return DiscreteLoop(m, P, V)


class LoopMeasure(object):
    '''The length measure of a loop pushed forward to the manifold.

    Each segment carries a composite midpoint rule with `nodes` points;
    segments along which a queried indicator changes value are refined
    `levels` times by bisection.
    '''

    def __init__(self, loop, nodes = 32, levels = 3):
        self.loop = loop
        self.nodes = nodes
        self.levels = levels
        self._cache = {}


    def quadrature(self, k):
        '''Nodes (k, n, dim) and weights (k, n) for a k-point rule on every
        segment.'''
        if k not in self._cache:
            X = self.loop.segment_samples(k)
            W = np.broadcast_to(self.loop.lengths / k, X.shape[:2])
            self._cache[k] = X, W
        return self._cache[k]


    def total(self): return self.loop.length


    def integrate(self, fn, k = None):
        X, W = self.quadrature(k or self.nodes)
        n, d = X.shape[:2], X.shape[2]
        values = np.asarray(fn(X.reshape(-1, d)), dtype = float).reshape(n)
        return float((W * values).sum())


    def measure(self, indicator):
        '''Restricted length of the loop inside the set given by
        `indicator`.'''
        X, W = self.quadrature(self.nodes)
        d = X.shape[2]
        inside = np.asarray(indicator(X.reshape(-1, d)), dtype = bool)
        inside = inside.reshape(X.shape[:2])

        # Segments whose samples disagree straddle the boundary
        mixed = inside.any(axis = 0) & ~inside.all(axis = 0)
        per_segment = (W * inside).sum(axis = 0)

        if mixed.any():
            k = self.nodes << self.levels
            Xf, Wf = self.quadrature(k)
            fine = np.asarray(indicator(Xf[:, mixed].reshape(-1, d)),
                              dtype = bool).reshape(k, -1)
            per_segment[mixed] = (Wf[:, mixed] * fine).sum(axis = 0)

        return float(per_segment.sum())


def restricted_length(loop, indicator, measure = None):
    if measure is None: measure = LoopMeasure(loop)
    return measure.measure(indicator)


def _chart_proxy(m, P, Q):
    n = len(P)
    best, offset = math.inf, 0

    for k in range(n):
        D = m.diff(P, np.roll(Q, -k, axis = 0))
        cost = float((D * D).sum())
        if cost < best: best, offset = cost, k

    return offset


def loop_gap(a, b, offset = None):
    '''Components of the loop metric: cyclic offset, sup distance at matched
    breakpoints and the L2 gap of segment velocities.'''
    if len(a) != len(b):
        raise ResampleNeeded('loop_metric', 'breakpoint counts %d and %d '
                             'differ', len(a), len(b))

    m = a.manifold
    if offset is None: offset = _chart_proxy(m, a.points, b.points)

    Q = np.roll(b.points, -offset, axis = 0)
    W = np.roll(b.velocities, -offset, axis = 0)

    dV = a.velocities - W
    sup = float(np.max(m.distance(a.points, Q, horizon = math.inf,
                                  op = 'loop_metric')))
    sq = 0.5 * (m.inner(a.points, dV, dV) + m.inner(Q, dV, dV))
    velocity = math.sqrt(len(a) * float(np.sum(sq)))

    return offset, sup, velocity


def loop_metric(a, b):
    '''Pseudometric on equal-size loops: min over cyclic offsets (chosen by a
    chart proxy) of the sup breakpoint distance plus the velocity L2 gap.'''
    offset, sup, velocity = loop_gap(a, b)
    return sup + velocity


def measure_continuity_gap(limit, loop, phi, lipschitz = None, nodes = 32,
                           slack = 1e-6):
    '''Compare the integrals of `phi` against the length measures of two
    aligned loops with the bound eps * l(limit) + delta * |phi|.'''
    offset, sup, velocity = loop_gap(limit, loop)
    loop = loop.rotated(offset)
    n = len(limit)

    X, W = LoopMeasure(limit, nodes).quadrature(nodes)
    Y, Z = LoopMeasure(loop, nodes).quadrature(nodes)
    d = X.shape[2]

    a = np.asarray(phi(X.reshape(-1, d)), dtype = float)
    b = np.asarray(phi(Y.reshape(-1, d)), dtype = float)

    lhs = abs(float((W.reshape(-1) * a).sum() - (Z.reshape(-1) * b).sum()))

    eps = float(np.max(np.abs(a - b)))
    sup_norm = float(max(np.max(np.abs(a)), np.max(np.abs(b))))
    dl = limit.lengths - loop.lengths
    delta = math.sqrt(n * float((dl * dl).sum()))
    rhs = eps * limit.length + delta * sup_norm

    report = dict(lhs = lhs, rhs = rhs, epsilon = eps, delta = delta,
                  sup_norm = sup_norm, sup_distance = sup,
                  velocity_gap = velocity, slack = slack,
                  holds = lhs <= rhs + slack)

    if lipschitz is not None:
        report['epsilon_lipschitz'] = lipschitz * sup

    return report


# Loop generators
def _circle(n): return 2 * math.pi * np.arange(n) / n


def latitude(m, theta, n):
    '''Latitude circle at colatitude theta; a pole gives a constant loop.'''
    if theta <= 0 or math.pi <= theta:
        pole = 0.0 if theta <= 0 else math.pi
        return DiscreteLoop(m, np.tile([pole, 0.0], (n, 1)))

    return DiscreteLoop(m, np.stack([np.full(n, theta), _circle(n)], axis = 1))


def parallel(m, z, n):
    return DiscreteLoop(m, np.stack([np.full(n, z), _circle(n)], axis = 1))


def torus_line(m, n, direction = (1, 0), offset = (0.0, 0.0)):
    '''Straight closed loop on a flat torus in homology class `direction`.'''
    per = np.array(m.periods, dtype = float)
    t = np.arange(n)[:, None] / n
    P = np.asarray(offset, dtype = float) + t * np.asarray(direction) * per
    return DiscreteLoop(m, P)


def zigzag(m, n, amplitude, y = 0.0):
    '''Class (1, 0) loop with odd breakpoints lifted by `amplitude`.'''
    x = np.arange(n) * m.periods[0] / n
    h = np.where(np.arange(n) % 2, amplitude, 0.0) + y
    return DiscreteLoop(m, np.stack([x, h], axis = 1))


def torus_circle(m, n, center, radius):
    if radius <= 0: return DiscreteLoop(m, np.tile(center, (n, 1)))
    t = _circle(n)
    P = np.asarray(center) + radius * np.stack([np.cos(t), np.sin(t)], axis = 1)
    return DiscreteLoop(m, P)


def polygon(m, points): return DiscreteLoop(m, points)
