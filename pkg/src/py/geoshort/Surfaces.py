################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import math

import numpy as np
import sympy
from scipy.interpolate import CubicSpline

from .Manifold import ChartManifold
from .Metric import SymbolicMetric, NumericMetric
from .Errors import ConfigError

__all__ = ['sphere', 'flat_torus', 'revolution', 'ellipsoid',
           'perturbed_torus', 'make', 'list_manifolds', 'registry']


class FlatGeodesics(object):
    '''Straight lines in a constant metric.'''

    def __init__(self, manifold): self.manifold = manifold
    def exp(self, P, V, t): return P + t * V
    def log(self, P, Q): return self.manifold.diff(P, Q)


class SphereGeodesics(object):
    '''Great circles in colatitude/longitude, computed in the embedding.'''

    def __init__(self, radius): self.radius = radius


    @staticmethod
    def frame(P):
        th, ph = P[:, 0], P[:, 1]
        st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
        x = np.stack([st * cp, st * sp, ct], axis = 1)
        e_th = np.stack([ct * cp, ct * sp, -st], axis = 1)
        e_ph = np.stack([-sp, cp, np.zeros_like(sp)], axis = 1)
        return x, e_th, e_ph, st


    @staticmethod
    def chart(X):
        th = np.arccos(np.clip(X[:, 2], -1, 1))
        ph = np.mod(np.arctan2(X[:, 1], X[:, 0]), 2 * math.pi)
        return np.stack([th, ph], axis = 1)


    def exp(self, P, V, t):
        x, e_th, e_ph, st = self.frame(P)
        w = V[:, :1] * e_th + (V[:, 1] * st)[:, None] * e_ph
        speed = np.sqrt((w * w).sum(axis = 1))
        a = speed * t

        u = np.zeros_like(w)
        moving = 0 < speed
        u[moving] = w[moving] / speed[moving, None]

        Y = np.cos(a)[:, None] * x + np.sin(a)[:, None] * u
        out = self.chart(Y)
        out[~moving] = P[~moving]
        return out


    def log(self, P, Q):
        x, e_th, e_ph, st = self.frame(P)
        y = self.frame(Q)[0]

        c = (x * y).sum(axis = 1)
        s = np.sqrt((np.cross(x, y) ** 2).sum(axis = 1))
        angle = np.arctan2(s, c)

        V = np.zeros_like(P)
        apart = 1e-15 < angle
        if not apart.any(): return V

        u = y[apart] - c[apart, None] * x[apart]
        n = np.sqrt((u * u).sum(axis = 1))

        with np.errstate(divide = 'ignore', invalid = 'ignore'):
            w = angle[apart, None] * u / n[:, None]
            V[apart, 0] = (w * e_th[apart]).sum(axis = 1)
            V[apart, 1] = (w * e_ph[apart]).sum(axis = 1) / st[apart]

        return V


def _options(opts):
    keys = 'step arc_step safety max_newton newton_tol'.split()
    unknown = set(opts) - set(keys)
    if unknown:
        raise ConfigError('make_manifold', 'unknown manifold option %s',
                          sorted(unknown)[0])
    return opts


def sphere(radius = 1.0, **opts):
    if radius <= 0: raise ConfigError('sphere', 'radius must be positive')

    th, ph = sympy.symbols('theta phi', real = True)
    metric = SymbolicMetric(
        [th, ph], [[radius ** 2, 0], [0, radius ** 2 * sympy.sin(th) ** 2]])

    return ChartManifold(
        'sphere', metric, [0, 0], [math.pi, 2 * math.pi],
        periods = [None, 2 * math.pi], curvature_bound = 1 / radius ** 2,
        injectivity_floor = math.pi * radius,
        geodesics = SphereGeodesics(radius), params = dict(radius = radius),
        **_options(opts))


def flat_torus(periods = (1.0, 1.0), **opts):
    periods = [float(p) for p in periods]
    if len(periods) != 2 or min(periods) <= 0:
        raise ConfigError('flat_torus', 'need two positive periods')

    x, y = sympy.symbols('x y', real = True)
    metric = SymbolicMetric([x, y], sympy.eye(2))

    m = ChartManifold(
        'flat_torus', metric, [0, 0], periods, periods = periods,
        curvature_bound = 0, injectivity_floor = min(periods) / 2,
        params = dict(periods = periods), **_options(opts))
    m.geodesics = FlatGeodesics(m)

    return m


def _profile(profile, coefficients, nodes, values):
    z = sympy.Symbol('z', real = True)

    if profile == 'cosh': return z, sympy.cosh(z)

    if profile == 'polynomial':
        if not coefficients:
            raise ConfigError('revolution', 'polynomial profile needs '
                              'coefficients')
        return z, sum(sympy.Float(c) * z ** i
                      for i, c in enumerate(coefficients))

    if profile == 'spline':
        if nodes is None or values is None or len(nodes) != len(values) \
                or len(nodes) < 4:
            raise ConfigError('revolution', 'spline profile needs at least 4 '
                              'matching nodes and values')
        return z, CubicSpline(nodes, values)

    raise ConfigError('revolution', 'unknown profile "%s"', profile)


def revolution(profile = 'cosh', coefficients = None, nodes = None,
               values = None, z_range = 3.0, curvature_bound = None,
               injectivity = None, **opts):
    '''Surface of revolution with radius profile r(z) in chart (z, phi).

    The metric is diag(1 + r'(z)^2, r(z)^2).'''
    z, r = _profile(profile, coefficients, nodes, values)
    phi = sympy.Symbol('phi', real = True)

    if profile == 'spline':
        dr = r.derivative()
        lo, hi = float(r.x[0]), float(r.x[-1])
        z_range = min(z_range, -lo, hi)

        def fn(P):
            Z = P[..., 0]
            g = np.zeros(P.shape[:-1] + (2, 2))
            g[..., 0, 0] = 1 + dr(Z) ** 2
            g[..., 1, 1] = r(Z) ** 2
            return g

        metric = NumericMetric(fn, 2)
        samples = r(np.linspace(-z_range, z_range, 1001))

    else:
        metric = SymbolicMetric(
            [z, phi], [[1 + sympy.diff(r, z) ** 2, 0], [0, r ** 2]])
        rf = sympy.lambdify(z, r, 'numpy')
        samples = rf(np.linspace(-z_range, z_range, 1001))

    if np.min(samples) <= 0:
        raise ConfigError('revolution', 'profile must stay positive on the '
                          'chart')

    # Catenoid: K = -1/cosh^4 z and the waist has length 2 pi
    if curvature_bound is None: curvature_bound = 0 if profile == 'cosh' else 1
    if injectivity is None:
        injectivity = math.pi if profile == 'cosh' else \
            math.pi * float(np.min(samples))

    params = dict(profile = profile, z_range = z_range)
    if coefficients is not None: params['coefficients'] = list(coefficients)
    if nodes is not None:
        params.update(nodes = list(nodes), values = list(values))

    return ChartManifold(
        'revolution', metric, [-z_range, 0], [z_range, 2 * math.pi],
        periods = [None, 2 * math.pi], curvature_bound = curvature_bound,
        injectivity_floor = injectivity, params = params, **_options(opts))


def ellipsoid(a = 1.0, b = 1.0, c = 1.2, **opts):
    if min(a, b, c) <= 0:
        raise ConfigError('ellipsoid', 'semi-axes must be positive')

    th, ph = sympy.symbols('theta phi', real = True)
    X = sympy.Matrix([a * sympy.sin(th) * sympy.cos(ph),
                      b * sympy.sin(th) * sympy.sin(ph),
                      c * sympy.cos(th)])
    J = X.jacobian([th, ph])
    metric = SymbolicMetric([th, ph], sympy.simplify(J.T * J),
                            simplify = False)

    # Gauss curvature of an ellipsoid is at most max^2 / min^4
    kmax = max(a, b, c) ** 2 / min(a, b, c) ** 4

    return ChartManifold(
        'ellipsoid', metric, [0, 0], [math.pi, 2 * math.pi],
        periods = [None, 2 * math.pi], curvature_bound = kmax,
        injectivity_floor = math.pi / math.sqrt(kmax),
        params = dict(a = a, b = b, c = c), **_options(opts))


def perturbed_torus(amplitude = 0.2, center = (0.5, 0.5), width = 0.2,
                    periods = (1.0, 1.0), **opts):
    '''Flat torus with a conformal periodic bump f = 1 + A exp(-s / w^2).'''
    periods = [float(p) for p in periods]
    if amplitude <= -1 or width <= 0:
        raise ConfigError('perturbed_torus', 'need amplitude > -1 and '
                          'positive width')

    x, y = sympy.symbols('x y', real = True)
    s = (sympy.sin(sympy.pi * (x - center[0]) / periods[0]) ** 2 +
         sympy.sin(sympy.pi * (y - center[1]) / periods[1]) ** 2)
    f = 1 + amplitude * sympy.exp(-s / width ** 2)
    metric = SymbolicMetric([x, y], f * sympy.eye(2))

    # K = -lap(log f) / (2 f), sampled on the fundamental domain
    K = -(sympy.diff(sympy.log(f), x, 2) +
          sympy.diff(sympy.log(f), y, 2)) / (2 * f)
    Kf = sympy.lambdify([x, y], K, 'numpy')
    ff = sympy.lambdify([x, y], f, 'numpy')
    X, Y = np.meshgrid(np.linspace(0, periods[0], 201),
                       np.linspace(0, periods[1], 201))
    kmax = max(0.0, float(np.max(Kf(X, Y)))) * 1.1
    fmin = float(np.min(ff(X, Y)))

    return ChartManifold(
        'perturbed_torus', metric, [0, 0], periods, periods = periods,
        curvature_bound = kmax,
        injectivity_floor = min(periods) * math.sqrt(fmin) / 2,
        params = dict(amplitude = amplitude, center = list(center),
                      width = width, periods = periods), **_options(opts))


registry = {
    'sphere': sphere,
    'flat_torus': flat_torus,
    'revolution': revolution,
    'ellipsoid': ellipsoid,
    'perturbed_torus': perturbed_torus,
}


def make(name, params = None, **opts):
    '''Build a registered manifold from a parameter map with hyphenated or
    underscored keys.'''
    if name not in registry:
        raise ConfigError('make_manifold', 'unknown manifold "%s"', name)

    kwargs = {str(k).replace('-', '_'): v for k, v in (params or {}).items()}
    kwargs.update({k: v for k, v in opts.items() if v is not None})

    try:
        return registry[name](**kwargs)
    except TypeError as e:
        raise ConfigError('make_manifold', 'bad parameters for %s: %s', name, e)


def list_manifolds():
    import inspect

    out = []
    for name, fn in sorted(registry.items()):
        sig = inspect.signature(fn)
        defaults = {k.replace('_', '-'): p.default
                    for k, p in sig.parameters.items()
                    if p.default is not inspect.Parameter.empty}
        doc = (fn.__doc__ or '').strip().split('\n')[0]
        out.append(dict(name = name, params = defaults, help = doc))

    return out
