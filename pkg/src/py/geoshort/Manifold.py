################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import math
import itertools

import numpy as np

from .Errors import DomainError, EscapeError, NoUniqueGeodesic, HorizonError

__all__ = ['ChartManifold', 'TangentVector', 'GeodesicSegment', 'christoffel',
           'exp_map', 'log_map', 'distance', 'minimizing_segment',
           'conv_bound']


def _rows(P):
    P = np.asarray(P, dtype = float)
    return P.reshape(-1, P.shape[-1]) if P.ndim != 2 else P


class TangentVector(object):
    def __init__(self, base, components):
        self.base = np.asarray(base, dtype = float)
        self.components = np.asarray(components, dtype = float)


    def norm(self, m): return float(m.norm(self.base, self.components))
    def scaled(self, f): return TangentVector(self.base, f * self.components)


    def to_json(self):
        return dict(base = self.base.tolist(),
                    components = self.components.tolist())


class GeodesicSegment(object):
    def __init__(self, manifold, start, end, velocity, length, knots = None):
        self.manifold = manifold
        self.start = np.asarray(start, dtype = float)
        self.end = np.asarray(end, dtype = float)
        self.initial_velocity = velocity
        self.length = float(length)
        self.knots = knots


    def at(self, t):
        v = self.initial_velocity.components
        return self.manifold.exp(self.start[None], v[None], t)[0]


    def midpoint(self): return self.at(0.5)


class ChartManifold(object):
    '''A Riemannian metric on a single chart box with optional periodic axes.

    All geometry methods are batched: points and vectors are arrays of shape
    (N, dim). Closed-form geodesics, when registered, replace the geodesic
    ODE integrator and the shooting solver.
    '''

    def __init__(self, name, metric, lower, upper, periods = None,
                 curvature_bound = 0.0, injectivity_floor = math.inf,
                 geodesics = None, step = 1e-3, arc_step = None, safety = 0.9,
                 max_newton = 50, newton_tol = 1e-9, params = None):
        self.name = name
        self.metric = metric
        self.dim = len(lower)
        self.lower = np.asarray(lower, dtype = float)
        self.upper = np.asarray(upper, dtype = float)
        if periods is None: periods = [None] * self.dim
        self.periods = list(periods)
        self.curvature_bound = float(curvature_bound)
        self.injectivity_floor = float(injectivity_floor)
        self.geodesics = geodesics
        self.step = float(step)
        self.arc_step = arc_step
        self.safety = float(safety)
        self.max_newton = int(max_newton)
        self.newton_tol = float(newton_tol)
        self.params = dict(params or {})

        self._periodic = np.array([p is not None for p in self.periods])
        self._period = np.array([p if p is not None else 0.0
                                 for p in self.periods])

        # Offsets to the 3^k nearest periodic images
        axes = [(-1, 0, 1) if p is not None else (0,) for p in self.periods]
        self._offsets = np.array(list(itertools.product(*axes)),
                                 dtype = float) * self._period


    def __repr__(self): return 'ChartManifold(%s)' % self.name
    def is_exact(self): return self.geodesics is not None


    def describe(self):
        return dict(name = self.name, dim = self.dim, params = self.params,
                    lower = self.lower.tolist(), upper = self.upper.tolist(),
                    periods = self.periods,
                    curvature_bound = self.curvature_bound,
                    injectivity_floor = self.injectivity_floor,
                    exact = self.is_exact(), conv_bound = self.conv_bound())


    # Chart bookkeeping
    def wrap(self, P):
        P = np.array(P, dtype = float)
        if not self._periodic.any(): return P

        lo = self.lower[self._periodic]
        per = self._period[self._periodic]
        P[..., self._periodic] = lo + np.mod(P[..., self._periodic] - lo, per)
        return P


    def inside(self, P, tol = 1e-9):
        P = np.asarray(P, dtype = float)
        ok = (self.lower - tol <= P) & (P <= self.upper + tol)
        ok |= self._periodic
        return ok.all(axis = -1)


    def check_domain(self, P, op):
        if not np.all(np.isfinite(P)):
            raise DomainError(op, 'non-finite chart point')

        inside = self.inside(P)
        if not np.all(inside):
            bad = np.asarray(P).reshape(-1, self.dim)[
                ~np.asarray(inside).reshape(-1)][0]
            raise DomainError(op, 'point %s outside the chart domain',
                              np.round(bad, 6).tolist())


    def diff(self, P, Q):
        '''Chart difference Q - P using the periodic image of least metric
        norm at P.'''
        P = np.asarray(P, dtype = float)
        Q = np.asarray(Q, dtype = float)
        D = Q - P
        if not self._periodic.any(): return D

        per = self._period[self._periodic]
        D[..., self._periodic] -= per * np.round(D[..., self._periodic] / per)

        cands = D[..., None, :] + self._offsets
        g = self.metric_at(P)
        norms = np.einsum('...mi,...ij,...mj->...m', cands, g, cands)

        # Where g degenerates (poles) ties go to the smallest chart offset
        norms = norms + 1e-12 * np.einsum('...mi,...mi->...m', cands, cands)
        best = np.argmin(norms, axis = -1)
        return np.take_along_axis(cands, best[..., None, None], -2)[..., 0, :]


    # Metric
    def metric_at(self, P): return self.metric(np.asarray(P, dtype = float))


    def inner(self, P, U, V):
        return np.einsum('...i,...ij,...j->...', U, self.metric_at(P), V)


    def norm(self, P, V):
        return np.sqrt(np.maximum(self.inner(P, V, V), 0.0))


    def christoffel(self, P, check = True):
        if check: self.check_domain(P, 'christoffel')
        return self.metric.christoffel(np.asarray(P, dtype = float))


    def conv_bound(self):
        inj = self.injectivity_floor / 2
        if 0 < self.curvature_bound:
            inj = min(inj, math.pi / (2 * math.sqrt(self.curvature_bound)))
        return inj * self.safety


    # Geodesic ODE
    def _steps(self, P, V, t):
        n = max(2, int(math.ceil(abs(t) / self.step - 1e-9)))

        if self.arc_step is not None and len(P):
            speed = float(np.max(self.norm(P, V))) * abs(t)
            n = min(n, max(8, int(math.ceil(speed / self.arc_step))))

        return n + n % 2


    def _accel(self, X, V):
        G = self.metric.christoffel(X)
        return -np.einsum('...kij,...i,...j->...k', G, V, V)


    def trajectory(self, P, V, t = 1.0, op = 'exp_map', n = None, keep = True):
        '''Integrate the geodesic ODE with fixed-step RK4.

        Returns unwrapped positions and velocities at every step, each of
        shape (n + 1, N, dim), or only the final pair when `keep` is false.'''
        X = np.array(_rows(P), dtype = float)
        V = np.array(_rows(V), dtype = float)
        if n is None: n = self._steps(X, V, t)
        h = t / n

        xs = [X]
        vs = [V]
        bounded = ~self._periodic

        for k in range(n):
            a1 = self._accel(X, V)
            x2, v2 = X + 0.5 * h * V, V + 0.5 * h * a1
            a2 = self._accel(x2, v2)
            x3, v3 = X + 0.5 * h * v2, V + 0.5 * h * a2
            a3 = self._accel(x3, v3)
            x4, v4 = X + h * v3, V + h * a3
            a4 = self._accel(x4, v4)

            X = X + h / 6 * (V + 2 * v2 + 2 * v3 + v4)
            V = V + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)

            if bounded.any():
                out = ((X[:, bounded] < self.lower[bounded] - 1e-9) |
                       (self.upper[bounded] + 1e-9 < X[:, bounded]) |
                       ~np.isfinite(X[:, bounded]))
                if out.any():
                    index = int(np.nonzero(out.any(axis = 1))[0][0])
                    raise EscapeError(op, (k + 1) * h, index)

            if keep:
                xs.append(X)
                vs.append(V)

        if not keep: return X, V
        return np.array(xs), np.array(vs)


    def _endpoint(self, P, V, t = 1.0, op = 'exp_map'):
        return self.trajectory(P, V, t, op, keep = False)[0]


    def halve(self, P, V, op = 'midpoint'):
        '''Midpoints M of the geodesics P + tV and the initial velocities of
        their second halves M -> exp(P, V).'''
        P = _rows(P)
        V = _rows(V)

        if self.geodesics is not None or not len(P):
            M = self.exp(P, V, 0.5)
            return M, self.log(M, self.exp(P, V), op = op)

        M = np.array(P, dtype = float)
        W = np.zeros_like(V)
        moving = np.any(V != 0, axis = 1)
        if moving.any():
            xs, vs = self.trajectory(P[moving], V[moving], op = op)
            k = (len(xs) - 1) // 2
            M[moving] = xs[k]
            W[moving] = 0.5 * vs[k]

        return self.wrap(M), W


    def midpoint_samples(self, P, V, k):
        '''Points at parameters (j + 1/2) / k, j < k, along each geodesic
        P + tV, shape (k, N, dim).'''
        P = _rows(P)
        V = _rows(V)
        ts = (np.arange(k) + 0.5) / k

        if self.geodesics is not None or not len(P):
            return np.array([self.exp(P, V, t) for t in ts])

        out = np.repeat(P[None], k, axis = 0)
        moving = np.any(V != 0, axis = 1)
        if moving.any():
            n = 2 * k * int(math.ceil(self._steps(P[moving], V[moving], 1) /
                                      (2.0 * k)))
            xs = self.trajectory(P[moving], V[moving], n = n)[0]
            out[:, moving] = xs[n // (2 * k)::n // k][:k]

        return self.wrap(out)


    def exp(self, P, V, t = 1.0):
        P = _rows(P)
        V = _rows(V)
        if not len(P): return P.copy()

        if self.geodesics is not None:
            return self.wrap(self.geodesics.exp(P, V, t))

        # Zero velocities stay put, even where the chart degenerates
        out = np.array(P, dtype = float)
        moving = np.any(V != 0, axis = 1)
        if moving.any():
            out[moving] = self._endpoint(P[moving], V[moving], t)

        return self.wrap(out)


    def log(self, P, Q, op = 'log_map'):
        '''Initial velocities of the minimizing geodesics P -> Q over unit
        parameter.'''
        P = _rows(P)
        Q = _rows(Q)
        if not len(P): return np.zeros_like(P)

        if self.geodesics is not None:
            V = self.geodesics.log(P, Q)
            if not np.all(np.isfinite(V)):
                raise NoUniqueGeodesic(op, 'antipodal or degenerate endpoints')
            return V

        V = np.zeros_like(P)
        apart = np.any(self.diff(P, Q) != 0, axis = 1)
        if not apart.any(): return V

        try:
            V[apart] = self._shoot(P[apart], Q[apart], op)
            return V
        except EscapeError as e:
            raise NoUniqueGeodesic(op, 'shooting left the chart (%s)' % e)


    def _shoot(self, P, Q, op):
        '''Damped Newton shooting on the initial velocity.'''
        D = self.diff(P, Q)
        target = P + D
        V = D.copy()
        d = self.dim
        eye = np.eye(d)

        E = self._endpoint(P, V, op = op)
        R = E - target
        err = np.sqrt((R * R).sum(axis = 1))

        for it in range(self.max_newton):
            active = np.nonzero(self.newton_tol < err)[0]
            if not len(active): return V

            Pa, Va, Ra = P[active], V[active], R[active]
            h = 1e-7 * np.maximum(1, np.abs(Va).max(axis = 1))[:, None]

            # Forward-difference Jacobian, all columns in one batch
            Ps = np.concatenate([Pa] * d)
            Vs = np.concatenate([Va + h * eye[k] for k in range(d)])
            Es = self._endpoint(Ps, Vs, op = op).reshape(d, len(active), d)
            J = np.stack([(Es[k] - (Ra + target[active])) / h
                          for k in range(d)], axis = -1)

            try:
                dV = np.linalg.solve(J, -Ra[..., None])[..., 0]
            except np.linalg.LinAlgError:
                raise NoUniqueGeodesic(op, 'singular shooting Jacobian')

            # Backtrack until the residual drops
            lam = np.ones(len(active))
            for k in range(8):
                Vn = Va + lam[:, None] * dV
                En = self._endpoint(Pa, Vn, op = op)
                Rn = En - target[active]
                errn = np.sqrt((Rn * Rn).sum(axis = 1))
                worse = err[active] <= errn
                if not worse.any() or k == 7: break
                lam[worse] *= 0.5

            V[active], R[active], err[active] = Vn, Rn, errn

        if np.any(self.newton_tol < err):
            raise NoUniqueGeodesic(op, 'shooting did not converge, residual '
                                   '%.3g after %d iterations', float(err.max()),
                                   self.max_newton)
        return V


    def distance(self, P, Q, horizon = None, op = 'distance'):
        if horizon is None:
            horizon = math.inf if self.is_exact() else self.injectivity_floor

        P = _rows(P)
        Q = _rows(Q)
        d = self.norm(P, self.log(P, Q, op = op))

        if np.any(horizon < d):
            raise HorizonError(op, 'distance %.6g beyond horizon %.6g',
                               float(d.max()), horizon)
        return d


# Single-point operations
def christoffel(m, p):
    return m.christoffel(m.wrap(np.asarray(p, dtype = float))[None])[0]


def exp_map(m, v, t = 1.0):
    if np.allclose(v.components, 0): return m.wrap(v.base)
    m.check_domain(v.base[None], 'exp_map')
    return m.exp(v.base[None], v.components[None], t)[0]


def log_map(m, p, q):
    p = m.wrap(np.asarray(p, dtype = float))
    q = m.wrap(np.asarray(q, dtype = float))
    if np.allclose(m.diff(p, q), 0, atol = 1e-15):
        return TangentVector(p, np.zeros(m.dim))

    v = m.log(p[None], q[None])[0]
    length = float(m.norm(p, v))
    bound = m.conv_bound()

    if bound <= length:
        raise NoUniqueGeodesic('log_map', 'distance %.6g not below the '
                               'convexity bound %.6g', length, bound)

    return TangentVector(p, v)


def distance(m, p, q, horizon = None):
    p = m.wrap(np.asarray(p, dtype = float))
    q = m.wrap(np.asarray(q, dtype = float))
    if np.allclose(m.diff(p, q), 0, atol = 1e-15): return 0.0
    return float(m.distance(p[None], q[None], horizon)[0])


def minimizing_segment(m, p, q, R = None):
    p = m.wrap(np.asarray(p, dtype = float))
    q = m.wrap(np.asarray(q, dtype = float))

    if np.allclose(m.diff(p, q), 0, atol = 1e-15):
        return GeodesicSegment(m, p, p, TangentVector(p, np.zeros(m.dim)), 0,
                               np.array([p, p]))

    v = m.log(p[None], q[None], op = 'minimizing_segment')
    length = float(m.norm(p, v[0]))

    if R is not None and R < length:
        raise NoUniqueGeodesic('minimizing_segment', 'distance %.6g exceeds '
                               'step radius %.6g', length, R)

    if m.is_exact():
        ts = np.linspace(0, 1, 17)
        knots = np.array([m.exp(p[None], v, t)[0] for t in ts])
    else: knots = m.wrap(m.trajectory(p[None], v)[0][:, 0])

    return GeodesicSegment(m, p, m.exp(p[None], v)[0],
                           TangentVector(p, v[0]), length, knots)


def conv_bound(m): return m.conv_bound()
