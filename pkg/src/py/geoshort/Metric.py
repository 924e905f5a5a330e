################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import numpy as np
import sympy

__all__ = ['SymbolicMetric', 'NumericMetric']


def _broadcast(values, shape):
    return np.stack([np.broadcast_to(np.asarray(v, dtype = float), shape)
                     for v in values], axis = -1)


class SymbolicMetric(object):
    '''Metric coefficients given as sympy expressions in the chart coordinates.

    Christoffel symbols are derived symbolically once and compiled with
    `sympy.lambdify`, which is the registered closed form used by
    `ChartManifold.christoffel`.
    '''

    def __init__(self, coords, matrix, simplify = True):
        self.coords = list(coords)
        self.matrix = sympy.Matrix(matrix)
        self.dim = n = len(self.coords)

        if self.matrix.shape != (n, n):
            raise ValueError('Metric must be %dx%d' % (n, n))

        inv = self.matrix.inv()
        d = [[[sympy.diff(self.matrix[i, j], self.coords[k])
               for k in range(n)] for j in range(n)] for i in range(n)]

        gamma = []
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    e = sum(inv[k, l] * (d[l][j][i] + d[l][i][j] - d[i][j][l])
                            for l in range(n)) / 2
                    gamma.append(sympy.simplify(e) if simplify else e)

        self.gamma = gamma
        self._g = [sympy.lambdify(self.coords, self.matrix[i, j], 'numpy')
                   for i in range(n) for j in range(n)]
        self._gamma = [sympy.lambdify(self.coords, e, 'numpy') for e in gamma]


    def symbol(self, k, i, j):
        return self.gamma[(k * self.dim + i) * self.dim + j]


    def _eval(self, fns, P):
        P = np.asarray(P, dtype = float)
        args = [P[..., i] for i in range(self.dim)]
        shape = P.shape[:-1]
        return _broadcast([f(*args) for f in fns], shape)


    def __call__(self, P):
        n = self.dim
        return self._eval(self._g, P).reshape(np.shape(P)[:-1] + (n, n))


    def christoffel(self, P):
        n = self.dim
        return self._eval(self._gamma, P).reshape(np.shape(P)[:-1] + (n, n, n))


class NumericMetric(object):
    '''Metric given by a vectorized callable; Christoffel symbols come from
    central finite differences of the coefficients.'''

    def __init__(self, fn, dim, h = 1e-5):
        self.fn = fn
        self.dim = dim
        self.h = h


    def __call__(self, P): return self.fn(np.asarray(P, dtype = float))


    def christoffel(self, P):
        P = np.asarray(P, dtype = float)
        n = self.dim

        # dg[..., l, i, j] = d g_ij / dx^l
        dg = []
        for l in range(n):
            e = np.zeros(n)
            e[l] = self.h
            dg.append((self.fn(P + e) - self.fn(P - e)) / (2 * self.h))
        dg = np.stack(dg, axis = -3)

        inv = np.linalg.inv(self.fn(P))

        # [l, i, j] = d_i g_lj + d_j g_li - d_l g_ij
        lower = (np.swapaxes(dg, -3, -2) +
                 np.transpose(dg, tuple(range(dg.ndim - 3)) +
                              (dg.ndim - 2, dg.ndim - 1, dg.ndim - 3)) - dg)
        return 0.5 * np.einsum('...kl,...lij->...kij', inv, lower)
