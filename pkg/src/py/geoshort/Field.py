################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (gf_add, gf_mul, gf_rem, gf_strip,
                                     gf_irreducible_p)

from .Errors import UnsupportedField

__all__ = ['FiniteField', 'SUPPORTED']


# q -> (p, modulus), modulus high degree first
SUPPORTED = {
    2: (2, None),
    3: (3, None),
    4: (2, [1, 1, 1]),    # x^2 + x + 1
    5: (5, None),
    7: (7, None),
    8: (2, [1, 0, 1, 1]), # x^3 + x + 1
    9: (3, [1, 0, 1]),    # x^2 + 1
}


class FiniteField(object):
    '''F_q with elements 0..q-1 encoding polynomials in base p.

    Addition and multiplication are tabulated once from sympy's dense
    polynomial arithmetic over GF(p).'''

    def __init__(self, q):
        if q not in SUPPORTED:
            raise UnsupportedField('finite_field', 'q = %s not in %s', q,
                                   sorted(SUPPORTED))

        self.q = q
        self.p, modulus = SUPPORTED[q]
        self.modulus = modulus

        if modulus is not None and \
                not gf_irreducible_p([ZZ(c) for c in modulus], self.p, ZZ):
            raise UnsupportedField('finite_field', 'modulus %s is reducible '
                                   'over GF(%d)', modulus, self.p)

        polys = [self._poly(a) for a in range(q)]
        self.add = np.empty((q, q), dtype = np.int32)
        self.mul = np.empty((q, q), dtype = np.int32)

        for a in range(q):
            for b in range(q):
                self.add[a, b] = self._int(gf_add(polys[a], polys[b], self.p,
                                                  ZZ))
                self.mul[a, b] = self._reduce(gf_mul(polys[a], polys[b],
                                                     self.p, ZZ))

        self.neg = np.argmax(self.add == 0, axis = 1).astype(np.int32)
        self.inv = np.zeros(q, dtype = np.int32)
        for a in range(1, q):
            self.inv[a] = int(np.argmax(self.mul[a] == 1))


    def __repr__(self): return 'GF(%d)' % self.q
    def __len__(self): return self.q


    def _poly(self, a):
        digits = []
        while a:
            digits.append(ZZ(a % self.p))
            a //= self.p
        return gf_strip(digits[::-1])


    def _int(self, f):
        a = 0
        for c in f: a = a * self.p + int(c) % self.p
        return a


    def _reduce(self, f):
        if self.modulus is None: return self._int(f)
        return self._int(gf_rem(f, [ZZ(c) for c in self.modulus], self.p, ZZ))


    def sub(self, a, b): return self.add[a, self.neg[b]]


    def nonzero(self): return np.arange(1, self.q)


    def roots(self, b, c):
        '''Roots of x^2 + b x + c.'''
        x = np.arange(self.q)
        v = self.add[self.add[self.mul[x, x], self.mul[b, x]], c]
        return x[v == 0]
