################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import itertools

import numpy as np
from sympy.combinatorics import Permutation
from sympy.combinatorics.named_groups import SymmetricGroup, AlternatingGroup

from .Group import FiniteGroup
from .Field import FiniteField
from .Errors import ConfigError

__all__ = ['cyclic', 'abelian', 'direct_product', 'dihedral', 'dicyclic',
           'metacyclic', 'semidirect', 'generalized_dihedral', 'pauli',
           'z4z2_z2', 'z3_d4', 'from_permutations', 'symmetric', 'alternating',
           'matrix_group', 'gl2', 'sl2', 'catalog', 'find_group']


def _from_elements(elements, mul, name, labels = None):
    index = dict((e, i) for i, e in enumerate(elements))
    table = [[index[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(table, name, labels or list(elements))


def cyclic(n):
    x = np.arange(n)
    return FiniteGroup((x[:, None] + x[None]) % n, 'Z%d' % n)


def direct_product(G, H, name = None):
    n, m = len(G), len(H)
    a = np.arange(n * m)
    table = G.table[(a // m)[:, None], (a // m)[None]] * m + \
        H.table[(a % m)[:, None], (a % m)[None]]
    labels = ['(%s,%s)' % (G.label(x // m), H.label(x % m)) for x in a]
    return FiniteGroup(table, name or '%sx%s' % (G.name, H.name), labels)


def abelian(*ns):
    G = cyclic(ns[0])
    for n in ns[1:]: G = direct_product(G, cyclic(n))
    G.name = 'x'.join('Z%d' % n for n in ns)
    return G


def dihedral(n):
    '''Symmetries of the n-gon, order 2n: r^k s^f.'''
    elements = list(itertools.product(range(n), (0, 1)))

    def mul(a, b):
        k = (a[0] + (-1) ** a[1] * b[0]) % n
        return (k, a[1] ^ b[1])

    return _from_elements(elements, mul, 'D%d' % n)


def dicyclic(n):
    '''Order 4n: a^k x^f with x^2 = a^n and x a x^-1 = a^-1.'''
    elements = list(itertools.product(range(2 * n), (0, 1)))

    def mul(a, b):
        if not a[1]: return ((a[0] + b[0]) % (2 * n), b[1])
        if not b[1]: return ((a[0] - b[0]) % (2 * n), 1)
        return ((a[0] - b[0] + n) % (2 * n), 0)

    return _from_elements(elements, mul, 'Q8' if n == 2 else 'Dic%d' % n)


def metacyclic(m, n, r, name = None):
    '''Z_m semidirect Z_n with the generator of Z_n acting by x -> r x.'''
    if pow(r, n, m) != 1 % m:
        raise ConfigError('metacyclic', 'r = %d has no order dividing %d mod '
                          '%d', r, n, m)

    elements = list(itertools.product(range(m), range(n)))

    def mul(a, b):
        return ((a[0] + pow(r, a[1], m) * b[0]) % m, (a[1] + b[1]) % n)

    return _from_elements(elements, mul, name or 'Z%d:%d Z%d' % (m, r, n))


def semidirect(N, H, act, name):
    '''N semidirect H with h acting on N by `act(h, n)`, an automorphism
    for each h; (n, h)(m, k) = (n act(h, m), hk).'''
    elements = list(itertools.product(range(len(N)), range(len(H))))
    acts = [[act(h, n) for n in range(len(N))] for h in range(len(H))]

    def mul(a, b):
        return (N.mul(a[0], acts[a[1]][b[0]]), H.mul(a[1], b[1]))

    return _from_elements(elements, mul, name)


def generalized_dihedral(*ns):
    '''Abelian A = Z_n1 x ... extended by an involution inverting A.'''
    A = abelian(*ns)
    return semidirect(A, cyclic(2), lambda h, n: A.inv(n) if h else n,
                      'Dih(%s)' % A.name)


def _z4z2(twist, name):
    '''(Z4 x Z2) : Z2; elements of Z4 x Z2 are indexed 2x + y.'''
    def act(h, n):
        if not h: return n
        x, y = divmod(n, 2)
        x, y = twist(x, y)
        return (x % 4) * 2 + y % 2

    return semidirect(abelian(4, 2), cyclic(2), act, name)


def pauli():
    '''<X, Z, iI>: Z conjugates i^x X^y to i^(x + 2y) X^y.'''
    return _z4z2(lambda x, y: (x + 2 * y, y), 'Pauli')


def z4z2_z2():
    '''(Z4 x Z2) : Z2 with the involution a -> ab, b -> b.'''
    return _z4z2(lambda x, y: (x, y + x), '(Z4xZ2):Z2')


def z3_d4():
    '''Z3 : D4 with the rotations r, r^3 and the reflections rs, r^3 s
    inverting Z3; the kernel is the Klein group {1, r^2, s, r^2 s}.'''
    # dihedral(4) indexes r^k s^f as 2k + f
    return semidirect(cyclic(3), dihedral(4),
                      lambda h, n: (-n) % 3 if (h // 2) % 2 else n, 'Z3:D4')


def from_permutations(P, name):
    '''Table of a sympy permutation group; the product applies a then b.'''
    elements = sorted(tuple(p) for p in P.generate(af = True))
    labels = [str(Permutation(list(e)).cyclic_form) for e in elements]
    return _from_elements(elements, lambda a, b: tuple(b[i] for i in a),
                          name, labels)


def symmetric(n): return from_permutations(SymmetricGroup(n), 'S%d' % n)
def alternating(n): return from_permutations(AlternatingGroup(n), 'A%d' % n)


def _matmul(F, a, b):
    mul, add = F.mul, F.add
    return (int(add[mul[a[0], b[0]], mul[a[1], b[2]]]),
            int(add[mul[a[0], b[1]], mul[a[1], b[3]]]),
            int(add[mul[a[2], b[0]], mul[a[3], b[2]]]),
            int(add[mul[a[2], b[1]], mul[a[3], b[3]]]))


def det(F, a): return int(F.sub(F.mul[a[0], a[3]], F.mul[a[1], a[2]]))


def matrix_group(F, keep, name):
    '''2x2 matrices over F with nonzero determinant passing `keep`.'''
    elements = [a for a in itertools.product(range(F.q), repeat = 4)
                if det(F, a) and keep(a)]
    return _from_elements(elements, lambda a, b: _matmul(F, a, b), name)


def gl2(q):
    return matrix_group(FiniteField(q), lambda a: True, 'GL2(F%d)' % q)


def sl2(q):
    F = FiniteField(q)
    return matrix_group(F, lambda a: det(F, a) == 1, 'SL2(F%d)' % q)


_ABELIAN = [(2, 2), (2, 4), (2, 2, 2), (3, 3), (2, 6), (4, 4), (2, 8),
            (2, 2, 4), (2, 2, 2, 2), (3, 6), (2, 10), (2, 12), (2, 2, 6)]

_METACYCLIC = [(7, 3, 2), (5, 4, 2), (3, 8, 2), (4, 4, 3), (8, 2, 5),
               (8, 2, 3)]

# (order, left factor, abelian right factor)
_PRODUCTS = [(18, lambda: symmetric(3), (3,)), (24, lambda: symmetric(3), (4,)),
             (24, lambda: symmetric(3), (2, 2)),
             (16, lambda: dihedral(4), (2,)), (16, lambda: dicyclic(2), (2,)),
             (24, lambda: dihedral(4), (3,)), (24, lambda: dicyclic(2), (3,)),
             (24, lambda: dicyclic(3), (2,)),
             (24, lambda: alternating(4), (2,))]


def _builders(max_order):
    yield 'S3', 6, lambda: symmetric(3)
    yield 'A4', 12, lambda: alternating(4)
    yield 'S4', 24, lambda: symmetric(4)
    yield 'SL2(F3)', 24, lambda: sl2(3)
    yield 'GL2(F2)', 6, lambda: gl2(2)

    for n in range(1, max_order + 1):
        yield None, n, lambda n = n: cyclic(n)
    for ns in _ABELIAN:
        yield None, int(np.prod(ns)), lambda ns = ns: abelian(*ns)
    for n in range(3, 13): yield None, 2 * n, lambda n = n: dihedral(n)
    for n in range(2, 7): yield None, 4 * n, lambda n = n: dicyclic(n)
    for m, n, r in _METACYCLIC:
        yield None, m * n, lambda m = m, n = n, r = r: metacyclic(m, n, r)

    for order, build, ns in _PRODUCTS:
        yield None, order, lambda build = build, ns = ns: \
            direct_product(build(), abelian(*ns))

    yield None, 18, lambda: generalized_dihedral(3, 3)
    yield 'Pauli', 16, pauli
    yield None, 16, z4z2_z2
    yield None, 24, z3_d4


def catalog(max_order = 24, extras = True, log = None):
    '''Constructive group catalog up to `max_order`, deduplicated by
    fingerprint; `extras` adds A5.

    Up to order 24 every isomorphism class appears exactly once.'''
    groups = []
    seen = {}

    builders = list(_builders(max_order))
    if extras: builders.append(('A5', 60, lambda: alternating(5)))

    for name, order, build in builders:
        if max_order < order and name != 'A5': continue

        G = build()
        if name is not None: G.name = name

        key = G.fingerprint()
        if key in seen:
            if log is not None and log.is_debug():
                log.debug('%s duplicates %s' % (G.name, seen[key]))
            continue

        seen[key] = G.name
        groups.append(G)

    if log is not None:
        log.info('Group catalog: %d groups up to order %d%s' % (
            len(groups), max_order, ' plus A5' if extras else ''))

    return groups


def find_group(groups, name):
    for G in groups:
        if G.name == name: return G
    raise ConfigError('catalog', 'no group named "%s"', name)
