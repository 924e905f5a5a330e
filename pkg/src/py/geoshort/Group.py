################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import numpy as np

from .Errors import ConfigError

__all__ = ['FiniteGroup', 'GroupHom', 'SubgroupEmbedding', 'MAX_ORDER']


MAX_ORDER = 1000
EXHAUSTIVE_ORDER = 64
SAMPLED_TRIPLES = 100000


class FiniteGroup(object):
    '''A group given by its multiplication table over indices 0..n-1.'''

    def __init__(self, table, name = 'G', labels = None, check = True,
                 seed = 0):
        table = np.asarray(table, dtype = np.int32)
        n = len(table)

        if not 0 < n <= MAX_ORDER:
            raise ConfigError('finite_group', 'order %d outside 1..%d', n,
                              MAX_ORDER)
        if table.shape != (n, n) or table.min() < 0 or n <= table.max():
            raise ConfigError('finite_group', '%s: malformed table', name)

        self.table = table
        self.name = name
        self.labels = labels
        self._classes = None

        ident = np.arange(n)
        rows = np.nonzero(np.all(table == ident[None], axis = 1))[0]
        if not len(rows) or not np.array_equal(table[:, rows[0]], ident):
            raise ConfigError('finite_group', '%s: no identity', name)
        self.identity = int(rows[0])

        hit = table == self.identity
        if not np.all(hit.sum(axis = 1) == 1):
            raise ConfigError('finite_group', '%s: missing inverses', name)
        self.inverse = np.argmax(hit, axis = 1).astype(np.int32)
        if not np.all(table[self.inverse, ident] == self.identity):
            raise ConfigError('finite_group', '%s: one-sided inverses', name)

        if check: self._check_associative(seed)


    def _check_associative(self, seed):
        T = self.table
        n = len(T)

        if n <= EXHAUSTIVE_ORDER:
            ok = np.array_equal(T[T], T[:, T])
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, size = (3, SAMPLED_TRIPLES))
            ok = np.array_equal(T[T[a, b], c], T[a, T[b, c]])

        if not ok:
            raise ConfigError('finite_group', '%s: not associative', self.name)


    def __len__(self): return len(self.table)
    def __repr__(self): return 'FiniteGroup(%s, order=%d)' % (
            self.name, len(self))


    @property
    def order(self): return len(self.table)
    @property
    def elements(self): return range(len(self.table))


    def mul(self, a, b): return int(self.table[a, b])
    def inv(self, a): return int(self.inverse[a])


    def label(self, a):
        return str(self.labels[a]) if self.labels is not None else str(a)


    def conj(self, g, h):
        '''g h g^-1, vectorized over numpy arrays.'''
        return self.table[self.table[g, h], self.inverse[g]]


    def commutator(self, a, b):
        T = self.table
        return T[T[a, b], T[self.inverse[a], self.inverse[b]]]


    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.table[x, a]
            k += 1
        return k


    def element_orders(self):
        return [self.element_order(a) for a in self.elements]


    def is_abelian(self): return np.array_equal(self.table, self.table.T)


    def closure(self, gens):
        '''Subgroup generated by `gens` as a frozenset of indices.'''
        gens = sorted(set(int(g) for g in gens))
        seen = {self.identity}
        frontier = [self.identity]

        while frontier:
            nxt = []
            for a in frontier:
                for b in self.table[a, gens] if gens else ():
                    b = int(b)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt

        return frozenset(seen)


    def is_subgroup(self, S):
        S = np.array(sorted(S))
        if not len(S) or self.identity not in S: return False
        return bool(np.isin(self.table[np.ix_(S, S)], S).all())


    def subgroups(self):
        '''All subgroups, as joins of cyclic subgroups, smallest first.'''
        cyclic = {}
        for g in self.elements: cyclic.setdefault(self.closure([g]), g)

        found = dict((S, [g]) for S, g in cyclic.items())
        frontier = list(found)

        while frontier:
            nxt = []
            for S in frontier:
                for C, g in cyclic.items():
                    if C <= S: continue
                    J = self.closure(found[S] + [g])
                    if J not in found:
                        found[J] = found[S] + [g]
                        nxt.append(J)
            frontier = nxt

        return sorted(found, key = lambda S: (len(S), sorted(S)))


    def conjugacy_classes(self):
        if self._classes is None:
            owner = -np.ones(len(self), dtype = int)
            classes = []
            g = np.arange(len(self))

            for a in self.elements:
                if 0 <= owner[a]: continue
                cls = frozenset(int(x) for x in self.conj(g, a))
                owner[list(cls)] = len(classes)
                classes.append(cls)

            self._classes = (classes, owner)

        return self._classes[0]


    def class_of(self, a):
        self.conjugacy_classes()
        return int(self._classes[1][a])


    def center(self):
        T = self.table
        return frozenset(int(a) for a in self.elements
                         if np.array_equal(T[a], T[:, a]))


    def commutator_subgroup(self):
        g = np.arange(len(self))
        comms = self.commutator(g[:, None], g[None, :])
        return self.closure(np.unique(comms))


    def is_normal(self, S):
        S = np.array(sorted(S))
        g = np.arange(len(self))
        return bool(np.isin(self.conj(g[:, None], S[None, :]), S).all())


    def fingerprint(self):
        '''Isomorphism invariants used to deduplicate catalogs.

        Each element contributes its order, the size of its class and its
        number of square roots; this separates Q8 x Z2 from Z4 : Z4 and the
        Pauli group from (Z4 x Z2) : Z2.'''
        orders = self.element_orders()
        self.conjugacy_classes()
        sizes = np.bincount(self._classes[1])[self._classes[1]]
        roots = np.bincount(np.diag(self.table), minlength = len(self))

        return (self.order, len(self.commutator_subgroup()),
                tuple(sorted(zip((int(o) for o in orders), sizes.tolist(),
                                 roots.tolist()))))


    def to_json(self):
        return dict(name = self.name, order = self.order,
                    abelian = self.is_abelian(),
                    classes = len(self.conjugacy_classes()))


class GroupHom(object):
    def __init__(self, source, target, mapping, check = True):
        self.source = source
        self.target = target
        self.mapping = np.asarray(mapping, dtype = np.int32)

        if self.mapping.shape != (len(source),):
            raise ConfigError('group_hom', 'mapping has %d entries for a '
                              'group of order %d', len(self.mapping),
                              len(source))

        if check and not self.is_homomorphism():
            raise ConfigError('group_hom', '%s -> %s is not a homomorphism',
                              source.name, target.name)


    def __call__(self, a): return self.mapping[a]


    def is_homomorphism(self):
        f = self.mapping
        if f.min() < 0 or len(self.target) <= f.max(): return False
        if f[self.source.identity] != self.target.identity: return False
        lhs = f[self.source.table]
        rhs = self.target.table[f[:, None], f[None, :]]
        return bool(np.array_equal(lhs, rhs))


    def image(self): return frozenset(int(x) for x in self.mapping)


    def kernel(self):
        return frozenset(int(a) for a in
                         np.nonzero(self.mapping == self.target.identity)[0])


    def is_injective(self):
        return len(np.unique(self.mapping)) == len(self.mapping)


    def is_surjective(self): return len(self.image()) == len(self.target)


    def compose(self, other):
        '''self after other.'''
        return GroupHom(other.source, self.target, self.mapping[other.mapping])


    @classmethod
    def identity(cls, G): return cls(G, G, np.arange(len(G)))


    @classmethod
    def from_images(cls, source, target, images):
        '''Extend generator images {g: image} to a homomorphism by closure.'''
        f = -np.ones(len(source), dtype = np.int32)
        f[source.identity] = target.identity
        frontier = [source.identity]

        while frontier:
            nxt = []
            for a in frontier:
                for g, x in images.items():
                    b = source.mul(a, g)
                    y = target.mul(f[a], x)
                    if f[b] < 0:
                        f[b] = y
                        nxt.append(b)
                    elif f[b] != y:
                        raise ConfigError('group_hom', 'generator images do '
                                          'not extend to a homomorphism')
            frontier = nxt

        if (f < 0).any():
            raise ConfigError('group_hom', 'images do not cover a generating '
                              'set of %s', source.name)

        return cls(source, target, f)


class SubgroupEmbedding(GroupHom):
    '''Inclusion H -> G of a subgroup, H carrying its own table.'''

    def __init__(self, G, elements, name = None):
        S = sorted(int(a) for a in elements)
        if not G.is_subgroup(S):
            raise ConfigError('subgroup', '%s is not closed in %s', S, G.name)

        index = dict((a, i) for i, a in enumerate(S))
        table = [[index[G.mul(a, b)] for b in S] for a in S]
        labels = [G.label(a) for a in S]
        H = FiniteGroup(table, name or 'H<%s' % G.name, labels, check = False)

        GroupHom.__init__(self, H, G, S, check = False)
        self.elements = frozenset(S)


    @property
    def subgroup(self): return self.source
    @property
    def group(self): return self.target


    def is_proper(self): return len(self.elements) < len(self.target)


    def is_normal(self): return self.target.is_normal(self.elements)


    @classmethod
    def generated(cls, G, gens, name = None):
        return cls(G, G.closure(gens), name)
