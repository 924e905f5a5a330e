################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import itertools
from fractions import Fraction

import numpy as np

from . import util
from .Group import GroupHom, SubgroupEmbedding
from .GroupCatalog import catalog
from .Field import FiniteField, SUPPORTED
from .Errors import PreconditionError, NotSplitSES, ConfigError

__all__ = ['conjugate_union', 'CosetAction', 'coset_action', 'burnside_audit',
           'conj_class_map', 'surjectivity_trichotomy', 'split_decompose',
           'find_splits', 'semidirect_ses', 'gl2_borel_coverage',
           'audit_group', 'audit_catalog']


def _elements(H):
    if isinstance(H, SubgroupEmbedding): return H.elements
    return frozenset(int(a) for a in H)


def conjugate_union(G, H):
    '''The set of all g h g^-1 and whether it exhausts G.'''
    S = np.array(sorted(_elements(H)))
    g = np.arange(len(G))
    union = frozenset(int(x) for x in np.unique(G.conj(g[:, None], S[None])))
    return union, len(union) == len(G)


class CosetAction(object):
    '''Left multiplication of G on the left cosets of H.

    perms[x, i] is the coset of x reps[i].'''

    def __init__(self, G, H):
        self.group = G
        self.subgroup = _elements(H)
        S = np.array(sorted(self.subgroup))

        owner = -np.ones(len(G), dtype = int)
        reps = []
        for g in G.elements:
            if 0 <= owner[g]: continue
            owner[G.table[g, S]] = len(reps)
            reps.append(g)

        self.reps = reps
        self.perms = owner[G.table[:, reps]]

        if not self.is_homomorphism():
            raise ConfigError('coset_action', 'action of %s is not a '
                              'homomorphism', G.name)


    @property
    def degree(self): return self.perms.shape[1]


    def is_homomorphism(self):
        P = self.perms
        n = len(P)
        lhs = P[self.group.table]
        rhs = P[np.arange(n)[:, None, None], P[None]]
        return bool(np.array_equal(lhs, rhs))


    def orbits(self):
        seen = np.zeros(self.degree, dtype = bool)
        orbits = []
        for i in range(self.degree):
            if seen[i]: continue
            orbit = np.unique(self.perms[:, i])
            seen[orbit] = True
            orbits.append(orbit.tolist())
        return orbits


    def is_transitive(self): return len(self.orbits()) == 1


    def kernel(self):
        ident = np.arange(self.degree)
        return frozenset(int(x) for x in
                         np.nonzero(np.all(self.perms == ident, axis = 1))[0])


    def image(self): return np.unique(self.perms, axis = 0)


def coset_action(G, H): return CosetAction(G, H)


def burnside_audit(action):
    '''Average fixed points over the acting image, in exact arithmetic, and
    a fixed-point-free element with one of its preimages.'''
    P = action.perms
    d = action.degree
    orbits = action.orbits()

    if d < 2 or len(orbits) != 1:
        raise PreconditionError('burnside_audit', 'need a transitive action on '
                                'two or more points, got degree %d with %d '
                                'orbits', d, len(orbits))

    image, first = np.unique(P, axis = 0, return_index = True)
    fixed = (image == np.arange(d)).sum(axis = 1)
    average = Fraction(int(fixed.sum()), len(image))

    report = dict(degree = d, image_order = len(image), average = str(average),
                  orbits = len(orbits), exact = average == len(orbits),
                  tau0 = None, x0 = None, outside_union = None)

    free = np.nonzero(fixed == 0)[0]
    if len(free):
        x0 = int(first[free[0]])
        union, _ = conjugate_union(action.group, action.subgroup)
        report.update(tau0 = image[free[0]].tolist(), x0 = x0,
                      outside_union = x0 not in union)

    return report


def conj_class_map(phi):
    '''Induced map on conjugacy classes; surjectivity is computed directly
    and through the conjugate-union criterion on the image.'''
    src = phi.source.conjugacy_classes()
    tgt = phi.target.conjugacy_classes()

    mapping = []
    well_defined = True
    for c in src:
        images = set(phi.target.class_of(int(phi(a))) for a in c)
        well_defined &= len(images) == 1
        mapping.append(min(images))

    direct = len(set(mapping)) == len(tgt)
    _, criterion = conjugate_union(phi.target, phi.image())

    return dict(map = mapping, surjective = direct, criterion = criterion,
                agree = direct == criterion, well_defined = well_defined)


def surjectivity_trichotomy(H):
    '''Surjectivity of H -> G on elements, on conjugacy classes and after
    abelianization.'''
    G = H.group
    hom = not H.is_proper()
    conj = conj_class_map(H)['surjective']

    derived = G.commutator_subgroup()
    ab = len(G.closure(sorted(H.elements | derived))) == len(G)

    return dict(hom_surjective = hom, conj_surjective = conj,
                abelianized_surjective = ab,
                implications = (not hom or conj) and (not conj or ab))


def split_decompose(g, h, j):
    '''Write every c in C as g(c') j(c'') for C' -g-> C -h-> C'' split by j.'''
    C = g.target
    if h.source is not C or j.target is not C or j.source is not h.target:
        raise NotSplitSES('split_decompose', 'maps do not compose as '
                          "C' -> C -> C'' with a section C'' -> C")

    clauses = ['%s is not a homomorphism' % name
               for name, f in (('g', g), ('h', h), ('j', j))
               if not f.is_homomorphism()]
    if clauses: raise NotSplitSES('split_decompose', '; '.join(clauses))

    if not g.is_injective(): clauses.append('g is not injective')
    if not h.is_surjective(): clauses.append('h is not surjective')
    if g.image() != h.kernel(): clauses.append('im g != ker h')
    if not np.array_equal(h.mapping[j.mapping], np.arange(len(h.target))):
        clauses.append('h o j is not the identity')
    if clauses: raise NotSplitSES('split_decompose', '; '.join(clauses))

    ginv = dict((int(c), i) for i, c in enumerate(g.mapping))
    rows = []
    for c in C.elements:
        c2 = int(h(c))
        c1 = ginv[C.mul(c, C.inv(int(j(c2))))]
        rows.append(dict(c = c, c1 = c1, c2 = c2))

    products = C.table[g.mapping[:, None], j.mapping[None, :]]
    unique = len(np.unique(products)) == products.size == len(C)

    return dict(rows = rows, unique = unique, total = len(rows) == len(C))


def find_splits(G):
    '''Pairs (N, K) of a proper nontrivial normal subgroup and a complement.'''
    subgroups = G.subgroups()
    splits = []

    for N in subgroups:
        if len(N) in (1, len(G)) or not G.is_normal(N): continue
        for K in subgroups:
            if len(N) * len(K) == len(G) and len(N & K) == 1:
                splits.append((N, K))
                break

    return splits


def semidirect_ses(G, N, K):
    '''N -> G -> K with the inclusion of K as section.'''
    g = SubgroupEmbedding(G, N)
    j = SubgroupEmbedding(G, K)
    position = dict((int(k), i) for i, k in enumerate(j.mapping))

    h = np.empty(len(G), dtype = np.int32)
    for n, k in itertools.product(N, K): h[G.mul(n, k)] = position[k]

    return g, GroupHom(G, j.source, h), j


def _matmul(F, X, Y):
    add, mul = F.add, F.mul
    a, b, c, d = X.T
    e, f, g, h = Y.T
    return np.stack([add[mul[a, e], mul[b, g]], add[mul[a, f], mul[b, h]],
                     add[mul[c, e], mul[d, g]], add[mul[c, f], mul[d, h]]],
                    axis = -1)


def _det(F, X):
    return F.sub(F.mul[X[..., 0], X[..., 3]], F.mul[X[..., 1], X[..., 2]])


def gl2_borel_coverage(q, chunk = 128):
    '''Fraction of GL2(F_q) conjugate into the upper triangular subgroup,
    cross-checked by counting reducible characteristic polynomials.'''
    F = FiniteField(q)
    M = np.array(list(itertools.product(range(q), repeat = 4)),
                 dtype = np.int32)
    G = M[_det(F, M) != 0]
    B = G[G[:, 2] == 0]

    dets = _det(F, G)
    inv_det = F.inv[dets]
    adj = np.stack([G[:, 3], F.neg[G[:, 1]], F.neg[G[:, 2]], G[:, 0]],
                   axis = -1)
    Ginv = F.mul[inv_det[:, None], adj]

    weights = q ** np.arange(3, -1, -1)
    codes = set()
    for start in range(0, len(G), chunk):
        g = G[start:start + chunk, None]
        gi = Ginv[start:start + chunk, None]
        X = _matmul(F, _matmul(F, np.broadcast_to(g, (len(g), len(B), 4))
                               .reshape(-1, 4), np.tile(B, (len(g), 1))),
                    np.broadcast_to(gi, (len(g), len(B), 4)).reshape(-1, 4))
        codes.update(np.unique(X @ weights).tolist())

    trace = F.add[G[:, 0], G[:, 3]]
    x = np.arange(q)[:, None]
    values = F.add[F.sub(F.mul[x, x], F.mul[trace[None], x]), dets[None]]
    reducible = int(np.any(values == 0, axis = 0).sum())

    covered = len(codes)
    return dict(q = q, order = len(G), borel_order = len(B), covered = covered,
                coverage = str(Fraction(covered, len(G))),
                reducible = reducible, agree = covered == reducible,
                proper = covered < len(G))


def audit_group(G, log = None):
    '''Every property check over all subgroups of G.'''
    violations = dict(covers = [], equivalence = [], burnside = [],
                      trichotomy = [], split = [])
    pairs = []
    gaps = []

    for S in G.subgroups():
        H = SubgroupEmbedding(G, S)
        _, covers = conjugate_union(G, H)
        cmap = conj_class_map(H)
        tri = surjectivity_trichotomy(H)

        entry = dict(order = len(S), proper = H.is_proper(),
                     normal = H.is_normal(), covers = covers,
                     conj_surjective = cmap['surjective'],
                     abelianized_surjective = tri['abelianized_surjective'])
        tag = '%s>%s' % (G.name, sorted(S))

        if H.is_proper() and covers: violations['covers'].append(tag)
        if not cmap['agree'] or not cmap['well_defined']:
            violations['equivalence'].append(tag)
        if not tri['implications']: violations['trichotomy'].append(tag)
        if not tri['conj_surjective'] and tri['abelianized_surjective']:
            gaps.append(dict(group = G.name, order = len(S)))

        if H.is_proper():
            b = burnside_audit(CosetAction(G, H))
            entry['average'] = b['average']
            entry['uncovered'] = None if b['x0'] is None else G.label(b['x0'])
            if not b['exact'] or not b['outside_union']:
                violations['burnside'].append(tag)

        pairs.append(entry)

    splits = 0
    for N, K in find_splits(G):
        d = split_decompose(*semidirect_ses(G, N, K))
        splits += 1
        if not (d['total'] and d['unique']):
            violations['split'].append('%s>%s' % (G.name, sorted(N)))

    if log is not None and log.is_debug():
        log.debug('audited %s: %d subgroups, %d splits' % (
            G.name, len(pairs), splits))

    return dict(group = G.to_json(), pairs = pairs, splits = splits,
                violations = violations, gaps = gaps)


def audit_catalog(max_order = 24, extras = True, threads = None, log = None):
    '''Audit every cataloged group plus the GL2 probes.'''
    groups = catalog(max_order, extras, log)
    results = util.map_ordered(lambda G: audit_group(G, log), groups, threads)

    counts = dict((k, 0) for k in results[0]['violations']) if results else {}
    for r in results:
        for k, v in r['violations'].items(): counts[k] += len(v)

    gaps = [g for r in results for g in r['gaps']]
    borel = [gl2_borel_coverage(q) for q in sorted(SUPPORTED)]

    summary = dict(groups = len(results),
                   pairs = sum(len(r['pairs']) for r in results),
                   splits = sum(r['splits'] for r in results),
                   violations = counts,
                   passed = not any(counts.values()) and
                   all(b['agree'] and b['proper'] for b in borel),
                   perfect_gap = any(g['group'] == 'A5' and g['order'] == 12
                                     for g in gaps))

    if log is not None:
        log.info('Group audit %s' % util.log_json(summary))
        for k, n in counts.items():
            if n: log.warning('%d %s violations' % (n, k))

    return dict(summary = summary, groups = results, gaps = gaps,
                borel = borel)
