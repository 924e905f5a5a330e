################################################################################
#                                                                              #
#                         This file is part of geoshort.                       #
#                                                                              #
#                  Released under the MIT license, see LICENSE.                #
#                                                                              #
################################################################################

import pytest

from geoshort.Group import GroupHom, SubgroupEmbedding
from geoshort.GroupCatalog import cyclic, symmetric, alternating
from geoshort.GroupAudit import (conjugate_union, CosetAction, burnside_audit,
                                 conj_class_map, surjectivity_trichotomy,
                                 split_decompose, find_splits, semidirect_ses,
                                 gl2_borel_coverage, audit_group,
                                 audit_catalog)
from geoshort.Errors import PreconditionError, NotSplitSES


def _involution(G):
    return next(a for a in G.elements if G.element_order(a) == 2)


def test_conjugate_union():
    G = symmetric(3)
    H = SubgroupEmbedding.generated(G, [_involution(G)])

    union, covers = conjugate_union(G, H)
    assert len(union) == 4
    assert not covers

    union, covers = conjugate_union(G, G.elements)
    assert covers


def test_coset_action_and_burnside():
    G = symmetric(3)
    H = SubgroupEmbedding.generated(G, [_involution(G)])
    action = CosetAction(G, H)

    assert action.degree == 3
    assert action.is_transitive()
    assert action.kernel() == frozenset([G.identity])

    report = burnside_audit(action)
    assert report['average'] == '1'
    assert report['exact']
    assert report['image_order'] == 6
    assert G.element_order(report['x0']) == 3
    assert report['outside_union']


def test_burnside_on_cyclic_quotient():
    G = cyclic(4)
    report = burnside_audit(CosetAction(G, {0, 2}))

    assert report['degree'] == 2
    assert report['tau0'] == [1, 0]
    assert G.element_order(report['x0']) == 4
    assert report['outside_union']

    with pytest.raises(PreconditionError):
        burnside_audit(CosetAction(G, G.elements))


def test_conj_class_map():
    G = symmetric(3)
    full = conj_class_map(SubgroupEmbedding(G, G.elements))
    assert full['surjective'] and full['criterion'] and full['agree']

    H = SubgroupEmbedding.generated(G, [_involution(G)])
    part = conj_class_map(H)
    assert not part['surjective']
    assert part['agree']
    assert part['well_defined']


def test_trichotomy_perfect_gap():
    G = alternating(5)
    S = next(S for S in G.subgroups() if len(S) == 12)
    tri = surjectivity_trichotomy(SubgroupEmbedding(G, S))

    assert (tri['hom_surjective'], tri['conj_surjective'],
            tri['abelianized_surjective']) == (False, False, True)
    assert tri['implications']


def test_split_decompose():
    G = symmetric(3)
    splits = find_splits(G)
    assert len(splits) == 1

    d = split_decompose(*semidirect_ses(G, *splits[0]))
    assert d['total'] and d['unique']
    assert len(d['rows']) == 6

    assert find_splits(cyclic(4)) == []


def test_non_split_sequences():
    Z4, Z2 = cyclic(4), cyclic(2)
    g = SubgroupEmbedding(Z4, {0, 2})
    h = GroupHom(Z4, Z2, [0, 1, 0, 1])

    # j(1) = 2 is a homomorphism but h(2) = 0
    with pytest.raises(NotSplitSES) as e:
        split_decompose(g, h, GroupHom(Z2, Z4, [0, 2]))
    assert 'h o j' in str(e.value)

    with pytest.raises(NotSplitSES) as e:
        split_decompose(g, h, GroupHom(Z2, Z4, [0, 1], check = False))
    assert 'j is not a homomorphism' in str(e.value)


def test_gl2_borel_coverage():
    report = gl2_borel_coverage(2)
    assert report['order'] == 6
    assert report['borel_order'] == 2
    assert report['covered'] == 4
    assert report['coverage'] == '2/3'
    assert report['agree']
    assert report['proper']

    report = gl2_borel_coverage(3)
    assert report['order'] == 48
    assert report['agree']
    assert report['proper']


def test_audit_group():
    result = audit_group(symmetric(3))
    assert len(result['pairs']) == 6
    assert result['splits'] == 1
    assert not any(result['violations'].values())

    # Transposition subgroups reach every class only after abelianizing
    assert len(result['gaps']) == 3


def test_audit_catalog():
    result = audit_catalog(max_order = 6, extras = False)
    summary = result['summary']

    assert summary['groups'] == 8
    assert summary['passed']
    assert not summary['perfect_gap']
    assert len(result['borel']) == 7


@pytest.mark.slow
def test_audit_catalog_finds_perfect_gap():
    result = audit_catalog(max_order = 1, extras = True)
    assert result['summary']['groups'] == 2
    assert result['summary']['perfect_gap']
