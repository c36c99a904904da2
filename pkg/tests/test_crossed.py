import random

import pytest

from teichmuller.groups import (
    GroupAction,
    GroupHom,
    cyclic,
    metacyclic,
    quaternion_table,
    trivial_action,
)
from teichmuller.crossed import (
    Crossed2Extension,
    CrossedModule,
    baer_sum,
    cocycle_of_crossed2,
    trivial_crossed2,
    validate_crossed_module,
)
from teichmuller.gmod_cohomology import cohomology, is_cocycle, trivial_gmodule


def metacyclic_crossed2(r, s, t, f, ell):
    """The crossed 2-fold extension C_ell >-> C_{ell r} -> G(r,s,t,f) ->> C_s."""
    G, ext = metacyclic(r, s, t, f)
    L = ell * r
    C = cyclic(L)
    M = cyclic(ell)
    iota = GroupHom.checked(M, C, tuple((m * r) % L for m in range(ell)))
    boundary = GroupHom.checked(C, G, tuple(i % r for i in range(L)))
    rows = [tuple((c * pow(t, g // r, L)) % L for c in range(L)) for g in range(G.order)]
    action = GroupAction(G, C, tuple(rows))
    return Crossed2Extension(M=M, C=C, Gamma=G, G=cyclic(s), iota=iota,
                             boundary=boundary, pi=ext.quotient_hom, action=action)


def test_conjugation_crossed_module():
    G = quaternion_table()
    conj = GroupAction(G, G, tuple(tuple(G.conj(g, c) for c in range(G.order))
                                   for g in range(G.order)))
    cm = CrossedModule(G, G, GroupHom(G, G, tuple(range(G.order))), conj)
    assert validate_crossed_module(cm) == []


def test_abelian_kernel_trivial_map_crossed_module():
    M = cyclic(4)
    G = cyclic(2)
    cm = CrossedModule(M, G, GroupHom(M, G, tuple(0 for _ in range(4))),
                       GroupAction(G, M, ((0, 1, 2, 3), (0, 3, 2, 1))))
    assert validate_crossed_module(cm) == []


def test_metacyclic_crossed_module_valid():
    e2 = metacyclic_crossed2(4, 2, 3, 2, 2)
    assert e2.validate() == []


def test_broken_peiffer_is_reported():
    # the conjugation action replaced by the trivial one breaks Peiffer on Q8
    G = quaternion_table()
    cm = CrossedModule(G, G, GroupHom(G, G, tuple(range(G.order))),
                       trivial_action(G, G))
    report = validate_crossed_module(cm)
    assert any("Peiffer" in line or "equivariance" in line for line in report)


def test_trivial_crossed2_and_zero_class():
    Q = cyclic(2)
    M = trivial_gmodule(Q, [2])
    e0 = trivial_crossed2(Q, M)
    assert e0.validate() == []
    xi = cocycle_of_crossed2(e0)
    assert xi.is_zero()


def test_flagship_class_nonzero_and_seed_independent():
    e2 = metacyclic_crossed2(4, 2, 3, 2, 2)
    xi = cocycle_of_crossed2(e2)
    assert is_cocycle(xi) is None
    H = cohomology(cyclic(2), xi.module, 3)
    cls = H.class_of(xi)
    assert cls == (1,)
    for seed in range(1, 6):
        xi2 = cocycle_of_crossed2(e2, section_seed=seed)
        assert H.class_of(xi2) == cls


def test_cocycle_identity_exhaustive_small():
    for args in [(4, 2, 3, 2, 2), (3, 6, 2, 0, 3), (4, 4, 3, 2, 4), (6, 2, 5, 3, 2)]:
        e2 = metacyclic_crossed2(*args)
        assert e2.validate() == []
        assert is_cocycle(cocycle_of_crossed2(e2)) is None


def test_baer_sum_with_trivial_is_neutral():
    e2 = metacyclic_crossed2(4, 2, 3, 2, 2)
    module, _, _ = e2.gmodule()
    e0 = trivial_crossed2(e2.G, module)
    s = baer_sum(e2, e0)
    assert s.validate() == []
    H = cohomology(e2.G, module, 3)
    assert H.class_of(cocycle_of_crossed2(s)) == H.class_of(cocycle_of_crossed2(e2))


def test_baer_sum_self_is_two_torsion_zero():
    e2 = metacyclic_crossed2(4, 2, 3, 2, 2)
    s = baer_sum(e2, e2)
    assert s.validate() == []
    module, _, _ = e2.gmodule()
    H = cohomology(e2.G, module, 3)
    assert H.class_of(cocycle_of_crossed2(s)) == (0,)


def test_baer_sum_additive_on_classes():
    # summands may have different middle terms as long as (G, M) agree
    pairs = [((8, 2, 7, 4, 2), (4, 2, 3, 2, 2)),
             ((4, 4, 3, 2, 4), (4, 4, 3, 0, 4)),
             ((4, 2, 3, 2, 2), (4, 2, 3, 0, 2))]
    for a_args, b_args in pairs:
        a = metacyclic_crossed2(*a_args)
        b = metacyclic_crossed2(*b_args)
        module, _, _ = a.gmodule()
        H = cohomology(a.G, module, 3)
        s = baer_sum(a, b)
        assert s.validate() == []
        ca, cb, cs = (H.class_of(cocycle_of_crossed2(x)) for x in (a, b, s))
        assert cs == tuple((x + y) % f for x, y, f in zip(ca, cb, H.invariant_factors))
        # the first pair adds two nonzero classes to zero
        if a_args == (8, 2, 7, 4, 2):
            assert ca != (0,) and cb != (0,) and cs == (0,)


def test_e0_baer_sum_with_itself():
    Q = cyclic(2)
    M = trivial_gmodule(Q, [4])
    e0 = trivial_crossed2(Q, M)
    s = baer_sum(e0, e0)
    assert s.validate() == []
    assert cocycle_of_crossed2(s).is_zero() or \
        cohomology(Q, M, 3).class_of(cocycle_of_crossed2(s)) == \
        tuple([0] * len(cohomology(Q, M, 3).invariant_factors))
