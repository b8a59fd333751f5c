import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmt import generators, topos
from qmt.errors import (
    ForeignElement,
    HomeNotInPoset,
    NotAccessibleAnywhere,
    NotAPartialOrder,
    NotASubobject,
)
from qmt.grainings import Partition, build_poset, enumerate_partitions
from qmt.oracle import naive_implies, naive_upper_sets, naive_valuation_subobject
from qmt.valuations import HomValuation


def chain(k):
    return topos.FinitePoset.from_relation(range(k), [(i, i + 1) for i in range(k - 1)])


def antichain(k):
    return topos.FinitePoset.from_relation(range(k), [])


def all_posets(k):
    """Every partial order on k labelled points, by brute force over relations."""
    pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
    out = []
    for code in range(1 << len(pairs)):
        rel = [pairs[t] for t in range(len(pairs)) if code >> t & 1]
        try:
            P = topos.FinitePoset.from_relation(range(k), rel)
        except NotAPartialOrder:
            continue
        if sorted(rel) == sorted((i, j) for i in range(k) for j in range(k) if i != j and P.leq(i, j)):
            out.append(P)
    return out


def adjunction_failures(alg):
    C = alg.carrier
    return [(a, b, c) for a in C for b in C for c in C
            if (c & ~alg.implies(a, b) == 0) != (c & a & ~b == 0)]


def test_poset_counts():
    # labelled posets on 1..3 points: 1, 3, 19
    assert [len(all_posets(k)) for k in (1, 2, 3)] == [1, 3, 19]


def test_not_a_partial_order():
    with pytest.raises(NotAPartialOrder):
        topos.FinitePoset.from_relation([0, 1], [(0, 1), (1, 0)])
    with pytest.raises(ForeignElement):
        chain(2).pos(5)


def test_upper_set_counts():
    assert len(chain(4).upper_sets()) == 5
    assert len(antichain(4).upper_sets()) == 16
    # one-block top, three two-block middles, the finest bottom: 10 antichains
    assert len(topos.as_poset(enumerate_partitions(3)).upper_sets()) == 10


def test_upper_sets_of_partition_lattice_match_naive():
    P = topos.as_poset(enumerate_partitions(4))
    assert P.upper_sets() == naive_upper_sets(P)


def test_chain_heyting():
    P = chain(3)  # 0 < 1 < 2; upper sets are 0, {2}, {1,2}, {0,1,2}
    H = topos.heyting_ops(P)
    assert H.carrier == (0, 0b100, 0b110, 0b111)
    assert H.implies(0b110, 0b100) == 0b100
    assert H.implies(0b100, 0b110) == 0b111
    assert H.neg(0b100) == 0
    assert H.violations() == []


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_all_small_posets(k):
    for P in all_posets(k) if k < 4 else [chain(4), antichain(4)]:
        H = topos.heyting_ops(P)
        assert list(H.carrier) == naive_upper_sets(P)
        assert adjunction_failures(H) == []
        assert H.violations() == []
        assert topos.gamma_iso_check(P)


def test_sieves():
    P = chain(3)
    assert [s.mask for s in topos.sieves_at(P, 1)] == [0, 0b100, 0b110]
    assert topos.is_sieve(P, topos.Sieve(1, 0b100))
    assert not topos.is_sieve(P, topos.Sieve(1, 0b010))


def test_generated_algebra_falls_back_when_ambient_escapes():
    P = antichain(2)
    H = topos.generate_algebra([0b01, 0b11], P)
    assert H.carrier == (0b01, 0b11)
    # the ambient 01 => 01 is 11, inside; 11 => 01 ambient is 01, inside
    assert H.implies(0b11, 0b01) == 0b01
    G = topos.generate_algebra([0b01, 0b10], antichain(3))
    assert G.carrier == (0, 0b01, 0b10, 0b11)
    # ambient 01 => 0 is {1,2}, not in the carrier; relative pseudocomplement is 10
    assert G.implies(0b01, 0) == 0b10
    assert G.divergences
    assert adjunction_failures(G) == []
    with pytest.raises(ForeignElement):
        topos.generate_algebra([0b001], chain(3))


def test_three_path_literal_degenerate(three):
    bd = build_poset(three).tagged("D")
    emb = topos.h_map(three, bd)
    P = emb.poset
    assert emb.degenerate
    for phi in emb.valuations:
        assert emb.images[phi].mask == P.up[P.pos(phi.partition)]
    # two valuations per two-block partition share their image
    assert len(emb.collisions()) == 2
    assert not emb.injective
    assert len(emb.algebra) == 4
    F, S = emb.subobject.parent, emb.subobject
    for p in range(len(P)):
        for x in F.stage(p):
            assert topos.characteristic(F, S, p, x).mask == P.up[p]


def test_three_path_with_pd_generators(three):
    poset = build_poset(three)
    emb = topos.h_map(three, poset.tagged("D"), poset.tagged("PD"))
    P = emb.poset
    top = 1 << P.pos(Partition.coarsest(3))
    assert not emb.degenerate
    assert {emb.images[phi].mask for phi in emb.valuations} == {top}
    naive = naive_valuation_subobject(three, P.elements, poset.tagged("PD"))
    assert [len(s) for s in naive] == [len(s) for s in emb.subobject.stages]


def test_event_embedding(three):
    bd = build_poset(three).tagged("D")
    ev = topos.event_embedding(three, bd)
    P = ev.poset
    assert ev.images[0b111].mask == P.all
    home = P.pos(Partition(3, (0b001, 0b110)))
    assert ev.images[0b001].mask == P.up[home] == (1 << home) | 1 << P.pos(Partition.coarsest(3))
    assert ev.algebra.violations() == []
    with pytest.raises(NotAccessibleAnywhere):
        topos.global_element_event(three, [Partition.coarsest(3)], 0b001)


def test_foreign_home(three):
    phi = HomValuation(Partition.finest(3), 1)
    with pytest.raises(HomeNotInPoset):
        topos.global_element_valuation(three, [Partition.coarsest(3)], phi)


def test_characteristic_guard(three):
    bd = build_poset(three).tagged("D")
    S = topos.valuation_subobject(three, bd)
    other = topos.valuation_varying_set(three, bd)
    with pytest.raises(NotASubobject):
        topos.characteristic(other, S, 0, next(iter(S.stages[0])))


def test_constant_functor_laws():
    F = topos.constant_varying_set(chain(3), range(3))
    assert F.law_violations() == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_laws_on_random_theories(seed, n):
    t = generators.random_theory(seed, n)
    poset = build_poset(t)
    for tag in ("D", "P", "PD"):
        members = poset.tagged(tag)
        for Q in (None, poset.tagged("PD")):
            emb = topos.h_map(t, members, Q)
            F, S = emb.subobject.parent, emb.subobject
            assert F.law_violations() == []
            assert S.violations() == []
            assert topos.characteristic_violations(F, S) == []
            assert emb.algebra.violations() == []
        if len(members) <= 8:
            H = topos.heyting_ops(members)
            assert topos.gamma_iso_check(members)
            for a, b in itertools.product(H.carrier, repeat=2):
                assert naive_implies(H.carrier, a, b) == H.implies(a, b)
