import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmt import generators
from qmt.errors import NotABlock, NotComparable, OutsideDomain
from qmt.grainings import Partition, build_poset, enumerate_partitions, refines
from qmt.valuations import (
    HomValuation,
    cl,
    format_valuation,
    homs,
    logical_framework,
    pooled,
    restrict_hom,
    support_relation_check,
)


def brute_homs(p):
    """Maps E_p -> {0,1} preserving meet, join, 0 and 1, found by trying all of them."""
    events = sorted(p.events)
    full = p.full
    found = []
    for values in itertools.product((0, 1), repeat=len(events)):
        f = dict(zip(events, values))
        if f[0] != 0 or f[full] != 1:
            continue
        if all(f[A & B] == f[A] & f[B] and f[A | B] == f[A] | f[B] for A in events for B in events):
            found.append(f)
    return found


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_homs_are_all_homomorphisms(n):
    for p in enumerate_partitions(n):
        brute = brute_homs(p)
        ours = [phi.truth_table() for phi in homs(p)]
        assert sorted(map(sorted, (f.items() for f in brute))) == sorted(map(sorted, (f.items() for f in ours)))


def test_valuation_basics():
    p = Partition(3, (0b001, 0b110))
    phi = HomValuation(p, 0b110)
    assert phi(0b110) == 1 and phi(0b001) == 0 and phi(0b111) == 1
    with pytest.raises(OutsideDomain):
        phi(0b010)
    with pytest.raises(NotABlock):
        HomValuation(p, 0b010)
    assert format_valuation(phi, "abc") == "phi[{{a},{b,c}}]^{b,c}"


def test_restriction():
    fine = Partition.finest(3)
    mid = Partition(3, (0b011, 0b100))
    phi = HomValuation(fine, 0b010)
    assert restrict_hom(phi, mid) == HomValuation(mid, 0b011)
    with pytest.raises(NotComparable):
        restrict_hom(HomValuation(mid, 0b011), fine)


def test_three_path_cl(three):
    ac_b = Partition(3, (0b101, 0b010))
    a_bc = Partition(3, (0b001, 0b110))
    assert [phi.block for phi in cl(three, ac_b)] == [0b010]
    assert [phi.block for phi in cl(three, a_bc)] == [0b001]
    assert [phi.block for phi in cl(three, Partition.coarsest(3))] == [0b111]


def test_three_path_pooled(three):
    assert len(pooled(three, "V_D")) == 5
    assert len(pooled(three, "V_C")) == 3
    assert len(pooled(three, "V_PD")) == 1
    assert len(pooled(three, "V_PD-preclusive")) == 1
    with pytest.raises(ValueError):
        pooled(three, "V_X")


def test_framework(three):
    fw = logical_framework(three)
    assert fw.truth_values == (0, 1)
    assert len(fw.domains) == 3


def test_coin_cl_on_finest(coin):
    assert [phi.block for phi in cl(coin, Partition.finest(4))] == [1, 2, 4, 8]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_restriction_agrees_on_coarse_algebra(n):
    parts = enumerate_partitions(n)
    for p in parts:
        for phi in homs(p):
            assert support_relation_check(phi)
            assert restrict_hom(phi, p) == phi
            for q in parts:
                if refines(p, q):
                    psi = restrict_hom(phi, q)
                    # the restriction agrees with phi on the coarse algebra
                    assert all(psi(B) == phi(B) for B in q.events)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_cl_values_no_null_event(seed, n):
    t = generators.random_theory(seed, n)
    poset = build_poset(t)
    for p in poset.tagged("D"):
        for phi in cl(t, p):
            assert not any(phi(Z) for Z in p.events if t.is_null(Z))
        kept = {phi.block for phi in cl(t, p)}
        for phi in homs(p):
            if phi.block not in kept:
                assert any(phi(Z) for Z in p.events if t.is_null(Z))
