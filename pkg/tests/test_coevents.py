import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmt import coevents as ce
from qmt import generators
from qmt.errors import EmptyDual, ForeignEvent, NotMultiplicative, SpaceMismatch
from qmt.grainings import Partition, build_poset
from qmt.oracle import naive_schemes
from qmt.valuations import cl


def test_three_path_schemes(three):
    ab, ac, bc, full = 0b011, 0b101, 0b110, 0b111
    assert ce.multiplicative_scheme(three).duals == (ab,)
    assert ce.multiplicative_scheme(three, "literal").duals == (full,)
    assert ce.cons_d(three).duals == (ac, bc, full)
    assert ce.cons_c(three).duals == (full,)
    assert ce.cons_m(three).empty
    # loose reading adds the singleton blocks of the decoherent pairs
    assert ce.cons_d(three, "loose").duals == (0b001, 0b010, ac, bc, full)
    assert ce.cons_c(three, "loose").duals == (0b001, 0b010, full)


def test_three_path_preclusivity(three):
    assert ce.is_preclusive(three, ce.co_dual(3, 0b011))
    # {a}* values {a,c} true, and {a,c} is null
    assert not ce.is_preclusive(three, ce.co_dual(3, 0b001))


def test_result_records_flags(three):
    r = ce.cons_d(three, "loose")
    assert (r.name, r.reading, r.mode) == ("Cons_D", "loose", None)
    # Omega sits inside a block only of the one-block partition
    assert r.classicality[0b111] == (True, False, False)


def test_eval_and_support():
    phi = ce.co_dual(3, 0b011)
    assert [ce.eval(phi, B) for B in range(8)] == [0, 0, 0, 1, 0, 0, 0, 1]
    assert phi.support == frozenset({0b011, 0b111})
    assert phi.to_coevent().support == phi.support
    with pytest.raises(ForeignEvent):
        ce.eval(phi, 8)


def test_dual_errors():
    with pytest.raises(EmptyDual):
        ce.co_dual(2, 0)
    with pytest.raises(EmptyDual):
        ce.dual(ce.Coevent(2, frozenset(range(4))))
    with pytest.raises(NotMultiplicative) as exc:
        ce.dual(ce.Coevent(2, frozenset({0b01, 0b10, 0b11})))
    assert exc.value.payload["witness"]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_filters_are_exactly_multiplicative(n):
    # every nonempty support over 2^n events
    size = 1 << n
    for code in range(1, 1 << size):
        supp = frozenset(B for B in range(size) if code >> B & 1)
        phi = ce.Coevent(n, supp)
        assert ce.is_filter(supp, size - 1) == (ce.multiplicative_witness(phi) is None)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dual_round_trip(n):
    for A in range(1, 1 << n):
        phi = ce.co_dual(n, A)
        assert ce.dual(phi.to_coevent()) == A


def test_domination_reverses_inclusion():
    for A, B in itertools.product(range(1, 8), repeat=2):
        phi, psi = ce.co_dual(3, A), ce.co_dual(3, B)
        assert ce.dominates(phi, psi) == (B & ~A == 0)
        assert ce.dominates(phi, psi) == ce.dominates(phi.to_coevent(), psi.to_coevent())
    with pytest.raises(SpaceMismatch):
        ce.dominates(ce.co_dual(2, 1), ce.co_dual(3, 1))


def test_minimal_duals_modes():
    duals = [0b001, 0b011, 0b110]
    assert ce.minimal_duals(duals, "primitive") == [0b001, 0b110]
    assert ce.minimal_duals(duals, "literal") == [0b011, 0b110]


def test_lambda_a():
    assert ce.lambda_a(4, 0b0101) == Partition(4, (0b0101, 0b0010, 0b1000))


def test_classical_on():
    p = Partition(3, (0b001, 0b110))
    assert ce.is_classical_on(ce.co_dual(3, 0b100), p)
    assert not ce.is_classical_on(ce.co_dual(3, 0b101), p)


def test_coin_scheme_is_classical(coin):
    m = ce.multiplicative_scheme(coin)
    assert m.duals == (1, 2, 4, 8)


def _agrees_on(phi, p, psi):
    return all(ce.eval(phi, B) == psi(B) for B in p.events)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_schemes_match_oracle(seed, n):
    t = generators.random_theory(seed, n)
    poset = build_poset(t)
    for mode in ce.MODES:
        naive = naive_schemes(t, mode=mode)
        assert sorted(ce.multiplicative_scheme(t, mode, poset).duals) == naive["M"]
        assert sorted(ce.cons_m(t, mode, poset).duals) == naive["Cons_M"]
    for reading in ce.READINGS:
        naive = naive_schemes(t, reading=reading)
        assert sorted(ce.cons_d(t, reading, poset).duals) == naive["Cons_D"]
        assert sorted(ce.cons_c(t, reading, poset).duals) == naive["Cons_C"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_scheme_invariants(seed, n):
    t = generators.random_theory(seed, n)
    poset = build_poset(t)
    m = ce.multiplicative_scheme(t, poset=poset)
    assert all(ce.is_preclusive(t, c) for c in m)
    assert set(ce.cons_c(t, poset=poset).duals) <= set(ce.cons_d(t, poset=poset).duals)
    assert all(ce.is_preclusive(t, c) for c in ce.cons_c(t, poset=poset))
    for p in poset.tagged("PD"):
        assert all(ce.is_classical_on(c, p) for c in m)
        for psi in cl(t, p):
            assert any(_agrees_on(c, p, psi) for c in m)


def test_singleton_dual_classicality():
    a = ce.co_dual(3, 0b001)
    assert ce.is_classical_on(a, Partition(3, (0b001, 0b110)))
    assert ce.is_classical_on(a, Partition(3, (0b010, 0b101)))
    assert not ce.is_classical_on(ce.co_dual(3, 0b011), Partition.finest(3))
