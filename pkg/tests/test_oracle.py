import pytest

from qmt import generators
from qmt.oracle import full_diff, naive_implies, naive_schemes, naive_tags


def test_naive_three_path(three):
    mu, parts, dec, sep = naive_tags(three)
    assert mu == [0, 1, 1, 4, 1, 0, 0, 1]
    assert len(parts) == 5 and len(dec) == 3 and len(sep) == 1
    s = naive_schemes(three)
    assert s["Cons_D"] == [0b101, 0b110, 0b111]
    assert s["Cons_C"] == [0b111]
    assert s["M"] == [0b011]
    assert s["Cons_M"] == []


def test_naive_implies_on_chain():
    carrier = [0, 0b100, 0b110, 0b111]
    assert naive_implies(carrier, 0b110, 0b100) == 0b100
    assert naive_implies(carrier, 0, 0) == 0b111


@pytest.mark.parametrize("factory", [generators.coin, generators.three_path, generators.single])
def test_named_theories(factory):
    assert not any(full_diff(factory()).values())


def test_seeded_suite():
    for t in generators.suite(40, seed=11, max_n=4):
        assert not any(full_diff(t).values()), t


def test_probability_suite():
    for seed in range(15):
        assert not any(full_diff(generators.random_probability_theory(seed, 4)).values())
