import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmt import generators
from qmt.errors import (
    CapExceeded,
    ForeignEvent,
    InternalUpperSetViolation,
    InvalidPartition,
    NotAnUpperSet,
    SpaceMismatch,
)
from qmt.grainings import (
    Partition,
    build_poset,
    coarse_grain,
    designate_upper,
    enumerate_partitions,
    is_decoherent,
    is_preclusively_separable,
    merge_blocks,
    poset_dot,
    refinement_matrix,
    refines,
    sub_poset,
    sublattice,
    upper_set_witness,
)
from qmt.oracle import naive_sublattice, naive_tags


def brute_partitions(n):
    """Every labelling of n points, canonicalised to a set of blocks."""
    seen = set()
    for f in itertools.product(range(n), repeat=n):
        blocks = {}
        for i, k in enumerate(f):
            blocks.setdefault(k, 0)
            blocks[k] |= 1 << i
        seen.add(frozenset(blocks.values()))
    return seen


@pytest.mark.parametrize("n", range(1, 6))
def test_enumeration_matches_brute_force(n):
    parts = enumerate_partitions(n)
    assert {frozenset(p.blocks) for p in parts} == brute_partitions(n)
    assert len(parts) == len(set(parts))


def test_bell_numbers():
    # frozen from brute_partitions for n <= 5, extended by the Bell recurrence
    assert [len(enumerate_partitions(n)) for n in range(1, 8)] == [1, 2, 5, 15, 52, 203, 877]


def test_enumeration_order_and_cap(monkeypatch):
    parts = enumerate_partitions(3)
    assert parts[0] == Partition.coarsest(3)
    assert parts[-1] == Partition.finest(3)
    monkeypatch.setenv("QMT_MAX_HISTORIES", "3")
    with pytest.raises(CapExceeded):
        enumerate_partitions(4)


def test_partition_validation():
    with pytest.raises(InvalidPartition):
        Partition(3, (0b011, 0b010))
    with pytest.raises(InvalidPartition):
        Partition(3, (0b011,))
    assert Partition(3, (0b100, 0b011)).blocks == (0b011, 0b100)


def test_sublattice_and_refinement():
    fine = Partition(3, (0b001, 0b110))
    assert sublattice(fine).events == frozenset({0, 1, 6, 7})
    assert refines(fine, Partition.coarsest(3))
    assert not refines(Partition.coarsest(3), fine)
    with pytest.raises(SpaceMismatch):
        refines(fine, Partition.coarsest(2))


def test_three_path_tags(three):
    poset = build_poset(three)
    fmt = lambda tag: sorted(p.format(three.labels) for p in poset.tagged(tag))
    assert fmt("D") == ["{{a,b,c}}", "{{a,c},{b}}", "{{a},{b,c}}"]
    assert fmt("P") == ["{{a,b,c}}"]
    assert fmt("PD") == ["{{a,b,c}}"]


def test_three_path_verdicts(three):
    assert is_decoherent(three, Partition(3, (0b001, 0b110)))
    assert not is_decoherent(three, Partition.finest(3))
    # {a,c} is null, yet its trace {c} on the block {b,c} is not
    assert not is_preclusively_separable(three, Partition(3, (0b001, 0b110)))


def test_coarse_grain(three):
    cg = coarse_grain(three, Partition(3, (0b101, 0b010)))
    assert cg.is_probability()
    assert cg.mu(0b101) == 0
    with pytest.raises(ForeignEvent):
        cg.mu(0b001)
    assert not coarse_grain(three, Partition.finest(3)).is_probability()


def test_coin_every_partition_decoherent(coin):
    poset = build_poset(coin)
    assert len(poset.tagged("D")) == 15
    assert len(poset.tagged("PD")) == 15


def test_hasse_edges_are_single_merges():
    t = generators.random_theory(3, 4)
    poset = build_poset(t)
    order = refinement_matrix(poset.elements)
    covers = set()
    for i, j in itertools.permutations(range(len(poset)), 2):
        if order[i, j] and not any(order[i, k] and order[k, j] for k in range(len(poset)) if k not in (i, j)):
            covers.add((i, j))
    assert set(poset.hasse_edges()) == covers


def test_designate_upper(three):
    poset = build_poset(three)
    top = Partition.coarsest(3)
    mid = Partition(3, (0b001, 0b110))
    tag = designate_upper(poset, [top, mid], "O")
    assert set(tag) == {top, mid}
    with pytest.raises(NotAnUpperSet) as exc:
        designate_upper(poset, [mid], "O")
    assert exc.value.payload


def test_upper_set_witness():
    mid = Partition(3, (0b001, 0b110))
    assert upper_set_witness([mid]) == (mid, Partition.coarsest(3))
    assert upper_set_witness([mid, Partition.coarsest(3)]) is None


def test_sub_poset_guard(three):
    poset = build_poset(three)
    broken = type(poset)(poset.theory, poset.elements,
                         tuple(p == Partition.finest(3) for p in poset.elements),
                         poset.separable, poset.index)
    with pytest.raises(InternalUpperSetViolation):
        sub_poset(broken, "D")


def test_dot(three):
    dot = poset_dot(build_poset(three))
    assert dot.startswith("digraph")
    assert "palegreen" in dot and "lightblue" in dot


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_tags_match_oracle(seed, n):
    t = generators.random_theory(seed, n)
    poset = build_poset(t)
    _, _, dec, sep = naive_tags(t)
    assert set(poset.tagged("D")) == set(dec)
    assert set(poset.tagged("P")) == set(sep)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_tags_are_upper_sets(seed, n):
    poset = build_poset(generators.random_theory(seed, n))
    for tag in ("D", "P", "PD"):
        chosen = set(poset.tagged(tag))
        for p in chosen:
            for i, j in itertools.combinations(range(len(p)), 2):
                assert merge_blocks(p, i, j) in chosen
        assert Partition.coarsest(n) in chosen


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.data())
def test_sublattice_matches_naive(n, data):
    parts = enumerate_partitions(n)
    p = data.draw(st.sampled_from(parts))
    assert p.events == frozenset(naive_sublattice(p))


def test_three_path_more_verdicts(three):
    assert not is_decoherent(three, Partition(3, (0b100, 0b011)))
    assert not is_preclusively_separable(three, Partition(3, (0b010, 0b101)))
    assert is_decoherent(three, Partition.coarsest(3))
