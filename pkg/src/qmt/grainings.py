"""Coarse grainings: partitions of the sample space and the poset they form.

A partition ``L`` is finer than ``M`` (``L <= M``) when every block of ``L``
sits inside a block of ``M``; equivalently the Boolean sublattice generated
by ``L`` contains the one generated by ``M``.  The coarsest partition
``{Omega}`` is the top of the poset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    ForeignEvent,
    InternalUpperSetViolation,
    InvalidPartition,
    NotAnUpperSet,
    SpaceMismatch,
)
from .measure import HistoriesTheory, format_event, max_histories, members


@dataclass(frozen=True)
class Partition:
    """A set partition of ``range(n)``; blocks are bitmasks sorted by lowest member."""

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        full = (1 << self.n) - 1
        seen = 0
        for b in self.blocks:
            if b <= 0 or b & seen or b & ~full:
                raise InvalidPartition(f"blocks {self.blocks} do not partition {self.n} histories")
            seen |= b
        if seen != full:
            raise InvalidPartition(f"blocks {self.blocks} do not cover {self.n} histories")
        canonical = tuple(sorted(self.blocks, key=lambda b: b & -b))
        if canonical != self.blocks:
            object.__setattr__(self, "blocks", canonical)

    @classmethod
    def of(cls, n: int, blocks: Iterable[int]) -> Partition:
        return cls(n, tuple(blocks))

    @classmethod
    def finest(cls, n: int) -> Partition:
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def coarsest(cls, n: int) -> Partition:
        return cls(n, ((1 << n) - 1,))

    @classmethod
    def from_labels(cls, labels: Sequence[str], blocks: Iterable[Iterable[str]]) -> Partition:
        index = {x: i for i, x in enumerate(labels)}
        try:
            masks = [sum(1 << index[x] for x in block) for block in blocks]
        except KeyError as exc:
            raise InvalidPartition(f"unknown history label {exc.args[0]!r}") from None
        return cls(len(labels), tuple(masks))

    def __len__(self):
        return len(self.blocks)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def block_of(self, i: int) -> int:
        for b in self.blocks:
            if b >> i & 1:
                return b
        raise ForeignEvent(f"history {i} is outside the space")

    def block_containing(self, A: int) -> int | None:
        """The unique block containing nonempty ``A``, if there is one."""
        if A == 0:
            return None
        b = self.block_of((A & -A).bit_length() - 1)
        return b if A & ~b == 0 else None

    @cached_property
    def events(self) -> frozenset[int]:
        return frozenset(self.unions())

    def unions(self) -> list[int]:
        out = [0]
        for b in self.blocks:
            out += [u | b for u in out]
        return out

    def contains_event(self, A: int) -> bool:
        """Whether ``A`` is a union of blocks."""
        return all(A & b == 0 or A & b == b for b in self.blocks)

    def format(self, labels: Sequence[str]) -> str:
        return "{" + ",".join(format_event(b, labels) for b in self.blocks) + "}"

    def to_labels(self, labels: Sequence[str]) -> list[list[str]]:
        return [[labels[i] for i in members(b)] for b in self.blocks]


@dataclass(frozen=True)
class Sublattice:
    source: Partition
    events: frozenset[int]


def _check_n(n: int):
    cap = max_histories()
    if n < 1 or n > cap:
        raise CapExceeded(f"n={n} outside 1..{cap}", n=n, cap=cap)


def enumerate_partitions(n: int) -> list[Partition]:
    """All set partitions of ``range(n)`` in restricted-growth-string order.

    The first is ``{Omega}``, the last the partition into singletons.
    """
    _check_n(n)
    out = []
    rgs = [0] * n

    def rec(i, top):
        if i == n:
            blocks = [0] * (top + 1)
            for j, c in enumerate(rgs):
                blocks[c] |= 1 << j
            out.append(Partition(n, tuple(blocks)))
            return
        for c in range(top + 2):
            rgs[i] = c
            rec(i + 1, max(top, c))

    rgs[0] = 0
    rec(1, 0)
    return out


def _same_space(a: Partition, b: Partition):
    if a.n != b.n:
        raise SpaceMismatch(f"partitions over {a.n} and {b.n} histories")


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of ``fine`` lies inside some block of ``coarse``."""
    _same_space(fine, coarse)
    return all(coarse.block_containing(b) is not None for b in fine.blocks)


def sublattice(partition: Partition) -> Sublattice:
    return Sublattice(partition, partition.events)


class CoarseGrainedTheory:
    """The theory restricted to the sublattice generated by a partition."""

    def __init__(self, theory: HistoriesTheory, partition: Partition):
        if partition.n != theory.n:
            raise SpaceMismatch("partition and theory have different sample spaces")
        self.theory = theory
        self.partition = partition
        self.events = tuple(sorted(partition.events))

    def mu(self, A: int):
        if A not in self.partition.events:
            raise ForeignEvent(f"{self.theory.fmt(A)} is not in the coarse-grained algebra")
        return self.theory.mu(A)

    def measure(self) -> dict[int, object]:
        return {A: self.theory.mu(A) for A in self.events}

    def is_probability(self) -> bool:
        m = self.theory.mu_table
        ev = self.events
        return all(self.theory.close(m[A | B], m[A] + m[B])
                   for A in ev for B in ev if A < B and not A & B)


def coarse_grain(theory: HistoriesTheory, partition: Partition) -> CoarseGrainedTheory:
    return CoarseGrainedTheory(theory, partition)


def is_decoherent(theory: HistoriesTheory, partition: Partition) -> bool:
    """Pairwise block additivity; for quantum measures this gives full additivity."""
    if partition.n != theory.n:
        raise SpaceMismatch("partition and theory have different sample spaces")
    m = theory.mu_table
    bl = partition.blocks
    for i in range(len(bl)):
        for j in range(i + 1, len(bl)):
            if not theory.close(m[bl[i] | bl[j]], m[bl[i]] + m[bl[j]]):
                return False
    return True


def _block_separable(theory: HistoriesTheory, block: int) -> bool:
    return all(theory.is_null(block & Z) for Z in theory.null_events())


def is_preclusively_separable(theory: HistoriesTheory, partition: Partition) -> bool:
    """Every null event meets every block in a null event."""
    if partition.n != theory.n:
        raise SpaceMismatch("partition and theory have different sample spaces")
    return all(_block_separable(theory, b) for b in partition.blocks)


TAGS = ("D", "P", "PD", "O", "E")


@dataclass(frozen=True)
class PosetTag:
    """A named upper subset of the graining poset."""

    name: str
    members: tuple[Partition, ...]

    def __contains__(self, partition):
        return partition in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True, eq=False)
class GrainingPoset:
    """All partitions of the theory's space, refinement-ordered and tagged."""

    theory: HistoriesTheory
    elements: tuple[Partition, ...]
    decoherent: tuple[bool, ...]
    separable: tuple[bool, ...]
    index: dict = field(repr=False)

    def __len__(self):
        return len(self.elements)

    @cached_property
    def order(self) -> np.ndarray:
        """``order[i, j]`` iff ``elements[i]`` refines ``elements[j]``; quadratic in Bell(n)."""
        return refinement_matrix(self.elements)

    def leq(self, a: Partition, b: Partition) -> bool:
        return refines(a, b)

    def flags(self, tag: str) -> tuple[bool, ...]:
        if tag == "D":
            return self.decoherent
        if tag == "P":
            return self.separable
        if tag == "PD":
            return tuple(d and p for d, p in zip(self.decoherent, self.separable))
        raise ValueError(f"tag must be D, P or PD, not {tag!r}")

    def tagged(self, tag: str) -> tuple[Partition, ...]:
        return tuple(e for e, f in zip(self.elements, self.flags(tag)) if f)

    def hasse_edges(self, subset: Sequence[Partition] | None = None) -> list[tuple[int, int]]:
        """Covering pairs ``(i, j)`` (``i`` finer) among ``subset`` indices."""
        if subset is None:
            # in the full partition lattice the covers are exactly the two-block merges
            return sorted((i, self.index[merge_blocks(p, a, b)])
                          for i, p in enumerate(self.elements)
                          for a in range(len(p)) for b in range(a + 1, len(p)))
        idx = [self.index[p] for p in subset]
        return [(idx[i], idx[j]) for i, j in hasse_pairs(refinement_matrix(list(subset)))]


def refinement_matrix(parts: Sequence[Partition]) -> np.ndarray:
    """``out[i, j]`` iff ``parts[i]`` refines ``parts[j]``.

    Compares, history by history, the block containing it in both partitions.
    """
    if not parts:
        return np.zeros((0, 0), dtype=bool)
    n = parts[0].n
    own = np.array([[p.block_of(i) for i in range(n)] for p in parts], dtype=np.int64)
    out = np.empty((len(parts), len(parts)), dtype=bool)
    for i, row in enumerate(own):
        out[i] = ((row[None, :] & ~own) == 0).all(axis=1)
    return out


def hasse_pairs(order: np.ndarray) -> list[tuple[int, int]]:
    strict = order & ~np.eye(len(order), dtype=bool)
    via = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
    cover = strict & ~via
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(cover))]


def build_poset(theory: HistoriesTheory) -> GrainingPoset:
    parts = enumerate_partitions(theory.n)
    sep_cache: dict[int, bool] = {}

    def separable(p):
        for b in p.blocks:
            if b not in sep_cache:
                sep_cache[b] = _block_separable(theory, b)
            if not sep_cache[b]:
                return False
        return True

    return GrainingPoset(
        theory=theory,
        elements=tuple(parts),
        decoherent=tuple(is_decoherent(theory, p) for p in parts),
        separable=tuple(separable(p) for p in parts),
        index={p: i for i, p in enumerate(parts)},
    )


def merge_blocks(p: Partition, i: int, j: int) -> Partition:
    blocks = [b for k, b in enumerate(p.blocks) if k not in (i, j)]
    return Partition(p.n, tuple(blocks + [p.blocks[i] | p.blocks[j]]))


def upper_set_witness(chosen: Iterable[Partition]):
    """A pair ``(inside, outside)`` with inside <= outside, or ``None``.

    Every coarsening is reached by repeatedly merging two blocks, so checking
    the single-merge covers suffices.
    """
    chosen = set(chosen)
    for p in sorted(chosen, key=lambda q: (-len(q), q.blocks)):
        k = len(p)
        for i in range(k):
            for j in range(i + 1, k):
                q = merge_blocks(p, i, j)
                if q not in chosen:
                    return p, q
    return None


def sub_poset(poset: GrainingPoset, tag: str) -> PosetTag:
    chosen = poset.tagged(tag)
    witness = upper_set_witness(chosen)
    if witness is not None:
        labels = poset.theory.labels
        raise InternalUpperSetViolation(
            f"B_{tag} is not an upper set",
            witness=[w.format(labels) for w in witness],
        )
    return PosetTag(tag, chosen)


def designate_upper(poset: GrainingPoset, chosen: Iterable[Partition], tag: str) -> PosetTag:
    """Validate a user-designated observable (O) or experiment (E) poset."""
    if tag not in ("O", "E"):
        raise ValueError("designated posets are tagged O or E")
    chosen = list(dict.fromkeys(chosen))
    for p in chosen:
        if p not in poset.index:
            raise SpaceMismatch(f"{p} is not an element of the poset")
    witness = upper_set_witness(chosen)
    if witness is not None:
        labels = poset.theory.labels
        raise NotAnUpperSet(
            f"designated B_{tag} is not an upper set: "
            f"{witness[0].format(labels)} is in but its coarsening {witness[1].format(labels)} is not",
            witness=[w.format(labels) for w in witness],
        )
    return PosetTag(tag, tuple(sorted(chosen, key=lambda p: poset.index[p])))


def poset_dot(poset: GrainingPoset, subset: Sequence[Partition] | None = None) -> str:
    """Graphviz source for the Hasse diagram, coloured by the D/P tags."""
    labels = poset.theory.labels
    idx = list(range(len(poset))) if subset is None else [poset.index[p] for p in subset]
    lines = ["digraph B {", "  rankdir=BT;", '  node [shape=box, style=filled, fillcolor="white"];']
    for i in idx:
        d, p = poset.decoherent[i], poset.separable[i]
        color = "palegreen" if d and p else "lightblue" if d else "khaki" if p else "white"
        name = poset.elements[i].format(labels).replace('"', '\\"')
        lines.append(f'  n{i} [label="{name}", fillcolor="{color}"];')
    for i, j in poset.hasse_edges(None if subset is None else subset):
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
