"""Classical truth valuations on coarse-grained algebras.

On the algebra generated by a partition the nonzero lattice homomorphisms
into Z2 are exactly the maps ``B -> [block <= B]``, one per block, so a
valuation is keyed by its (partition, block) pair.  Events outside the
partition's algebra have no truth value here; asking for one raises
:class:`OutsideDomain`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotABlock, NotComparable, OutsideDomain, SpaceMismatch
from .grainings import GrainingPoset, Partition, build_poset, refines
from .measure import HistoriesTheory, format_event

Z2 = (0, 1)
KINDS = ("V_D", "V_C", "V_PD", "V_PD-preclusive")


@dataclass(frozen=True)
class HomValuation:
    """The homomorphism on ``E_partition`` sending ``block`` to 1."""

    partition: Partition
    block: int

    def __post_init__(self):
        if self.block not in self.partition.blocks:
            raise NotABlock(f"{self.block} is not a block of {self.partition}")

    @property
    def domain(self) -> frozenset[int]:
        return self.partition.events

    def __call__(self, B: int) -> int:
        return eval_hom(self, B)

    def support(self) -> frozenset[int]:
        return frozenset(B for B in self.partition.events if self.block & ~B == 0)

    def truth_table(self) -> dict[int, int]:
        return {B: int(self.block & ~B == 0) for B in sorted(self.partition.events)}


def homs(partition: Partition) -> list[HomValuation]:
    return [HomValuation(partition, b) for b in partition.blocks]


def eval_hom(phi: HomValuation, B: int) -> int:
    if not phi.partition.contains_event(B) or B > phi.partition.full or B < 0:
        raise OutsideDomain(f"event {B} is not in the domain of this valuation", event=B)
    return int(phi.block & ~B == 0)


def cl(theory: HistoriesTheory, partition: Partition) -> list[HomValuation]:
    """Homomorphisms on ``E_partition`` valuing no null event of it as true."""
    if partition.n != theory.n:
        raise SpaceMismatch("partition and theory have different sample spaces")
    null_in_domain = [Z for Z in theory.null_events() if partition.contains_event(Z)]
    return [phi for phi in homs(partition)
            if not any(phi.block & ~Z == 0 for Z in null_in_domain)]


def restrict_hom(phi: HomValuation, coarse: Partition) -> HomValuation:
    """Restriction to the algebra of a coarsening: the block containing phi's block."""
    if coarse.n != phi.partition.n:
        raise SpaceMismatch("partitions over different sample spaces")
    if not refines(phi.partition, coarse):
        raise NotComparable("target partition is not a coarsening of the valuation's partition")
    return HomValuation(coarse, coarse.block_containing(phi.block))


@dataclass(frozen=True)
class ValuationSet:
    kind: str
    members: tuple[HomValuation, ...]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, phi):
        return phi in self.members


def pooled(theory: HistoriesTheory, kind: str, poset: GrainingPoset | None = None) -> ValuationSet:
    """Union of per-partition valuation sets over the matching tagged poset.

    ``V_D``: all homomorphisms over B_D; ``V_C``: preclusive ones over B_D;
    ``V_PD`` and ``V_PD-preclusive`` likewise over B_PD.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    poset = build_poset(theory) if poset is None else poset
    tag = "D" if kind in ("V_D", "V_C") else "PD"
    preclusive = kind in ("V_C", "V_PD-preclusive")
    out = []
    for p in poset.tagged(tag):
        out.extend(cl(theory, p) if preclusive else homs(p))
    return ValuationSet(kind, tuple(out))


def support_relation_check(phi: HomValuation) -> bool:
    """supp(phi) equals supp(block*) cut down to the partition's algebra."""
    full = phi.partition.full
    rest = full & ~phi.block
    dual_support = set()
    S = rest
    while True:
        dual_support.add(phi.block | S)
        if S == 0:
            break
        S = (S - 1) & rest
    if phi.support() != dual_support & phi.partition.events:
        return False
    # phi agrees with block* wherever phi is defined
    return all(phi(B) == int(B in dual_support) for B in phi.partition.events)


@dataclass(frozen=True)
class LogicalFramework:
    """A (domains, valuations, truth values) triple; truth values are always Z2."""

    domains: tuple[Partition, ...]
    valuations: ValuationSet
    truth_values: tuple[int, int] = Z2

    def __post_init__(self):
        homes = set(self.domains)
        for phi in self.valuations:
            if phi.partition not in homes:
                raise ValueError("valuation lives on a partition outside the framework's domains")


def logical_framework(theory: HistoriesTheory, kind: str = "V_D",
                      poset: GrainingPoset | None = None) -> LogicalFramework:
    poset = build_poset(theory) if poset is None else poset
    tag = "D" if kind in ("V_D", "V_C") else "PD"
    return LogicalFramework(poset.tagged(tag), pooled(theory, kind, poset))


def valuations_on(partitions: Iterable[Partition]) -> list[HomValuation]:
    return [phi for p in partitions for phi in homs(p)]


def format_valuation(phi: HomValuation, labels: Sequence[str]) -> str:
    return f"phi[{phi.partition.format(labels)}]^{format_event(phi.block, labels)}"
